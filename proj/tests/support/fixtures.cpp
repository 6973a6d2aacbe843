// Copyright 2026 The printproof Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fixtures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace printproof::testing {

namespace {

class Writer {
public:
    explicit Writer(bool big_endian = true) : big_(big_endian) {}

    void u8(std::uint32_t v) { out_.push_back(static_cast<std::uint8_t>(v)); }
    void u16(std::uint32_t v) {
        if (big_) {
            u8(v >> 8);
            u8(v);
        } else {
            u8(v);
            u8(v >> 8);
        }
    }
    void u32(std::uint32_t v) {
        if (big_) {
            u16(v >> 16);
            u16(v & 0xFFFF);
        } else {
            u16(v & 0xFFFF);
            u16(v >> 16);
        }
    }
    void text(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }
    void bytes(const Bytes& b) { out_.insert(out_.end(), b.begin(), b.end()); }
    void pad_to(std::size_t n) {
        while (out_.size() < n) out_.push_back(0);
    }
    void put_u32_at(std::size_t at, std::uint32_t v) {
        for (int i = 0; i < 4; ++i) {
            const int shift = big_ ? 24 - 8 * i : 8 * i;
            out_[at + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v >> shift);
        }
    }
    [[nodiscard]] std::size_t size() const { return out_.size(); }
    [[nodiscard]] Bytes& data() { return out_; }

private:
    bool big_;
    Bytes out_;
};

Bytes encode_u16(bool big, std::uint16_t v) {
    Writer w(big);
    w.u16(v);
    return w.data();
}

Bytes encode_u32(bool big, std::uint32_t v) {
    Writer w(big);
    w.u32(v);
    return w.data();
}

Bytes encode_rational(bool big, std::uint32_t num, std::uint32_t den) {
    Writer w(big);
    w.u32(num);
    w.u32(den);
    return w.data();
}

Bytes ascii(std::string_view s) {
    Bytes b(s.begin(), s.end());
    b.push_back(0);
    return b;
}

TiffField ascii_field(std::uint16_t tag, std::string_view s) {
    Bytes b = ascii(s);
    const auto n = static_cast<std::uint32_t>(b.size());
    return {tag, 2, n, std::move(b)};
}

// Writes one IFD starting at `at` (offsets relative to the TIFF header);
// values longer than 4 bytes go to an area right after the IFD.
void write_ifd(Writer& w, const std::vector<TiffField>& fields, std::uint32_t next_ifd) {
    const std::size_t start = w.size();
    const std::size_t data_start = start + 2 + 12 * fields.size() + 4;
    std::size_t data_at = data_start;
    w.u16(static_cast<std::uint32_t>(fields.size()));
    std::vector<const TiffField*> deferred;
    for (const auto& f : fields) {
        w.u16(f.tag);
        w.u16(f.type);
        w.u32(f.count);
        if (f.value.size() <= 4) {
            Bytes v = f.value;
            v.resize(4, 0);
            w.bytes(v);
        } else {
            w.u32(static_cast<std::uint32_t>(data_at));
            data_at += f.value.size() + (f.value.size() & 1u);
            deferred.push_back(&f);
        }
    }
    w.u32(next_ifd);
    for (const TiffField* f : deferred) {
        w.bytes(f->value);
        if (f->value.size() & 1u) w.u8(0);
    }
}

std::uint32_t s15(double v) {
    return static_cast<std::uint32_t>(static_cast<std::int32_t>(std::lround(v * 65536.0)));
}

}  // namespace

RasterImage synthetic_photo(int width, int height, std::uint64_t seed, double noise_sigma) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> n(0.0, 1.0);
    const double span = std::max(width, height);
    std::array<std::array<double, 4>, 3> waves{};
    for (auto& w : waves) w = {u(rng) * 3.0, u(rng) * 3.0, u(rng) * 6.0, 40.0 + 30.0 * u(rng)};
    struct Disc {
        double cx, cy, r;
        std::array<double, 3> colour;
    };
    std::vector<Disc> discs(24);
    for (auto& d : discs) {
        d = {u(rng) * width, u(rng) * height, 8.0 + u(rng) * span / 10.0,
             {u(rng) * 255.0, u(rng) * 255.0, u(rng) * 255.0}};
    }
    std::vector<Rgb> px(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            std::array<double, 3> c{};
            for (int k = 0; k < 3; ++k) {
                const auto& w = waves[static_cast<std::size_t>(k)];
                c[static_cast<std::size_t>(k)] =
                    120.0 + w[3] * std::sin(2.0 * std::numbers::pi * (w[0] * x + w[1] * y) / span + w[2]);
            }
            for (const auto& d : discs) {
                if ((x - d.cx) * (x - d.cx) + (y - d.cy) * (y - d.cy) < d.r * d.r) {
                    for (int k = 0; k < 3; ++k) {
                        auto& ck = c[static_cast<std::size_t>(k)];
                        ck = 0.5 * ck + 0.5 * d.colour[static_cast<std::size_t>(k)];
                    }
                }
            }
            Rgb& p = px[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                        static_cast<std::size_t>(x)];
            const auto to8 = [&](double v) {
                return static_cast<std::uint8_t>(std::clamp(std::lround(v + noise_sigma * n(rng)), 0L, 255L));
            };
            p = {to8(c[0]), to8(c[1]), to8(c[2])};
        }
    }
    return RasterImage::from_pixels(width, height, std::move(px));
}

RasterImage uniform_image(int width, int height, Rgb colour) {
    return RasterImage::from_pixels(
        width, height,
        std::vector<Rgb>(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), colour));
}

RasterImage random_image(int width, int height, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Rgb> px(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    for (auto& p : px) {
        const std::uint64_t v = rng();
        p = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
             static_cast<std::uint8_t>(v >> 16)};
    }
    return RasterImage::from_pixels(width, height, std::move(px));
}

Bytes exif_app1(bool big_endian, const std::vector<TiffField>& ifd0,
                const std::vector<TiffField>& exif_ifd) {
    Writer w(big_endian);
    w.text(big_endian ? "MM" : "II");
    w.u16(42);
    w.u32(8);
    std::vector<TiffField> fields = ifd0;
    std::size_t exif_pointer_index = fields.size();
    if (!exif_ifd.empty()) fields.push_back({0x8769, 4, 1, encode_u32(big_endian, 0)});
    std::ranges::sort(fields, {}, &TiffField::tag);
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i].tag == 0x8769) exif_pointer_index = i;
    }
    write_ifd(w, fields, 0);
    if (!exif_ifd.empty()) {
        const auto exif_at = static_cast<std::uint32_t>(w.size());
        // Patch the pointer's value slot: entry i starts at 8 + 2 + 12 i.
        w.put_u32_at(8 + 2 + 12 * exif_pointer_index + 8, exif_at);
        std::vector<TiffField> sub = exif_ifd;
        std::ranges::sort(sub, {}, &TiffField::tag);
        write_ifd(w, sub, 0);
    }
    const Bytes& tiff = w.data();
    Bytes out(6 + tiff.size());
    const std::array<std::uint8_t, 6> header{'E', 'x', 'i', 'f', 0, 0};
    std::copy(header.begin(), header.end(), out.begin());
    std::copy(tiff.begin(), tiff.end(), out.begin() + 6);
    return out;
}

Bytes sample_exif_app1(bool big_endian) {
    const std::vector<TiffField> ifd0 = {
        {0x011A, 5, 1, encode_rational(big_endian, 166, 1)},
        {0x011B, 5, 1, encode_rational(big_endian, 166, 1)},
        {0x0128, 3, 1, encode_u16(big_endian, 2)},
        ascii_field(0x0131, "Adobe Photoshop CS4 Macintosh"),
        ascii_field(0x0132, "2011:02:17 16:21:41"),
    };
    const std::vector<TiffField> exif = {
        ascii_field(0x9003, "2011:02:17 16:21:41"),
        {0xA001, 3, 1, encode_u16(big_endian, 0xFFFF)},
    };
    return exif_app1(big_endian, ifd0, exif);
}

Bytes iptc_app13(const std::vector<IimDataset>& datasets, const Bytes& digest) {
    Writer iim;
    for (const auto& d : datasets) {
        iim.u8(0x1C);
        iim.u8(static_cast<std::uint32_t>(d.record));
        iim.u8(static_cast<std::uint32_t>(d.dataset));
        iim.u16(static_cast<std::uint32_t>(d.value.size()));
        iim.text(d.value);
    }
    Writer w;
    w.text(std::string_view("Photoshop 3.0\0", 14));
    const auto resource = [&](std::uint16_t id, const Bytes& data) {
        w.text("8BIM");
        w.u16(id);
        w.u8(0);  // empty Pascal name, padded to even length
        w.u8(0);
        w.u32(static_cast<std::uint32_t>(data.size()));
        w.bytes(data);
        if (data.size() & 1u) w.u8(0);
    };
    resource(0x0404, iim.data());
    if (!digest.empty()) resource(0x0425, digest);
    return w.data();
}

Bytes sample_iptc_app13() {
    Bytes digest(16);
    for (std::size_t i = 0; i < digest.size(); ++i) digest[i] = static_cast<std::uint8_t>(0x11 * i);
    return iptc_app13({{2, 0, std::string("\x00\x04", 2)},
                       {2, 55, "20110217"},
                       {2, 60, "162141+0000"},
                       {2, 65, "Adobe Photoshop CS4 Macintosh"}},
                      digest);
}

Bytes adobe_rgb_profile() {
    Writer desc;
    const std::string name = "Adobe RGB (1998)";
    desc.text("desc");
    desc.u32(0);
    desc.u32(static_cast<std::uint32_t>(name.size() + 1));
    desc.text(name);
    desc.u8(0);
    desc.u32(0);  // unicode language
    desc.u32(0);  // unicode count
    desc.u16(0);  // scriptcode code
    desc.u8(0);   // scriptcode count
    desc.pad_to(desc.size() + 67);

    Writer cprt;
    cprt.text("text");
    cprt.u32(0);
    cprt.text("Copyright 1999 Adobe Systems Incorporated");
    cprt.u8(0);

    Writer wtpt;
    wtpt.text("XYZ ");
    wtpt.u32(0);
    wtpt.u32(s15(0.9505));
    wtpt.u32(s15(1.0));
    wtpt.u32(s15(1.0891));

    struct Tag {
        const char* sig;
        Bytes data;
    };
    const std::vector<Tag> tags = {{"desc", desc.data()}, {"cprt", cprt.data()}, {"wtpt", wtpt.data()}};

    Writer p;
    p.u32(0);  // size, patched below
    p.text("ADBE");
    p.u32(0x02100000);
    p.text("mntr");
    p.text("RGB ");
    p.text("XYZ ");
    for (std::uint32_t v : {1999u, 6u, 3u, 0u, 0u, 0u}) p.u16(v);
    p.text("acsp");
    p.text("APPL");
    p.u32(0);  // flags
    p.text("none");
    p.u32(0);  // model
    p.u32(0);  // attributes
    p.u32(0);
    p.u32(0);  // rendering intent: perceptual
    p.u32(s15(0.9642));
    p.u32(s15(1.0));
    p.u32(s15(0.8249));
    p.text("ADBE");
    p.pad_to(128);
    p.u32(static_cast<std::uint32_t>(tags.size()));
    std::size_t data_at = 128 + 4 + 12 * tags.size();
    for (const auto& t : tags) {
        p.text(t.sig);
        p.u32(static_cast<std::uint32_t>(data_at));
        p.u32(static_cast<std::uint32_t>(t.data.size()));
        data_at += (t.data.size() + 3) & ~std::size_t{3};
    }
    for (const auto& t : tags) {
        p.bytes(t.data);
        p.pad_to((p.size() + 3) & ~std::size_t{3});
    }
    p.put_u32_at(0, static_cast<std::uint32_t>(p.size()));
    return p.data();
}

std::vector<Bytes> icc_app2_chunks(const Bytes& profile, std::size_t chunk) {
    const std::size_t count = (profile.size() + chunk - 1) / chunk;
    std::vector<Bytes> out;
    for (std::size_t i = 0; i < count; ++i) {
        Bytes b = {'I', 'C', 'C', '_', 'P', 'R', 'O', 'F', 'I', 'L', 'E', 0};
        b.push_back(static_cast<std::uint8_t>(i + 1));
        b.push_back(static_cast<std::uint8_t>(count));
        const std::size_t begin = i * chunk;
        const std::size_t end = std::min(profile.size(), begin + chunk);
        b.insert(b.end(), profile.begin() + static_cast<std::ptrdiff_t>(begin),
                 profile.begin() + static_cast<std::ptrdiff_t>(end));
        out.push_back(std::move(b));
    }
    return out;
}

Bytes annotated_fixture_jpeg(int width, int height, bool progressive, std::uint64_t seed) {
    JpegEncodeOptions opts;
    opts.quality = 85;
    opts.progressive = progressive;
    opts.markers.push_back({0xE1, sample_exif_app1(false)});
    opts.markers.push_back({0xED, sample_iptc_app13()});
    const Bytes profile = adobe_rgb_profile();
    for (auto& c : icc_app2_chunks(profile, (profile.size() + 1) / 2)) {
        opts.markers.push_back({0xE2, std::move(c)});
    }
    const std::string comment = kFixtureComment;
    opts.markers.push_back({0xFE, Bytes(comment.begin(), comment.end())});
    return encode_jpeg(synthetic_photo(width, height, seed), opts);
}

SpliceFixture splice_fixture(int width, int height, int patch_quality, std::uint64_t seed) {
    JpegEncodeOptions base_opts;
    base_opts.quality = 90;
    const RasterImage base = load_image(encode_jpeg(synthetic_photo(width, height, seed), base_opts));
    JpegEncodeOptions patch_opts;
    patch_opts.quality = patch_quality;
    const RasterImage donor =
        load_image(encode_jpeg(synthetic_photo(width, height, seed ^ 0x9E3779B97F4A7C15ull), patch_opts));

    std::mt19937_64 rng(seed);
    const int size = std::min(width, height) / 5;
    const int x0 = static_cast<int>(rng() % static_cast<std::uint64_t>(width - size - 16)) | 3;
    const int y0 = static_cast<int>(rng() % static_cast<std::uint64_t>(height - size - 16)) | 3;
    std::vector<Rgb> px(base.pixels().begin(), base.pixels().end());
    for (int y = y0; y < y0 + size; ++y) {
        for (int x = x0; x < x0 + size; ++x) {
            px[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)] =
                donor.at(x - x0 + 12, y - y0 + 12);
        }
    }
    return {RasterImage::from_pixels(width, height, std::move(px)), x0, y0, size, patch_quality};
}

}  // namespace printproof::testing
