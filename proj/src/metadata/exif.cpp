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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <set>
#include <sstream>

#include "byte_reader.hpp"
#include "printproof/metadata.hpp"

namespace printproof::metadata {

namespace {

constexpr std::size_t kMaxEntriesPerIfd = 1024;

std::uint64_t type_size(std::uint16_t type) {
    switch (type) {
        case 1: case 2: case 6: case 7: return 1;
        case 3: case 8: return 2;
        case 4: case 9: case 11: return 4;
        case 5: case 10: case 12: return 8;
        default: return 0;
    }
}

std::string trim_nuls(std::string s) {
    while (!s.empty() && (s.back() == '\0' || s.back() == ' ')) s.pop_back();
    // Embedded NUL terminates the string.
    if (auto nul = s.find('\0'); nul != std::string::npos) s.resize(nul);
    return s;
}

float bits_to_float(std::uint32_t bits) {
    float f = 0;
    std::memcpy(&f, &bits, sizeof f);
    return f;
}

double bits_to_double(std::uint64_t bits) {
    double d = 0;
    std::memcpy(&d, &bits, sizeof d);
    return d;
}

ExifValue decode_value(const detail::ByteReader& r, std::uint16_t type, std::uint32_t count,
                       std::uint64_t at) {
    switch (type) {
        case 2: {
            return trim_nuls(*r.text(at, count));
        }
        case 1: {
            std::vector<std::uint64_t> v;
            for (std::uint32_t i = 0; i < count; ++i) v.push_back(*r.u8(at + i));
            return v;
        }
        case 3: {
            std::vector<std::uint64_t> v;
            for (std::uint32_t i = 0; i < count; ++i) v.push_back(*r.u16(at + 2ull * i));
            return v;
        }
        case 4: {
            std::vector<std::uint64_t> v;
            for (std::uint32_t i = 0; i < count; ++i) v.push_back(*r.u32(at + 4ull * i));
            return v;
        }
        case 6: {
            std::vector<std::int64_t> v;
            for (std::uint32_t i = 0; i < count; ++i) v.push_back(static_cast<std::int8_t>(*r.u8(at + i)));
            return v;
        }
        case 8: {
            std::vector<std::int64_t> v;
            for (std::uint32_t i = 0; i < count; ++i)
                v.push_back(static_cast<std::int16_t>(*r.u16(at + 2ull * i)));
            return v;
        }
        case 9: {
            std::vector<std::int64_t> v;
            for (std::uint32_t i = 0; i < count; ++i)
                v.push_back(static_cast<std::int32_t>(*r.u32(at + 4ull * i)));
            return v;
        }
        case 5: {
            std::vector<URational> v;
            for (std::uint32_t i = 0; i < count; ++i)
                v.push_back({*r.u32(at + 8ull * i), *r.u32(at + 8ull * i + 4)});
            return v;
        }
        case 10: {
            std::vector<SRational> v;
            for (std::uint32_t i = 0; i < count; ++i)
                v.push_back({static_cast<std::int32_t>(*r.u32(at + 8ull * i)),
                             static_cast<std::int32_t>(*r.u32(at + 8ull * i + 4))});
            return v;
        }
        case 11: {
            std::vector<double> v;
            for (std::uint32_t i = 0; i < count; ++i) v.push_back(bits_to_float(*r.u32(at + 4ull * i)));
            return v;
        }
        case 12: {
            std::vector<double> v;
            for (std::uint32_t i = 0; i < count; ++i) {
                const std::uint64_t first = *r.u32(at + 8ull * i);
                const std::uint64_t second = *r.u32(at + 8ull * i + 4);
                v.push_back(bits_to_double(r.big_endian() ? (first << 32) | second
                                                          : (second << 32) | first));
            }
            return v;
        }
        default: {
            auto s = r.slice(at, count);
            return Bytes(s->begin(), s->end());
        }
    }
}

class ExifParser {
public:
    ExifParser(ByteView tiff, bool big_endian, ExifData& out)
        : r_(tiff, big_endian), out_(out) {}

    void parse_ifd(std::uint64_t offset, ExifIfd ifd) {
        if (!visited_.insert(offset).second) {
            warn("IFD loop at offset " + std::to_string(offset));
            return;
        }
        const auto count = r_.u16(offset);
        if (!count) {
            warn(std::string(to_string(ifd)) + " offset " + std::to_string(offset) +
                 " out of bounds");
            return;
        }
        if (*count > kMaxEntriesPerIfd) {
            warn(std::string(to_string(ifd)) + " claims " + std::to_string(*count) + " entries");
            return;
        }
        std::vector<std::pair<std::uint64_t, ExifIfd>> children;
        for (std::uint32_t i = 0; i < *count; ++i) {
            const std::uint64_t at = offset + 2 + 12ull * i;
            if (!r_.has(at, 12)) {
                warn(std::string(to_string(ifd)) + " entry " + std::to_string(i) +
                     " runs past end of payload");
                break;
            }
            const std::uint16_t tag = *r_.u16(at);
            const std::uint16_t type = *r_.u16(at + 2);
            const std::uint32_t n = *r_.u32(at + 4);
            const std::uint64_t unit = type_size(type);
            const std::uint64_t bytes = unit ? unit * n : n;
            std::uint64_t value_at = at + 8;
            if (bytes > 4) value_at = *r_.u32(at + 8);
            if (!r_.has(value_at, bytes)) {
                warn("tag 0x" + hex16(tag) + " value offset " + std::to_string(value_at) +
                     " out of bounds");
                continue;
            }
            ExifEntry e;
            e.tag = tag;
            e.ifd = ifd;
            e.type = type;
            e.count = n;
            if (tag == exif_tag::MakerNote) {
                auto s = r_.slice(value_at, bytes);
                e.value = Bytes(s->begin(), s->end());
            } else {
                e.value = decode_value(r_, unit ? type : 7, n, value_at);
            }
            if (ifd == ExifIfd::IFD0 && (tag == exif_tag::ExifOffset || tag == exif_tag::GpsOffset)) {
                if (const auto* v = std::get_if<std::vector<std::uint64_t>>(&e.value); v && !v->empty()) {
                    children.emplace_back(v->front(), tag == exif_tag::ExifOffset ? ExifIfd::ExifIFD
                                                                                 : ExifIfd::GPS);
                }
            }
            out_.entries.push_back(std::move(e));
        }
        for (const auto& [child, kind] : children) parse_ifd(child, kind);
    }

private:
    static std::string hex16(std::uint16_t v) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "%04X", v);
        return buf;
    }

    void warn(std::string msg) {
        out_.warnings.push_back({ErrorCode::IfdOffsetOutOfBounds, std::move(msg)});
    }

    detail::ByteReader r_;
    ExifData& out_;
    std::set<std::uint64_t> visited_;
};

}  // namespace

std::string_view to_string(ExifIfd ifd) noexcept {
    switch (ifd) {
        case ExifIfd::IFD0: return "IFD0";
        case ExifIfd::ExifIFD: return "ExifIFD";
        case ExifIfd::GPS: return "GPS";
    }
    return "IFD0";
}

const ExifEntry* ExifData::find(std::uint16_t tag) const {
    for (const auto& e : entries) {
        if (e.tag == tag) return &e;
    }
    return nullptr;
}

ExifData parse_exif(ByteView app1_payload) {
    detail::ByteReader outer(app1_payload);
    if (!outer.starts_with(std::string_view("Exif\0\0", 6))) {
        throw Error(ErrorCode::BadTiffHeader, "APP1 payload lacks the Exif header");
    }
    const ByteView tiff = app1_payload.subspan(6);
    detail::ByteReader probe(tiff);
    bool big_endian = false;
    if (probe.starts_with("MM")) {
        big_endian = true;
    } else if (!probe.starts_with("II")) {
        throw Error(ErrorCode::BadTiffHeader, "unknown TIFF byte order");
    }
    detail::ByteReader r(tiff, big_endian);
    const auto magic = r.u16(2);
    const auto ifd0 = r.u32(4);
    if (!magic || *magic != 42 || !ifd0) {
        throw Error(ErrorCode::BadTiffHeader, "bad TIFF magic");
    }
    ExifData out;
    out.big_endian = big_endian;
    ExifParser(tiff, big_endian, out).parse_ifd(*ifd0, ExifIfd::IFD0);
    return out;
}

std::string exif_tag_name(std::uint16_t tag, ExifIfd ifd) {
    if (ifd == ExifIfd::GPS) {
        switch (tag) {
            case 0x0000: return "GPS Version ID";
            case 0x0001: return "GPS Latitude Ref";
            case 0x0002: return "GPS Latitude";
            case 0x0003: return "GPS Longitude Ref";
            case 0x0004: return "GPS Longitude";
            case 0x0005: return "GPS Altitude Ref";
            case 0x0006: return "GPS Altitude";
            case 0x0007: return "GPS Time Stamp";
            case 0x001D: return "GPS Date Stamp";
            default: break;
        }
    }
    switch (tag) {
        case 0x010E: return "Image Description";
        case 0x010F: return "Make";
        case 0x0110: return "Camera Model Name";
        case 0x0112: return "Orientation";
        case 0x011A: return "X Resolution";
        case 0x011B: return "Y Resolution";
        case 0x0128: return "Resolution Unit";
        case 0x0131: return "Software";
        case 0x0132: return "Modify Date";
        case 0x013B: return "Artist";
        case 0x0213: return "Y Cb Cr Positioning";
        case 0x8298: return "Copyright";
        case 0x8769: return "Exif Offset";
        case 0x8825: return "GPS Info";
        case 0x829A: return "Exposure Time";
        case 0x829D: return "F Number";
        case 0x8822: return "Exposure Program";
        case 0x8827: return "ISO";
        case 0x9000: return "Exif Version";
        case 0x9003: return "Date/Time Original";
        case 0x9004: return "Create Date";
        case 0x9010: return "Offset Time";
        case 0x9011: return "Offset Time Original";
        case 0x9201: return "Shutter Speed Value";
        case 0x9202: return "Aperture Value";
        case 0x9204: return "Exposure Compensation";
        case 0x9207: return "Metering Mode";
        case 0x9209: return "Flash";
        case 0x920A: return "Focal Length";
        case 0x927C: return "Maker Note";
        case 0x9286: return "User Comment";
        case 0xA000: return "Flashpix Version";
        case 0xA001: return "Color Space";
        case 0xA002: return "Exif Image Width";
        case 0xA003: return "Exif Image Height";
        case 0xA005: return "Interop Offset";
        case 0xA402: return "Exposure Mode";
        case 0xA403: return "White Balance";
        case 0xA405: return "Focal Length In 35mm Format";
        case 0xA406: return "Scene Capture Type";
        default: break;
    }
    char buf[16];
    std::snprintf(buf, sizeof buf, "Exif 0x%04x", tag);
    return buf;
}

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

template <typename R>
std::string format_rational(const R& r) {
    if (r.den == 0) return r.num == 0 ? "undef" : "inf";
    if (r.num % r.den == 0) return std::to_string(r.num / r.den);
    return format_double(static_cast<double>(r.num) / static_cast<double>(r.den));
}

}  // namespace

std::string format_exif_value(const ExifEntry& entry) {
    if (entry.tag == exif_tag::ResolutionUnit) {
        if (const auto* v = std::get_if<std::vector<std::uint64_t>>(&entry.value); v && !v->empty()) {
            switch ((*v)[0]) {
                case 1: return "None";
                case 2: return "inches";
                case 3: return "cm";
                default: break;
            }
        }
    }
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) {
                return v;
            } else if constexpr (std::is_same_v<T, Bytes>) {
                const bool printable = !v.empty() && std::all_of(v.begin(), v.end(), [](auto b) {
                    return (b >= 0x20 && b < 0x7F) || b == 0;
                });
                if (printable) return trim_nuls(std::string(v.begin(), v.end()));
                return "(Binary data " + std::to_string(v.size()) + " bytes)";
            } else {
                std::ostringstream os;
                bool first = true;
                for (const auto& x : v) {
                    if (!first) os << ' ';
                    first = false;
                    if constexpr (std::is_same_v<T, std::vector<URational>> ||
                                  std::is_same_v<T, std::vector<SRational>>) {
                        os << format_rational(x);
                    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
                        os << format_double(x);
                    } else {
                        os << x;
                    }
                }
                return os.str();
            }
        },
        entry.value);
}

}  // namespace printproof::metadata
