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

#include <cmath>
#include <cstdio>
#include <sstream>

#include "byte_reader.hpp"
#include "printproof/metadata.hpp"

namespace printproof::metadata {

namespace {

using nlohmann::json;

// Metadata strings are frequently Latin-1; JSON output must be UTF-8.
std::string to_utf8(const std::string& in) {
    try {
        (void)json(in).dump();
        return in;
    } catch (const json::type_error&) {
    }
    std::string out;
    for (unsigned char c : in) {
        if (c < 0x80) {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back(static_cast<char>(0xC0 | (c >> 6)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        }
    }
    return out;
}

std::string hex_bytes(ByteView b) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(b.size() * 2);
    for (auto v : b) {
        out.push_back(digits[v >> 4]);
        out.push_back(digits[v & 0x0F]);
    }
    return out;
}

std::string marker_hex(std::uint16_t m) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "0x%04X", m);
    return buf;
}

std::string resolution_unit_name(int units) {
    switch (units) {
        case 1: return "inches";
        case 2: return "cm";
        default: return "None";
    }
}

std::string format_file_size(std::uint64_t size) {
    char buf[32];
    if (size < 2048) {
        std::snprintf(buf, sizeof buf, "%llu bytes", static_cast<unsigned long long>(size));
    } else if (size < 10240) {
        std::snprintf(buf, sizeof buf, "%.1f kB", static_cast<double>(size) / 1024.0);
    } else if (size < 2097152) {
        std::snprintf(buf, sizeof buf, "%.0f kB", static_cast<double>(size) / 1024.0);
    } else {
        std::snprintf(buf, sizeof buf, "%.1f MB", static_cast<double>(size) / 1048576.0);
    }
    return buf;
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void summarize_png(ByteView bytes, MetadataSummary& s) {
    s.mime = "image/png";
    s.file_type = "PNG";
    detail::ByteReader r(bytes);
    if (!r.has(8, 25) || *r.text(12, 4) != "IHDR") {
        s.warnings.push_back({ErrorCode::CorruptStream, "PNG lacks an IHDR chunk"});
        return;
    }
    s.width = static_cast<int>(std::min<std::uint32_t>(*r.u32(16), 0x7FFFFFFF));
    s.height = static_cast<int>(std::min<std::uint32_t>(*r.u32(20), 0x7FFFFFFF));
    s.bits_per_sample = *r.u8(24);
    switch (*r.u8(25)) {
        case 0: s.color_components = 1; break;
        case 2: s.color_components = 3; break;
        case 3: s.color_components = 1; break;
        case 4: s.color_components = 2; break;
        case 6: s.color_components = 4; break;
        default: s.color_components = 0; break;
    }
}

void summarize_jpeg(ByteView bytes, MetadataSummary& s) {
    s.mime = "image/jpeg";
    s.file_type = "JPEG";
    const SegmentTree tree = parse_segments(bytes);
    s.warnings.insert(s.warnings.end(), tree.warnings.begin(), tree.warnings.end());
    for (const auto& seg : tree.segments) {
        s.segments.push_back({segment_kind_name(seg.kind, seg.app_index), seg.marker, seg.offset,
                              seg.length});
    }

    for (const Segment* app0 : tree.find_app(0)) {
        detail::ByteReader r(app0->payload);
        if (!r.starts_with(std::string_view("JFIF\0", 5)) || !r.has(0, 12)) continue;
        JfifInfo j;
        char buf[16];
        std::snprintf(buf, sizeof buf, "%u.%02u", *r.u8(5), *r.u8(6));
        j.version = buf;
        j.units = *r.u8(7);
        j.x_density = *r.u16(8);
        j.y_density = *r.u16(10);
        s.jfif = j;
        break;
    }

    try {
        EncodingInfo info = detect_encoding(tree);
        s.width = info.width;
        s.height = info.height;
        s.bits_per_sample = info.bits;
        s.color_components = info.components;
        s.frame = std::move(info);
    } catch (const Error& e) {
        s.warnings.push_back({e.code(), e.what()});
    }

    if (auto coms = tree.find(SegmentKind::COM); !coms.empty()) {
        std::string c(coms.front()->payload.begin(), coms.front()->payload.end());
        while (!c.empty() && c.back() == '\0') c.pop_back();
        s.comment = std::move(c);
    }

    for (const Segment* app1 : tree.find_app(1)) {
        detail::ByteReader r(app1->payload);
        if (!r.starts_with(std::string_view("Exif\0\0", 6))) continue;
        try {
            s.exif = parse_exif(app1->payload);
            s.warnings.insert(s.warnings.end(), s.exif.warnings.begin(), s.exif.warnings.end());
        } catch (const Error& e) {
            s.warnings.push_back({e.code(), e.what()});
        }
        break;
    }

    for (const Segment* app13 : tree.find_app(13)) {
        detail::ByteReader r(app13->payload);
        if (!r.starts_with(std::string_view("Photoshop 3.0\0", 14))) continue;
        IptcData part = parse_iptc(app13->payload);
        s.iptc.records.insert(s.iptc.records.end(), part.records.begin(), part.records.end());
        if (part.digest) s.iptc.digest = part.digest;
        for (const auto& w : part.warnings) {
            // A Photoshop block without IPTC is ordinary, not worth a warning.
            if (w.code != ErrorCode::NoIptcResource) s.warnings.push_back(w);
        }
    }

    std::vector<ByteView> icc_chunks;
    for (const Segment* app2 : tree.find_app(2)) {
        detail::ByteReader r(app2->payload);
        if (r.starts_with(std::string_view("ICC_PROFILE\0", 12))) icc_chunks.emplace_back(app2->payload);
    }
    if (!icc_chunks.empty()) {
        try {
            s.icc = parse_icc(icc_chunks);
        } catch (const Error& e) {
            s.warnings.push_back({e.code(), e.what()});
        }
    }

    try {
        s.quality = estimate_quality(tree);
    } catch (const Error& e) {
        s.warnings.push_back({e.code(), e.what()});
    }
}

json exif_value_json(const ExifValue& value) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) {
                return to_utf8(v);
            } else if constexpr (std::is_same_v<T, Bytes>) {
                return json{{"hex", hex_bytes(v)}};
            } else if constexpr (std::is_same_v<T, std::vector<URational>> ||
                                 std::is_same_v<T, std::vector<SRational>>) {
                json arr = json::array();
                for (const auto& r : v) arr.push_back(json::array({r.num, r.den}));
                return arr;
            } else {
                return json(v);
            }
        },
        value);
}

}  // namespace

double megapixels(int width, int height) noexcept {
    const double mp = static_cast<double>(width) * static_cast<double>(height) / 1e6;
    return std::round(mp * 1000.0) / 1000.0;
}

MetadataSummary summarize(ByteView bytes) {
    MetadataSummary s;
    s.file_size = bytes.size();
    s.file_hash = compute_hash(bytes);
    static constexpr std::uint8_t png_sig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    if (bytes.size() >= 8 && std::equal(png_sig, png_sig + 8, bytes.begin())) {
        summarize_png(bytes, s);
    } else {
        summarize_jpeg(bytes, s);
    }
    s.image_size = std::to_string(s.width) + "x" + std::to_string(s.height);
    s.megapixels = megapixels(s.width, s.height);
    return s;
}

std::string format_listing(const MetadataSummary& s) {
    std::ostringstream os;
    auto line = [&os](const std::string& name, const std::string& value) {
        os << name;
        for (std::size_t i = name.size(); i < 32; ++i) os << ' ';
        os << ": " << value << '\n';
    };
    line("File Size", format_file_size(s.file_size));
    line("File Type", s.file_type);
    line("File Type Extension", s.file_type == "PNG" ? "png" : "jpg");
    line("MIME Type", s.mime);
    line("SHA-256", s.file_hash.hex());
    if (s.iptc.digest) line("Current IPTC Digest", hex_bytes(*s.iptc.digest));
    for (const auto& rec : s.iptc.records) {
        if (rec.record == 2 && rec.dataset == 0) continue;
        line(rec.name, rec.value);
    }
    if (s.jfif) {
        line("JFIF Version", s.jfif->version);
        line("Resolution Unit", resolution_unit_name(s.jfif->units));
        line("X Resolution", std::to_string(s.jfif->x_density));
        line("Y Resolution", std::to_string(s.jfif->y_density));
    }
    for (const auto& e : s.exif.entries) {
        if (e.tag == exif_tag::ExifOffset || e.tag == exif_tag::GpsOffset) continue;
        line(exif_tag_name(e.tag, e.ifd), format_exif_value(e));
    }
    if (s.icc) {
        const auto& icc = *s.icc;
        line("Profile CMM Type", icc.cmm_name);
        line("Profile Version", icc.version);
        line("Profile Class", icc.device_class);
        line("Color Space Data", icc.color_space);
        line("Profile Connection Space", icc.connection_space);
        line("Profile Date Time", icc.creation_datetime);
        line("Profile File Signature", icc.signature);
        line("Primary Platform", icc.platform);
        line("Rendering Intent", std::string(to_string(icc.rendering_intent)));
        line("Connection Space Illuminant", format_number(icc.illuminant.x) + " " +
                                                format_number(icc.illuminant.y) + " " +
                                                format_number(icc.illuminant.z));
        line("Profile Creator", icc.creator);
        if (!icc.copyright.empty()) line("Profile Copyright", icc.copyright);
        line("Profile Description", icc.description);
        line("Media White Point", format_number(icc.white_point.x) + " " +
                                      format_number(icc.white_point.y) + " " +
                                      format_number(icc.white_point.z));
    }
    if (s.comment) line("Comment", *s.comment);
    line("Image Width", std::to_string(s.width));
    line("Image Height", std::to_string(s.height));
    if (s.frame) line("Encoding Process", s.frame->encoding_process);
    line("Bits Per Sample", std::to_string(s.bits_per_sample));
    line("Color Components", std::to_string(s.color_components));
    if (s.frame && !s.frame->subsampling.empty()) line("Y Cb Cr Sub Sampling", s.frame->subsampling);
    line("Image Size", s.image_size);
    char mp[32];
    std::snprintf(mp, sizeof mp, "%.3f", s.megapixels);
    line("Megapixels", mp);
    if (auto date = s.iptc.first(2, 55)) {
        if (auto time = s.iptc.first(2, 60)) line("Date/Time Created", *date + " " + *time);
    }
    if (s.quality) {
        line("JPEG Quality Estimate",
             std::to_string(s.quality->quality) +
                 (s.quality->confidence == QualityConfidence::exact ? " (exact)" : " (approximate)"));
    }
    for (const auto& w : s.warnings) {
        line("Warning", "[" + std::string(error_code_name(w.code)) + "] " + w.message);
    }
    return os.str();
}

json to_json(const MetadataSummary& s) {
    json out;
    out["file"] = {{"size", s.file_size},
                   {"hash", s.file_hash.hex()},
                   {"mime", s.mime},
                   {"type", s.file_type}};
    if (s.jfif) {
        out["jfif"] = {{"version", s.jfif->version},
                       {"resolution_unit", resolution_unit_name(s.jfif->units)},
                       {"x_resolution", s.jfif->x_density},
                       {"y_resolution", s.jfif->y_density}};
    } else {
        out["jfif"] = nullptr;
    }
    json sof = {{"width", s.width},
                {"height", s.height},
                {"bits_per_sample", s.bits_per_sample},
                {"color_components", s.color_components},
                {"image_size", s.image_size},
                {"megapixels", s.megapixels}};
    if (s.frame) {
        sof["marker"] = marker_hex(s.frame->sof_marker);
        sof["encoding_process"] = s.frame->encoding_process;
        sof["subsampling"] = s.frame->subsampling;
        json sampling = json::array();
        for (const auto& c : s.frame->sampling) {
            sampling.push_back({{"id", c.id}, {"h", c.h}, {"v", c.v}, {"quant_table", c.quant_table}});
        }
        sof["sampling"] = sampling;
    }
    out["sof"] = sof;

    json exif = json::array();
    for (const auto& e : s.exif.entries) {
        exif.push_back({{"tag", e.tag},
                        {"name", exif_tag_name(e.tag, e.ifd)},
                        {"ifd", std::string(to_string(e.ifd))},
                        {"type", e.type},
                        {"count", e.count},
                        {"value", exif_value_json(e.value)},
                        {"display", to_utf8(format_exif_value(e))}});
    }
    out["exif"] = exif;

    json iptc = json::array();
    for (const auto& r : s.iptc.records) {
        iptc.push_back({{"record", r.record},
                        {"dataset", r.dataset},
                        {"name", r.name},
                        {"value", to_utf8(r.value)}});
    }
    out["iptc"] = iptc;
    out["iptc_digest"] = s.iptc.digest ? json(hex_bytes(*s.iptc.digest)) : json(nullptr);

    if (s.icc) {
        const auto& icc = *s.icc;
        out["icc"] = {{"profile_cmm_type", to_utf8(icc.profile_cmm_type)},
                      {"cmm_name", to_utf8(icc.cmm_name)},
                      {"version", icc.version},
                      {"device_class", to_utf8(icc.device_class)},
                      {"color_space", to_utf8(icc.color_space)},
                      {"connection_space", to_utf8(icc.connection_space)},
                      {"description", to_utf8(icc.description)},
                      {"copyright", to_utf8(icc.copyright)},
                      {"creation_datetime", icc.creation_datetime},
                      {"signature", to_utf8(icc.signature)},
                      {"platform", to_utf8(icc.platform)},
                      {"creator", to_utf8(icc.creator)},
                      {"rendering_intent", std::string(to_string(icc.rendering_intent))},
                      {"illuminant", {icc.illuminant.x, icc.illuminant.y, icc.illuminant.z}},
                      {"white_point", {icc.white_point.x, icc.white_point.y, icc.white_point.z}},
                      {"profile_size", icc.profile_size}};
    } else {
        out["icc"] = nullptr;
    }
    if (s.quality) {
        out["dqt"] = {{"quality", s.quality->quality},
                      {"confidence", s.quality->confidence == QualityConfidence::exact
                                         ? "exact"
                                         : "approximate"}};
    } else {
        out["dqt"] = nullptr;
    }
    out["comment"] = s.comment ? json(to_utf8(*s.comment)) : json(nullptr);

    json segs = json::array();
    for (const auto& seg : s.segments) {
        segs.push_back({{"kind", seg.kind},
                        {"marker", marker_hex(seg.marker)},
                        {"offset", seg.offset},
                        {"length", seg.length}});
    }
    out["segments"] = segs;
    json warnings = json::array();
    for (const auto& w : s.warnings) {
        warnings.push_back({{"code", std::string(error_code_name(w.code))},
                            {"message", to_utf8(w.message)}});
    }
    out["warnings"] = warnings;
    return out;
}

}  // namespace printproof::metadata
