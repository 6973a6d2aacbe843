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
#include <cstdio>
#include <map>

#include "byte_reader.hpp"
#include "printproof/metadata.hpp"

namespace printproof::metadata {

namespace {

constexpr std::string_view kChunkHeader("ICC_PROFILE\0", 12);

std::string vendor_name(const std::string& sig) {
    static const std::map<std::string, std::string> names = {
        {"ADBE", "Adobe Systems Inc."},   {"APPL", "Apple Computer Inc."},
        {"MSFT", "Microsoft Corporation"}, {"SGI ", "Silicon Graphics Inc."},
        {"SUNW", "Sun Microsystems Inc."}, {"lcms", "Little CMS"},
        {"KODA", "Kodak"},                 {"HP  ", "Hewlett-Packard"},
    };
    auto it = names.find(sig);
    if (it != names.end()) return it->second;
    std::string trimmed = sig;
    while (!trimmed.empty() && (trimmed.back() == ' ' || trimmed.back() == '\0')) trimmed.pop_back();
    return trimmed.empty() ? "none" : trimmed;
}

std::string device_class_name(const std::string& sig) {
    if (sig == "scnr") return "Input Device Profile";
    if (sig == "mntr") return "Display Device Profile";
    if (sig == "prtr") return "Output Device Profile";
    if (sig == "link") return "DeviceLink Profile";
    if (sig == "spac") return "ColorSpace Conversion Profile";
    if (sig == "abst") return "Abstract Profile";
    if (sig == "nmcl") return "NamedColor Profile";
    return sig;
}

std::string trim_signature(std::string s) {
    while (!s.empty() && (s.back() == ' ' || s.back() == '\0')) s.pop_back();
    return s;
}

double s15fixed16(std::uint32_t raw) {
    return static_cast<double>(static_cast<std::int32_t>(raw)) / 65536.0;
}

std::optional<Xyz> read_xyz(const detail::ByteReader& r, std::uint64_t at) {
    const auto x = r.u32(at), y = r.u32(at + 4), z = r.u32(at + 8);
    if (!x || !y || !z) return std::nullopt;
    return Xyz{s15fixed16(*x), s15fixed16(*y), s15fixed16(*z)};
}

// textDescriptionType ('desc'), textType ('text') or multiLocalizedUnicodeType
// ('mluc', first record, UTF-16BE reduced to ASCII).
std::string read_text_tag(const detail::ByteReader& r, std::uint64_t at, std::uint64_t size) {
    const auto tag = r.slice(at, size);
    if (!tag || size < 8) return {};
    detail::ByteReader t(*tag);
    const std::string type = *t.text(0, 4);
    std::string out;
    if (type == "desc") {
        const auto count = t.u32(8);
        if (!count) return {};
        const auto s = t.text(12, std::min<std::uint64_t>(*count, size > 12 ? size - 12 : 0));
        if (s) out = *s;
    } else if (type == "text") {
        const auto s = t.text(8, size - 8);
        if (s) out = *s;
    } else if (type == "mluc") {
        const auto records = t.u32(8);
        const auto rec_size = t.u32(12);
        if (!records || *records == 0 || !rec_size || *rec_size < 12) return {};
        const auto len = t.u32(16 + 4);
        const auto off = t.u32(16 + 8);
        if (!len || !off) return {};
        for (std::uint64_t i = 0; i + 1 < *len; i += 2) {
            const auto ch = t.u16(*off + i);
            if (!ch) break;
            out.push_back(*ch < 0x80 ? static_cast<char>(*ch) : '?');
        }
    }
    if (auto nul = out.find('\0'); nul != std::string::npos) out.resize(nul);
    return out;
}

}  // namespace

std::string_view to_string(RenderingIntent intent) noexcept {
    switch (intent) {
        case RenderingIntent::perceptual: return "Perceptual";
        case RenderingIntent::relative_colorimetric: return "Media-Relative Colorimetric";
        case RenderingIntent::saturation: return "Saturation";
        case RenderingIntent::absolute_colorimetric: return "ICC-Absolute Colorimetric";
        case RenderingIntent::unknown: return "Unknown";
    }
    return "Unknown";
}

IccSummary parse_icc(const std::vector<ByteView>& app2_chunks) {
    if (app2_chunks.empty()) throw Error(ErrorCode::MissingChunk, "no ICC chunks");
    std::map<int, ByteView> by_index;
    int expected = -1;
    for (ByteView chunk : app2_chunks) {
        detail::ByteReader r(chunk);
        if (!r.starts_with(kChunkHeader) || !r.has(0, 14)) {
            throw Error(ErrorCode::BadProfileSignature, "APP2 chunk lacks the ICC_PROFILE header");
        }
        const int index = *r.u8(12);
        const int count = *r.u8(13);
        if (expected < 0) expected = count;
        if (count != expected) {
            throw Error(ErrorCode::MissingChunk, "ICC chunks disagree on the chunk count");
        }
        if (!by_index.emplace(index, chunk.subspan(14)).second) {
            throw Error(ErrorCode::MissingChunk, "duplicate ICC chunk " + std::to_string(index));
        }
    }
    if (expected < 1 || static_cast<int>(by_index.size()) != expected ||
        by_index.begin()->first != 1 || by_index.rbegin()->first != expected) {
        throw Error(ErrorCode::MissingChunk, "ICC chunk sequence is not 1.." +
                                                 std::to_string(std::max(expected, 0)));
    }
    Bytes profile;
    for (const auto& [index, part] : by_index) profile.insert(profile.end(), part.begin(), part.end());

    detail::ByteReader r(profile);
    if (!r.has(0, 128) || *r.text(36, 4) != "acsp") {
        throw Error(ErrorCode::BadProfileSignature, "ICC profile header lacks 'acsp'");
    }
    IccSummary s;
    s.profile_size = *r.u32(0);
    s.profile_cmm_type = *r.text(4, 4);
    s.cmm_name = vendor_name(s.profile_cmm_type);
    {
        const int major = *r.u8(8);
        const int minor = *r.u8(9) >> 4;
        const int fix = *r.u8(9) & 0x0F;
        s.version = std::to_string(major) + "." + std::to_string(minor) + "." + std::to_string(fix);
    }
    s.device_class = device_class_name(*r.text(12, 4));
    s.color_space = trim_signature(*r.text(16, 4));
    s.connection_space = trim_signature(*r.text(20, 4));
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%04u:%02u:%02u %02u:%02u:%02u", *r.u16(24), *r.u16(26),
                      *r.u16(28), *r.u16(30), *r.u16(32), *r.u16(34));
        s.creation_datetime = buf;
    }
    s.signature = *r.text(36, 4);
    s.platform = vendor_name(*r.text(40, 4));
    switch (*r.u32(64)) {
        case 0: s.rendering_intent = RenderingIntent::perceptual; break;
        case 1: s.rendering_intent = RenderingIntent::relative_colorimetric; break;
        case 2: s.rendering_intent = RenderingIntent::saturation; break;
        case 3: s.rendering_intent = RenderingIntent::absolute_colorimetric; break;
        default: s.rendering_intent = RenderingIntent::unknown; break;
    }
    s.illuminant = *read_xyz(r, 68);
    s.white_point = s.illuminant;
    s.creator = vendor_name(*r.text(80, 4));

    const auto tag_count = r.u32(128);
    if (tag_count) {
        const std::uint32_t n = std::min<std::uint32_t>(*tag_count, 1024);
        for (std::uint32_t i = 0; i < n; ++i) {
            const std::uint64_t at = 132 + 12ull * i;
            if (!r.has(at, 12)) break;
            const std::string sig = *r.text(at, 4);
            const std::uint32_t off = *r.u32(at + 4);
            const std::uint32_t size = *r.u32(at + 8);
            if (!r.has(off, size)) continue;
            if (sig == "desc") {
                s.description = read_text_tag(r, off, size);
            } else if (sig == "cprt") {
                s.copyright = read_text_tag(r, off, size);
            } else if (sig == "wtpt" && size >= 20 && *r.text(off, 4) == "XYZ ") {
                if (auto xyz = read_xyz(r, off + 8)) s.white_point = *xyz;
            }
        }
    }
    return s;
}

}  // namespace printproof::metadata
