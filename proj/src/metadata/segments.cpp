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

#include "byte_reader.hpp"
#include "printproof/metadata.hpp"

namespace printproof::metadata {

namespace {

bool is_standalone(std::uint8_t code) {
    return code == 0xD8 || code == 0xD9 || code == 0x01 || (code >= 0xD0 && code <= 0xD7);
}

bool is_rst(std::uint8_t code) { return code >= 0xD0 && code <= 0xD7; }

bool is_sof(std::uint8_t code) {
    return code >= 0xC0 && code <= 0xCF && code != 0xC4 && code != 0xC8 && code != 0xCC;
}

SegmentKind classify(std::uint8_t code, int& app_index) {
    app_index = -1;
    switch (code) {
        case 0xD8: return SegmentKind::SOI;
        case 0xD9: return SegmentKind::EOI;
        case 0xDB: return SegmentKind::DQT;
        case 0xC0: return SegmentKind::SOF0;
        case 0xC2: return SegmentKind::SOF2;
        case 0xC4: return SegmentKind::DHT;
        case 0xDA: return SegmentKind::SOS;
        case 0xFE: return SegmentKind::COM;
        default: break;
    }
    if (code >= 0xE0 && code <= 0xEF) {
        app_index = code - 0xE0;
        return SegmentKind::APPn;
    }
    return SegmentKind::other;
}

Bytes copy_range(ByteView bytes, std::size_t begin, std::size_t end) {
    return Bytes(bytes.begin() + static_cast<std::ptrdiff_t>(begin),
                 bytes.begin() + static_cast<std::ptrdiff_t>(end));
}

// Index of the 0xFF that introduces the next marker after entropy-coded data
// starting at `pos`, skipping byte stuffing (FF 00), RSTn and fill bytes.
// Returns bytes.size() when the data runs to EOF.
std::size_t scan_entropy(ByteView bytes, std::size_t pos) {
    const std::size_t n = bytes.size();
    while (pos < n) {
        if (bytes[pos] != 0xFF) {
            ++pos;
            continue;
        }
        std::size_t j = pos + 1;
        while (j < n && bytes[j] == 0xFF) ++j;
        if (j >= n) return n;
        const std::uint8_t code = bytes[j];
        if (code == 0x00 || is_rst(code)) {
            pos = j + 1;
            continue;
        }
        return pos;
    }
    return n;
}

}  // namespace

std::string segment_kind_name(SegmentKind kind, int app_index) {
    switch (kind) {
        case SegmentKind::SOI: return "SOI";
        case SegmentKind::APPn: return "APP" + std::to_string(app_index);
        case SegmentKind::DQT: return "DQT";
        case SegmentKind::SOF0: return "SOF0";
        case SegmentKind::SOF2: return "SOF2";
        case SegmentKind::DHT: return "DHT";
        case SegmentKind::SOS: return "SOS";
        case SegmentKind::COM: return "COM";
        case SegmentKind::EOI: return "EOI";
        case SegmentKind::other: return "other";
    }
    return "other";
}

std::vector<const Segment*> SegmentTree::find(SegmentKind kind) const {
    std::vector<const Segment*> out;
    for (const auto& s : segments) {
        if (s.kind == kind) out.push_back(&s);
    }
    return out;
}

std::vector<const Segment*> SegmentTree::find_app(int n) const {
    std::vector<const Segment*> out;
    for (const auto& s : segments) {
        if (s.kind == SegmentKind::APPn && s.app_index == n) out.push_back(&s);
    }
    return out;
}

SegmentTree parse_segments(ByteView bytes) {
    if (bytes.size() < 2 || bytes[0] != 0xFF || bytes[1] != 0xD8) {
        throw Error(ErrorCode::NotAJpeg, "stream does not start with SOI");
    }
    SegmentTree tree;
    const std::size_t n = bytes.size();
    std::size_t pos = 0;
    bool saw_eoi = false;

    auto stop_truncated = [&](std::size_t from, const std::string& why) {
        tree.trailer = copy_range(bytes, from, n);
        tree.truncated = true;
        tree.warnings.push_back({ErrorCode::TruncatedStream, why});
    };

    while (pos < n) {
        // Locate the next marker: an 0xFF followed by a byte that is neither
        // fill (0xFF) nor a stuffed zero.
        const std::size_t start = pos;
        std::size_t marker_pos = n;
        for (std::size_t i = pos; i + 1 < n; ++i) {
            if (bytes[i] == 0xFF && bytes[i + 1] != 0xFF && bytes[i + 1] != 0x00) {
                marker_pos = i;
                break;
            }
        }
        if (marker_pos == n) {
            stop_truncated(start, "end of stream before EOI");
            break;
        }
        Segment seg;
        seg.prefix = copy_range(bytes, start, marker_pos);
        if (std::any_of(seg.prefix.begin(), seg.prefix.end(), [](auto b) { return b != 0xFF; })) {
            tree.warnings.push_back({ErrorCode::CorruptStream,
                                     "garbage bytes before marker at offset " +
                                         std::to_string(marker_pos)});
        }
        const std::uint8_t code = bytes[marker_pos + 1];
        seg.marker = static_cast<std::uint16_t>(0xFF00 | code);
        seg.offset = marker_pos;
        seg.kind = classify(code, seg.app_index);
        pos = marker_pos + 2;

        if (!is_standalone(code)) {
            if (pos + 2 > n) {
                stop_truncated(marker_pos, "segment size field cut off");
                break;
            }
            const std::size_t size = (static_cast<std::size_t>(bytes[pos]) << 8) | bytes[pos + 1];
            if (size < 2) {
                stop_truncated(marker_pos, "invalid segment size at offset " +
                                               std::to_string(marker_pos));
                break;
            }
            if (pos + size > n) {
                stop_truncated(marker_pos, "segment payload runs past end of stream");
                break;
            }
            seg.length = size - 2;
            seg.payload = copy_range(bytes, pos + 2, pos + size);
            pos += size;
            if (seg.kind == SegmentKind::SOS) {
                const std::size_t end = scan_entropy(bytes, pos);
                seg.entropy = copy_range(bytes, pos, end);
                pos = end;
            }
        }
        if (tree.segments.empty() && seg.kind != SegmentKind::SOI) {
            throw Error(ErrorCode::NotAJpeg, "first segment is not SOI");
        }
        tree.segments.push_back(std::move(seg));
        if (code == 0xD9) {
            saw_eoi = true;
            tree.trailer = copy_range(bytes, pos, n);
            pos = n;
            break;
        }
    }
    if (!saw_eoi && !tree.truncated) {
        tree.truncated = true;
        tree.warnings.push_back({ErrorCode::TruncatedStream, "end of stream before EOI"});
    }
    return tree;
}

Bytes serialize_segments(const SegmentTree& tree) {
    Bytes out;
    for (const auto& s : tree.segments) {
        out.insert(out.end(), s.prefix.begin(), s.prefix.end());
        out.push_back(0xFF);
        out.push_back(static_cast<std::uint8_t>(s.marker & 0xFF));
        if (!is_standalone(static_cast<std::uint8_t>(s.marker & 0xFF))) {
            const std::size_t size = s.payload.size() + 2;
            out.push_back(static_cast<std::uint8_t>(size >> 8));
            out.push_back(static_cast<std::uint8_t>(size & 0xFF));
            out.insert(out.end(), s.payload.begin(), s.payload.end());
            out.insert(out.end(), s.entropy.begin(), s.entropy.end());
        }
    }
    out.insert(out.end(), tree.trailer.begin(), tree.trailer.end());
    return out;
}

// ---------------------------------------------------------------------------
// Frame header
// ---------------------------------------------------------------------------

namespace {

std::string process_name(std::uint8_t code) {
    switch (code) {
        case 0xC0: return "Baseline DCT, Huffman coding";
        case 0xC1: return "Extended sequential DCT, Huffman coding";
        case 0xC2: return "Progressive DCT, Huffman coding";
        case 0xC3: return "Lossless, Huffman coding";
        case 0xC5: return "Sequential DCT, differential Huffman coding";
        case 0xC6: return "Progressive DCT, differential Huffman coding";
        case 0xC7: return "Lossless, Differential Huffman coding";
        case 0xC9: return "Extended sequential DCT, arithmetic coding";
        case 0xCA: return "Progressive DCT, arithmetic coding";
        case 0xCB: return "Lossless, arithmetic coding";
        case 0xCD: return "Sequential DCT, differential arithmetic coding";
        case 0xCE: return "Progressive DCT, differential arithmetic coding";
        case 0xCF: return "Lossless, differential arithmetic coding";
        default: return "Unknown";
    }
}

}  // namespace

std::string format_subsampling(const std::vector<ComponentSampling>& sampling) {
    if (sampling.size() < 3) return {};
    const int lh = sampling[0].h;
    const int lv = sampling[0].v;
    const int ch = std::max(1, sampling[1].h);
    const int cv = std::max(1, sampling[1].v);
    if (lh % ch != 0 || lv % cv != 0) {
        return "YCbCr (" + std::to_string(lh) + " " + std::to_string(lv) + ")";
    }
    const int rh = lh / ch;
    const int rv = lv / cv;
    std::string ratio;
    if (rh == 1 && rv == 1) ratio = "4:4:4";
    else if (rh == 2 && rv == 1) ratio = "4:2:2";
    else if (rh == 2 && rv == 2) ratio = "4:2:0";
    else if (rh == 4 && rv == 1) ratio = "4:1:1";
    else if (rh == 4 && rv == 2) ratio = "4:1:0";
    else if (rh == 1 && rv == 2) ratio = "4:4:0";
    else if (rh == 1 && rv == 4) ratio = "4:4:1";
    else ratio = "?";
    return "YCbCr" + ratio + " (" + std::to_string(lh) + " " + std::to_string(lv) + ")";
}

EncodingInfo detect_encoding(const SegmentTree& tree) {
    const Segment* frame = nullptr;
    for (const auto& s : tree.segments) {
        if (!is_sof(static_cast<std::uint8_t>(s.marker & 0xFF))) continue;
        if (frame) throw Error(ErrorCode::MultipleFrameHeaders, "more than one SOF segment");
        frame = &s;
    }
    if (!frame) throw Error(ErrorCode::NoFrameHeader, "no SOF segment");

    detail::ByteReader r(frame->payload);
    const auto bits = r.u8(0);
    const auto height = r.u16(1);
    const auto width = r.u16(3);
    const auto count = r.u8(5);
    if (!bits || !height || !width || !count) {
        throw Error(ErrorCode::NoFrameHeader, "SOF segment too short");
    }
    EncodingInfo info;
    info.sof_marker = frame->marker;
    info.encoding_process = process_name(static_cast<std::uint8_t>(frame->marker & 0xFF));
    info.bits = *bits;
    info.width = *width;
    info.height = *height;
    info.components = *count;
    for (int c = 0; c < *count; ++c) {
        const auto id = r.u8(6 + 3 * static_cast<std::uint64_t>(c));
        const auto hv = r.u8(7 + 3 * static_cast<std::uint64_t>(c));
        const auto tq = r.u8(8 + 3 * static_cast<std::uint64_t>(c));
        if (!id || !hv || !tq) {
            throw Error(ErrorCode::NoFrameHeader, "SOF component table truncated");
        }
        info.sampling.push_back({*id, *hv >> 4, *hv & 0x0F, *tq});
    }
    info.subsampling = format_subsampling(info.sampling);
    return info;
}

}  // namespace printproof::metadata
