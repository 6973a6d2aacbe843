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
#include <cstdlib>
#include <limits>

#include "byte_reader.hpp"
#include "printproof/metadata.hpp"

namespace printproof::metadata {

namespace {

// Natural (row-major) order. These are the example tables of the JPEG
// standard (Annex K) that the IJG library scales by quality.
constexpr std::array<std::uint16_t, 64> kLuminanceBase = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

constexpr std::array<std::uint16_t, 64> kChrominanceBase = {
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99, 47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

// zigzag index -> natural index
constexpr std::array<int, 64> kZigzagToNatural = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,
    12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

std::array<std::uint16_t, 64> scale_table(const std::array<std::uint16_t, 64>& base, int quality,
                                          bool force_baseline) {
    quality = std::clamp(quality, 1, 100);
    const long scale = quality < 50 ? 5000 / quality : 200 - quality * 2;
    const long ceiling = force_baseline ? 255 : 32767;
    std::array<std::uint16_t, 64> out{};
    for (std::size_t i = 0; i < 64; ++i) {
        long v = (static_cast<long>(base[i]) * scale + 50) / 100;
        v = std::clamp(v, 1L, ceiling);
        out[i] = static_cast<std::uint16_t>(v);
    }
    return out;
}

}  // namespace

std::array<std::uint16_t, 64> ijg_luminance_table(int quality, bool force_baseline) {
    return scale_table(kLuminanceBase, quality, force_baseline);
}

std::array<std::uint16_t, 64> ijg_chrominance_table(int quality, bool force_baseline) {
    return scale_table(kChrominanceBase, quality, force_baseline);
}

std::vector<QuantTable> parse_quant_tables(const SegmentTree& tree) {
    std::vector<QuantTable> tables;
    for (const Segment* seg : tree.find(SegmentKind::DQT)) {
        detail::ByteReader r(seg->payload);
        std::uint64_t pos = 0;
        while (pos < r.size()) {
            const auto pq_tq = r.u8(pos);
            if (!pq_tq) break;
            QuantTable t;
            t.precision = *pq_tq >> 4;
            t.id = *pq_tq & 0x0F;
            const std::uint64_t entry = t.precision ? 2 : 1;
            if (!r.has(pos + 1, 64 * entry)) break;
            for (int k = 0; k < 64; ++k) {
                const std::uint64_t at = pos + 1 + static_cast<std::uint64_t>(k) * entry;
                const std::uint16_t v = t.precision ? *r.u16(at) : *r.u8(at);
                t.natural[static_cast<std::size_t>(kZigzagToNatural[static_cast<std::size_t>(k)])] = v;
            }
            tables.push_back(t);
            pos += 1 + 64 * entry;
        }
    }
    return tables;
}

QualityEstimate estimate_quality(const QuantTable& luminance) {
    const bool baseline = luminance.precision == 0;
    QualityEstimate best{100, QualityConfidence::approximate};
    long best_diff = std::numeric_limits<long>::max();
    for (int q = 1; q <= 100; ++q) {
        const auto ref = ijg_luminance_table(q, baseline);
        long diff = 0;
        for (std::size_t i = 0; i < 64; ++i) {
            diff += std::labs(static_cast<long>(ref[i]) - static_cast<long>(luminance.natural[i]));
        }
        if (diff == 0) return {q, QualityConfidence::exact};
        if (diff < best_diff) {
            best_diff = diff;
            best.quality = q;
        }
    }
    return best;
}

QualityEstimate estimate_quality(const SegmentTree& tree) {
    const auto tables = parse_quant_tables(tree);
    if (tables.empty()) throw Error(ErrorCode::NoQuantTables, "no DQT tables");
    // Table 0 is luminance by convention; fall back to the first one defined.
    auto it = std::find_if(tables.begin(), tables.end(), [](const QuantTable& t) { return t.id == 0; });
    return estimate_quality(it != tables.end() ? *it : tables.front());
}

}  // namespace printproof::metadata
