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

// Mutation fuzzing of the metadata parsers, built with ASan and UBSan:
//   fuzz_metadata [iterations] [seed]
// Each case mutates a crafted JPEG and runs summarize() plus the individual
// APPn parsers on the mutated payloads. Printproof errors are expected;
// anything else, or a sanitizer report, fails the run.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "printproof/metadata.hpp"

using namespace printproof;

namespace {

Bytes mutate(const Bytes& seed_bytes, std::mt19937_64& rng) {
    Bytes b = seed_bytes;
    const int edits = 1 + static_cast<int>(rng() % 8);
    for (int e = 0; e < edits && !b.empty(); ++e) {
        const std::size_t at = rng() % b.size();
        switch (rng() % 7) {
            case 0: b[at] ^= static_cast<std::uint8_t>(1u << (rng() % 8)); break;
            case 1: b[at] = static_cast<std::uint8_t>(rng()); break;
            case 2: b[at] = (rng() & 1) ? 0xFF : 0x00; break;
            case 3: b.erase(b.begin() + static_cast<std::ptrdiff_t>(at)); break;
            case 4: b.insert(b.begin() + static_cast<std::ptrdiff_t>(at), static_cast<std::uint8_t>(rng())); break;
            case 5: b.resize(at + 1); break;
            default: {
                // Rewrite a two-byte big-endian length-like field.
                if (at + 1 < b.size()) {
                    const std::uint16_t v = static_cast<std::uint16_t>(rng());
                    b[at] = static_cast<std::uint8_t>(v >> 8);
                    b[at + 1] = static_cast<std::uint8_t>(v);
                }
            }
        }
    }
    return b;
}

void exercise(const Bytes& bytes) {
    try {
        const auto s = metadata::summarize(bytes);
        (void)metadata::format_listing(s);
        (void)metadata::to_json(s).dump();
    } catch (const Error&) {
    }
    try {
        const auto tree = metadata::parse_segments(bytes);
        (void)metadata::serialize_segments(tree);
        std::vector<ByteView> icc;
        for (const auto& seg : tree.segments) {
            try {
                if (seg.app_index == 1) (void)metadata::parse_exif(seg.payload);
                if (seg.app_index == 13) (void)metadata::parse_iptc(seg.payload);
            } catch (const Error&) {
            }
            if (seg.app_index == 2) icc.push_back(seg.payload);
        }
        try {
            if (!icc.empty()) (void)metadata::parse_icc(icc);
        } catch (const Error&) {
        }
        try {
            (void)metadata::detect_encoding(tree);
            (void)metadata::estimate_quality(tree);
        } catch (const Error&) {
        }
    } catch (const Error&) {
    }
}

}  // namespace

int main(int argc, char** argv) {
    const long iterations = argc > 1 ? std::strtol(argv[1], nullptr, 10) : 10000;
    const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 20260101;
    const std::vector<Bytes> corpus = {
        testing::annotated_fixture_jpeg(48, 40, false, 1),
        testing::annotated_fixture_jpeg(40, 32, true, 2),
        testing::exif_app1(true, {{0x010E, 2, 3, {'a', 'b', 0}}}, {{0x9003, 2, 2, {'x', 0}}}),
    };
    std::mt19937_64 rng(seed);
    long failures = 0;
    for (long i = 0; i < iterations; ++i) {
        const Bytes& base = corpus[static_cast<std::size_t>(i) % corpus.size()];
        const Bytes input = mutate(base, rng);
        try {
            exercise(input);
            if (&base == &corpus[2]) (void)metadata::parse_exif(input);
        } catch (const Error&) {
        } catch (const std::exception& e) {
            ++failures;
            std::fprintf(stderr, "case %ld: unexpected exception: %s\n", i, e.what());
        }
    }
    std::printf("%ld mutated inputs, %ld unexpected failures\n", iterations, failures);
    return failures == 0 ? 0 : 1;
}
