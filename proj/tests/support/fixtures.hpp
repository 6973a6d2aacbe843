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

#ifndef PRINTPROOF_TESTS_FIXTURES_HPP
#define PRINTPROOF_TESTS_FIXTURES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "printproof/codec.hpp"
#include "printproof/core.hpp"

namespace printproof::testing {

/// Smooth colour field with discs and mild noise; deterministic per seed.
[[nodiscard]] RasterImage synthetic_photo(int width, int height, std::uint64_t seed,
                                          double noise_sigma = 2.0);

[[nodiscard]] RasterImage uniform_image(int width, int height, Rgb colour);

/// Uniformly random pixels.
[[nodiscard]] RasterImage random_image(int width, int height, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Metadata segments written by hand, independently of the parsers
// ---------------------------------------------------------------------------

struct TiffField {
    std::uint16_t tag = 0;
    std::uint16_t type = 0;  // 2 ASCII, 3 SHORT, 4 LONG, 5 RATIONAL, 7 UNDEFINED
    std::uint32_t count = 0;
    Bytes value;             // already in the target byte order
};

/// "Exif\0\0" + TIFF with IFD0 fields and an optional Exif sub-IFD.
[[nodiscard]] Bytes exif_app1(bool big_endian, const std::vector<TiffField>& ifd0,
                              const std::vector<TiffField>& exif_ifd);

/// IFD0 with X/YResolution 166/1 inches, Software and DateTime; Exif IFD with
/// DateTimeOriginal.
[[nodiscard]] Bytes sample_exif_app1(bool big_endian);

struct IimDataset {
    int record = 2;
    int dataset = 0;
    std::string value;
};

/// "Photoshop 3.0\0" with an 8BIM 0x0404 IIM block and, optionally, a 0x0425
/// digest resource.
[[nodiscard]] Bytes iptc_app13(const std::vector<IimDataset>& datasets, const Bytes& digest = {});

/// Date Created 20110217, Time Created, Originating Program.
[[nodiscard]] Bytes sample_iptc_app13();

/// A v2.1.0 display profile: ADBE CMM, RGB/XYZ, 1999-06-03 00:00:00,
/// perceptual intent, desc "Adobe RGB (1998)", cprt and wtpt tags.
[[nodiscard]] Bytes adobe_rgb_profile();

/// Splits a profile into APP2 payloads of at most `chunk` profile bytes.
[[nodiscard]] std::vector<Bytes> icc_app2_chunks(const Bytes& profile, std::size_t chunk = 65519);

inline constexpr const char* kFixtureComment = "Optimized by JPEGmini 3.14.2.84235 0xdf29c3c1";

/// JPEG with EXIF, IPTC, ICC (two chunks) and a COM marker.
[[nodiscard]] Bytes annotated_fixture_jpeg(int width, int height, bool progressive,
                                       std::uint64_t seed = 1);

// ---------------------------------------------------------------------------
// Splice fixtures
// ---------------------------------------------------------------------------

struct SpliceFixture {
    RasterImage composite;
    int x0 = 0;
    int y0 = 0;
    int size = 0;
    int patch_quality = 0;
};

/// Base saved at q90; a same-statistics donor saved at `patch_quality`; a
/// square of the decoded donor, read from offset 12, pasted at an offset with
/// a different block phase. The composite is returned as decoded pixels.
[[nodiscard]] SpliceFixture splice_fixture(int width, int height, int patch_quality,
                                           std::uint64_t seed);

}  // namespace printproof::testing

#endif  // PRINTPROOF_TESTS_FIXTURES_HPP
