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

#ifndef PRINTPROOF_CODEC_HPP
#define PRINTPROOF_CODEC_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "printproof/core.hpp"

namespace printproof {

/// Sniffs the magic bytes; nullopt when neither JPEG nor PNG.
[[nodiscard]] std::optional<SourceFormat> detect_format(ByteView bytes) noexcept;

/// Decodes a JPEG (baseline or progressive) or PNG stream to 8-bit RGB.
/// Throws Error(UnsupportedFormat) or Error(CorruptStream).
[[nodiscard]] RasterImage load_image(ByteView bytes);

enum class ChromaSubsampling { s444, s422, s420 };

/// An application marker written verbatim after SOI/APP0.
struct JpegMarker {
    int code = 0xFE;  // e.g. 0xE1 for APP1, 0xFE for COM
    Bytes payload;
};

struct JpegEncodeOptions {
    int quality = 75;
    ChromaSubsampling subsampling = ChromaSubsampling::s420;
    bool progressive = false;
    bool write_jfif = true;
    std::vector<JpegMarker> markers;
};

/// Encodes with the standard IJG tables scaled for `quality`.
/// Throws Error(EncodeFailure).
[[nodiscard]] Bytes encode_jpeg(const RasterImage& img, const JpegEncodeOptions& opts = {});

/// Lossless RGB PNG. tEXt chunks are written in key order.
[[nodiscard]] Bytes encode_png(const RasterImage& img,
                               const std::map<std::string, std::string>& text = {});

/// 8-bit grayscale or RGB PNG of a map, quantized by round(v * 255); carries
/// the params digest and params JSON as tEXt chunks.
[[nodiscard]] Bytes encode_map_png(const AnalysisMap& map);

/// tEXt chunks of a PNG stream. Throws Error(CorruptStream).
[[nodiscard]] std::map<std::string, std::string> read_png_text(ByteView png);

}  // namespace printproof

#endif  // PRINTPROOF_CODEC_HPP
