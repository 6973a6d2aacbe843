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

#include "printproof/core.hpp"

#include <algorithm>
#include <cmath>

#include <openssl/evp.h>

#include "printproof/error.hpp"

namespace printproof {

std::string_view error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::UnsupportedFormat: return "UNSUPPORTED_FORMAT";
        case ErrorCode::CorruptStream: return "CORRUPT_STREAM";
        case ErrorCode::InvalidPercentile: return "INVALID_PERCENTILE";
        case ErrorCode::EncodeFailure: return "ENCODE_FAILURE";
        case ErrorCode::NotAJpeg: return "NOT_A_JPEG";
        case ErrorCode::TruncatedStream: return "TRUNCATED_STREAM";
        case ErrorCode::NoFrameHeader: return "NO_FRAME_HEADER";
        case ErrorCode::MultipleFrameHeaders: return "MULTIPLE_FRAME_HEADERS";
        case ErrorCode::BadTiffHeader: return "BAD_TIFF_HEADER";
        case ErrorCode::IfdOffsetOutOfBounds: return "IFD_OFFSET_OUT_OF_BOUNDS";
        case ErrorCode::NoIptcResource: return "NO_IPTC_RESOURCE";
        case ErrorCode::MissingChunk: return "MISSING_CHUNK";
        case ErrorCode::BadProfileSignature: return "BAD_PROFILE_SIGNATURE";
        case ErrorCode::NoQuantTables: return "NO_QUANT_TABLES";
        case ErrorCode::DegenerateImage: return "DEGENERATE_IMAGE";
        case ErrorCode::ImageTooSmall: return "IMAGE_TOO_SMALL";
        case ErrorCode::DegenerateSegments: return "DEGENERATE_SEGMENTS";
        case ErrorCode::TooFewSegments: return "TOO_FEW_SEGMENTS";
        case ErrorCode::HorizonThroughBase: return "HORIZON_THROUGH_BASE";
        case ErrorCode::MissingReference: return "MISSING_REFERENCE";
        case ErrorCode::ZeroLengthSegment: return "ZERO_LENGTH_SEGMENT";
        case ErrorCode::ChainTooShort: return "CHAIN_TOO_SHORT";
        case ErrorCode::IdenticalVPs: return "IDENTICAL_VPS";
        case ErrorCode::InvalidAnnotations: return "INVALID_ANNOTATIONS";
        case ErrorCode::HashMismatch: return "HASH_MISMATCH";
        case ErrorCode::VerifyFailed: return "VERIFY_FAILED";
        case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
        case ErrorCode::Io: return "IO";
    }
    return "UNKNOWN";
}

// ---------------------------------------------------------------------------

ContentHash ContentHash::from_hex(std::string_view hex) {
    if (hex.size() != 64) {
        throw Error(ErrorCode::InvalidArgument, "hash must be 64 hex characters");
    }
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        return -1;
    };
    std::array<std::uint8_t, 32> d{};
    for (std::size_t i = 0; i < 32; ++i) {
        const int hi = nibble(hex[2 * i]);
        const int lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) {
            throw Error(ErrorCode::InvalidArgument, "hash must be lowercase hex");
        }
        d[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return ContentHash(d);
}

std::string ContentHash::hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(64, '0');
    for (std::size_t i = 0; i < 32; ++i) {
        out[2 * i] = digits[digest_[i] >> 4];
        out[2 * i + 1] = digits[digest_[i] & 0x0F];
    }
    return out;
}

ContentHash compute_hash(ByteView bytes) {
    std::array<std::uint8_t, 32> digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != digest.size()) {
        throw Error(ErrorCode::InvalidArgument, "SHA-256 digest failed");
    }
    return ContentHash(digest);
}

// ---------------------------------------------------------------------------

std::string_view to_string(SourceFormat f) noexcept {
    switch (f) {
        case SourceFormat::jpeg: return "jpeg";
        case SourceFormat::png: return "png";
        case SourceFormat::memory: return "memory";
    }
    return "unknown";
}

RasterImage::RasterImage(int width, int height, std::vector<Rgb> pixels, ContentHash source_hash,
                         SourceFormat format)
    : width_(width),
      height_(height),
      pixels_(std::move(pixels)),
      source_hash_(source_hash),
      format_(format) {
    if (width_ < 1 || height_ < 1) {
        throw Error(ErrorCode::InvalidArgument, "image dimensions must be >= 1");
    }
    if (pixels_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_)) {
        throw Error(ErrorCode::InvalidArgument, "pixel count does not match width x height");
    }
}

RasterImage RasterImage::from_pixels(int width, int height, std::vector<Rgb> pixels) {
    static_assert(sizeof(Rgb) == 3);
    const ByteView raw(reinterpret_cast<const std::uint8_t*>(pixels.data()), pixels.size() * 3);
    const ContentHash h = compute_hash(raw);
    return RasterImage(width, height, std::move(pixels), h, SourceFormat::memory);
}

// ---------------------------------------------------------------------------

std::string_view to_string(Channel c) noexcept {
    switch (c) {
        case Channel::red: return "red";
        case Channel::green: return "green";
        case Channel::blue: return "blue";
        case Channel::luminance: return "luminance";
    }
    return "unknown";
}

Channel channel_from_string(std::string_view name) {
    if (name == "red") return Channel::red;
    if (name == "green") return Channel::green;
    if (name == "blue") return Channel::blue;
    if (name == "luminance") return Channel::luminance;
    throw Error(ErrorCode::InvalidArgument, "unknown channel '" + std::string(name) + "'");
}

Plane extract_channel(const RasterImage& img, Channel channel) {
    Plane out{img.width(), img.height(), {}};
    out.values.reserve(img.size());
    constexpr double k = 1.0 / 255.0;
    for (const Rgb& p : img.pixels()) {
        switch (channel) {
            case Channel::red: out.values.push_back(p.r * k); break;
            case Channel::green: out.values.push_back(p.g * k); break;
            case Channel::blue: out.values.push_back(p.b * k); break;
            case Channel::luminance:
                // Achromatic pixels must map to their channel value exactly.
                if (p.r == p.g && p.g == p.b) {
                    out.values.push_back(p.r * k);
                } else {
                    out.values.push_back(luminance(p.r * k, p.g * k, p.b * k));
                }
                break;
        }
    }
    return out;
}

double nearest_rank_percentile(std::vector<double> values, double p) {
    if (!(p > 0.0 && p <= 100.0)) {
        throw Error(ErrorCode::InvalidPercentile, "percentile must lie in (0, 100]");
    }
    if (values.empty()) {
        throw Error(ErrorCode::InvalidArgument, "percentile of an empty set");
    }
    const auto n = values.size();
    auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    auto nth = values.begin() + static_cast<std::ptrdiff_t>(rank - 1);
    std::nth_element(values.begin(), nth, values.end());
    return *nth;
}

std::vector<double> normalize_map(std::span<const double> values, NormalizeMode mode) {
    if (values.empty()) {
        throw Error(ErrorCode::InvalidArgument, "cannot normalize an empty plane");
    }
    std::vector<double> abs_values(values.size());
    std::transform(values.begin(), values.end(), abs_values.begin(),
                   [](double v) { return std::fabs(v); });

    double ceiling = 0.0;
    if (mode.kind == NormalizeMode::Kind::global_max) {
        ceiling = *std::max_element(abs_values.begin(), abs_values.end());
    } else {
        ceiling = nearest_rank_percentile(abs_values, mode.percentile);
    }
    if (ceiling <= 0.0) {
        return std::vector<double>(values.size(), 0.0);
    }
    for (double& v : abs_values) {
        v = std::min(v, ceiling) / ceiling;
    }
    return abs_values;
}

std::string_view to_string(MapKind k) noexcept {
    switch (k) {
        case MapKind::ela: return "ela";
        case MapKind::pca_projection: return "pca_projection";
        case MapKind::pca_distance: return "pca_distance";
        case MapKind::lga: return "lga";
        case MapKind::noise: return "noise";
    }
    return "unknown";
}

}  // namespace printproof
