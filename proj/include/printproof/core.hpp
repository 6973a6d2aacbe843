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

#ifndef PRINTPROOF_CORE_HPP
#define PRINTPROOF_CORE_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace printproof {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

[[nodiscard]] inline ByteView as_bytes(std::string_view s) noexcept {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

// ---------------------------------------------------------------------------
// Hashing
// ---------------------------------------------------------------------------

/// SHA-256 digest. The textual form is 64 lowercase hex characters.
class ContentHash {
public:
    static constexpr std::string_view algorithm = "SHA-256";

    ContentHash() = default;
    explicit ContentHash(const std::array<std::uint8_t, 32>& digest) : digest_(digest) {}

    /// Parses a 64-character hex string; throws Error(InvalidArgument) otherwise.
    static ContentHash from_hex(std::string_view hex);

    [[nodiscard]] const std::array<std::uint8_t, 32>& digest() const noexcept { return digest_; }
    [[nodiscard]] std::string hex() const;

    friend bool operator==(const ContentHash&, const ContentHash&) = default;
    friend auto operator<=>(const ContentHash&, const ContentHash&) = default;

private:
    std::array<std::uint8_t, 32> digest_{};
};

[[nodiscard]] ContentHash compute_hash(ByteView bytes);
[[nodiscard]] inline ContentHash compute_hash(std::string_view text) {
    return compute_hash(as_bytes(text));
}

// ---------------------------------------------------------------------------
// Raster image
// ---------------------------------------------------------------------------

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// `memory` marks buffers built in-process (synthetic scenes, tests); their
/// hash covers the raw interleaved RGB bytes.
enum class SourceFormat { jpeg, png, memory };

[[nodiscard]] std::string_view to_string(SourceFormat f) noexcept;

/// Decoded 8-bit RGB pixels, row-major. Immutable after construction.
class RasterImage {
public:
    RasterImage(int width, int height, std::vector<Rgb> pixels, ContentHash source_hash,
                SourceFormat format);

    /// Builds an in-memory image; the hash is taken over the pixel bytes.
    static RasterImage from_pixels(int width, int height, std::vector<Rgb> pixels);

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] std::size_t size() const noexcept { return pixels_.size(); }
    [[nodiscard]] std::span<const Rgb> pixels() const noexcept { return pixels_; }
    [[nodiscard]] const Rgb& at(int x, int y) const noexcept {
        return pixels_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                       static_cast<std::size_t>(x)];
    }
    [[nodiscard]] const ContentHash& source_hash() const noexcept { return source_hash_; }
    [[nodiscard]] SourceFormat source_format() const noexcept { return format_; }

private:
    int width_;
    int height_;
    std::vector<Rgb> pixels_;
    ContentHash source_hash_;
    SourceFormat format_;
};

// ---------------------------------------------------------------------------
// Float planes and analysis maps
// ---------------------------------------------------------------------------

/// Single-channel double plane, row-major.
struct Plane {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    [[nodiscard]] double at(int x, int y) const noexcept {
        return values[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(x)];
    }
};

enum class Channel { red, green, blue, luminance };

[[nodiscard]] std::string_view to_string(Channel c) noexcept;
/// Throws Error(InvalidArgument) on unknown names.
[[nodiscard]] Channel channel_from_string(std::string_view name);

/// Channel scaled to [0,1]. Luminance uses Rec.601 weights.
[[nodiscard]] Plane extract_channel(const RasterImage& img, Channel channel);

/// Rec.601 luma of [0,1]-scaled components.
[[nodiscard]] constexpr double luminance(double r, double g, double b) noexcept {
    return 0.299 * r + 0.587 * g + 0.114 * b;
}

struct NormalizeMode {
    enum class Kind { global_max, percentile };
    Kind kind = Kind::global_max;
    double percentile = 100.0;

    static NormalizeMode global_max() { return {}; }
    static NormalizeMode at_percentile(double p) { return {Kind::percentile, p}; }
};

/// Nearest-rank percentile (rank = ceil(p/100 * N), 1-based) of `values`.
/// Throws Error(InvalidPercentile) unless 0 < p <= 100, Error(InvalidArgument)
/// on an empty input.
[[nodiscard]] double nearest_rank_percentile(std::vector<double> values, double p);

/// Scales absolute values into [0,1]. An all-zero plane stays all-zero.
[[nodiscard]] std::vector<double> normalize_map(std::span<const double> values,
                                                NormalizeMode mode);

enum class MapKind { ela, pca_projection, pca_distance, lga, noise };

[[nodiscard]] std::string_view to_string(MapKind k) noexcept;

/// Output of every filter. Values are row-major, interleaved when
/// channels == 3, and always within [0,1].
struct AnalysisMap {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<float> values;
    MapKind kind = MapKind::ela;
    /// Canonical JSON of the generating parameters (including "kind").
    std::string params_json;
    /// SHA-256 of params_json.
    ContentHash params_digest;
};

}  // namespace printproof

#endif  // PRINTPROOF_CORE_HPP
