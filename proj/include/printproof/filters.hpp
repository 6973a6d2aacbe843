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

#ifndef PRINTPROOF_FILTERS_HPP
#define PRINTPROOF_FILTERS_HPP

#include <array>
#include <string>

#include "printproof/core.hpp"
#include "printproof/error.hpp"

namespace printproof::filters {

/// Parameter validation failure naming the offending field.
class InvalidParam : public Error {
public:
    InvalidParam(std::string field, const std::string& message)
        : Error(ErrorCode::InvalidArgument, field + ": " + message), field_(std::move(field)) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// ---------------------------------------------------------------------------
// Error level analysis
// ---------------------------------------------------------------------------

struct ElaParams {
    int quality = 75;   // recompression quality, 1..100
    int scale = 50;     // amplification, factor scale/10
    int contrast = 20;  // stretch ceiling at the (100 - contrast)-th percentile
};

void validate(const ElaParams& p);
[[nodiscard]] std::string params_json(const ElaParams& p);

/// Recompresses at p.quality (baseline, 4:2:0, IJG tables), takes the
/// per-channel absolute difference, amplifies by scale/10 and stretches
/// [0, P] onto [0, 1] where P is the nearest-rank (100 - contrast)-th
/// percentile of the nonzero amplified values. Three-channel output.
[[nodiscard]] AnalysisMap ela_map(const RasterImage& img, const ElaParams& p = {});

// ---------------------------------------------------------------------------
// Principal component analysis of pixel colours
// ---------------------------------------------------------------------------

/// Colour-space basis of an image, in [0,1]-scaled RGB units.
struct PcaBasis {
    std::array<double, 3> mean{};
    /// components[k] is the k-th principal axis (unit norm); eigenvalues
    /// descend. Each axis has its largest-magnitude entry positive.
    std::array<std::array<double, 3>, 3> components{};
    std::array<double, 3> eigenvalues{};
    /// All pixels identical: canonical axes, zero eigenvalues.
    bool degenerate = false;
};

[[nodiscard]] PcaBasis pca_basis(const RasterImage& img);

enum class PcaMode { projection, distance };

[[nodiscard]] std::string_view to_string(PcaMode mode) noexcept;
[[nodiscard]] PcaMode pca_mode_from_string(std::string_view name);

[[nodiscard]] std::string pca_params_json(int component, PcaMode mode);

/// projection: c.v_k rescaled by its global min/max (constant 0.5 when the
/// range vanishes). distance: |c - (c.v_k) v_k| divided by its global max.
/// `component` is 1-based.
[[nodiscard]] AnalysisMap pca_map(const RasterImage& img, const PcaBasis& basis, int component,
                                  PcaMode mode);

// ---------------------------------------------------------------------------
// Luminance gradient analysis
// ---------------------------------------------------------------------------

struct LgaParams {
    int intensity = 95;
    Channel channel = Channel::blue;
    bool normalized = true;
};

void validate(const LgaParams& p);
[[nodiscard]] std::string params_json(const LgaParams& p);

struct Gradients {
    Plane gx;
    Plane gy;
};

/// 3x3 Sobel derivatives with replicate padding. gx grows to the right, gy
/// grows downwards.
[[nodiscard]] Gradients sobel(const Plane& plane);

/// RGB map: R = 0.5 + k gx, G = 0.5 + k gy, B = k |g|, clamped. The gain is
/// intensity/100 scaled by 4 (raw) or by 1/max(|gx|,|gy|) (normalized).
/// Throws Error(ImageTooSmall) below 3x3.
[[nodiscard]] AnalysisMap lga_map(const RasterImage& img, const LgaParams& p = {});

// ---------------------------------------------------------------------------
// Noise residual
// ---------------------------------------------------------------------------

struct NoiseParams {
    int radius = 1;  // window side 2r+1
    double gain = 8.0;
};

void validate(const NoiseParams& p);
[[nodiscard]] std::string params_json(const NoiseParams& p);

/// Per-channel median over the (2r+1)^2 window, replicate padded.
[[nodiscard]] RasterImage median_filter(const RasterImage& img, int radius);

/// clamp(0.5 + gain * (value - median)) per channel, collapsed to luminance.
[[nodiscard]] AnalysisMap noise_map(const RasterImage& img, const NoiseParams& p = {});

}  // namespace printproof::filters

#endif  // PRINTPROOF_FILTERS_HPP
