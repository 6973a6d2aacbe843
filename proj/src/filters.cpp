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

#include "printproof/filters.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "printproof/codec.hpp"
#include "printproof/parallel.hpp"

namespace printproof::filters {

namespace {

using nlohmann::json;

AnalysisMap make_map(int width, int height, int channels, MapKind kind, const json& params) {
    AnalysisMap m;
    m.width = width;
    m.height = height;
    m.channels = channels;
    m.kind = kind;
    m.params_json = params.dump();
    m.params_digest = compute_hash(m.params_json);
    m.values.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                        static_cast<std::size_t>(channels),
                    0.0f);
    return m;
}

float to_unit(double v) { return static_cast<float>(std::clamp(v, 0.0, 1.0)); }

std::size_t index(int x, int y, int width) {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
}

}  // namespace

// ---------------------------------------------------------------------------
// ELA
// ---------------------------------------------------------------------------

void validate(const ElaParams& p) {
    if (p.quality < 1 || p.quality > 100) throw InvalidParam("quality", "must be in 1..100");
    if (p.scale < 0 || p.scale > 100) throw InvalidParam("scale", "must be in 0..100");
    if (p.contrast < 0 || p.contrast > 100) throw InvalidParam("contrast", "must be in 0..100");
}

std::string params_json(const ElaParams& p) {
    return json{{"kind", "ela"}, {"quality", p.quality}, {"scale", p.scale}, {"contrast", p.contrast}}
        .dump();
}

AnalysisMap ela_map(const RasterImage& img, const ElaParams& p) {
    validate(p);
    JpegEncodeOptions opts;
    opts.quality = p.quality;
    opts.subsampling = ChromaSubsampling::s420;
    opts.progressive = false;
    const RasterImage recompressed = load_image(encode_jpeg(img, opts));

    AnalysisMap map = make_map(img.width(), img.height(), 3, MapKind::ela, json::parse(params_json(p)));
    const double gain = static_cast<double>(p.scale) / 10.0;
    const auto src = img.pixels();
    const auto dst = recompressed.pixels();
    std::vector<double> amplified(map.values.size());
    for_each_row(img.height(), [&](int y) {
        for (int x = 0; x < img.width(); ++x) {
            const std::size_t i = index(x, y, img.width());
            const Rgb a = src[i];
            const Rgb b = dst[i];
            const int d[3] = {std::abs(a.r - b.r), std::abs(a.g - b.g), std::abs(a.b - b.b)};
            for (int c = 0; c < 3; ++c) {
                amplified[3 * i + static_cast<std::size_t>(c)] =
                    std::clamp(d[c] / 255.0 * gain, 0.0, 1.0);
            }
        }
    });

    std::vector<double> nonzero;
    std::copy_if(amplified.begin(), amplified.end(), std::back_inserter(nonzero),
                 [](double v) { return v > 0.0; });
    if (nonzero.empty()) return map;
    // contrast == 100 asks for the 0th percentile; nearest rank 1 (the minimum).
    const double pct = std::max(100.0 - p.contrast, 1e-9);
    const double ceiling = nearest_rank_percentile(std::move(nonzero), pct);
    for (std::size_t i = 0; i < amplified.size(); ++i) {
        map.values[i] = to_unit(amplified[i] / ceiling);
    }
    return map;
}

// ---------------------------------------------------------------------------
// PCA
// ---------------------------------------------------------------------------

PcaBasis pca_basis(const RasterImage& img) {
    PcaBasis basis;
    const auto px = img.pixels();
    const bool constant =
        std::all_of(px.begin(), px.end(), [&](const Rgb& p) { return p == px.front(); });

    const double n = static_cast<double>(px.size());
    std::array<double, 3> sum{};
    for (const Rgb& p : px) {
        sum[0] += p.r / 255.0;
        sum[1] += p.g / 255.0;
        sum[2] += p.b / 255.0;
    }
    for (int c = 0; c < 3; ++c) basis.mean[static_cast<std::size_t>(c)] = sum[static_cast<std::size_t>(c)] / n;

    if (constant) {
        basis.degenerate = true;
        basis.components = {{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
        basis.eigenvalues = {0.0, 0.0, 0.0};
        return basis;
    }

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const Rgb& p : px) {
        const Eigen::Vector3d c(p.r / 255.0 - basis.mean[0], p.g / 255.0 - basis.mean[1],
                                p.b / 255.0 - basis.mean[2]);
        cov += c * c.transpose();
    }
    cov /= n;

    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
    // Eigen sorts ascending.
    for (int k = 0; k < 3; ++k) {
        const int src = 2 - k;
        Eigen::Vector3d v = solver.eigenvectors().col(src).normalized();
        int largest = 0;
        for (int i = 1; i < 3; ++i) {
            if (std::fabs(v(i)) > std::fabs(v(largest))) largest = i;
        }
        if (v(largest) < 0) v = -v;
        auto& out = basis.components[static_cast<std::size_t>(k)];
        out = {v(0), v(1), v(2)};
        basis.eigenvalues[static_cast<std::size_t>(k)] = std::max(0.0, solver.eigenvalues()(src));
    }
    return basis;
}

std::string_view to_string(PcaMode mode) noexcept {
    return mode == PcaMode::projection ? "projection" : "distance";
}

PcaMode pca_mode_from_string(std::string_view name) {
    if (name == "projection") return PcaMode::projection;
    if (name == "distance") return PcaMode::distance;
    throw InvalidParam("mode", "must be 'projection' or 'distance'");
}

std::string pca_params_json(int component, PcaMode mode) {
    return json{{"kind", mode == PcaMode::projection ? "pca_projection" : "pca_distance"},
                {"component", component},
                {"mode", std::string(to_string(mode))}}
        .dump();
}

AnalysisMap pca_map(const RasterImage& img, const PcaBasis& basis, int component, PcaMode mode) {
    if (component < 1 || component > 3) throw InvalidParam("component", "must be 1, 2 or 3");
    const auto& axis = basis.components[static_cast<std::size_t>(component - 1)];
    AnalysisMap map = make_map(img.width(), img.height(), 1,
                               mode == PcaMode::projection ? MapKind::pca_projection
                                                           : MapKind::pca_distance,
                               json::parse(pca_params_json(component, mode)));
    std::vector<double> raw(img.size());
    const auto px = img.pixels();
    for_each_row(img.height(), [&](int y) {
        for (int x = 0; x < img.width(); ++x) {
            const std::size_t i = index(x, y, img.width());
            const double c[3] = {px[i].r / 255.0 - basis.mean[0], px[i].g / 255.0 - basis.mean[1],
                                 px[i].b / 255.0 - basis.mean[2]};
            const double proj = c[0] * axis[0] + c[1] * axis[1] + c[2] * axis[2];
            if (mode == PcaMode::projection) {
                raw[i] = proj;
            } else {
                double d2 = 0.0;
                for (int k = 0; k < 3; ++k) {
                    const double r = c[k] - proj * axis[static_cast<std::size_t>(k)];
                    d2 += r * r;
                }
                raw[i] = std::sqrt(d2);
            }
        }
    });

    // Colour values live in [0,1]; spreads below this are rounding noise.
    constexpr double kFlat = 1e-9;
    if (mode == PcaMode::projection) {
        const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
        const double range = *hi - *lo;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            map.values[i] = range <= kFlat ? 0.5f : to_unit((raw[i] - *lo) / range);
        }
    } else {
        const double hi = *std::max_element(raw.begin(), raw.end());
        if (hi > kFlat) {
            for (std::size_t i = 0; i < raw.size(); ++i) map.values[i] = to_unit(raw[i] / hi);
        }
    }
    return map;
}

// ---------------------------------------------------------------------------
// LGA
// ---------------------------------------------------------------------------

void validate(const LgaParams& p) {
    if (p.intensity < 0 || p.intensity > 100) throw InvalidParam("intensity", "must be in 0..100");
}

std::string params_json(const LgaParams& p) {
    return json{{"kind", "lga"},
                {"intensity", p.intensity},
                {"channel", std::string(to_string(p.channel))},
                {"normalized", p.normalized}}
        .dump();
}

Gradients sobel(const Plane& plane) {
    Gradients g{{plane.width, plane.height, std::vector<double>(plane.values.size())},
                {plane.width, plane.height, std::vector<double>(plane.values.size())}};
    const int w = plane.width;
    const int h = plane.height;
    auto at = [&](int x, int y) {
        return plane.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
    };
    for_each_row(h, [&](int y) {
        for (int x = 0; x < w; ++x) {
            const double gx = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1)) -
                              (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
            const double gy = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1)) -
                              (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
            g.gx.values[index(x, y, w)] = gx;
            g.gy.values[index(x, y, w)] = gy;
        }
    });
    return g;
}

AnalysisMap lga_map(const RasterImage& img, const LgaParams& p) {
    validate(p);
    if (img.width() < 3 || img.height() < 3) {
        throw Error(ErrorCode::ImageTooSmall, "LGA needs at least a 3x3 image");
    }
    const Gradients g = sobel(extract_channel(img, p.channel));
    double gain = p.intensity / 100.0;
    if (p.normalized) {
        double peak = 0.0;
        for (std::size_t i = 0; i < g.gx.values.size(); ++i) {
            peak = std::max({peak, std::fabs(g.gx.values[i]), std::fabs(g.gy.values[i])});
        }
        gain = peak > 0.0 ? gain / peak : 0.0;
    } else {
        gain *= 4.0;
    }
    AnalysisMap map = make_map(img.width(), img.height(), 3, MapKind::lga, json::parse(params_json(p)));
    for (std::size_t i = 0; i < g.gx.values.size(); ++i) {
        const double gx = g.gx.values[i];
        const double gy = g.gy.values[i];
        map.values[3 * i] = to_unit(0.5 + gain * gx);
        map.values[3 * i + 1] = to_unit(0.5 + gain * gy);
        map.values[3 * i + 2] = to_unit(gain * std::sqrt(gx * gx + gy * gy));
    }
    return map;
}

// ---------------------------------------------------------------------------
// Noise
// ---------------------------------------------------------------------------

void validate(const NoiseParams& p) {
    if (p.radius < 1 || p.radius > 15) throw InvalidParam("radius", "must be in 1..15");
    if (!(p.gain > 0.0) || !std::isfinite(p.gain)) throw InvalidParam("gain", "must be > 0");
}

std::string params_json(const NoiseParams& p) {
    return json{{"kind", "noise"}, {"radius", p.radius}, {"gain", p.gain}}.dump();
}

RasterImage median_filter(const RasterImage& img, int radius) {
    if (radius < 1) throw InvalidParam("radius", "must be >= 1");
    const int w = img.width();
    const int h = img.height();
    const std::size_t window = static_cast<std::size_t>(2 * radius + 1) * static_cast<std::size_t>(2 * radius + 1);
    std::vector<Rgb> out(img.size());
    for_each_row(h, [&](int y) {
        std::vector<std::uint8_t> r(window), g(window), b(window);
        for (int x = 0; x < w; ++x) {
            std::size_t k = 0;
            for (int dy = -radius; dy <= radius; ++dy) {
                for (int dx = -radius; dx <= radius; ++dx) {
                    const Rgb& p = img.at(std::clamp(x + dx, 0, w - 1), std::clamp(y + dy, 0, h - 1));
                    r[k] = p.r;
                    g[k] = p.g;
                    b[k] = p.b;
                    ++k;
                }
            }
            const auto mid = static_cast<std::ptrdiff_t>(window / 2);
            std::nth_element(r.begin(), r.begin() + mid, r.end());
            std::nth_element(g.begin(), g.begin() + mid, g.end());
            std::nth_element(b.begin(), b.begin() + mid, b.end());
            out[index(x, y, w)] = Rgb{r[static_cast<std::size_t>(mid)], g[static_cast<std::size_t>(mid)],
                                      b[static_cast<std::size_t>(mid)]};
        }
    });
    return RasterImage::from_pixels(w, h, std::move(out));
}

AnalysisMap noise_map(const RasterImage& img, const NoiseParams& p) {
    validate(p);
    const RasterImage median = median_filter(img, p.radius);
    AnalysisMap map = make_map(img.width(), img.height(), 1, MapKind::noise, json::parse(params_json(p)));
    const auto src = img.pixels();
    const auto med = median.pixels();
    for_each_row(img.height(), [&](int y) {
        for (int x = 0; x < img.width(); ++x) {
            const std::size_t i = index(x, y, img.width());
            const double r = std::clamp(0.5 + p.gain * (src[i].r - med[i].r) / 255.0, 0.0, 1.0);
            const double g = std::clamp(0.5 + p.gain * (src[i].g - med[i].g) / 255.0, 0.0, 1.0);
            const double b = std::clamp(0.5 + p.gain * (src[i].b - med[i].b) / 255.0, 0.0, 1.0);
            map.values[i] = to_unit((r == g && g == b) ? r : luminance(r, g, b));
        }
    });
    return map;
}

}  // namespace printproof::filters
