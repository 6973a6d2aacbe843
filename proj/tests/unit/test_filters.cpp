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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "pca_oracle.hpp"
#include "printproof/codec.hpp"
#include "printproof/filters.hpp"

using namespace printproof;
using namespace printproof::filters;

namespace {

double mean_of(const AnalysisMap& m) {
    return std::accumulate(m.values.begin(), m.values.end(), 0.0) / static_cast<double>(m.values.size());
}

RasterImage two_colour(int w, int h) {
    std::vector<Rgb> px(static_cast<std::size_t>(w * h));
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = (i % 2) ? Rgb{255, 255, 255} : Rgb{0, 0, 0};
    return RasterImage::from_pixels(w, h, std::move(px));
}

RasterImage ramp(int w, int h, int step) {
    std::vector<Rgb> px(static_cast<std::size_t>(w * h));
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            px[static_cast<std::size_t>(y * w + x)] = {10, 20, static_cast<std::uint8_t>(step * x)};
    return RasterImage::from_pixels(w, h, std::move(px));
}

// Straight sort-based median per channel with replicate padding.
RasterImage median_oracle(const RasterImage& img, int r) {
    std::vector<Rgb> out(img.size());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            std::array<std::vector<int>, 3> win;
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    const Rgb& p = img.at(std::clamp(x + dx, 0, img.width() - 1),
                                          std::clamp(y + dy, 0, img.height() - 1));
                    win[0].push_back(p.r);
                    win[1].push_back(p.g);
                    win[2].push_back(p.b);
                }
            }
            for (auto& v : win) std::sort(v.begin(), v.end());
            const std::size_t mid = win[0].size() / 2;
            out[static_cast<std::size_t>(y * img.width() + x)] = {
                static_cast<std::uint8_t>(win[0][mid]), static_cast<std::uint8_t>(win[1][mid]),
                static_cast<std::uint8_t>(win[2][mid])};
        }
    }
    return RasterImage::from_pixels(img.width(), img.height(), std::move(out));
}

}  // namespace

TEST_CASE("ela defaults and parameter digest") {
    const ElaParams p;
    CHECK(p.quality == 75);
    CHECK(p.scale == 50);
    CHECK(p.contrast == 20);
    const AnalysisMap m = ela_map(testing::synthetic_photo(64, 48, 2));
    const auto params = nlohmann::json::parse(m.params_json);
    CHECK(params["quality"] == 75);
    CHECK(params["scale"] == 50);
    CHECK(params["contrast"] == 20);
    CHECK(m.params_digest == compute_hash(m.params_json));
    CHECK(m.channels == 3);
}

TEST_CASE("ela of a constant mid-grey image is zero") {
    const AnalysisMap m = ela_map(testing::uniform_image(40, 24, {128, 128, 128}));
    CHECK(std::all_of(m.values.begin(), m.values.end(), [](float v) { return v == 0.0f; }));
}

TEST_CASE("ela parameter ranges") {
    CHECK_THROWS_AS(validate(ElaParams{0, 50, 20}), InvalidParam);
    CHECK_THROWS_AS(validate(ElaParams{75, 101, 20}), InvalidParam);
    CHECK_THROWS_AS(validate(ElaParams{75, 50, -1}), InvalidParam);
    const AnalysisMap full = ela_map(testing::synthetic_photo(32, 32, 4), {75, 50, 100});
    for (float v : full.values) CHECK((v == 0.0f || v == 1.0f));
}

TEST_CASE("ela at the matching quality is weaker than 20 below") {
    for (int q : {50, 60, 70, 80, 90}) {
        for (std::uint64_t seed : {1u, 2u}) {
            JpegEncodeOptions opts;
            opts.quality = q;
            const RasterImage img = load_image(encode_jpeg(testing::synthetic_photo(96, 80, seed), opts));
            const double same = mean_of(ela_map(img, {q, 50, 20}));
            const double lower = mean_of(ela_map(img, {q - 20, 50, 20}));
            CHECK(same <= lower);
        }
    }
}

TEST_CASE("pca basis matches the brute-force oracle") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int w = 8 + static_cast<int>(rng() % 57);
        const int h = 8 + static_cast<int>(rng() % 57);
        const RasterImage img = testing::random_image(w, h, rng());
        const PcaBasis b = pca_basis(img);
        const testing::OracleBasis o = testing::oracle_basis(img);
        for (int k = 0; k < 3; ++k) {
            CHECK(b.mean[k] == doctest::Approx(o.mean[k]).epsilon(1e-12));
            CHECK(b.eigenvalues[k] == doctest::Approx(o.eigenvalues[k]).epsilon(1e-9));
            for (int i = 0; i < 3; ++i) CHECK(std::abs(b.components[k][i] - o.components[k][i]) < 1e-9);
        }
        for (int component = 1; component <= 3; ++component) {
            for (PcaMode mode : {PcaMode::projection, PcaMode::distance}) {
                const AnalysisMap m = pca_map(img, b, component, mode);
                const auto ref = testing::oracle_pca_map(img, o, component, mode == PcaMode::distance);
                double worst = 0.0;
                for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::abs(m.values[i] - ref[i]));
                CHECK(worst <= 1e-6);
            }
        }
    }
}

TEST_CASE("pca basis is orthonormal and preserves the trace") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const RasterImage img = testing::synthetic_photo(50, 40, seed);
        const PcaBasis b = pca_basis(img);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                double d = 0;
                for (int c = 0; c < 3; ++c) d += b.components[i][c] * b.components[j][c];
                CHECK(std::abs(d - (i == j ? 1.0 : 0.0)) < 1e-9);
            }
        }
        CHECK(b.eigenvalues[0] >= b.eigenvalues[1]);
        CHECK(b.eigenvalues[1] >= b.eigenvalues[2]);
        CHECK(b.eigenvalues[2] >= 0.0);
        const auto o = testing::oracle_basis(img);
        const double trace = o.covariance[0][0] + o.covariance[1][1] + o.covariance[2][2];
        const double sum = b.eigenvalues[0] + b.eigenvalues[1] + b.eigenvalues[2];
        CHECK(std::abs(sum - trace) <= 1e-6 * trace);
    }
}

TEST_CASE("pca basis is equivariant under channel permutation") {
    const RasterImage img = testing::synthetic_photo(40, 30, 5);
    std::vector<Rgb> perm(img.pixels().begin(), img.pixels().end());
    for (Rgb& p : perm) p = {p.g, p.b, p.r};  // new (r,g,b) = old (g,b,r)
    const PcaBasis a = pca_basis(img);
    const PcaBasis b = pca_basis(RasterImage::from_pixels(40, 30, std::move(perm)));
    for (int k = 0; k < 3; ++k) {
        CHECK(b.eigenvalues[k] == doctest::Approx(a.eigenvalues[k]).epsilon(1e-9));
        CHECK(std::abs(b.components[k][0] - a.components[k][1]) < 1e-9);
        CHECK(std::abs(b.components[k][1] - a.components[k][2]) < 1e-9);
        CHECK(std::abs(b.components[k][2] - a.components[k][0]) < 1e-9);
    }
}

TEST_CASE("pca projections are decorrelated") {
    const RasterImage img = testing::synthetic_photo(64, 64, 8);
    const PcaBasis b = pca_basis(img);
    double s1 = 0, s2 = 0, s12 = 0;
    for (const Rgb& p : img.pixels()) {
        const double c[3] = {p.r / 255.0 - b.mean[0], p.g / 255.0 - b.mean[1], p.b / 255.0 - b.mean[2]};
        const double t1 = c[0] * b.components[0][0] + c[1] * b.components[0][1] + c[2] * b.components[0][2];
        const double t2 = c[0] * b.components[1][0] + c[1] * b.components[1][1] + c[2] * b.components[1][2];
        s1 += t1;
        s2 += t2;
        s12 += t1 * t2;
    }
    const double n = static_cast<double>(img.size());
    const double cov = s12 / n - (s1 / n) * (s2 / n);
    CHECK(std::abs(cov) <= 1e-6 * b.eigenvalues[0]);
}

TEST_CASE("pca on a two-colour cloud") {
    const RasterImage img = two_colour(8, 8);
    const PcaBasis b = pca_basis(img);
    const double s = 1.0 / std::sqrt(3.0);
    for (int i = 0; i < 3; ++i) CHECK(b.components[0][i] == doctest::Approx(s).epsilon(1e-12));
    CHECK(std::abs(b.eigenvalues[1]) < 1e-12);
    CHECK(std::abs(b.eigenvalues[2]) < 1e-12);
    const AnalysisMap d = pca_map(img, b, 1, PcaMode::distance);
    for (float v : d.values) CHECK(v == doctest::Approx(0.0).epsilon(1e-6));
    const AnalysisMap p = pca_map(img, b, 2, PcaMode::projection);
    for (float v : p.values) CHECK(v == 0.5f);
}

TEST_CASE("pca on a constant image is flagged degenerate") {
    const PcaBasis b = pca_basis(testing::uniform_image(5, 5, {9, 9, 9}));
    CHECK(b.degenerate);
    for (double l : b.eigenvalues) CHECK(l == 0.0);
    CHECK(b.components[0] == std::array<double, 3>{1, 0, 0});
    CHECK_THROWS_AS((void)pca_map(testing::uniform_image(5, 5, {9, 9, 9}), b, 4, PcaMode::projection), InvalidParam);
}

TEST_CASE("lga defaults and constant image") {
    const LgaParams p;
    CHECK(p.intensity == 95);
    CHECK(p.channel == Channel::blue);
    CHECK(p.normalized);
    const AnalysisMap m = lga_map(testing::uniform_image(7, 6, {40, 80, 120}));
    REQUIRE(m.channels == 3);
    for (std::size_t i = 0; i < m.values.size(); i += 3) {
        CHECK(m.values[i] == 0.5f);
        CHECK(m.values[i + 1] == 0.5f);
        CHECK(m.values[i + 2] == 0.0f);
    }
    const auto params = nlohmann::json::parse(m.params_json);
    CHECK(params["intensity"] == 95);
    CHECK(params["channel"] == "blue");
    CHECK(params["normalized"] == true);
    CHECK_THROWS_AS((void)lga_map(testing::uniform_image(2, 5, {0, 0, 0})), Error);
}

TEST_CASE("sobel on a linear ramp") {
    const Plane plane = extract_channel(ramp(16, 8, 3), Channel::blue);
    const Gradients g = sobel(plane);
    for (int y = 0; y < 8; ++y) {
        for (int x = 1; x < 15; ++x) {
            CHECK(g.gx.at(x, y) == doctest::Approx(8.0 * 3.0 / 255.0).epsilon(1e-12));
            CHECK(g.gy.at(x, y) == 0.0);
        }
    }
    const AnalysisMap m = lga_map(ramp(16, 8, 3));
    for (int y = 0; y < 8; ++y) {
        for (int x = 1; x < 15; ++x) {
            const std::size_t i = 3 * static_cast<std::size_t>(y * 16 + x);
            CHECK(m.values[i] > 0.5f);
            CHECK(m.values[i + 1] == 0.5f);
        }
    }
}

TEST_CASE("lga gradient is linear in the slope") {
    const Gradients g1 = sobel(extract_channel(ramp(32, 8, 2), Channel::blue));
    const Gradients g2 = sobel(extract_channel(ramp(32, 8, 4), Channel::blue));
    for (std::size_t i = 0; i < g1.gx.values.size(); ++i) {
        CHECK(std::abs(std::abs(g2.gx.values[i]) - 2.0 * std::abs(g1.gx.values[i])) <= 1e-9);
    }
    LgaParams raw;
    raw.normalized = false;
    raw.intensity = 10;
    const AnalysisMap m1 = lga_map(ramp(32, 8, 2), raw);
    const AnalysisMap m2 = lga_map(ramp(32, 8, 4), raw);
    for (std::size_t i = 0; i < m1.values.size(); i += 3) {
        CHECK(std::abs((m2.values[i] - 0.5) - 2.0 * (m1.values[i] - 0.5)) <= 1e-6);
    }
}

TEST_CASE("median filter matches the sort-based oracle") {
    for (int r : {1, 2, 3}) {
        const RasterImage img = testing::random_image(23, 19, static_cast<std::uint64_t>(r));
        const RasterImage got = median_filter(img, r);
        const RasterImage want = median_oracle(img, r);
        CHECK(std::equal(got.pixels().begin(), got.pixels().end(), want.pixels().begin()));
    }
}

TEST_CASE("noise map") {
    CHECK(NoiseParams{}.radius == 1);
    CHECK(NoiseParams{}.gain == 8.0);
    const AnalysisMap flat = noise_map(testing::uniform_image(9, 9, {70, 70, 70}));
    for (float v : flat.values) CHECK(v == 0.5f);

    std::vector<Rgb> px(81, Rgb{0, 0, 0});
    px[4 * 9 + 4] = {255, 255, 255};
    const AnalysisMap spike = noise_map(RasterImage::from_pixels(9, 9, std::move(px)));
    for (std::size_t i = 0; i < spike.values.size(); ++i) {
        CHECK(spike.values[i] == (i == 40 ? 1.0f : 0.5f));
    }
    const auto params = nlohmann::json::parse(spike.params_json);
    CHECK(params["gain"] == 8.0);
    CHECK(params["radius"] == 1);
    CHECK_THROWS_AS(validate(NoiseParams{0, 8.0}), InvalidParam);
    CHECK_THROWS_AS(validate(NoiseParams{1, 0.0}), InvalidParam);
}

TEST_CASE("noise map of a median-filtered salt-and-pepper image is flat") {
    std::mt19937_64 rng(3);
    std::vector<Rgb> px(64 * 48, Rgb{100, 110, 120});
    for (int y = 2; y < 46; y += 4) {
        for (int x = 2 + static_cast<int>(rng() % 2); x < 62; x += 5) {
            px[static_cast<std::size_t>(y * 64 + x)] = (rng() & 1) ? Rgb{255, 255, 255} : Rgb{0, 0, 0};
        }
    }
    const RasterImage once = median_filter(RasterImage::from_pixels(64, 48, std::move(px)), 1);
    const AnalysisMap m = noise_map(once);
    for (float v : m.values) CHECK(v == 0.5f);
}

TEST_CASE("filters are deterministic") {
    const RasterImage img = testing::synthetic_photo(70, 50, 12);
    const PcaBasis b = pca_basis(img);
    CHECK(encode_map_png(ela_map(img)) == encode_map_png(ela_map(img)));
    CHECK(encode_map_png(pca_map(img, b, 2, PcaMode::distance)) ==
          encode_map_png(pca_map(img, pca_basis(img), 2, PcaMode::distance)));
    CHECK(encode_map_png(lga_map(img)) == encode_map_png(lga_map(img)));
    CHECK(encode_map_png(noise_map(img)) == encode_map_png(noise_map(img)));
}
