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
#include <random>
#include <vector>

#include "printproof/metrology.hpp"
#include "scene.hpp"

using namespace printproof;
using namespace printproof::metrology;

namespace {

LineSegment seg(std::string id, Point2 a, Point2 b, Axis axis = Axis::x) {
    return {std::move(id), a, b, axis, Role::structure};
}

ErrorCode code_of(const auto& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::Io;
}

double vp_distance(const Vec3& fitted, const Vec3& truth) {
    return std::hypot(fitted[0] / fitted[2] - truth[0] / truth[2],
                      fitted[1] / fitted[2] - truth[1] / truth[2]);
}

std::vector<LineSegment> of_axis(const AnnotationSet& ann, Axis axis) {
    std::vector<LineSegment> out;
    for (const auto& s : ann.segments)
        if (s.axis == axis && s.role == Role::structure) out.push_back(s);
    return out;
}

// Horizon from the x/y edges, vertical VP from the z edges.
struct Fitted {
    VanishingPoint vertical;
    Vec3 horizon;
};

Fitted fit_scene(const AnnotationSet& ann) {
    const auto vx = fit_vanishing_point(of_axis(ann, Axis::x));
    const auto vy = fit_vanishing_point(of_axis(ann, Axis::y));
    return {fit_vanishing_point(of_axis(ann, Axis::z_vertical)), fit_horizon(vx, vy)};
}

}  // namespace

TEST_CASE("two crossing segments meet at their intersection") {
    const std::vector<LineSegment> s = {seg("a", {-4, -4}, {-1, -1}), seg("b", {-3, 5}, {-1, 3})};
    const VanishingPoint vp = fit_vanishing_point(s);
    REQUIRE(vp.finite().has_value());
    CHECK(vp.finite()->x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(vp.finite()->y == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(vp.rms_residual < 1e-9);
    CHECK(vp.support == 2);
}

TEST_CASE("parallel segments give a vanishing point at infinity") {
    const std::vector<LineSegment> s = {seg("a", {0, 0}, {10, 0}), seg("b", {3, 5}, {20, 5}),
                                        seg("c", {1, 9}, {7, 9})};
    const VanishingPoint vp = fit_vanishing_point(s);
    CHECK(vp.at_infinity());
    CHECK_FALSE(vp.finite().has_value());
    CHECK(std::abs(std::abs(vp.point[0]) - 1.0) < 1e-12);
    CHECK(std::abs(vp.point[1]) < 1e-12);
}

TEST_CASE("vanishing point errors") {
    const std::vector<LineSegment> one = {seg("a", {0, 0}, {10, 0})};
    CHECK(code_of([&] { (void)fit_vanishing_point(one); }) == ErrorCode::TooFewSegments);
    const std::vector<LineSegment> collinear = {seg("a", {0, 0}, {10, 10}), seg("b", {20, 20}, {40, 40})};
    CHECK(code_of([&] { (void)fit_vanishing_point(collinear); }) == ErrorCode::DegenerateSegments);
    const std::vector<LineSegment> tiny = {seg("a", {0, 0}, {1, 1}), seg("b", {5, 0}, {5, 30})};
    CHECK(code_of([&] { (void)fit_vanishing_point(tiny); }) == ErrorCode::DegenerateSegments);
}

TEST_CASE("vanishing point ignores segment orientation and subdivision") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Point2 vp{400 + 300 * u(rng), -200 + 100 * u(rng)};
        std::vector<LineSegment> s;
        for (int i = 0; i < 4; ++i) {
            const Point2 a{800 * (u(rng) + 1), 600 + 300 * u(rng)};
            const double t0 = 0.1 + 0.2 * (u(rng) + 1), t1 = t0 + 0.3;
            const Point2 p{a.x + t0 * (vp.x - a.x) + u(rng), a.y + t0 * (vp.y - a.y) + u(rng)};
            const Point2 q{a.x + t1 * (vp.x - a.x) + u(rng), a.y + t1 * (vp.y - a.y) + u(rng)};
            s.push_back(seg("s" + std::to_string(i), p, q));
        }
        const VanishingPoint base = fit_vanishing_point(s);

        auto flipped = s;
        std::swap(flipped[1].a, flipped[1].b);
        std::swap(flipped[3].a, flipped[3].b);
        const VanishingPoint f = fit_vanishing_point(flipped);
        for (int k = 0; k < 3; ++k) CHECK(std::abs(f.point[k] - base.point[k]) < 1e-9);

        auto split = s;
        const Point2 mid{(s[2].a.x + s[2].b.x) / 2, (s[2].a.y + s[2].b.y) / 2};
        split[2].b = mid;
        split.push_back(seg("half", mid, s[2].b));
        const VanishingPoint h = fit_vanishing_point(split);
        for (int k = 0; k < 3; ++k) CHECK(std::abs(h.point[k] - base.point[k]) < 1e-9);
    }
}

TEST_CASE("box edges recover the analytic vanishing points") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto scene = testing::random_scene(seed);
        const auto ann = testing::scene_annotations(scene, 0.0, 0);
        for (auto [axis, dir] : {std::pair{Axis::x, testing::Vec3d{1, 0, 0}},
                                 std::pair{Axis::y, testing::Vec3d{0, 1, 0}}}) {
            const VanishingPoint vp = fit_vanishing_point(of_axis(ann, axis));
            const Vec3 truth = scene.camera.vanishing_point(dir);
            if (std::abs(truth[2]) > 1e-6) CHECK(vp_distance(vp.point, truth) < 1.5);
        }
    }
}

TEST_CASE("horizon through two vanishing points") {
    const VanishingPoint a{{0, 100, 1}, 0, 2};
    const VanishingPoint b{{1000, 100, 1}, 0, 2};
    const Vec3 h = fit_horizon(a, b);
    CHECK(std::abs(h[0]) < 1e-12);
    CHECK(h[1] == doctest::Approx(1.0));
    CHECK(h[2] == doctest::Approx(-100.0));

    const Vec3 g = fit_horizon(VanishingPoint{{0, 0, 1}, 0, 2}, VanishingPoint{{1, 0, 0}, 0, 2});
    CHECK(std::abs(g[0]) < 1e-12);
    CHECK(g[1] == doctest::Approx(1.0));
    CHECK(std::abs(g[2]) < 1e-12);

    CHECK(code_of([&] { (void)fit_horizon(a, a); }) == ErrorCode::IdenticalVPs);
}

TEST_CASE("fitted horizon matches the analytic vanishing line") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto scene = testing::random_scene(seed);
        const Fitted f = fit_scene(testing::scene_annotations(scene, 0.0, 0));
        const Vec3 truth = scene.camera.horizon();
        const double cx = scene.camera.width / 2.0;
        const double y_fit = -(f.horizon[0] * cx + f.horizon[2]) / f.horizon[1];
        const double y_true = -(truth[0] * cx + truth[2]) / truth[1];
        CHECK(std::abs(y_fit - y_true) < 2.0);
    }
}

TEST_CASE("identity transfer returns the reference height") {
    AnnotationSet ann;
    ann.reference_height_cm = 198.0;
    ann.segments = {{"door", {500, 900}, {510, 400}, Axis::z_vertical, Role::reference_height},
                    {"copy", {500, 900}, {510, 400}, Axis::z_vertical, Role::target_height}};
    const VanishingPoint v{{0.02, -1.0, 0.001}, 0, 3};
    const Vec3 horizon{0.01, 1.0, -300.0};
    const HeightEstimate e = estimate_height(ann, v, horizon);
    CHECK(e.height_cm == doctest::Approx(198.0).epsilon(1e-12));
    CHECK(e.interval_cm.low <= 198.0);
    CHECK(e.interval_cm.high >= 198.0);
    CHECK(e.method == "cross-ratio single-view metrology");
}

TEST_CASE("frontal plane: equal pixel heights give equal heights") {
    const Vec3 v{0.0, 1.0, 0.0};
    const Vec3 horizon{0.0, 1.0, -200.0};
    const double z = transfer_height({100, 700}, {100, 400}, 198.0, {900, 700}, {900, 400}, v, horizon);
    CHECK(z == doctest::Approx(198.0).epsilon(1e-12));
}

TEST_CASE("height errors") {
    const Vec3 v{0.0, -1.0, 0.0};
    const Vec3 horizon{0.0, 1.0, -700.0};
    CHECK(code_of([&] {
              (void)transfer_height({100, 700}, {100, 400}, 198.0, {900, 700}, {900, 400}, v, horizon);
          }) == ErrorCode::HorizonThroughBase);
    AnnotationSet ann;
    ann.segments = {{"t", {900, 800}, {900, 500}, Axis::z_vertical, Role::target_height}};
    CHECK(code_of([&] { (void)estimate_height(ann, {{0, 1, 0}, 0, 2}, {0, 1, -200}); }) ==
          ErrorCode::MissingReference);
}

TEST_CASE("height is invariant to image scaling") {
    for (std::uint64_t seed = 20; seed < 30; ++seed) {
        const auto scene = testing::random_scene(seed);
        AnnotationSet ann = testing::scene_annotations(scene, 0.0, 0);
        const Fitted f = fit_scene(ann);
        const double z = estimate_height(ann, f.vertical, f.horizon).height_cm;
        for (double s : {0.25, 3.0}) {
            AnnotationSet scaled = ann;
            for (auto& g : scaled.segments) {
                g.a = {g.a.x * s, g.a.y * s};
                g.b = {g.b.x * s, g.b.y * s};
            }
            VanishingPoint v = f.vertical;
            v.point = {v.point[0] * s, v.point[1] * s, v.point[2]};
            const Vec3 h{f.horizon[0], f.horizon[1], f.horizon[2] * s};
            const double zs = estimate_height(scaled, v, h).height_cm;
            CHECK(std::abs(zs - z) <= 1e-9 * z);
        }
    }
}

TEST_CASE("swapping reference and target roles inverts the ratio") {
    for (std::uint64_t seed = 40; seed < 50; ++seed) {
        const auto scene = testing::random_scene(seed);
        const auto ann = testing::scene_annotations(scene, 0.0, seed);
        const Fitted f = fit_scene(ann);
        const LineSegment& ref = ann.segments[ann.segments.size() - 2];
        const LineSegment& tgt = ann.segments.back();
        const double zt = transfer_height(ref.a, ref.b, 198.0, tgt.a, tgt.b, f.vertical.point, f.horizon);
        const double back = transfer_height(tgt.a, tgt.b, zt, ref.a, ref.b, f.vertical.point, f.horizon);
        CHECK(std::abs(back - 198.0) <= 0.001 * 198.0);
    }
}

TEST_CASE("synthetic scenes: heights from noise-free and noisy annotations") {
    std::vector<double> clean, noisy;
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        const auto scene = testing::random_scene(seed);
        const auto a0 = testing::scene_annotations(scene, 0.0, 0);
        const Fitted f0 = fit_scene(a0);
        clean.push_back(std::abs(estimate_height(a0, f0.vertical, f0.horizon).height_cm - scene.target_cm) /
                        scene.target_cm);
        const auto a1 = testing::scene_annotations(scene, 1.0, seed);
        const Fitted f1 = fit_scene(a1);
        noisy.push_back(std::abs(estimate_height(a1, f1.vertical, f1.horizon).height_cm - scene.target_cm) /
                        scene.target_cm);
    }
    std::sort(clean.begin(), clean.end());
    std::sort(noisy.begin(), noisy.end());
    CHECK(clean[clean.size() / 2] < 0.005);
    CHECK(noisy[noisy.size() / 2] < 0.03);
}

TEST_CASE("perturbation interval widens with the radius") {
    const auto scene = testing::demo_scene();
    const auto ann = testing::scene_annotations(scene, 0.0, 0);
    const Fitted f = fit_scene(ann);
    double prev_low = 1e300, prev_high = -1e300;
    for (double r : {0.0, 0.5, 1.0, 2.0, 4.0}) {
        PerturbationPolicy policy;
        policy.radius_px = r;
        const HeightEstimate e = estimate_height(ann, f.vertical, f.horizon, policy);
        CHECK(e.interval_cm.low <= e.height_cm);
        CHECK(e.interval_cm.high >= e.height_cm);
        CHECK(e.interval_cm.low <= prev_low);
        CHECK(e.interval_cm.high >= prev_high);
        prev_low = e.interval_cm.low;
        prev_high = e.interval_cm.high;
    }
}

TEST_CASE("demo scene recovers the figure height") {
    const auto scene = testing::demo_scene();
    const auto ann = testing::scene_annotations(scene, 0.0, 0);
    const Fitted f = fit_scene(ann);
    const HeightEstimate e = estimate_height(ann, f.vertical, f.horizon);
    CHECK(std::abs(e.height_cm - 183.0) < 0.01 * 183.0);
    CHECK(e.interval_cm.low <= 183.0);
    CHECK(e.interval_cm.high >= 183.0);
}

TEST_CASE("tilt ratios") {
    const auto vert = [](double len) { return seg("v", {0, 0}, {0, len}, Axis::free); };
    const TiltReport level = tilt_report(vert(100), vert(100), vert(50), vert(50));
    CHECK(level.lr_ratio == 1.0);
    CHECK(level.verdict == TiltVerdict::level);
    const TiltReport right = tilt_report(vert(102), vert(100), vert(50), vert(50));
    CHECK(right.lr_ratio == doctest::Approx(1.02));
    CHECK(right.verdict == TiltVerdict::tilt_right);
    const TiltReport left = tilt_report(vert(100), vert(102), vert(50), vert(50));
    CHECK(left.lr_ratio == doctest::Approx(100.0 / 102.0));
    CHECK(left.verdict == TiltVerdict::tilt_left);
    CHECK(tilt_report(vert(100), vert(100), vert(60), vert(50)).tb_ratio == doctest::Approx(1.2));
    const LineSegment zero = seg("z", {3, 3}, {3, 3}, Axis::free);
    CHECK(code_of([&] { (void)tilt_report(zero, vert(1), vert(1), vert(1)); }) ==
          ErrorCode::ZeroLengthSegment);
}

TEST_CASE("distortion sagitta and sign") {
    const std::vector<Point2> straight = {{0, 0}, {5, 0}, {10, 0}};
    const DistortionProfile s = distortion_profile(straight, {5, 500});
    CHECK(s.max_sagitta_px == 0.0);
    CHECK(s.sign == DistortionSign::none);

    const std::vector<Point2> bowed = {{0, 0}, {5, 1}, {10, 0}};
    // The centre far below (larger y): the bow points toward it.
    const DistortionProfile below = distortion_profile(bowed, {5, 1000});
    CHECK(below.max_sagitta_px == doctest::Approx(1.0));
    CHECK(below.normalized_sagitta == doctest::Approx(0.1));
    CHECK(below.sign == DistortionSign::pincushion);
    const DistortionProfile above = distortion_profile(bowed, {5, -1000});
    CHECK(above.sign == DistortionSign::barrel);

    const std::vector<Point2> two = {{0, 0}, {1, 1}};
    CHECK(code_of([&] { (void)distortion_profile(two, {0, 0}); }) == ErrorCode::ChainTooShort);
}

TEST_CASE("distortion sign is translation invariant") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-500.0, 500.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Point2> chain = {{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
        const Point2 centre{u(rng), u(rng)};
        const DistortionProfile p = distortion_profile(chain, centre);
        const double dx = u(rng) * 7, dy = u(rng) * 7;
        for (auto& c : chain) c = {c.x + dx, c.y + dy};
        const DistortionProfile q = distortion_profile(chain, {centre.x + dx, centre.y + dy});
        CHECK(p.sign == q.sign);
        CHECK(q.max_sagitta_px == doctest::Approx(p.max_sagitta_px).epsilon(1e-9));
    }
}

TEST_CASE("annotation json round trip and validation") {
    auto ann = testing::scene_annotations(testing::demo_scene(), 0.0, 0);
    ann.image_hash = compute_hash("image");
    ann.notes = "n";
    const AnnotationSet back = annotations_from_json(to_json(ann));
    CHECK(to_json(back) == to_json(ann));
    CHECK(check_annotations(ann, 1600, 1200).empty());

    auto bad = ann;
    bad.segments[1].id = bad.segments[0].id;
    bad.segments[2].b = bad.segments[2].a;
    bad.segments[3].a = {-500, 10};
    bad.reference_height_cm = -1.0;
    const auto problems = check_annotations(bad, 1600, 1200);
    CHECK(problems.size() >= 4);

    auto j = to_json(ann);
    j["segments"][0]["axis"] = "diagonal";
    CHECK(code_of([&] { (void)annotations_from_json(j); }) == ErrorCode::InvalidAnnotations);
    j = to_json(ann);
    j["segments"][0].erase("a");
    CHECK(code_of([&] { (void)annotations_from_json(j); }) == ErrorCode::InvalidAnnotations);
}

TEST_CASE("run_metrology on the demo annotations") {
    auto ann = testing::scene_annotations(testing::demo_scene(), 0.0, 0);
    ann.segments.push_back({"chain#1", {100, 100}, {200, 104}, Axis::free, Role::straightness_chain});
    ann.segments.push_back({"chain#2", {200, 104}, {300, 100}, Axis::free, Role::straightness_chain});
    const auto out = run_metrology(ann, 1600, 1200, 7);
    CHECK(out["errors"].empty());
    REQUIRE(out["heights"].size() == 1);
    CHECK(std::abs(out["heights"][0]["height_cm"].get<double>() - 183.0) < 1.83);
    CHECK(out["horizon"].is_array());
    CHECK(out["vanishing_points"]["z_vertical"]["support"] == 5);
    REQUIRE(out["distortion"].size() == 1);
    CHECK(out["distortion"][0]["chain_id"] == "chain");
    CHECK(out["distortion"][0]["points"] == 3);
    CHECK(out == run_metrology(ann, 1600, 1200, 7));
}
