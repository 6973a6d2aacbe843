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

#ifndef PRINTPROOF_METROLOGY_HPP
#define PRINTPROOF_METROLOGY_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "printproof/core.hpp"
#include "printproof/error.hpp"

namespace printproof::metrology {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

/// Homogeneous 3-vector: an image point (x, y, w) or a line (a, b, c) with
/// ax + by + c = 0.
using Vec3 = std::array<double, 3>;

[[nodiscard]] Vec3 cross(const Vec3& a, const Vec3& b) noexcept;
[[nodiscard]] double dot(const Vec3& a, const Vec3& b) noexcept;
[[nodiscard]] inline Vec3 homogeneous(Point2 p) noexcept { return {p.x, p.y, 1.0}; }
[[nodiscard]] double distance(Point2 a, Point2 b) noexcept;

enum class Axis { x, y, z_vertical, free };
enum class Role { structure, reference_height, target_height, straightness_chain };

[[nodiscard]] std::string_view to_string(Axis a) noexcept;
[[nodiscard]] std::string_view to_string(Role r) noexcept;

/// For height roles `a` is the ground contact and `b` the top.
struct LineSegment {
    std::string id;
    Point2 a;
    Point2 b;
    Axis axis = Axis::free;
    Role role = Role::structure;

    [[nodiscard]] double length() const noexcept { return distance(a, b); }
};

struct AnnotationSet {
    ContentHash image_hash;
    std::vector<LineSegment> segments;
    std::optional<double> reference_height_cm;
    std::string notes;
};

/// {image_hash, segments: [{id, a:[x,y], b:[x,y], axis, role}],
///  reference_height_cm, notes}. Throws Error(InvalidAnnotations).
[[nodiscard]] AnnotationSet annotations_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const AnnotationSet& ann);

/// JSON Schema (draft 2020-12) for the annotation exchange format.
[[nodiscard]] std::string_view annotation_schema() noexcept;

struct AnnotationProblem {
    std::string field;
    std::string message;
};

/// Structural invariants: unique ids, a != b, endpoints inside the image plus
/// a 10% margin, a positive reference height tied to exactly one
/// reference_height segment. Empty when valid.
[[nodiscard]] std::vector<AnnotationProblem> check_annotations(const AnnotationSet& ann, int width,
                                                               int height);

// ---------------------------------------------------------------------------
// Vanishing geometry
// ---------------------------------------------------------------------------

struct VanishingPoint {
    Vec3 point{0.0, 0.0, 1.0};  // unit norm, w >= 0
    double rms_residual = 0.0;   // pixels
    int support = 0;

    [[nodiscard]] bool at_infinity() const noexcept;
    /// Dehomogenized location; nullopt at infinity.
    [[nodiscard]] std::optional<Point2> finite() const noexcept;
};

/// Length-weighted algebraic least squares on conditioned homogeneous lines:
/// the VP is the smallest eigenvector of sum(L_i l_i l_i^T). Throws
/// Error(TooFewSegments) or Error(DegenerateSegments).
[[nodiscard]] VanishingPoint fit_vanishing_point(std::span<const LineSegment> segments);

/// Line through two vanishing points, scaled so (a, b) has unit norm.
/// Throws Error(IdenticalVPs).
[[nodiscard]] Vec3 fit_horizon(const VanishingPoint& a, const VanishingPoint& b);

// ---------------------------------------------------------------------------
// Height
// ---------------------------------------------------------------------------

/// Transfers a reference height onto a target vertical through the horizon
/// and the vertical vanishing point, then applies the cross ratio.
/// Throws Error(HorizonThroughBase) or Error(DegenerateSegments).
[[nodiscard]] double transfer_height(Point2 ref_base, Point2 ref_top, double ref_height_cm,
                                     Point2 base, Point2 top, const Vec3& vertical_vp,
                                     const Vec3& horizon);

struct PerturbationPolicy {
    double radius_px = 2.0;
    /// Used only when more than four endpoints are perturbed.
    std::uint64_t seed = 0;
    int random_draws = 256;
};

/// min/max of fn over perturbed endpoint sets: every (+-r, +-r) corner
/// combination for k <= 4 endpoints, otherwise `random_draws` uniform draws
/// from the square. The unperturbed value is always included; evaluations
/// that throw are skipped.
struct Interval {
    double low = 0.0;
    double high = 0.0;
};

[[nodiscard]] Interval perturbation_interval(
    std::span<const Point2> endpoints,
    const std::function<double(std::span<const Point2>)>& fn, const PerturbationPolicy& policy);

struct HeightEstimate {
    std::string target_id;
    double height_cm = 0.0;
    Interval interval_cm;
    std::string method = "cross-ratio single-view metrology";
};

/// Estimates the height of `target_id` (or the first target_height segment
/// when empty). Throws Error(MissingReference) and the transfer errors.
[[nodiscard]] HeightEstimate estimate_height(const AnnotationSet& ann,
                                             const VanishingPoint& vertical_vp, const Vec3& horizon,
                                             const PerturbationPolicy& policy = {},
                                             const std::string& target_id = {});

// ---------------------------------------------------------------------------
// Tilt and distortion
// ---------------------------------------------------------------------------

enum class TiltVerdict { level, tilt_left, tilt_right };

[[nodiscard]] std::string_view to_string(TiltVerdict v) noexcept;

struct TiltReport {
    double lr_ratio = 1.0;
    double tb_ratio = 1.0;
    TiltVerdict verdict = TiltVerdict::level;
    double threshold = 0.01;
};

/// lr_ratio = |left| / |right|; tilt_right above 1 + tau, tilt_left below
/// 1 - tau. Throws Error(ZeroLengthSegment).
[[nodiscard]] TiltReport tilt_report(const LineSegment& left, const LineSegment& right,
                                     const LineSegment& top, const LineSegment& bottom,
                                     double tau = 0.01);

enum class DistortionSign { pincushion, barrel, none };

[[nodiscard]] std::string_view to_string(DistortionSign s) noexcept;

struct DistortionProfile {
    double max_sagitta_px = 0.0;
    double normalized_sagitta = 0.0;
    DistortionSign sign = DistortionSign::none;
};

/// Deviation of a nominally straight edge from its chord. A bow toward the
/// image centre is pincushion, a bow away from it barrel; below a
/// normalized sagitta of 0.001 the edge counts as straight. Throws
/// Error(ChainTooShort).
[[nodiscard]] DistortionProfile distortion_profile(std::span<const Point2> chain,
                                                   Point2 image_center);

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

/// Everything the annotations support: VPs per axis, horizon, tilt (from
/// segments with ids left/right/top/bottom), one distortion profile per
/// straightness chain and one height per target. Stage failures are
/// collected under "errors" instead of aborting the run.
[[nodiscard]] nlohmann::json run_metrology(const AnnotationSet& ann, int width, int height,
                                           std::uint64_t seed);

}  // namespace printproof::metrology

#endif  // PRINTPROOF_METROLOGY_HPP
