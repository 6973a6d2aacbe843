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

#include "printproof/metrology.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>

#include <Eigen/Eigenvalues>

namespace printproof::metrology {

namespace {

using nlohmann::json;

constexpr double kMinSegmentPx = 2.0;
constexpr double kInfinityRatio = 1e-10;
constexpr double kStraightThreshold = 1e-3;

Error invalid(const std::string& msg) { return Error(ErrorCode::InvalidAnnotations, msg); }

Point2 point_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw invalid(field + ": expected [x, y]");
    }
    const Point2 p{j[0].get<double>(), j[1].get<double>()};
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw invalid(field + ": non-finite coordinate");
    return p;
}

Axis axis_from_string(const std::string& s, const std::string& field) {
    if (s == "x") return Axis::x;
    if (s == "y") return Axis::y;
    if (s == "z_vertical") return Axis::z_vertical;
    if (s == "free") return Axis::free;
    throw invalid(field + ": unknown axis '" + s + "'");
}

Role role_from_string(const std::string& s, const std::string& field) {
    if (s == "structure") return Role::structure;
    if (s == "reference_height") return Role::reference_height;
    if (s == "target_height") return Role::target_height;
    if (s == "straightness_chain") return Role::straightness_chain;
    throw invalid(field + ": unknown role '" + s + "'");
}

bool is_infinite(const Vec3& v) noexcept {
    return std::abs(v[2]) <= kInfinityRatio * std::hypot(v[0], v[1]);
}

Point2 dehomogenize(const Vec3& v) noexcept { return {v[0] / v[2], v[1] / v[2]}; }

Vec3 unit(const Vec3& v) noexcept {
    const double n = std::sqrt(dot(v, v));
    return n > 0.0 ? Vec3{v[0] / n, v[1] / n, v[2] / n} : v;
}

json vp_json(const VanishingPoint& vp) {
    json j = {{"point", vp.point},
              {"at_infinity", vp.at_infinity()},
              {"rms_residual", vp.rms_residual},
              {"support", vp.support}};
    if (auto p = vp.finite()) {
        j["x"] = p->x;
        j["y"] = p->y;
    } else {
        j["x"] = nullptr;
        j["y"] = nullptr;
    }
    return j;
}

json error_json(std::string_view stage, const Error& e) {
    return {{"stage", stage}, {"code", error_code_name(e.code())}, {"message", e.what()}};
}

std::string lower(std::string s) {
    std::ranges::transform(s, s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

// Chain segments group by the id part before '#'; the points are the first
// segment's start followed by every segment's end.
std::vector<std::pair<std::string, std::vector<Point2>>> straightness_chains(
    const AnnotationSet& ann) {
    std::vector<std::pair<std::string, std::vector<Point2>>> chains;
    std::map<std::string, std::size_t> index;
    for (const auto& s : ann.segments) {
        if (s.role != Role::straightness_chain) continue;
        const std::string group = s.id.substr(0, s.id.find('#'));
        auto [it, fresh] = index.emplace(group, chains.size());
        if (fresh) chains.push_back({group, {s.a}});
        auto& pts = chains[it->second].second;
        if (!(pts.back() == s.a)) pts.push_back(s.a);
        pts.push_back(s.b);
    }
    return chains;
}

}  // namespace

Vec3 cross(const Vec3& a, const Vec3& b) noexcept {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot(const Vec3& a, const Vec3& b) noexcept {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

double distance(Point2 a, Point2 b) noexcept { return std::hypot(b.x - a.x, b.y - a.y); }

std::string_view to_string(Axis a) noexcept {
    switch (a) {
        case Axis::x: return "x";
        case Axis::y: return "y";
        case Axis::z_vertical: return "z_vertical";
        case Axis::free: return "free";
    }
    return "free";
}

std::string_view to_string(Role r) noexcept {
    switch (r) {
        case Role::structure: return "structure";
        case Role::reference_height: return "reference_height";
        case Role::target_height: return "target_height";
        case Role::straightness_chain: return "straightness_chain";
    }
    return "structure";
}

std::string_view to_string(TiltVerdict v) noexcept {
    switch (v) {
        case TiltVerdict::level: return "level";
        case TiltVerdict::tilt_left: return "tilt_left";
        case TiltVerdict::tilt_right: return "tilt_right";
    }
    return "level";
}

std::string_view to_string(DistortionSign s) noexcept {
    switch (s) {
        case DistortionSign::pincushion: return "pincushion";
        case DistortionSign::barrel: return "barrel";
        case DistortionSign::none: return "none";
    }
    return "none";
}

// ---------------------------------------------------------------------------
// Annotations
// ---------------------------------------------------------------------------

AnnotationSet annotations_from_json(const json& j) {
    if (!j.is_object()) throw invalid("annotations: expected an object");
    AnnotationSet ann;
    if (!j.contains("image_hash") || !j["image_hash"].is_string()) {
        throw invalid("image_hash: expected a hex string");
    }
    try {
        ann.image_hash = ContentHash::from_hex(j["image_hash"].get<std::string>());
    } catch (const Error& e) {
        throw invalid(std::string("image_hash: ") + e.what());
    }
    if (!j.contains("segments") || !j["segments"].is_array()) {
        throw invalid("segments: expected an array");
    }
    for (std::size_t i = 0; i < j["segments"].size(); ++i) {
        const json& s = j["segments"][i];
        const std::string field = "segments[" + std::to_string(i) + "]";
        if (!s.is_object()) throw invalid(field + ": expected an object");
        LineSegment seg;
        if (!s.contains("id") || !s["id"].is_string()) throw invalid(field + ".id: expected a string");
        seg.id = s["id"].get<std::string>();
        if (!s.contains("a")) throw invalid(field + ".a: missing");
        if (!s.contains("b")) throw invalid(field + ".b: missing");
        seg.a = point_from_json(s["a"], field + ".a");
        seg.b = point_from_json(s["b"], field + ".b");
        if (!s.contains("axis") || !s["axis"].is_string()) {
            throw invalid(field + ".axis: expected a string");
        }
        if (!s.contains("role") || !s["role"].is_string()) {
            throw invalid(field + ".role: expected a string");
        }
        seg.axis = axis_from_string(s["axis"].get<std::string>(), field + ".axis");
        seg.role = role_from_string(s["role"].get<std::string>(), field + ".role");
        ann.segments.push_back(std::move(seg));
    }
    if (j.contains("reference_height_cm") && !j["reference_height_cm"].is_null()) {
        if (!j["reference_height_cm"].is_number()) {
            throw invalid("reference_height_cm: expected a number");
        }
        ann.reference_height_cm = j["reference_height_cm"].get<double>();
    }
    if (j.contains("notes") && !j["notes"].is_null()) {
        if (!j["notes"].is_string()) throw invalid("notes: expected a string");
        ann.notes = j["notes"].get<std::string>();
    }
    return ann;
}

std::string_view annotation_schema() noexcept {
    static constexpr std::string_view kSchema =
#include "annotation_schema.inc"
        ;
    return kSchema;
}

json to_json(const AnnotationSet& ann) {
    json segments = json::array();
    for (const auto& s : ann.segments) {
        segments.push_back({{"id", s.id},
                            {"a", {s.a.x, s.a.y}},
                            {"b", {s.b.x, s.b.y}},
                            {"axis", to_string(s.axis)},
                            {"role", to_string(s.role)}});
    }
    json j = {{"image_hash", ann.image_hash.hex()}, {"segments", segments}, {"notes", ann.notes}};
    j["reference_height_cm"] =
        ann.reference_height_cm ? json(*ann.reference_height_cm) : json(nullptr);
    return j;
}

std::vector<AnnotationProblem> check_annotations(const AnnotationSet& ann, int width, int height) {
    std::vector<AnnotationProblem> problems;
    const double mx = 0.1 * width;
    const double my = 0.1 * height;
    const auto inside = [&](Point2 p) {
        return p.x >= -mx && p.x <= width + mx && p.y >= -my && p.y <= height + my;
    };
    std::set<std::string> ids;
    int references = 0;
    for (std::size_t i = 0; i < ann.segments.size(); ++i) {
        const auto& s = ann.segments[i];
        const std::string field = "segments[" + std::to_string(i) + "]";
        if (s.id.empty()) problems.push_back({field + ".id", "empty id"});
        if (!ids.insert(s.id).second) problems.push_back({field + ".id", "duplicate id " + s.id});
        if (s.a == s.b) problems.push_back({field, "endpoints coincide"});
        if (!inside(s.a)) problems.push_back({field + ".a", "outside the image margin"});
        if (!inside(s.b)) problems.push_back({field + ".b", "outside the image margin"});
        if (s.role == Role::reference_height) ++references;
    }
    if (ann.reference_height_cm) {
        if (!(*ann.reference_height_cm > 0.0) || !std::isfinite(*ann.reference_height_cm)) {
            problems.push_back({"reference_height_cm", "must be positive"});
        }
        if (references != 1) {
            problems.push_back({"reference_height_cm",
                                "needs exactly one reference_height segment, found " +
                                    std::to_string(references)});
        }
    } else if (references > 0) {
        problems.push_back({"reference_height_cm", "missing for the reference_height segment"});
    }
    return problems;
}

// ---------------------------------------------------------------------------
// Vanishing geometry
// ---------------------------------------------------------------------------

bool VanishingPoint::at_infinity() const noexcept { return is_infinite(point); }

std::optional<Point2> VanishingPoint::finite() const noexcept {
    if (at_infinity()) return std::nullopt;
    return dehomogenize(point);
}

VanishingPoint fit_vanishing_point(std::span<const LineSegment> segments) {
    if (segments.size() < 2) {
        throw Error(ErrorCode::TooFewSegments,
                    "need at least 2 segments, got " + std::to_string(segments.size()));
    }
    // Conditioning uses length-weighted moments of the segments taken as
    // continuous point sets, so splitting a segment leaves it unchanged.
    double total = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    for (const auto& s : segments) {
        const double len = s.length();
        if (!(len > kMinSegmentPx)) {
            throw Error(ErrorCode::DegenerateSegments,
                        "segment " + s.id + " is not longer than 2 px");
        }
        total += len;
        cx += len * 0.5 * (s.a.x + s.b.x);
        cy += len * 0.5 * (s.a.y + s.b.y);
    }
    cx /= total;
    cy /= total;
    double spread = 0.0;
    for (const auto& s : segments) {
        const double len = s.length();
        const double mx = 0.5 * (s.a.x + s.b.x) - cx;
        const double my = 0.5 * (s.a.y + s.b.y) - cy;
        spread += len * (mx * mx + my * my + len * len / 12.0);
    }
    const double scale = std::sqrt(2.0) / std::sqrt(spread / total);

    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    for (const auto& s : segments) {
        const Vec3 a{scale * (s.a.x - cx), scale * (s.a.y - cy), 1.0};
        const Vec3 b{scale * (s.b.x - cx), scale * (s.b.y - cy), 1.0};
        const Vec3 l = cross(a, b);
        const double n = std::hypot(l[0], l[1]);
        const Eigen::Vector3d ln(l[0] / n, l[1] / n, l[2] / n);
        m += s.length() * (ln * ln.transpose());
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
    const auto& ev = es.eigenvalues();
    if (ev(1) <= 1e-12 * ev(2)) {
        throw Error(ErrorCode::DegenerateSegments, "segments are collinear");
    }
    const Eigen::Vector3d vn = es.eigenvectors().col(0);
    Vec3 v = unit({vn(0) / scale + cx * vn(2), vn(1) / scale + cy * vn(2), vn(2)});
    if (v[2] < 0.0 || (v[2] == 0.0 && (v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0)))) {
        v = {-v[0], -v[1], -v[2]};
    }

    VanishingPoint vp;
    vp.point = v;
    vp.support = static_cast<int>(segments.size());
    double sum = 0.0;
    if (is_infinite(v)) {
        const double n = std::hypot(v[0], v[1]);
        const double dx = v[0] / n;
        const double dy = v[1] / n;
        for (const auto& s : segments) {
            const double off = 0.5 * (dx * (s.b.y - s.a.y) - dy * (s.b.x - s.a.x));
            sum += off * off;
        }
    } else {
        const Vec3 p = homogeneous(dehomogenize(v));
        for (const auto& s : segments) {
            const Vec3 l = cross(homogeneous(s.a), homogeneous(s.b));
            const double d = dot(l, p) / std::hypot(l[0], l[1]);
            sum += d * d;
        }
    }
    vp.rms_residual = std::sqrt(sum / static_cast<double>(segments.size()));
    return vp;
}

Vec3 fit_horizon(const VanishingPoint& a, const VanishingPoint& b) {
    const Vec3 l = cross(unit(a.point), unit(b.point));
    if (std::sqrt(dot(l, l)) <= 1e-12) {
        throw Error(ErrorCode::IdenticalVPs, "vanishing points coincide");
    }
    const double n = std::hypot(l[0], l[1]);
    if (n <= 1e-12 * std::abs(l[2])) {
        throw Error(ErrorCode::DegenerateSegments, "both vanishing points lie at infinity");
    }
    Vec3 h{l[0] / n, l[1] / n, l[2] / n};
    if (h[1] < 0.0 || (h[1] == 0.0 && h[0] < 0.0)) h = {-h[0], -h[1], -h[2]};
    return h;
}

// ---------------------------------------------------------------------------
// Height
// ---------------------------------------------------------------------------

double transfer_height(Point2 ref_base, Point2 ref_top, double ref_height_cm, Point2 base,
                       Point2 top, const Vec3& vertical_vp, const Vec3& horizon) {
    const double hn = std::hypot(horizon[0], horizon[1]);
    if (!(hn > 0.0)) throw Error(ErrorCode::DegenerateSegments, "horizon is not a finite line");
    const auto off_horizon = [&](Point2 p) { return dot(horizon, homogeneous(p)) / hn; };
    if (std::abs(off_horizon(base)) < 1e-6) {
        throw Error(ErrorCode::HorizonThroughBase, "target base lies on the horizon");
    }
    if (std::abs(off_horizon(ref_base)) < 1e-6) {
        throw Error(ErrorCode::HorizonThroughBase, "reference base lies on the horizon");
    }
    if (distance(base, top) == 0.0 || distance(ref_base, ref_top) == 0.0) {
        throw Error(ErrorCode::ZeroLengthSegment, "height segment has zero length");
    }

    const Vec3 b = homogeneous(base);
    Point2 t_tilde = ref_top;
    if (distance(base, ref_base) > 1e-9) {
        const Vec3 u = cross(cross(b, homogeneous(ref_base)), horizon);
        const Vec3 p = cross(cross(u, homogeneous(ref_top)), cross(b, vertical_vp));
        if (is_infinite(p)) {
            throw Error(ErrorCode::DegenerateSegments, "transferred height does not meet the target");
        }
        t_tilde = dehomogenize(p);
    }
    const double transferred = distance(base, t_tilde);
    if (!(transferred > 0.0)) {
        throw Error(ErrorCode::DegenerateSegments, "transferred height collapses onto the base");
    }
    double ratio = distance(base, top) / transferred;
    if (!is_infinite(vertical_vp)) {
        const Point2 v = dehomogenize(vertical_vp);
        const double vt = distance(v, top);
        if (!(vt > 0.0)) throw Error(ErrorCode::DegenerateSegments, "target top at the vertical VP");
        ratio *= distance(v, t_tilde) / vt;
    }
    const double z = ref_height_cm * ratio;
    if (!std::isfinite(z)) throw Error(ErrorCode::DegenerateSegments, "height is not finite");
    return z;
}

Interval perturbation_interval(std::span<const Point2> endpoints,
                               const std::function<double(std::span<const Point2>)>& fn,
                               const PerturbationPolicy& policy) {
    std::vector<Point2> pts(endpoints.begin(), endpoints.end());
    const double centre = fn(pts);
    Interval iv{centre, centre};
    const auto consider = [&] {
        try {
            const double z = fn(pts);
            if (!std::isfinite(z)) return;
            iv.low = std::min(iv.low, z);
            iv.high = std::max(iv.high, z);
        } catch (const Error&) {
        }
    };
    const double r = policy.radius_px;
    if (!(r > 0.0) || pts.empty()) return iv;
    const std::size_t k = pts.size();
    if (k <= 4) {
        const std::size_t combos = std::size_t{1} << (2 * k);
        for (std::size_t c = 0; c < combos; ++c) {
            for (std::size_t i = 0; i < k; ++i) {
                const std::size_t corner = (c >> (2 * i)) & 3u;
                pts[i] = {endpoints[i].x + ((corner & 1u) ? r : -r),
                          endpoints[i].y + ((corner & 2u) ? r : -r)};
            }
            consider();
        }
    } else {
        std::mt19937_64 rng(policy.seed);
        const auto uniform = [&] {
            return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
        };
        for (int d = 0; d < policy.random_draws; ++d) {
            for (std::size_t i = 0; i < k; ++i) {
                const double dx = uniform() * r;
                const double dy = uniform() * r;
                pts[i] = {endpoints[i].x + dx, endpoints[i].y + dy};
            }
            consider();
        }
    }
    return iv;
}

HeightEstimate estimate_height(const AnnotationSet& ann, const VanishingPoint& vertical_vp,
                               const Vec3& horizon, const PerturbationPolicy& policy,
                               const std::string& target_id) {
    const LineSegment* ref = nullptr;
    const LineSegment* target = nullptr;
    for (const auto& s : ann.segments) {
        if (s.role == Role::reference_height) {
            if (ref != nullptr) {
                throw Error(ErrorCode::MissingReference, "more than one reference_height segment");
            }
            ref = &s;
        } else if (s.role == Role::target_height && target == nullptr &&
                   (target_id.empty() || s.id == target_id)) {
            target = &s;
        }
    }
    if (ref == nullptr) throw Error(ErrorCode::MissingReference, "no reference_height segment");
    if (!ann.reference_height_cm || !(*ann.reference_height_cm > 0.0)) {
        throw Error(ErrorCode::MissingReference, "reference_height_cm is not set");
    }
    if (target == nullptr) {
        throw Error(ErrorCode::MissingReference,
                    target_id.empty() ? "no target_height segment"
                                      : "no target_height segment with id " + target_id);
    }
    const double z_ref = *ann.reference_height_cm;
    const Vec3 v = vertical_vp.point;
    const auto fn = [&](std::span<const Point2> p) {
        return transfer_height(p[0], p[1], z_ref, p[2], p[3], v, horizon);
    };
    const std::array<Point2, 4> endpoints{ref->a, ref->b, target->a, target->b};

    HeightEstimate est;
    est.target_id = target->id;
    est.height_cm = fn(endpoints);
    est.interval_cm = perturbation_interval(endpoints, fn, policy);
    return est;
}

// ---------------------------------------------------------------------------
// Tilt and distortion
// ---------------------------------------------------------------------------

TiltReport tilt_report(const LineSegment& left, const LineSegment& right, const LineSegment& top,
                       const LineSegment& bottom, double tau) {
    for (const LineSegment* s : {&left, &right, &top, &bottom}) {
        if (!(s->length() > 0.0)) {
            throw Error(ErrorCode::ZeroLengthSegment, "segment " + s->id + " has zero length");
        }
    }
    if (!(tau >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tilt threshold must be >= 0");
    TiltReport t;
    t.threshold = tau;
    t.lr_ratio = left.length() / right.length();
    t.tb_ratio = top.length() / bottom.length();
    if (t.lr_ratio > 1.0 + tau) {
        t.verdict = TiltVerdict::tilt_right;
    } else if (t.lr_ratio < 1.0 - tau) {
        t.verdict = TiltVerdict::tilt_left;
    }
    return t;
}

DistortionProfile distortion_profile(std::span<const Point2> chain, Point2 image_center) {
    if (chain.size() < 3) {
        throw Error(ErrorCode::ChainTooShort,
                    "need at least 3 chain points, got " + std::to_string(chain.size()));
    }
    const Point2 p0 = chain.front();
    const Point2 pn = chain.back();
    const double len = distance(p0, pn);
    if (!(len > 0.0)) throw Error(ErrorCode::ChainTooShort, "chain endpoints coincide");
    const double nx = -(pn.y - p0.y) / len;
    const double ny = (pn.x - p0.x) / len;
    double peak = 0.0;
    for (std::size_t i = 1; i + 1 < chain.size(); ++i) {
        const double s = nx * (chain[i].x - p0.x) + ny * (chain[i].y - p0.y);
        if (std::abs(s) > std::abs(peak)) peak = s;
    }
    DistortionProfile d;
    d.max_sagitta_px = std::abs(peak);
    d.normalized_sagitta = d.max_sagitta_px / len;
    if (d.normalized_sagitta < kStraightThreshold) return d;
    const double centre_side = nx * (image_center.x - p0.x) + ny * (image_center.y - p0.y);
    if (std::abs(centre_side) < 1e-9) return d;
    d.sign = (peak * centre_side > 0.0) ? DistortionSign::pincushion : DistortionSign::barrel;
    return d;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

json run_metrology(const AnnotationSet& ann, int width, int height, std::uint64_t seed) {
    json out;
    json errors = json::array();

    std::map<Axis, VanishingPoint> vps;
    json vp_out = json::object();
    for (Axis axis : {Axis::x, Axis::y, Axis::z_vertical}) {
        std::vector<LineSegment> segs;
        for (const auto& s : ann.segments) {
            if (s.axis == axis && s.role != Role::straightness_chain) segs.push_back(s);
        }
        if (segs.empty()) continue;
        try {
            vps[axis] = fit_vanishing_point(segs);
            vp_out[std::string(to_string(axis))] = vp_json(vps[axis]);
        } catch (const Error& e) {
            errors.push_back(error_json("vanishing_point." + std::string(to_string(axis)), e));
        }
    }
    out["vanishing_points"] = vp_out;

    std::optional<Vec3> horizon;
    if (vps.contains(Axis::x) && vps.contains(Axis::y)) {
        try {
            horizon = fit_horizon(vps[Axis::x], vps[Axis::y]);
        } catch (const Error& e) {
            errors.push_back(error_json("horizon", e));
        }
    }
    out["horizon"] = horizon ? json(*horizon) : json(nullptr);

    std::map<std::string, const LineSegment*> sides;
    for (const auto& s : ann.segments) {
        const std::string id = lower(s.id);
        for (const char* name : {"left", "right", "top", "bottom"}) {
            if (id == name || id == std::string("tilt_") + name) sides[name] = &s;
        }
    }
    out["tilt"] = nullptr;
    if (sides.size() == 4) {
        try {
            const TiltReport t =
                tilt_report(*sides["left"], *sides["right"], *sides["top"], *sides["bottom"]);
            out["tilt"] = {{"lr_ratio", t.lr_ratio},
                           {"tb_ratio", t.tb_ratio},
                           {"verdict", to_string(t.verdict)},
                           {"threshold", t.threshold}};
        } catch (const Error& e) {
            errors.push_back(error_json("tilt", e));
        }
    }

    json distortion = json::array();
    const Point2 centre{width / 2.0, height / 2.0};
    for (const auto& [chain_id, points] : straightness_chains(ann)) {
        try {
            const DistortionProfile d = distortion_profile(points, centre);
            distortion.push_back({{"chain_id", chain_id},
                                  {"points", static_cast<int>(points.size())},
                                  {"max_sagitta_px", d.max_sagitta_px},
                                  {"normalized_sagitta", d.normalized_sagitta},
                                  {"sign", to_string(d.sign)}});
        } catch (const Error& e) {
            errors.push_back(error_json("distortion." + chain_id, e));
        }
    }
    out["distortion"] = distortion;

    json heights = json::array();
    PerturbationPolicy policy;
    policy.seed = seed;
    for (const auto& s : ann.segments) {
        if (s.role != Role::target_height) continue;
        const std::string stage = "height." + s.id;
        if (!vps.contains(Axis::z_vertical)) {
            errors.push_back(error_json(
                stage, Error(ErrorCode::TooFewSegments, "no vertical vanishing point")));
            continue;
        }
        if (!horizon) {
            errors.push_back(
                error_json(stage, Error(ErrorCode::TooFewSegments, "no horizon available")));
            continue;
        }
        try {
            const HeightEstimate h =
                estimate_height(ann, vps[Axis::z_vertical], *horizon, policy, s.id);
            heights.push_back({{"target_id", h.target_id},
                               {"height_cm", h.height_cm},
                               {"interval_cm", {h.interval_cm.low, h.interval_cm.high}},
                               {"method", h.method},
                               {"perturbation",
                                {{"radius_px", policy.radius_px},
                                 {"policy", "endpoint corners +-2 px (printproof policy)"}}}});
        } catch (const Error& e) {
            errors.push_back(error_json(stage, e));
        }
    }
    out["heights"] = heights;
    out["errors"] = errors;
    return out;
}

}  // namespace printproof::metrology
