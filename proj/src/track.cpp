#include "hybrid_drive/track.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace hybrid_drive {

namespace {

constexpr double kRayEpsilon = 1e-9;

Point advance(const Segment& seg, double sigma, double* heading_out)
{
    const double h0 = seg.start_heading;
    const double k = seg.shape.curvature;
    if (seg.shape.kind == SegmentKind::Straight) {
        if (heading_out) *heading_out = h0;
        return {seg.start.x + sigma * std::cos(h0), seg.start.y + sigma * std::sin(h0)};
    }
    const double h = h0 + k * sigma;
    if (heading_out) *heading_out = h;
    // chord form: p = p0 + (sin h - sin h0, cos h0 - cos h) / k
    return {seg.start.x + (std::sin(h) - std::sin(h0)) / k,
            seg.start.y + (std::cos(h0) - std::cos(h)) / k};
}

Point arc_center(const Segment& seg)
{
    const double r = 1.0 / seg.shape.curvature;
    return {seg.start.x - r * std::sin(seg.start_heading),
            seg.start.y + r * std::cos(seg.start_heading)};
}

/// Arc length along an arc segment at which the radial direction from the
/// center equals `angle`, measured in the direction of travel, in [0, 2pi/|k|).
double arc_param_for_angle(const Segment& seg, Point center, double angle)
{
    const double k = seg.shape.curvature;
    const double start_angle = std::atan2(seg.start.y - center.y, seg.start.x - center.x);
    const double delta = k > 0.0 ? wrap_angle_positive(angle - start_angle)
                                 : wrap_angle_positive(start_angle - angle);
    return delta / std::abs(k);
}

struct Projection
{
    double sigma = 0.0;
    double distance = 0.0;
};

Projection project_onto(const Segment& seg, Point p)
{
    const double len = seg.shape.length;
    if (seg.shape.kind == SegmentKind::Straight) {
        const double ux = std::cos(seg.start_heading);
        const double uy = std::sin(seg.start_heading);
        const double along = (p.x - seg.start.x) * ux + (p.y - seg.start.y) * uy;
        const double sigma = std::clamp(along, 0.0, len);
        const Point q = advance(seg, sigma, nullptr);
        return {sigma, std::hypot(p.x - q.x, p.y - q.y)};
    }

    const Point c = arc_center(seg);
    const double radius = 1.0 / std::abs(seg.shape.curvature);
    const double rx = p.x - c.x;
    const double ry = p.y - c.y;
    const double rho = std::hypot(rx, ry);
    if (rho == 0.0) return {0.0, radius};

    const double sigma = arc_param_for_angle(seg, c, std::atan2(ry, rx));
    if (sigma <= len) return {sigma, std::abs(rho - radius)};

    // outside the swept range: the nearer endpoint wins, start on ties
    const Point a = seg.start;
    const Point b = advance(seg, len, nullptr);
    const double da = std::hypot(p.x - a.x, p.y - a.y);
    const double db = std::hypot(p.x - b.x, p.y - b.y);
    return db < da ? Projection{len, db} : Projection{0.0, da};
}

double ray_hits_segment(Point o, double dx, double dy, Point a, Point b)
{
    const double ex = b.x - a.x;
    const double ey = b.y - a.y;
    const double denom = dx * ey - dy * ex;
    if (denom == 0.0) return std::numeric_limits<double>::infinity();
    const double wx = a.x - o.x;
    const double wy = a.y - o.y;
    const double t = (wx * ey - wy * ex) / denom;
    const double u = (wx * dy - wy * dx) / denom;
    if (t > kRayEpsilon && u >= 0.0 && u <= 1.0) return t;
    return std::numeric_limits<double>::infinity();
}

double ray_hits_arc(Point o, double dx, double dy, const Segment& seg, Point center, double radius)
{
    const double fx = o.x - center.x;
    const double fy = o.y - center.y;
    const double b = fx * dx + fy * dy;
    const double c = fx * fx + fy * fy - radius * radius;
    const double disc = b * b - c;
    double best = std::numeric_limits<double>::infinity();
    if (disc < 0.0) return best;
    const double root = std::sqrt(disc);
    for (const double t : {-b - root, -b + root}) {
        if (t <= kRayEpsilon || t >= best) continue;
        const double px = o.x + t * dx - center.x;
        const double py = o.y + t * dy - center.y;
        const double sigma = arc_param_for_angle(seg, center, std::atan2(py, px));
        if (sigma <= seg.shape.length * (1.0 + 1e-12)) best = t;
    }
    return best;
}

std::size_t segment_index(const std::vector<Segment>& segs, double s)
{
    std::size_t lo = 0;
    std::size_t hi = segs.size();
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (segs[mid].start_s <= s) lo = mid;
        else hi = mid;
    }
    return lo;
}

} // namespace

SegmentSpec SegmentSpec::straight(double length)
{
    return {SegmentKind::Straight, length, 0.0};
}

SegmentSpec SegmentSpec::arc(double radius, double sweep)
{
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw std::invalid_argument("arc radius must be positive, got " + std::to_string(radius));
    if (sweep == 0.0 || !std::isfinite(sweep))
        throw std::invalid_argument("arc sweep must be non-zero and finite");
    return {SegmentKind::Arc, radius * std::abs(sweep), (sweep > 0.0 ? 1.0 : -1.0) / radius};
}

TrackGeometry build_track(const TrackSpec& spec)
{
    if (spec.segments.empty()) throw std::invalid_argument("track has no segments");
    if (!(spec.half_width > kVehicleHalfWidth) || !std::isfinite(spec.half_width))
        throw std::invalid_argument("half_width must exceed the vehicle half-width ("
                                    + std::to_string(kVehicleHalfWidth) + " m)");

    TrackGeometry geom;
    geom.half_width_ = spec.half_width;
    Point cursor{};
    double heading = 0.0;
    double s = 0.0;
    for (const auto& shape : spec.segments) {
        if (!(shape.length > 0.0) || !std::isfinite(shape.length))
            throw std::invalid_argument("segment length must be positive");
        if (shape.kind == SegmentKind::Arc && 1.0 / std::abs(shape.curvature) <= spec.half_width)
            throw std::invalid_argument("arc radius must exceed half_width");
        Segment seg{shape, cursor, heading, s};
        double end_heading = heading;
        cursor = advance(seg, shape.length, &end_heading);
        heading = end_heading;
        s += shape.length;
        geom.segments_.push_back(seg);
    }
    geom.total_length_ = s;

    const double gap = std::hypot(cursor.x, cursor.y);
    if (gap > kClosureTolerance)
        throw std::invalid_argument("track does not close: endpoint is " + std::to_string(gap)
                                    + " m from the start");
    if (std::abs(wrap_angle(heading)) > kClosureTolerance)
        throw std::invalid_argument("track does not close: end heading differs by "
                                    + std::to_string(wrap_angle(heading)) + " rad");
    return geom;
}

CenterlinePoint TrackGeometry::point_at(double s) const
{
    s = std::fmod(s, total_length_);
    if (s < 0.0) s += total_length_;
    const Segment& seg = segments_[segment_index(segments_, s)];
    CenterlinePoint out;
    out.position = advance(seg, s - seg.start_s, &out.heading);
    out.heading = wrap_angle(out.heading);
    out.curvature = seg.shape.curvature;
    return out;
}

double TrackGeometry::ray_to_edge(Point origin, double heading, double max_range) const
{
    const double dx = std::cos(heading);
    const double dy = std::sin(heading);
    double best = max_range;
    for (const auto& seg : segments_) {
        if (seg.shape.kind == SegmentKind::Straight) {
            const Point a = seg.start;
            const Point b = advance(seg, seg.shape.length, nullptr);
            const double nx = -std::sin(seg.start_heading);
            const double ny = std::cos(seg.start_heading);
            for (const double side : {half_width_, -half_width_}) {
                const Point ea{a.x + side * nx, a.y + side * ny};
                const Point eb{b.x + side * nx, b.y + side * ny};
                best = std::min(best, ray_hits_segment(origin, dx, dy, ea, eb));
            }
        } else {
            const Point c = arc_center(seg);
            const double radius = 1.0 / std::abs(seg.shape.curvature);
            for (const double edge_radius : {radius - half_width_, radius + half_width_})
                best = std::min(best, ray_hits_arc(origin, dx, dy, seg, c, edge_radius));
        }
    }
    return best;
}

TrackRelativePose track_relative_pose(const TrackGeometry& geom, const VehiclePose& pose)
{
    const Point p{pose.x, pose.y};
    const auto& segs = geom.segments();
    std::size_t best_index = 0;
    Projection best{0.0, std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const Projection cand = project_onto(segs[i], p);
        if (cand.distance < best.distance - 1e-12) {
            best = cand;
            best_index = i;
        }
    }

    const Segment& seg = segs[best_index];
    double tangent = 0.0;
    const Point q = advance(seg, best.sigma, &tangent);

    TrackRelativePose rel;
    rel.s = seg.start_s + best.sigma;
    if (rel.s >= geom.total_length()) rel.s -= geom.total_length();
    rel.e = (p.x - q.x) * std::sin(tangent) - (p.y - q.y) * std::cos(tangent);
    rel.delta_psi = wrap_angle(tangent - pose.heading);
    rel.track_pos = rel.e / geom.half_width();
    return rel;
}

VehiclePose pose_from_track(const TrackGeometry& geom, double s, double e, double delta_psi,
                            double speed)
{
    const CenterlinePoint c = geom.point_at(s);
    return {c.position.x + e * std::sin(c.heading), c.position.y - e * std::cos(c.heading),
            wrap_angle(c.heading - delta_psi), speed};
}

TrackSpec parse_track_spec(std::istream& in)
{
    TrackSpec spec;
    bool have_width = false;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string keyword;
        if (!(fields >> keyword)) continue;

        const auto fail = [&](const std::string& what) {
            return std::invalid_argument("track line " + std::to_string(line_no) + ": " + what);
        };
        if (keyword == "half_width") {
            if (!(fields >> spec.half_width)) throw fail("expected half_width <m>");
            have_width = true;
        } else if (keyword == "straight") {
            double length = 0.0;
            if (!(fields >> length)) throw fail("expected straight <length_m>");
            spec.segments.push_back(SegmentSpec::straight(length));
        } else if (keyword == "arc") {
            double radius = 0.0;
            double sweep = 0.0;
            if (!(fields >> radius >> sweep)) throw fail("expected arc <radius_m> <sweep_rad>");
            spec.segments.push_back(SegmentSpec::arc(radius, sweep));
        } else {
            throw fail("unknown keyword '" + keyword + "'");
        }
        std::string extra;
        if (fields >> extra) throw fail("trailing token '" + extra + "'");
    }
    if (!have_width) throw std::invalid_argument("track file is missing the half_width header");
    return spec;
}

TrackSpec load_track_spec(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open track file " + path.string());
    return parse_track_spec(in);
}

TrackSpec builtin_track_spec(std::string_view name)
{
    constexpr double kHalfPi = kPi / 2.0;
    if (name == "oval") {
        return {{SegmentSpec::straight(100.0), SegmentSpec::arc(30.0, kPi),
                 SegmentSpec::straight(100.0), SegmentSpec::arc(30.0, kPi)},
                6.0};
    }
    if (name == "curvy") {
        // two straights sized so the loop closes exactly
        const double east = 40.0 + 20.0 * std::sqrt(3.0) + 5.0;
        return {{SegmentSpec::straight(east), SegmentSpec::arc(30.0, kHalfPi),
                 SegmentSpec::straight(25.0), SegmentSpec::arc(20.0, kHalfPi),
                 SegmentSpec::straight(60.0), SegmentSpec::arc(20.0, -kPi / 3.0),
                 SegmentSpec::arc(20.0, kPi / 3.0), SegmentSpec::arc(25.0, kHalfPi),
                 SegmentSpec::straight(40.0), SegmentSpec::arc(30.0, kHalfPi)},
                6.0};
    }
    throw std::invalid_argument("unknown built-in track '" + std::string(name) + "'");
}

TrackGeometry builtin_track(std::string_view name)
{
    return build_track(builtin_track_spec(name));
}

TrackGeometry resolve_track(std::string_view name_or_path)
{
    if (name_or_path == "oval" || name_or_path == "curvy") return builtin_track(name_or_path);
    return build_track(load_track_spec(std::filesystem::path(name_or_path)));
}

} // namespace hybrid_drive
