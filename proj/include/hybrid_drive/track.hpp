#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "hybrid_drive/common.hpp"

namespace hybrid_drive {

struct Point
{
    double x = 0.0;
    double y = 0.0;
};

/// World-frame vehicle pose. Heading is counterclockwise from +x, in (-pi, pi].
struct VehiclePose
{
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
    double speed = 0.0;
};

/// Pose expressed against the track centerline.
///
/// `e` is positive when the vehicle sits to the right of the centerline and
/// `delta_psi` is positive when its heading is rotated clockwise from the
/// local tangent. `track_pos` is `e / half_width`.
struct TrackRelativePose
{
    double s = 0.0;
    double e = 0.0;
    double delta_psi = 0.0;
    double track_pos = 0.0;
};

enum class SegmentKind { Straight, Arc };

/// Input description of a piece of centerline.
struct SegmentSpec
{
    SegmentKind kind = SegmentKind::Straight;
    double length = 0.0;
    double curvature = 0.0; ///< signed, 1/m, positive turns left

    static SegmentSpec straight(double length);
    /// `sweep` is signed: positive sweeps counterclockwise (a left turn).
    static SegmentSpec arc(double radius, double sweep);
};

struct TrackSpec
{
    std::vector<SegmentSpec> segments;
    double half_width = 0.0;
};

/// A segment placed in the world frame.
struct Segment
{
    SegmentSpec shape;
    Point start;
    double start_heading = 0.0;
    double start_s = 0.0;
};

struct CenterlinePoint
{
    Point position;
    double heading = 0.0;
    double curvature = 0.0;
};

inline constexpr double kClosureTolerance = 1e-6;
inline constexpr double kVehicleHalfWidth = 1.0;

class TrackGeometry
{
public:
    const std::vector<Segment>& segments() const { return segments_; }
    double half_width() const { return half_width_; }
    double total_length() const { return total_length_; }

    /// Centerline point at arc length `s` (wrapped onto the loop).
    CenterlinePoint point_at(double s) const;

    /// Distance from `origin` along direction `heading` to the first track
    /// edge, or `max_range` when nothing is hit closer.
    double ray_to_edge(Point origin, double heading, double max_range) const;

private:
    friend TrackGeometry build_track(const TrackSpec& spec);

    std::vector<Segment> segments_;
    double half_width_ = 0.0;
    double total_length_ = 0.0;
};

/// Places the segments starting at the origin heading along +x and checks
/// that the loop closes in position and heading.
/// Throws std::invalid_argument on a non-closing loop or bad dimensions.
TrackGeometry build_track(const TrackSpec& spec);

/// Nearest-centerline projection. Ties between equidistant candidates go to
/// the smallest arc length.
TrackRelativePose track_relative_pose(const TrackGeometry& geom, const VehiclePose& pose);

/// Inverse of track_relative_pose: a pose at (s, e) rotated `delta_psi`
/// clockwise from the tangent.
VehiclePose pose_from_track(const TrackGeometry& geom, double s, double e, double delta_psi,
                            double speed = 0.0);

/// Plain-text track description: a `half_width <m>` header, then one
/// `straight <length_m>` or `arc <radius_m> <sweep_rad>` per line.
/// Blank lines and `#` comments are ignored.
TrackSpec parse_track_spec(std::istream& in);
TrackSpec load_track_spec(const std::filesystem::path& path);

/// Built-in circuits: "oval" and "curvy".
TrackSpec builtin_track_spec(std::string_view name);
TrackGeometry builtin_track(std::string_view name);

/// Resolves a built-in name first, then falls back to a track file path.
TrackGeometry resolve_track(std::string_view name_or_path);

} // namespace hybrid_drive
