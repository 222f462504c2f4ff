#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "hybrid_drive/track.hpp"
#include "hybrid_drive/world.hpp"

namespace hybrid_drive {

inline constexpr std::size_t kTrackRayCount = 19;
inline constexpr std::size_t kOpponentSectorCount = 36;
inline constexpr std::size_t kStateWidth = 29;
inline constexpr double kSensorRange = 200.0;
inline constexpr double kSectorWidth = kTwoPi / kOpponentSectorCount;

using TrackRays = std::array<double, kTrackRayCount>;
using OpponentSectors = std::array<double, kOpponentSectorCount>;
using StateVector = std::array<double, kStateWidth>;

struct SensorConfig
{
    double max_speed = 83.3;
    double rpm_per_mps = 95.0;
    double rpm_max = 9500.0;
};

/// TORCS-style observation.
///
/// Ray k points (-90 + 10k) degrees clockwise from the heading, so ray 0
/// looks left, ray 9 ahead and ray 18 right. Opponent sector j
/// covers ego-frame bearings [10j, 10(j+1)) degrees with 0 due left, 90 ahead
/// and 180 due right. A reading of exactly 200 means nothing was detected.
struct SensorFrame
{
    TrackRays track_rays{};
    OpponentSectors opponents{};
    double speed = 0.0;
    double speed_y = 0.0; ///< lateral body velocity, zero for the kinematic model
    double speed_z = 0.0;
    std::array<double, 4> wheel_speeds{};
    double engine_rpm = 0.0;
    double track_pos = 0.0;
    double angle = 0.0;
    double t = 0.0;
};

/// Ego-frame bearing of a world point in [0, 2pi): pi/2 ahead, 0 left, pi right.
double opponent_bearing(const VehiclePose& ego, double x, double y);

/// Ray readings; all zero when the pose is off the track.
TrackRays track_rays(const TrackGeometry& geom, const VehiclePose& pose);

OpponentSectors opponent_sectors(const WorldState& state);

SensorFrame sensor_frame(const WorldState& state, const TrackGeometry& geom,
                         const SensorConfig& cfg = {});

/// Network input, every component in [-1, 1]:
///   [0] angle/pi  [1] track_pos  [2..4] speed x,y,z / max_speed
///   [5..8] wheel speeds / max_speed  [9] rpm / rpm_max  [10..28] rays / 200
StateVector normalize_state(const SensorFrame& frame, const SensorConfig& cfg = {});

/// Column list matching sensor_frame_csv_row.
std::string sensor_frame_csv_header();
std::string sensor_frame_csv_row(const SensorFrame& frame);

} // namespace hybrid_drive
