#pragma once

#include <cstdint>
#include <vector>

#include "hybrid_drive/common.hpp"
#include "hybrid_drive/track.hpp"

namespace hybrid_drive {

/// Kinematic bicycle constants. Defaults are TORCS-comparable magnitudes.
struct VehicleParams
{
    double wheelbase = 2.6;
    double max_steer = 0.45;  ///< rad at |steer command| = 1
    double max_accel = 4.0;   ///< m/s^2 at accel command = 1
    double max_brake = 8.0;   ///< m/s^2 at accel command = -1
    double max_speed = 83.3;  ///< m/s
    double half_length = 2.25;
};

/// Scripted opponent: holds a target speed at a fixed lateral offset from
/// the centerline using proportional steering.
struct OpponentScript
{
    int id = 0;
    double target_speed = 10.0;
    double lateral_offset = 0.0; ///< m, positive right of centerline
};

struct Opponent
{
    VehiclePose pose;
    OpponentScript script;
};

struct WorldState
{
    VehiclePose ego;
    std::vector<Opponent> opponents;
    double t = 0.0;
    int lap_count = 0;
    /// Ego arc length at the last step and signed distance travelled along the
    /// centerline since the episode began; laps count whole track lengths of it.
    double ego_s = 0.0;
    double progress = 0.0;
    std::uint64_t steps = 0;
};

struct WorldParams
{
    VehicleParams vehicle;
    double dt = 0.05;
    double collision_radius = 4.5; ///< m between centers; sum of half-lengths
    int target_laps = 1;           ///< 0 disables LapDone
};

/// Fresh world with the ego at `ego`; opponents are placed by the caller.
WorldState make_world(const TrackGeometry& geom, const VehiclePose& ego,
                      std::vector<Opponent> opponents = {});

/// Opponent placed at arc length `s` on its scripted offset, already at its target speed.
Opponent place_opponent(const TrackGeometry& geom, double s, const OpponentScript& script);

/// One forward-Euler step of the kinematic bicycle model. Saturating: inputs
/// are clamped to [-1, 1] and speed to [0, max_speed].
VehiclePose advance_vehicle(const VehiclePose& pose, Command cmd, double dt,
                            const VehicleParams& vehicle);

/// Command an opponent script issues for its current pose.
Command opponent_command(const TrackGeometry& geom, const Opponent& opp,
                         const VehicleParams& vehicle);

WorldState step(const WorldState& state, Command cmd, const TrackGeometry& geom,
                const WorldParams& params);

enum class EpisodeStatusKind { Running, OffTrack, Collided, LapDone };

struct EpisodeStatus
{
    EpisodeStatusKind kind = EpisodeStatusKind::Running;
    int laps = 0;

    bool terminal() const { return kind != EpisodeStatusKind::Running; }
    /// Failure terminations; a finished lap is a success.
    bool failed() const
    {
        return kind == EpisodeStatusKind::OffTrack || kind == EpisodeStatusKind::Collided;
    }
};

const char* to_string(EpisodeStatusKind kind);

/// Collision takes precedence over leaving the track, which takes precedence over a finished lap.
EpisodeStatus episode_status(const WorldState& state, const TrackGeometry& geom,
                             const WorldParams& params);

} // namespace hybrid_drive
