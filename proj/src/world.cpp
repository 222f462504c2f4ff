#include "hybrid_drive/world.hpp"

#include <algorithm>
#include <cmath>

namespace hybrid_drive {

namespace {

constexpr double kOpponentHeadingGain = 1.5;
constexpr double kOpponentOffsetGain = 0.3;
constexpr double kOpponentSpeedGain = 0.5;

double signed_arc_delta(double from, double to, double total)
{
    double d = std::fmod(to - from, total);
    if (d > total / 2.0) d -= total;
    else if (d <= -total / 2.0) d += total;
    return d;
}

} // namespace

WorldState make_world(const TrackGeometry& geom, const VehiclePose& ego,
                      std::vector<Opponent> opponents)
{
    WorldState state;
    state.ego = ego;
    state.ego.heading = wrap_angle(ego.heading);
    state.opponents = std::move(opponents);
    state.ego_s = track_relative_pose(geom, state.ego).s;
    return state;
}

Opponent place_opponent(const TrackGeometry& geom, double s, const OpponentScript& script)
{
    return {pose_from_track(geom, s, script.lateral_offset, 0.0, script.target_speed), script};
}

VehiclePose advance_vehicle(const VehiclePose& pose, Command cmd, double dt,
                            const VehicleParams& vehicle)
{
    cmd = clamp_unit(cmd);
    const double wheel_angle = cmd.steer * vehicle.max_steer;
    const double accel = cmd.accel >= 0.0 ? cmd.accel * vehicle.max_accel
                                          : cmd.accel * vehicle.max_brake;

    VehiclePose next = pose;
    next.x += pose.speed * std::cos(pose.heading) * dt;
    next.y += pose.speed * std::sin(pose.heading) * dt;
    next.heading = wrap_angle(pose.heading
                              + pose.speed / vehicle.wheelbase * std::tan(wheel_angle) * dt);
    next.speed = std::clamp(pose.speed + accel * dt, 0.0, vehicle.max_speed);
    return next;
}

Command opponent_command(const TrackGeometry& geom, const Opponent& opp,
                         const VehicleParams& vehicle)
{
    const TrackRelativePose rel = track_relative_pose(geom, opp.pose);
    const double curvature = geom.point_at(rel.s).curvature;
    const double feed_forward = std::atan(vehicle.wheelbase * curvature) / vehicle.max_steer;
    const double steer = feed_forward + kOpponentHeadingGain * rel.delta_psi
                         + kOpponentOffsetGain * (rel.e - opp.script.lateral_offset);
    const double accel = kOpponentSpeedGain * (opp.script.target_speed - opp.pose.speed);
    return clamp_unit(Command{steer, accel});
}

WorldState step(const WorldState& state, Command cmd, const TrackGeometry& geom,
                const WorldParams& params)
{
    WorldState next = state;
    next.ego = advance_vehicle(state.ego, cmd, params.dt, params.vehicle);
    for (auto& opp : next.opponents) {
        const Command c = opponent_command(geom, opp, params.vehicle);
        opp.pose = advance_vehicle(opp.pose, c, params.dt, params.vehicle);
    }

    const double s = track_relative_pose(geom, next.ego).s;
    next.progress += signed_arc_delta(state.ego_s, s, geom.total_length());
    next.ego_s = s;
    if (next.progress > 0.0)
        next.lap_count = std::max(next.lap_count,
                                  static_cast<int>(next.progress / geom.total_length()));
    next.t = state.t + params.dt;
    ++next.steps;
    return next;
}

const char* to_string(EpisodeStatusKind kind)
{
    switch (kind) {
    case EpisodeStatusKind::Running: return "running";
    case EpisodeStatusKind::OffTrack: return "off_track";
    case EpisodeStatusKind::Collided: return "collided";
    case EpisodeStatusKind::LapDone: return "lap_done";
    }
    return "unknown";
}

EpisodeStatus episode_status(const WorldState& state, const TrackGeometry& geom,
                             const WorldParams& params)
{
    for (const auto& opp : state.opponents) {
        const double d = std::hypot(opp.pose.x - state.ego.x, opp.pose.y - state.ego.y);
        if (d < params.collision_radius) return {EpisodeStatusKind::Collided, state.lap_count};
    }
    if (std::abs(track_relative_pose(geom, state.ego).track_pos) > 1.0)
        return {EpisodeStatusKind::OffTrack, state.lap_count};
    if (params.target_laps > 0 && state.lap_count >= params.target_laps)
        return {EpisodeStatusKind::LapDone, state.lap_count};
    return {EpisodeStatusKind::Running, state.lap_count};
}

} // namespace hybrid_drive
