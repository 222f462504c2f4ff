#include "hybrid_drive/sensors.hpp"

#include <cmath>

#include "hybrid_drive/csv.hpp"

namespace hybrid_drive {

double opponent_bearing(const VehiclePose& ego, double x, double y)
{
    const double dx = x - ego.x;
    const double dy = y - ego.y;
    const double forward = dx * std::cos(ego.heading) + dy * std::sin(ego.heading);
    const double left = -dx * std::sin(ego.heading) + dy * std::cos(ego.heading);
    return wrap_angle_positive(kPi / 2.0 - std::atan2(left, forward));
}

TrackRays track_rays(const TrackGeometry& geom, const VehiclePose& pose)
{
    TrackRays rays{};
    if (std::abs(track_relative_pose(geom, pose).track_pos) > 1.0) return rays;
    for (std::size_t k = 0; k < kTrackRayCount; ++k) {
        const double clockwise = (-90.0 + 10.0 * static_cast<double>(k)) * kPi / 180.0;
        rays[k] = geom.ray_to_edge({pose.x, pose.y}, pose.heading - clockwise, kSensorRange);
    }
    return rays;
}

OpponentSectors opponent_sectors(const WorldState& state)
{
    OpponentSectors sectors;
    sectors.fill(kSensorRange);
    for (const auto& opp : state.opponents) {
        const double d = std::hypot(opp.pose.x - state.ego.x, opp.pose.y - state.ego.y);
        if (d >= kSensorRange) continue;
        const double theta = opponent_bearing(state.ego, opp.pose.x, opp.pose.y);
        auto j = static_cast<std::size_t>(std::floor(theta / kSectorWidth));
        if (j >= kOpponentSectorCount) j = kOpponentSectorCount - 1;
        sectors[j] = std::min(sectors[j], d);
    }
    return sectors;
}

SensorFrame sensor_frame(const WorldState& state, const TrackGeometry& geom,
                         const SensorConfig& cfg)
{
    const TrackRelativePose rel = track_relative_pose(geom, state.ego);
    SensorFrame frame;
    frame.track_rays = track_rays(geom, state.ego);
    frame.opponents = opponent_sectors(state);
    frame.speed = state.ego.speed;
    frame.wheel_speeds.fill(state.ego.speed);
    frame.engine_rpm = std::min(state.ego.speed * cfg.rpm_per_mps, cfg.rpm_max);
    frame.track_pos = rel.track_pos;
    frame.angle = rel.delta_psi;
    frame.t = state.t;
    return frame;
}

StateVector normalize_state(const SensorFrame& frame, const SensorConfig& cfg)
{
    StateVector v{};
    v[0] = frame.angle / kPi;
    v[1] = frame.track_pos;
    v[2] = frame.speed / cfg.max_speed;
    v[3] = frame.speed_y / cfg.max_speed;
    v[4] = frame.speed_z / cfg.max_speed;
    for (std::size_t i = 0; i < 4; ++i) v[5 + i] = frame.wheel_speeds[i] / cfg.max_speed;
    v[9] = frame.engine_rpm / cfg.rpm_max;
    for (std::size_t k = 0; k < kTrackRayCount; ++k) v[10 + k] = frame.track_rays[k] / kSensorRange;
    for (double& x : v) x = clamp_unit(x);
    return v;
}

std::string sensor_frame_csv_header()
{
    std::string h = "t,angle,track_pos,speed,speed_y,speed_z";
    for (int i = 0; i < 4; ++i) h += ",wheel" + std::to_string(i);
    h += ",rpm";
    for (std::size_t k = 0; k < kTrackRayCount; ++k) h += ",track" + std::to_string(k);
    for (std::size_t j = 0; j < kOpponentSectorCount; ++j) h += ",opp" + std::to_string(j);
    return h;
}

std::string sensor_frame_csv_row(const SensorFrame& f)
{
    std::string row = csv_number(f.t);
    for (double v : {f.angle, f.track_pos, f.speed, f.speed_y, f.speed_z}) row += "," + csv_number(v);
    for (double v : f.wheel_speeds) row += "," + csv_number(v);
    row += "," + csv_number(f.engine_rpm);
    for (double v : f.track_rays) row += "," + csv_number(v);
    for (double v : f.opponents) row += "," + csv_number(v);
    return row;
}

} // namespace hybrid_drive
