#include "hybrid_drive/path_tracking.hpp"

#include <cmath>
#include <stdexcept>

namespace hybrid_drive {

void TrackingConfig::validate() const
{
    if (!(eta1 > 0.0) || !(eta2 > 0.0)) throw std::invalid_argument("tracking gains must be positive");
    if (!(v_ref > 0.0)) throw std::invalid_argument("tracking v_ref must be positive");
    if (v_min < 0.0 || v_min > v_ref) throw std::invalid_argument("tracking v_min must lie in [0, v_ref]");
    if (k_slow < 0.0 || k_speed < 0.0) throw std::invalid_argument("tracking speed gains must be non-negative");
}

double tracking_steer_raw(double delta_psi, double e, const TrackingConfig& cfg)
{
    return cfg.eta1 * delta_psi + cfg.eta2 * e;
}

double tracking_steer(double delta_psi, double e, const TrackingConfig& cfg)
{
    return clamp_unit(tracking_steer_raw(delta_psi, e, cfg));
}

double tracking_target_speed(double steer, const TrackingConfig& cfg)
{
    return std::max(cfg.v_ref * (1.0 - cfg.k_slow * std::abs(steer)), cfg.v_min);
}

double tracking_accel(double steer, double speed, const TrackingConfig& cfg)
{
    return clamp_unit(cfg.k_speed * (tracking_target_speed(steer, cfg) - speed) / cfg.v_ref);
}

Command tracking_command(const TrackRelativePose& rel, double speed, const TrackingConfig& cfg)
{
    const double steer = tracking_steer(rel.delta_psi, rel.e, cfg);
    return {steer, tracking_accel(steer, speed, cfg)};
}

} // namespace hybrid_drive
