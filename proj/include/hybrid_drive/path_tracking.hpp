#pragma once

#include "hybrid_drive/common.hpp"
#include "hybrid_drive/track.hpp"

namespace hybrid_drive {

struct TrackingConfig
{
    double eta1 = 3.18; ///< 1/rad, gain on heading error
    double eta2 = 2.0;  ///< 1/m, gain on lateral offset
    double v_ref = 20.0;
    double v_min = 5.0;
    double k_slow = 0.6;
    double k_speed = 2.0;

    void validate() const;
};

/// eta1 * delta_psi + eta2 * e before clamping. Both terms are corrective under
/// the track sign conventions (e > 0 right of center, positive steer turns left).
double tracking_steer_raw(double delta_psi, double e, const TrackingConfig& cfg);

double tracking_steer(double delta_psi, double e, const TrackingConfig& cfg);

/// Cruise speed shrinks with |steer|: v_ref (1 - k_slow |steer|), floored at v_min.
double tracking_target_speed(double steer, const TrackingConfig& cfg);

double tracking_accel(double steer, double speed, const TrackingConfig& cfg);

Command tracking_command(const TrackRelativePose& rel, double speed, const TrackingConfig& cfg);

} // namespace hybrid_drive
