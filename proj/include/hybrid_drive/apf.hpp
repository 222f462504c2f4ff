#pragma once

#include <span>
#include <vector>

#include "hybrid_drive/common.hpp"
#include "hybrid_drive/sensors.hpp"

namespace hybrid_drive {

/// Repulsive-field gains. Defaults: k_fx = 20, k_fy = 10, eta = 1.5.
struct ApfConfig
{
    double k_fx = 20.0;
    double k_fy = 10.0;
    double eta = 1.5;
    double d_cut = 50.0; ///< m; readings at or beyond contribute nothing

    void validate() const;
};

/// One detected obstacle in the ego frame. `theta` follows the sensor
/// convention: pi/2 ahead, 0 due left, pi due right.
struct ObstacleReading
{
    double d = 0.0;
    double theta = 0.0;
};

/// Ego-frame repulsive force: `fx` lateral (positive left), `fy` longitudinal (positive forward).
struct RepulsiveForce
{
    double fx = 0.0;
    double fy = 0.0;
};

/// fx = -sum cos(theta_i) / d_i^eta, fy = -sum sin(theta_i) / d_i^eta over the
/// forward half-plane (theta in [0, pi]) readings closer than d_cut.
/// Throws std::invalid_argument when any d <= 0.
RepulsiveForce repulsive_force(std::span<const ObstacleReading> readings, const ApfConfig& cfg);

/// (k_fx fx, k_fy fy), each clamped to [-1, 1].
Command apf_command(const RepulsiveForce& force, const ApfConfig& cfg);

/// One reading per occupied sector (distance < 200), placed at the sector's
/// center bearing. Zero distances are floored at 1 mm.
std::vector<ObstacleReading> obstacle_readings(const OpponentSectors& sectors);

} // namespace hybrid_drive
