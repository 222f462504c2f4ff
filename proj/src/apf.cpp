#include "hybrid_drive/apf.hpp"

#include <cmath>
#include <stdexcept>

namespace hybrid_drive {

namespace {
constexpr double kMinReadingDistance = 1e-3;
}

void ApfConfig::validate() const
{
    if (!(k_fx > 0.0) || !(k_fy > 0.0)) throw std::invalid_argument("apf gains must be positive");
    if (!(eta > 0.0)) throw std::invalid_argument("apf eta must be positive");
    if (!(d_cut > 0.0) || d_cut > kSensorRange)
        throw std::invalid_argument("apf d_cut must lie in (0, 200]");
}

RepulsiveForce repulsive_force(std::span<const ObstacleReading> readings, const ApfConfig& cfg)
{
    RepulsiveForce f;
    for (const auto& r : readings) {
        if (!(r.d > 0.0)) throw std::invalid_argument("obstacle distance must be positive");
        if (r.d >= cfg.d_cut) continue;
        if (r.theta < 0.0 || r.theta > kPi) continue; // rear half-plane
        const double magnitude = 1.0 / std::pow(r.d, cfg.eta);
        // cos(theta) written as sin(pi/2 - theta) so a reading dead ahead gives exactly 0
        const double lateral = std::sin(kPi / 2.0 - r.theta);
        f.fx -= magnitude * lateral;
        f.fy -= magnitude * std::sin(r.theta);
    }
    return f;
}

Command apf_command(const RepulsiveForce& force, const ApfConfig& cfg)
{
    return {clamp_unit(cfg.k_fx * force.fx), clamp_unit(cfg.k_fy * force.fy)};
}

std::vector<ObstacleReading> obstacle_readings(const OpponentSectors& sectors)
{
    std::vector<ObstacleReading> out;
    for (std::size_t j = 0; j < sectors.size(); ++j) {
        if (sectors[j] >= kSensorRange) continue;
        out.push_back({std::max(sectors[j], kMinReadingDistance),
                       (static_cast<double>(j) + 0.5) * kSectorWidth});
    }
    return out;
}

} // namespace hybrid_drive
