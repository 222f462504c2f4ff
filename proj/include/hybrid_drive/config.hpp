#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hybrid_drive/apf.hpp"
#include "hybrid_drive/blender.hpp"
#include "hybrid_drive/ddpg.hpp"
#include "hybrid_drive/path_tracking.hpp"
#include "hybrid_drive/sensors.hpp"
#include "hybrid_drive/world.hpp"

namespace hybrid_drive {

/// Spread of training-episode start states around the centerline.
struct StartDistribution
{
    double max_offset = 4.0;   ///< m, |e| bound
    double max_heading = 0.3;  ///< rad, |delta_psi| bound
    double max_speed = 10.0;   ///< m/s
};

struct EvalConfig
{
    std::size_t episodes = 10;
    std::size_t max_steps = 3000;
    double max_offset = 1.0;
    double max_heading = 0.05;
};

struct RunConfig
{
    TrainerConfig trainer;
    StartDistribution start;
    EvalConfig eval;
    ApfConfig apf;
    TrackingConfig tracking;
    BlendWeights weights;
    WorldParams world;
    SensorConfig sensors;
    std::uint64_t seed = 1;
    std::string track = "oval";
    std::filesystem::path output_dir = "out";

    /// Cross-checks every section; throws std::invalid_argument.
    void validate() const;
};

/// Sets one dotted key, e.g. `apf.k_fx`. Throws std::invalid_argument on an
/// unknown key or an unparsable value.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// `key = value` lines; `#` starts a comment.
void parse_config(std::istream& in, RunConfig& cfg);
void load_config(const std::filesystem::path& path, RunConfig& cfg);

/// Every key in a stable order, in the same format parse_config reads.
std::string dump_config(const RunConfig& cfg);

std::vector<std::string> config_keys();

} // namespace hybrid_drive
