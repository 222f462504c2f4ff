#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hybrid_drive/apf.hpp"
#include "hybrid_drive/blender.hpp"
#include "hybrid_drive/config.hpp"
#include "hybrid_drive/ddpg.hpp"
#include "hybrid_drive/mlp.hpp"
#include "hybrid_drive/path_tracking.hpp"
#include "hybrid_drive/scenario.hpp"
#include "hybrid_drive/sensors.hpp"

namespace hybrid_drive {

/// The learned policy, the potential field and the path tracker evaluated on
/// one sensor frame and fused by fixed weights.
struct HybridController
{
    NetworkParams actor;
    ApfConfig apf;
    TrackingConfig tracking;
    BlendWeights weights;
    SensorConfig sensors;
    double half_width = 6.0; ///< converts track_pos back to metres for the tracker

    static HybridController from_config(NetworkParams actor, const RunConfig& cfg,
                                        double half_width);

    MethodCommands methods(const SensorFrame& frame) const;
    Command operator()(const SensorFrame& frame) const { return blend(methods(frame), weights); }
};

struct StepRecord
{
    double t = 0.0;
    VehiclePose pose;
    TrackRelativePose rel;
    double nearest_opponent = kSensorRange; ///< min over the 36 sectors
    MethodCommands methods;
    Command blended;
    EpisodeStatusKind status = EpisodeStatusKind::Running;
};

struct ScenarioLog
{
    std::string scenario_id;
    std::vector<StepRecord> steps;
};

/// Steps the scenario for its duration (or until a collision or leaving the
/// track), driving the ego with the blended command and recording every
/// method's output before each step.
ScenarioLog run_scenario(const Scenario& sc, const RunConfig& cfg, const NetworkParams& policy);

/// Training start states: uniform arc length, offset, heading and speed within `StartDistribution`.
WorldFactory training_world_factory(const TrackGeometry& geom, const StartDistribution& start);

/// DDPG on the opponent-free `cfg.track`, seeded by `cfg.seed`.
TrainResult run_training(const RunConfig& cfg, const EpisodeCallback& on_episode = {});

struct EvalEpisode
{
    std::size_t episode = 0;
    std::size_t steps = 0;
    double episode_return = 0.0;
    EpisodeStatusKind end = EpisodeStatusKind::Running;
    bool completed = false;
};

struct EvalSummary
{
    std::vector<EvalEpisode> episodes;
    std::size_t completed = 0;
    std::size_t off_track = 0;
    double completion_rate = 0.0;
    double mean_return = 0.0;
};

/// Seed of evaluation episode `k`: derive_seed(master, k).
std::uint64_t eval_episode_seed(std::uint64_t master, std::size_t k);

/// Noise-free rollouts of the pure learned policy, one lap each. Episode k
/// starts at arc length k/episodes of the track with a seeded small offset.
EvalSummary evaluate_policy(const NetworkParams& actor, const TrackGeometry& geom,
                            const RunConfig& cfg);

void write_scenario_csv(std::ostream& out, const ScenarioLog& log);

/// Per-method commands of several scenarios in one table.
void write_commands_csv(std::ostream& out, std::span<const ScenarioLog> logs);

void write_eval_csv(std::ostream& out, const EvalSummary& summary);

/// Writes `scenario_<id>.csv` per log plus `commands.csv` into `dir`; returns the paths.
std::vector<std::filesystem::path> export_csv(const std::filesystem::path& dir,
                                              std::span<const ScenarioLog> logs);

std::string scenario_csv_header();
std::string commands_csv_header();

} // namespace hybrid_drive
