#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hybrid_drive/mlp.hpp"
#include "hybrid_drive/replay_buffer.hpp"
#include "hybrid_drive/sensors.hpp"
#include "hybrid_drive/world.hpp"

namespace hybrid_drive {

/// Network sizes: `Full` is 400/300 hidden units, `Tiny` 32/32 for fast runs.
enum class NetworkProfile { Tiny, Full };

NetworkProfile parse_profile(const std::string& name);
const char* to_string(NetworkProfile profile);

struct TrainerConfig
{
    double actor_lr = 1e-4;
    double critic_lr = 1e-3;
    double gamma = 0.99;
    std::size_t batch = 64;
    double tau_soft = 1e-3;
    std::size_t buffer_capacity = 100000;
    std::size_t warmup = 1000;
    double ou_theta = 0.15;
    double ou_sigma = 0.2;
    std::size_t total_steps = 50000;
    std::size_t max_episode_steps = 1000;
    std::uint64_t seed = 1;
    double reward_scale = 150.0; ///< km/h per unit reward
    NetworkProfile profile = NetworkProfile::Tiny;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

/// Per-step reward: forward speed along the track in km/h over `scale`,
/// clamped to [0, 2]. Never negative.
double step_reward(double speed_mps, double delta_psi, double scale = 150.0);

/// Network input widths: actor sees the state, critic the state followed by the action.
inline constexpr std::size_t kCriticInputWidth = kStateWidth + kActionWidth;

NetworkParams make_actor(NetworkProfile profile, std::mt19937_64& rng);
NetworkParams make_critic(NetworkProfile profile, std::mt19937_64& rng);

/// Stacks states (and actions) into network-input columns.
Eigen::MatrixXd state_batch(std::span<const Transition> batch, bool next);
Eigen::MatrixXd critic_inputs(const Eigen::MatrixXd& states, const Eigen::MatrixXd& actions);

struct CriticStep
{
    double loss = 0.0;   ///< mean squared TD error before the step
    double mean_q = 0.0; ///< mean Q(s_i, a_i) over the batch before the step
};

/// Bootstrap targets y_i = r_i + gamma * Q'(s_{i+1}, mu'(s_{i+1})), or r_i on terminal samples.
Eigen::VectorXd critic_targets(const NetworkParams& target_critic,
                               const NetworkParams& target_actor,
                               std::span<const Transition> batch, double gamma);

/// Gradient of mean (y_i - Q(s_i, a_i))^2 with respect to the critic parameters.
Gradients critic_loss_gradient(const NetworkParams& critic, std::span<const Transition> batch,
                               const Eigen::VectorXd& targets, CriticStep* stats = nullptr);

/// One Adam step on the critic toward the bootstrap targets. Target networks are read only.
CriticStep critic_update(NetworkParams& critic, AdamState& optimizer,
                         const NetworkParams& target_critic, const NetworkParams& target_actor,
                         std::span<const Transition> batch, const TrainerConfig& cfg);

/// Gradient of the batch-mean Q(s, mu(s)) with respect to the actor parameters,
/// chained through the critic's action input.
Gradients policy_gradient(const NetworkParams& actor, const NetworkParams& critic,
                          const Eigen::MatrixXd& states);

/// Gradient-ascent Adam step on the actor. The critic is read only.
void actor_update(NetworkParams& actor, AdamState& optimizer, const NetworkParams& critic,
                  std::span<const Transition> batch, const TrainerConfig& cfg);

/// target <- (1 - tau) target + tau online, elementwise.
void soft_update(NetworkParams& target, const NetworkParams& online, double tau);

/// Ornstein-Uhlenbeck exploration noise, one independent channel per action dimension.
class OuNoise
{
public:
    OuNoise(double theta, double sigma, double dt, std::uint64_t seed);

    ActionVector sample();
    void reset() { state_.fill(0.0); }
    const ActionVector& state() const { return state_; }

private:
    double theta_;
    double sigma_;
    double dt_;
    ActionVector state_{};
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

ActionVector actor_action(const NetworkParams& actor, const StateVector& state);

/// clamp(mu(s) + noise, -1, 1).
ActionVector explore_action(const NetworkParams& actor, const StateVector& state, OuNoise& noise);

/// Deterministic policy output for a sensor frame: (steer, accel).
Command policy_act(const NetworkParams& actor, const SensorFrame& frame,
                   const SensorConfig& sensors = {});

struct EpisodeMetrics
{
    std::size_t episode = 0;
    std::size_t steps = 0;
    double episode_return = 0.0;
    double avg_q = 0.0;  ///< mean minibatch Q over this episode's updates, 0 without updates
    double loss = 0.0;   ///< mean critic loss over this episode's updates
    std::size_t updates = 0;
    EpisodeStatusKind end = EpisodeStatusKind::Running;
};

struct TrainResult
{
    NetworkParams actor;
    NetworkParams critic;
    std::vector<EpisodeMetrics> metrics;
    std::size_t total_steps = 0;
};

/// Produces the start state of each training episode.
using WorldFactory = std::function<WorldState(std::size_t episode, std::mt19937_64& rng)>;
using EpisodeCallback = std::function<void(const EpisodeMetrics&)>;

/// Single-threaded DDPG loop: act with OU exploration, store the transition and,
/// once the buffer holds `warmup` transitions, run one critic update, one actor
/// update and a soft target update per environment step.
TrainResult train(const TrainerConfig& cfg, const TrackGeometry& geom, const WorldParams& world,
                  const SensorConfig& sensors, const WorldFactory& factory,
                  const EpisodeCallback& on_episode = {});

/// `episode,steps,return,avg_q,loss`
void write_metrics_csv(std::ostream& out, std::span<const EpisodeMetrics> metrics);

/// Stable FNV-1a digest of every TrainerConfig field.
std::string config_hash(const TrainerConfig& cfg);

struct CheckpointMeta
{
    std::size_t steps = 0;
    std::uint64_t seed = 0;
    std::string config_hash;
};

/// Writes actor.mlp, critic.mlp and meta.txt (key=value) into `dir`.
void save_checkpoint(const std::filesystem::path& dir, const NetworkParams& actor,
                     const NetworkParams& critic, const CheckpointMeta& meta);

/// Loads actor.mlp and checks it maps the 29-wide state to two actions.
NetworkParams load_policy(const std::filesystem::path& dir);
CheckpointMeta load_checkpoint_meta(const std::filesystem::path& dir);

} // namespace hybrid_drive
