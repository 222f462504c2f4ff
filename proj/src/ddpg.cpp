#include "hybrid_drive/ddpg.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "hybrid_drive/csv.hpp"

namespace hybrid_drive {

namespace {

enum SeedStream : std::uint64_t { kInitStream = 0, kBufferStream, kNoiseStream, kWorldStream };

std::vector<LayerSpec> hidden_layers(NetworkProfile profile)
{
    if (profile == NetworkProfile::Full)
        return {{400, Activation::Relu}, {300, Activation::Relu}};
    return {{32, Activation::Relu}, {32, Activation::Relu}};
}

Eigen::MatrixXd action_batch(std::span<const Transition> batch)
{
    Eigen::MatrixXd a(static_cast<Eigen::Index>(kActionWidth),
                      static_cast<Eigen::Index>(batch.size()));
    for (std::size_t i = 0; i < batch.size(); ++i)
        for (std::size_t k = 0; k < kActionWidth; ++k)
            a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = batch[i].action[k];
    return a;
}

ActionVector to_action(const Eigen::VectorXd& v)
{
    return {v[0], v[1]};
}

Eigen::VectorXd to_vector(const StateVector& s)
{
    return Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(s.size()));
}

} // namespace

NetworkProfile parse_profile(const std::string& name)
{
    if (name == "tiny") return NetworkProfile::Tiny;
    if (name == "full") return NetworkProfile::Full;
    throw std::invalid_argument("unknown network profile '" + name + "' (tiny|full)");
}

const char* to_string(NetworkProfile profile)
{
    return profile == NetworkProfile::Full ? "full" : "tiny";
}

void TrainerConfig::validate() const
{
    const auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("trainer config: ") + what);
    };
    require(actor_lr > 0.0 && critic_lr > 0.0, "learning rates must be positive");
    require(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
    require(batch >= 1, "batch must be at least 1");
    require(tau_soft > 0.0 && tau_soft <= 1.0, "tau_soft must lie in (0, 1]");
    require(buffer_capacity >= 1, "buffer capacity must be positive");
    require(ou_theta >= 0.0 && ou_sigma >= 0.0, "noise parameters must be non-negative");
    require(max_episode_steps >= 1, "max_episode_steps must be positive");
    require(reward_scale > 0.0, "reward_scale must be positive");
}

double step_reward(double speed_mps, double delta_psi, double scale)
{
    const double along_kmh = speed_mps * 3.6 * std::cos(delta_psi);
    return std::clamp(along_kmh / scale, 0.0, 2.0);
}

NetworkParams make_actor(NetworkProfile profile, std::mt19937_64& rng)
{
    auto layers = hidden_layers(profile);
    layers.push_back({kActionWidth, Activation::Tanh});
    return make_mlp(kStateWidth, layers, rng);
}

NetworkParams make_critic(NetworkProfile profile, std::mt19937_64& rng)
{
    auto layers = hidden_layers(profile);
    layers.push_back({1, Activation::Identity});
    return make_mlp(kCriticInputWidth, layers, rng);
}

Eigen::MatrixXd state_batch(std::span<const Transition> batch, bool next)
{
    Eigen::MatrixXd s(static_cast<Eigen::Index>(kStateWidth),
                      static_cast<Eigen::Index>(batch.size()));
    for (std::size_t i = 0; i < batch.size(); ++i)
        s.col(static_cast<Eigen::Index>(i)) = to_vector(next ? batch[i].next_state : batch[i].state);
    return s;
}

Eigen::MatrixXd critic_inputs(const Eigen::MatrixXd& states, const Eigen::MatrixXd& actions)
{
    Eigen::MatrixXd x(states.rows() + actions.rows(), states.cols());
    x << states, actions;
    return x;
}

Eigen::VectorXd critic_targets(const NetworkParams& target_critic,
                               const NetworkParams& target_actor,
                               std::span<const Transition> batch, double gamma)
{
    const Eigen::MatrixXd next = state_batch(batch, true);
    const ForwardTape mu = mlp_forward(target_actor, next);
    const ForwardTape q = mlp_forward(target_critic, critic_inputs(next, mu.output()));
    Eigen::VectorXd y(static_cast<Eigen::Index>(batch.size()));
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        y[idx] = batch[i].reward + (batch[i].terminal ? 0.0 : gamma * q.output()(0, idx));
    }
    return y;
}

Gradients critic_loss_gradient(const NetworkParams& critic, std::span<const Transition> batch,
                               const Eigen::VectorXd& targets, CriticStep* stats)
{
    const auto n = static_cast<double>(batch.size());
    const ForwardTape tape =
        mlp_forward(critic, critic_inputs(state_batch(batch, false), action_batch(batch)));
    const Eigen::RowVectorXd q = tape.output().row(0);
    const Eigen::RowVectorXd residual = q - targets.transpose();
    if (stats) {
        stats->loss = residual.squaredNorm() / n;
        stats->mean_q = q.mean();
    }
    const Eigen::MatrixXd upstream = (2.0 / n) * residual;
    return mlp_backward(critic, tape, upstream);
}

CriticStep critic_update(NetworkParams& critic, AdamState& optimizer,
                         const NetworkParams& target_critic, const NetworkParams& target_actor,
                         std::span<const Transition> batch, const TrainerConfig& cfg)
{
    if (batch.empty()) throw std::invalid_argument("critic_update needs a non-empty batch");
    const Eigen::VectorXd y = critic_targets(target_critic, target_actor, batch, cfg.gamma);
    CriticStep stats;
    const Gradients grads = critic_loss_gradient(critic, batch, y, &stats);
    if (!std::isfinite(stats.loss)) throw std::domain_error("non-finite critic loss");
    adam_step(critic, grads, cfg.critic_lr, optimizer);
    return stats;
}

Gradients policy_gradient(const NetworkParams& actor, const NetworkParams& critic,
                          const Eigen::MatrixXd& states)
{
    const auto n = static_cast<double>(states.cols());
    const ForwardTape mu = mlp_forward(actor, states);
    const ForwardTape q = mlp_forward(critic, critic_inputs(states, mu.output()));
    const Eigen::MatrixXd ones = Eigen::MatrixXd::Constant(1, states.cols(), 1.0 / n);
    const Gradients critic_grads = mlp_backward(critic, q, ones);
    const Eigen::MatrixXd action_grad =
        critic_grads.input_grad.bottomRows(static_cast<Eigen::Index>(kActionWidth));
    return mlp_backward(actor, mu, action_grad);
}

void actor_update(NetworkParams& actor, AdamState& optimizer, const NetworkParams& critic,
                  std::span<const Transition> batch, const TrainerConfig& cfg)
{
    if (batch.empty()) throw std::invalid_argument("actor_update needs a non-empty batch");
    Gradients grads = policy_gradient(actor, critic, state_batch(batch, false));
    grads *= -1.0; // ascend J
    adam_step(actor, grads, cfg.actor_lr, optimizer);
}

void soft_update(NetworkParams& target, const NetworkParams& online, double tau)
{
    if (target.layers.size() != online.layers.size())
        throw std::invalid_argument("soft_update: layer count mismatch");
    for (std::size_t i = 0; i < target.layers.size(); ++i) {
        auto& t = target.layers[i];
        const auto& o = online.layers[i];
        if (t.weights.rows() != o.weights.rows() || t.weights.cols() != o.weights.cols())
            throw std::invalid_argument("soft_update: shape mismatch at layer " + std::to_string(i));
        t.weights = (1.0 - tau) * t.weights + tau * o.weights;
        t.bias = (1.0 - tau) * t.bias + tau * o.bias;
    }
}

OuNoise::OuNoise(double theta, double sigma, double dt, std::uint64_t seed)
    : theta_(theta), sigma_(sigma), dt_(dt), rng_(seed)
{
}

ActionVector OuNoise::sample()
{
    const double diffusion = sigma_ * std::sqrt(dt_);
    for (double& n : state_) n += theta_ * (0.0 - n) * dt_ + diffusion * normal_(rng_);
    return state_;
}

ActionVector actor_action(const NetworkParams& actor, const StateVector& state)
{
    return to_action(mlp_predict(actor, to_vector(state)));
}

ActionVector explore_action(const NetworkParams& actor, const StateVector& state, OuNoise& noise)
{
    ActionVector a = actor_action(actor, state);
    const ActionVector n = noise.sample();
    for (std::size_t k = 0; k < kActionWidth; ++k) a[k] = clamp_unit(a[k] + n[k]);
    return a;
}

Command policy_act(const NetworkParams& actor, const SensorFrame& frame,
                   const SensorConfig& sensors)
{
    const ActionVector a = actor_action(actor, normalize_state(frame, sensors));
    return clamp_unit(Command{a[0], a[1]});
}

TrainResult train(const TrainerConfig& cfg, const TrackGeometry& geom, const WorldParams& world,
                  const SensorConfig& sensors, const WorldFactory& factory,
                  const EpisodeCallback& on_episode)
{
    cfg.validate();
    std::mt19937_64 init_rng(derive_seed(cfg.seed, kInitStream));
    TrainResult result;
    result.actor = make_actor(cfg.profile, init_rng);
    result.critic = make_critic(cfg.profile, init_rng);
    NetworkParams target_actor = result.actor;
    NetworkParams target_critic = result.critic;
    AdamState actor_opt = AdamState::zeros_like(result.actor);
    AdamState critic_opt = AdamState::zeros_like(result.critic);

    ReplayBuffer buffer(cfg.buffer_capacity, derive_seed(cfg.seed, kBufferStream));
    OuNoise noise(cfg.ou_theta, cfg.ou_sigma, world.dt, derive_seed(cfg.seed, kNoiseStream));
    std::mt19937_64 world_rng(derive_seed(cfg.seed, kWorldStream));
    const std::size_t warmup = std::max<std::size_t>(cfg.warmup, 1);

    std::size_t episode = 0;
    while (result.total_steps < cfg.total_steps) {
        WorldState state = factory(episode, world_rng);
        noise.reset();
        StateVector s = normalize_state(sensor_frame(state, geom, sensors), sensors);

        EpisodeMetrics m;
        m.episode = episode;
        double q_sum = 0.0;
        double loss_sum = 0.0;
        while (m.steps < cfg.max_episode_steps && result.total_steps < cfg.total_steps) {
            const ActionVector a = explore_action(result.actor, s, noise);
            state = step(state, Command{a[0], a[1]}, geom, world);
            const EpisodeStatus status = episode_status(state, geom, world);
            const TrackRelativePose rel = track_relative_pose(geom, state.ego);
            const double r = step_reward(state.ego.speed, rel.delta_psi, cfg.reward_scale);
            const StateVector s_next = normalize_state(sensor_frame(state, geom, sensors), sensors);
            buffer.push({s, a, r, s_next, status.failed()});

            m.episode_return += r;
            ++m.steps;
            ++result.total_steps;
            s = s_next;

            if (buffer.size() >= warmup) {
                const std::vector<Transition> batch = buffer.sample(cfg.batch);
                const CriticStep cs =
                    critic_update(result.critic, critic_opt, target_critic, target_actor, batch, cfg);
                actor_update(result.actor, actor_opt, result.critic, batch, cfg);
                soft_update(target_critic, result.critic, cfg.tau_soft);
                soft_update(target_actor, result.actor, cfg.tau_soft);
                q_sum += cs.mean_q;
                loss_sum += cs.loss;
                ++m.updates;
            }
            if (status.terminal()) {
                m.end = status.kind;
                break;
            }
        }
        if (m.updates > 0) {
            m.avg_q = q_sum / static_cast<double>(m.updates);
            m.loss = loss_sum / static_cast<double>(m.updates);
        }
        result.metrics.push_back(m);
        if (on_episode) on_episode(m);
        ++episode;
    }
    return result;
}

void write_metrics_csv(std::ostream& out, std::span<const EpisodeMetrics> metrics)
{
    out << "episode,steps,return,avg_q,loss\n";
    for (const auto& m : metrics)
        out << m.episode << ',' << m.steps << ',' << csv_number(m.episode_return) << ','
            << csv_number(m.avg_q) << ',' << csv_number(m.loss) << '\n';
}

std::string config_hash(const TrainerConfig& cfg)
{
    std::ostringstream fields;
    char buf[32];
    const auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g;", v);
        fields << buf;
    };
    put(cfg.actor_lr);
    put(cfg.critic_lr);
    put(cfg.gamma);
    put(cfg.tau_soft);
    put(cfg.ou_theta);
    put(cfg.ou_sigma);
    put(cfg.reward_scale);
    fields << cfg.batch << ';' << cfg.buffer_capacity << ';' << cfg.warmup << ';'
           << cfg.total_steps << ';' << cfg.max_episode_steps << ';' << cfg.seed << ';'
           << to_string(cfg.profile);

    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : fields.str()) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void save_checkpoint(const std::filesystem::path& dir, const NetworkParams& actor,
                     const NetworkParams& critic, const CheckpointMeta& meta)
{
    std::filesystem::create_directories(dir);
    save_mlp(dir / "actor.mlp", actor);
    save_mlp(dir / "critic.mlp", critic);
    std::ofstream out(dir / "meta.txt");
    if (!out) throw std::runtime_error("cannot write checkpoint metadata in " + dir.string());
    out << "steps=" << meta.steps << "\nseed=" << meta.seed << "\nconfig_hash=" << meta.config_hash
        << '\n';
}

NetworkParams load_policy(const std::filesystem::path& dir)
{
    const auto path = dir / "actor.mlp";
    if (!std::filesystem::exists(path))
        throw std::invalid_argument("missing policy checkpoint " + path.string());
    NetworkParams actor = load_mlp(path);
    if (actor.input_width() != kStateWidth || actor.output_width() != kActionWidth)
        throw std::invalid_argument("checkpoint actor maps " + std::to_string(actor.input_width())
                                    + " inputs to " + std::to_string(actor.output_width())
                                    + " outputs; expected 29 -> 2");
    return actor;
}

CheckpointMeta load_checkpoint_meta(const std::filesystem::path& dir)
{
    std::ifstream in(dir / "meta.txt");
    if (!in) throw std::invalid_argument("missing checkpoint metadata in " + dir.string());
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    CheckpointMeta meta;
    meta.steps = std::stoull(kv.at("steps"));
    meta.seed = std::stoull(kv.at("seed"));
    meta.config_hash = kv.at("config_hash");
    return meta;
}

} // namespace hybrid_drive
