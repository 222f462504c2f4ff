// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "hybrid_drive/harness.hpp"
#include "hybrid_drive/scr_session.hpp"

using namespace hybrid_drive;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace std::chrono_literals;

namespace {

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

std::vector<Transition> random_batch(std::mt19937_64& rng, std::size_t n)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> r(0.0, 2.0);
    std::vector<Transition> batch(n);
    for (auto& t : batch) {
        for (double& x : t.state) x = u(rng);
        for (double& x : t.next_state) x = u(rng);
        for (double& x : t.action) x = u(rng);
        t.reward = r(rng);
    }
    return batch;
}

NetworkParams committed_policy()
{
    return load_policy(std::string(HYBRID_DRIVE_DATA_DIR) + "/toy_policy");
}

Scenario committed_scenario(const char* id)
{
    return load_scenario(std::string(HYBRID_DRIVE_DATA_DIR) + "/scenarios/" + id + ".scn");
}

Outcome gradient_correctness()
{
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> width(1, 16);
    std::uniform_int_distribution<int> depth(1, 3);
    std::bernoulli_distribution use_tanh(0.5);
    std::normal_distribution<double> normal(0.0, 1.0);
    double worst = 0.0;
    std::size_t checked = 0, kinks = 0;
    for (int n = 0; n < 20; ++n) {
        const std::size_t in = width(rng);
        std::vector<LayerSpec> layers;
        for (int d = depth(rng); d > 0; --d)
            layers.push_back({width(rng), use_tanh(rng) ? Activation::Tanh : Activation::Relu});
        layers.push_back({width(rng), Activation::Identity});
        const NetworkParams net = make_mlp(in, layers, rng, 1.0);
        VectorXd x(in), up(layers.back().units);
        for (auto& v : x) v = normal(rng);
        for (auto& v : up) v = normal(rng);
        const GradientCheck c = finite_diff_check(net, x, 1e-5, up);
        worst = std::max(worst, c.max_relative_error);
        checked += c.checked;
        kinks += c.skipped_at_kink;
    }
    return {worst < 1e-4, fmt("20 nets, %zu coordinates, %zu at a relu kink, worst rel err %.2e",
                              checked, kinks, worst)};
}

Outcome actor_update_fidelity()
{
    std::mt19937_64 rng(7);
    double worst = 0.0;
    std::size_t checked = 0;
    for (int n = 0; n < 5; ++n) {
        const std::vector<LayerSpec> a_layers{{16, Activation::Tanh}, {2, Activation::Tanh}};
        const std::vector<LayerSpec> c_layers{{24, Activation::Tanh}, {1, Activation::Identity}};
        NetworkParams actor = make_mlp(kStateWidth, a_layers, rng, 0.5);
        const NetworkParams critic = make_mlp(kCriticInputWidth, c_layers, rng, 0.5);
        const MatrixXd states = state_batch(random_batch(rng, 16), false);
        const auto objective = [&](const NetworkParams& a) {
            return mlp_forward(critic, critic_inputs(states, mlp_forward(a, states).output())).output().mean();
        };
        const Gradients g = policy_gradient(actor, critic, states);
        const double h = 1e-5;
        const auto probe = [&](double& p, double analytic) {
            const double saved = p;
            p = saved + h;
            const double plus = objective(actor);
            p = saved - h;
            const double minus = objective(actor);
            p = saved;
            worst = std::max(worst, relative_error(analytic, (plus - minus) / (2.0 * h)));
            ++checked;
        };
        for (std::size_t i = 0; i < actor.layers.size(); ++i) {
            for (Eigen::Index k = 0; k < actor.layers[i].weights.size(); ++k)
                probe(actor.layers[i].weights.data()[k], g.layers[i].weights.data()[k]);
            for (Eigen::Index k = 0; k < actor.layers[i].bias.size(); ++k)
                probe(actor.layers[i].bias[k], g.layers[i].bias[k]);
        }
    }
    return {worst < 1e-4, fmt("5 actor/critic pairs, %zu parameters, worst rel err %.2e", checked, worst)};
}

Outcome critic_oracle()
{
    std::mt19937_64 rng(11);
    auto batch = random_batch(rng, 256);
    // a smooth, learnable reward so the regression has a low floor
    for (auto& t : batch)
        t.reward = 1.0 + 0.5 * std::tanh(t.state[0] - 0.5 * t.state[3] + t.action[0] * t.action[1]);
    TrainerConfig cfg;
    cfg.gamma = 0.0;

    // sign pattern: a linear critic's loss gradient is the least-squares normal-equation residual
    NetworkParams linear;
    VectorXd w(kCriticInputWidth);
    std::normal_distribution<double> normal(0.0, 0.3);
    for (auto& x : w) x = normal(rng);
    linear.layers.push_back({w.transpose(), VectorXd::Constant(1, 0.2), Activation::Identity});
    const NetworkParams any_actor = make_actor(NetworkProfile::Tiny, rng);
    const VectorXd y = critic_targets(linear, any_actor, batch, 0.0);
    const MatrixXd x = critic_inputs(state_batch(batch, false), [&] {
        MatrixXd a(kActionWidth, batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i) a.col(i) << batch[i].action[0], batch[i].action[1];
        return a;
    }());
    const VectorXd residual = (w.transpose() * x).transpose().array() + 0.2 - y.array();
    const VectorXd oracle_w = 2.0 / static_cast<double>(batch.size()) * (x * residual);
    const double oracle_b = 2.0 / static_cast<double>(batch.size()) * residual.sum();
    const Gradients g = critic_loss_gradient(linear, batch, y);
    std::size_t sign_mismatch = 0;
    for (Eigen::Index k = 0; k < oracle_w.size(); ++k)
        if (std::signbit(oracle_w[k]) != std::signbit(g.layers[0].weights(0, k))) ++sign_mismatch;
    if (std::signbit(oracle_b) != std::signbit(g.layers[0].bias[0])) ++sign_mismatch;
    // the first Adam step moves every parameter against its gradient
    NetworkParams stepped = linear;
    AdamState lin_opt = AdamState::zeros_like(stepped);
    critic_update(stepped, lin_opt, linear, any_actor, batch, cfg);
    std::size_t wrong_direction = 0;
    for (Eigen::Index k = 0; k < oracle_w.size(); ++k) {
        const double delta = stepped.layers[0].weights(0, k) - w[k];
        if (oracle_w[k] != 0.0 && (delta == 0.0 || std::signbit(delta) == std::signbit(oracle_w[k])))
            ++wrong_direction;
    }

    // 200 updates of the tiny critic on the fixed batch
    NetworkParams critic = make_critic(NetworkProfile::Tiny, rng);
    const NetworkParams target = critic;
    const NetworkParams target_actor = make_actor(NetworkProfile::Tiny, rng);
    AdamState opt = AdamState::zeros_like(critic);
    const double initial = critic_update(critic, opt, target, target_actor, batch, cfg).loss;
    for (int i = 1; i < 200; ++i) critic_update(critic, opt, target, target_actor, batch, cfg);
    CriticStep final_stats;
    critic_loss_gradient(critic, batch, critic_targets(target, target_actor, batch, 0.0), &final_stats);
    const double ratio = final_stats.loss / initial;
    return {ratio < 0.1 && sign_mismatch == 0 && wrong_direction == 0,
            fmt("loss %.4f -> %.4f (%.1f%%), gradient sign mismatches %zu, steps against oracle %zu",
                initial, final_stats.loss, 100.0 * ratio, sign_mismatch, wrong_direction)};
}

Outcome training_trend()
{
    RunConfig cfg;
    cfg.trainer.total_steps = 50000;
    cfg.trainer.profile = NetworkProfile::Tiny;
    const TrainResult result = run_training(cfg);
    std::vector<double> q;
    for (const auto& m : result.metrics)
        if (m.updates > 0) q.push_back(m.avg_q);
    const std::size_t third = q.size() / 3;
    double first = 0.0, last = 0.0;
    for (std::size_t i = 0; i < third; ++i) {
        first += q[i] / static_cast<double>(third);
        last += q[q.size() - third + i] / static_cast<double>(third);
    }
    cfg.eval.episodes = 10;
    const EvalSummary eval = evaluate_policy(result.actor, builtin_track(cfg.track), cfg);
    return {third > 0 && last > first && eval.completed >= 8,
            fmt("%zu episodes (%zu with updates), avg Q first third %.3f, last third %.3f; eval %zu/10 laps, %zu off track",
                result.metrics.size(), q.size(), first, last, eval.completed, eval.off_track)};
}

Outcome reward_bounds()
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> v(0.0, 150.0);
    std::uniform_real_distribution<double> psi(-kPi, kPi);
    std::size_t outside = 0;
    for (int i = 0; i < 100000; ++i) {
        const double r = step_reward(v(rng), psi(rng));
        if (!(r >= 0.0 && r <= 2.0)) ++outside;
    }
    const double at150 = step_reward(150.0 / 3.6, 0.0);
    const double at320 = step_reward(320.0 / 3.6, 0.0);
    return {outside == 0 && std::abs(at150 - 1.0) < 1e-12 && at320 == 2.0,
            fmt("1e5 samples, %zu outside [0, 2]; r(150 km/h) = %.15g, r(320 km/h) = %g", outside, at150, at320)};
}

Outcome apf_exactness()
{
    using Wide = boost::multiprecision::number<boost::multiprecision::cpp_dec_float<160>>;
    const ApfConfig cfg;
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> count(0, 3);
    std::uniform_real_distribution<double> dist(0.05, 60.0);
    std::uniform_real_distribution<double> any_theta(0.0, kTwoPi);
    std::uniform_real_distribution<double> front(0.0, kPi);
    double oracle_err = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<ObstacleReading> r(count(rng));
        for (auto& x : r) x = {dist(rng), any_theta(rng)};
        Wide fx = 0, fy = 0;
        for (const auto& o : r) {
            if (o.d >= cfg.d_cut || o.theta > kPi) continue;
            const Wide m = 1 / pow(Wide(o.d), Wide(cfg.eta));
            fx -= m * cos(Wide(o.theta));
            fy -= m * sin(Wide(o.theta));
        }
        const RepulsiveForce f = repulsive_force(r, cfg);
        oracle_err = std::max({oracle_err, std::abs(f.fx - fx.convert_to<double>()),
                               std::abs(f.fy - fy.convert_to<double>())});
    }
    const RepulsiveForce empty = repulsive_force({}, cfg);
    const Command empty_cmd = apf_command(empty, cfg);
    std::size_t monotone_fail = 0, mirror_fail = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const double t = front(rng);
        double d1 = dist(rng) * 0.8, d2 = dist(rng) * 0.8;
        if (d1 > d2) std::swap(d1, d2);
        const RepulsiveForce near = repulsive_force(std::vector<ObstacleReading>{{d1, t}}, cfg);
        const RepulsiveForce far = repulsive_force(std::vector<ObstacleReading>{{d2, t}}, cfg);
        if (d1 < d2 && std::hypot(near.fx, near.fy) <= std::hypot(far.fx, far.fy)) ++monotone_fail;
        std::vector<ObstacleReading> r(1 + trial % 3), m;
        for (auto& x : r) x = {dist(rng) * 0.8, front(rng)};
        for (const auto& x : r) m.push_back({x.d, kPi - x.theta});
        const RepulsiveForce a = repulsive_force(r, cfg);
        const RepulsiveForce b = repulsive_force(m, cfg);
        const double tol = 1e-14 * (1.0 + std::abs(a.fx) + std::abs(a.fy));
        if (std::abs(a.fx + b.fx) > tol || std::abs(a.fy - b.fy) > tol) ++mirror_fail;
    }
    const bool zero = empty.fx == 0.0 && empty.fy == 0.0 && empty_cmd.steer == 0.0 && empty_cmd.accel == 0.0;
    return {oracle_err < 1e-12 && zero && monotone_fail == 0 && mirror_fail == 0,
            fmt("oracle max abs err %.2e; empty readings zero: %s; monotonicity failures %zu, mirror failures %zu",
                oracle_err, zero ? "yes" : "no", monotone_fail, mirror_fail)};
}

Outcome path_tracking()
{
    const TrackingConfig cfg;
    bool slopes = true, odd = true;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 10000; ++i) {
        const double p = u(rng), e = u(rng);
        slopes = slopes && tracking_steer_raw(p, 0.0, cfg) == 3.18 * p && tracking_steer_raw(0.0, e, cfg) == 2.0 * e;
        odd = odd && tracking_steer_raw(-p, -e, cfg) == -tracking_steer_raw(p, e, cfg)
              && tracking_steer(-p, -e, cfg) == -tracking_steer(p, e, cfg);
    }
    const TrackGeometry g = build_track({{SegmentSpec::straight(1000.0), SegmentSpec::arc(50.0, kPi),
                                          SegmentSpec::straight(1000.0), SegmentSpec::arc(50.0, kPi)},
                                         6.0});
    WorldParams world;
    world.target_laps = 0;
    WorldState w = make_world(g, pose_from_track(g, 10.0, 2.0, 0.2, 10.0));
    // settled: |e| < 0.1 m from then until the end of the 10 s run
    double settled = 0.0;
    for (int i = 0; i < 200; ++i) {
        const TrackRelativePose rel = track_relative_pose(g, w.ego);
        w = step(w, {tracking_steer(rel.delta_psi, rel.e, cfg), 0.0}, g, world);
        if (std::abs(track_relative_pose(g, w.ego).e) >= 0.1) settled = w.t + world.dt;
    }
    return {slopes && odd && settled <= 10.0,
            fmt("slopes exact: %s; odd: %s; |e| < 0.1 m for good after %.2f s", slopes ? "yes" : "no",
                odd ? "yes" : "no", settled)};
}

Outcome blender()
{
    bool rejects = true;
    for (const BlendWeights w : {BlendWeights{0.5, 0.5, 0.5}, BlendWeights{0.4, 0.3, 0.31}, BlendWeights{1.1, -0.1, 0.0}}) {
        try {
            validate_weights(w);
            rejects = false;
        } catch (const std::invalid_argument&) {
        }
    }
    const BlendWeights table;
    validate_weights(table);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::size_t outside = 0;
    for (int i = 0; i < 100000; ++i) {
        const MethodCommands m{{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
        const Command c = blend(m, table);
        if (c.steer < std::min({m.learn.steer, m.apf.steer, m.track.steer})
            || c.steer > std::max({m.learn.steer, m.apf.steer, m.track.steer})
            || c.accel < std::min({m.learn.accel, m.apf.accel, m.track.accel})
            || c.accel > std::max({m.learn.accel, m.apf.accel, m.track.accel}))
            ++outside;
    }
    const double ex1 = blend({{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}}, table).steer;
    const double ex2 = blend({{0.5, 0.0}, {-1.0, 0.0}, {0.2, 0.0}}, table).steer;
    const bool examples = ex1 == 0.4 && std::abs(ex2 + 0.04) < 1e-15;
    return {rejects && outside == 0 && examples,
            fmt("invalid weights rejected: %s; 1e5 triples, %zu outside hull; examples %.17g, %.17g",
                rejects ? "yes" : "no", outside, ex1, ex2)};
}

Outcome scenario_regression()
{
    const NetworkParams policy = committed_policy();
    const RunConfig cfg;
    const ScenarioLog a = run_scenario(committed_scenario("A"), cfg, policy);
    const ScenarioLog b = run_scenario(committed_scenario("B"), cfg, policy);
    const ScenarioLog c = run_scenario(committed_scenario("C"), cfg, policy);
    const ScenarioLog d = run_scenario(committed_scenario("D"), cfg, policy);
    bool a_zero = !a.steps.empty();
    for (const auto& r : a.steps) a_zero = a_zero && r.methods.apf.steer == 0.0 && r.methods.apf.accel == 0.0;
    const auto peak = [](const ScenarioLog& log) {
        double p = 0.0;
        for (const auto& r : log.steps)
            p = std::max({p, std::abs(r.methods.apf.steer), std::abs(r.methods.apf.accel)});
        return p;
    };
    const double peak_b = peak(b), peak_c = peak(c);
    const MethodCommands& d0 = d.steps.front().methods;
    const bool d_ok = std::abs(d0.track.steer) > std::abs(d0.learn.steer)
                      && std::abs(d0.track.steer) > std::abs(d0.apf.steer);
    return {a_zero && peak_c > peak_b && d_ok,
            fmt("A apf zero: %s (%zu steps); peak |apf| B %.4f < C %.4f; D start |d_p| %.3f vs |d_l| %.3f, |d_f| %.3f",
                a_zero ? "yes" : "no", a.steps.size(), peak_b, peak_c, std::abs(d0.track.steer),
                std::abs(d0.learn.steer), std::abs(d0.apf.steer))};
}

Outcome protocol_bridge()
{
    using namespace scr;
    bool golden = true;
    const SensorMessage partial = parse_sensor_string("(angle 0.05)(trackPos -0.2)(speedX 80.0)");
    golden = golden && partial.angle == 0.05 && partial.track_pos == -0.2 && partial.speed_x == 80.0;
    golden = golden && format_action_string(actuator_from_command({0.1, 0.3})) == "(accel 0.3)(brake 0)(gear 1)(steer 0.1)";
    const ActuatorMessage brake = actuator_from_command({0.0, -0.5});
    golden = golden && brake.accel == 0.0 && brake.brake == 0.5;
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 10000 && golden; ++i) {
        const ActuatorMessage a = actuator_from_command({u(rng), u(rng)});
        golden = parse_action_string(format_action_string(a)) == a;
    }

    std::size_t fuzz_ok = 0;
    std::uniform_int_distribution<int> byte(0, 255), len(0, 100);
    const std::string base = "(angle 0.05)(trackPos -0.2)(speedX 80.0)";
    for (int i = 0; i < 10000; ++i) {
        std::string s = base;
        if (i % 2) {
            s.clear();
            for (int n = len(rng); n > 0; --n) s += static_cast<char>(byte(rng));
        } else {
            s[static_cast<std::size_t>(len(rng)) % s.size()] = static_cast<char>(byte(rng));
        }
        try {
            parse_sensor_string(s);
        } catch (const ProtocolError&) {
        }
        ++fuzz_ok;
    }

    const TrackGeometry g = builtin_track("oval");
    WorldParams world;
    world.target_laps = 0;
    SimulatorServer server({0, "SCR", 2000ms, 100}, g, world, make_world(g, pose_from_track(g, 10.0, 0.0, 0.0, 10.0)));
    auto served = std::async(std::launch::async, [&] { return server.run(); });
    const SessionResult client = run_client({"127.0.0.1", server.port(), "SCR", 2000ms, 10, 0},
                                            [](const SensorFrame& f) {
                                                return Command{tracking_steer(f.angle, 6.0 * f.track_pos, {}), 0.0};
                                            });
    const SessionResult srv = served.get();
    const bool loop = srv.status == SessionStatus::Completed && srv.steps == 100 && client.steps == 100;
    return {golden && fuzz_ok == 10000 && loop,
            fmt("golden round trips exact: %s; fuzz cases survived %zu/10000; loopback server %zu / client %zu steps",
                golden ? "yes" : "no", fuzz_ok, srv.steps, client.steps)};
}

std::string deterministic_outputs()
{
    RunConfig cfg;
    cfg.seed = 77;
    cfg.trainer.total_steps = 3000;
    cfg.trainer.warmup = 500;
    const TrainResult trained = run_training(cfg);
    std::ostringstream out;
    write_metrics_csv(out, trained.metrics);
    save_mlp(out, trained.actor);
    cfg.eval.episodes = 2;
    cfg.eval.max_steps = 300;
    write_eval_csv(out, evaluate_policy(trained.actor, builtin_track("oval"), cfg));
    std::vector<ScenarioLog> logs;
    for (const char* id : {"A", "B", "C", "D"}) logs.push_back(run_scenario(committed_scenario(id), cfg, trained.actor));
    for (const auto& log : logs) write_scenario_csv(out, log);
    write_commands_csv(out, logs);
    return out.str();
}

Outcome determinism()
{
    const std::string first = deterministic_outputs();
    const std::string second = deterministic_outputs();
    return {first == second, fmt("%zu bytes of training, evaluation and scenario CSV, identical: %s",
                                 first.size(), first == second ? "yes" : "no")};
}

struct Criterion
{
    int id;
    const char* name;
    double budget_s; // 0 means no time limit
    std::function<Outcome()> run;
};

} // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {1, "gradient correctness", 10.0, gradient_correctness},
        {2, "actor-update fidelity", 10.0, actor_update_fidelity},
        {3, "critic regression oracle", 30.0, critic_oracle},
        {4, "desk-scale training trend", 900.0, training_trend},
        {5, "reward bounds", 5.0, reward_bounds},
        {6, "potential-field exactness", 10.0, apf_exactness},
        {7, "path tracking", 10.0, path_tracking},
        {8, "command blender", 5.0, blender},
        {9, "scenario regression", 60.0, scenario_regression},
        {10, "protocol bridge", 30.0, protocol_bridge},
        {11, "determinism", 0.0, determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = c.budget_s == 0.0 || secs <= c.budget_s;
        const bool pass = o.pass && in_time;
        failures += pass ? 0 : 1;
        std::printf("criterion %2d %-28s %s  %s; %.2f s%s\n", c.id, c.name, pass ? "PASS" : "FAIL",
                    o.detail.c_str(), secs, in_time ? "" : " (over time budget)");
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
