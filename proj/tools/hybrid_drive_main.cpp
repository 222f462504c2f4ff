// Command-line front end: train, eval, scenario, serve-scr, drive-scr, check-gradients.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hybrid_drive/config.hpp"
#include "hybrid_drive/harness.hpp"
#include "hybrid_drive/scr_session.hpp"

namespace fs = std::filesystem;
using namespace hybrid_drive;

namespace {

constexpr int kValidationError = 1;
constexpr int kRuntimeError = 2;

struct CommonOptions
{
    std::string config_file;
    std::vector<std::string> overrides;
    std::string out_dir;
};

fs::path default_out_dir()
{
    if (const char* env = std::getenv("HYBRID_DRIVE_OUT"); env && *env) return env;
    return {};
}

RunConfig build_config(const CommonOptions& opts)
{
    RunConfig cfg;
    if (const fs::path env = default_out_dir(); !env.empty()) cfg.output_dir = env;
    if (!opts.config_file.empty()) load_config(opts.config_file, cfg);
    for (const auto& kv : opts.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
        apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
    cfg.validate();
    return cfg;
}

std::ofstream open_output(const fs::path& path)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void add_common(CLI::App* sub, CommonOptions& opts)
{
    sub->add_option("-c,--config", opts.config_file, "key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--set", opts.overrides, "override one config key, e.g. --set apf.k_fx=20");
    sub->add_option("-o,--out", opts.out_dir, "output directory (default $HYBRID_DRIVE_OUT or ./out)");
}

fs::path data_path(const std::string& rel) { return fs::path(HYBRID_DRIVE_DATA_DIR) / rel; }

int cmd_train(const RunConfig& cfg, bool quiet)
{
    const auto t0 = std::chrono::steady_clock::now();
    const TrainResult result = run_training(cfg, [quiet](const EpisodeMetrics& m) {
        if (!quiet)
            std::printf("episode %zu steps %zu return %.3f avg_q %.4f\n", m.episode, m.steps,
                        m.episode_return, m.avg_q);
    });
    const fs::path ckpt = cfg.output_dir / "checkpoint";
    TrainerConfig trainer = cfg.trainer;
    trainer.seed = cfg.seed;
    save_checkpoint(ckpt, result.actor, result.critic,
                    {result.total_steps, cfg.seed, config_hash(trainer)});
    auto metrics = open_output(cfg.output_dir / "metrics.csv");
    write_metrics_csv(metrics, result.metrics);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("trained %zu steps over %zu episodes in %.1f s; checkpoint %s\n",
                result.total_steps, result.metrics.size(), secs, ckpt.c_str());
    return 0;
}

int cmd_eval(const RunConfig& cfg, const fs::path& checkpoint)
{
    const NetworkParams actor = load_policy(checkpoint);
    const TrackGeometry geom = resolve_track(cfg.track);
    const EvalSummary summary = evaluate_policy(actor, geom, cfg);
    auto out = open_output(cfg.output_dir / ("eval_" + fs::path(cfg.track).stem().string() + ".csv"));
    write_eval_csv(out, summary);
    std::printf("track %s: completed %zu/%zu laps, off-track %zu, mean return %.3f\n",
                cfg.track.c_str(), summary.completed, summary.episodes.size(), summary.off_track,
                summary.mean_return);
    return 0;
}

Scenario find_scenario(const std::string& id_or_path, const fs::path& dir)
{
    if (fs::exists(id_or_path) && fs::is_regular_file(id_or_path)) return load_scenario(id_or_path);
    const fs::path file = dir / (id_or_path + ".scn");
    if (!fs::exists(file)) throw std::invalid_argument("no scenario '" + id_or_path + "' in " + dir.string());
    return load_scenario(file);
}

int cmd_scenario(const RunConfig& cfg, const std::vector<std::string>& ids, const fs::path& dir,
                 const fs::path& checkpoint)
{
    const NetworkParams actor = load_policy(checkpoint);
    std::vector<ScenarioLog> logs;
    for (const auto& id : ids) {
        const Scenario sc = find_scenario(id, dir);
        logs.push_back(run_scenario(sc, cfg, actor));
        const auto& last = logs.back().steps;
        std::printf("scenario %s: %zu steps, final status %s\n", sc.id.c_str(), last.size(),
                    last.empty() ? "Running" : to_string(last.back().status));
    }
    for (const auto& p : export_csv(cfg.output_dir, logs)) std::printf("wrote %s\n", p.c_str());
    return 0;
}

int cmd_serve(const RunConfig& cfg, std::uint16_t port, std::size_t steps, double timeout_s)
{
    const TrackGeometry geom = resolve_track(cfg.track);
    scr::ServerOptions opts;
    opts.port = port;
    opts.max_steps = steps;
    opts.timeout = std::chrono::milliseconds(static_cast<long>(timeout_s * 1000.0));
    const WorldState initial = make_world(geom, pose_from_track(geom, 0.0, 0.0, 0.0, 0.0));
    scr::SimulatorServer server(opts, geom, cfg.world, initial, cfg.sensors);
    std::printf("serving %s on udp port %u\n", cfg.track.c_str(), server.port());
    std::fflush(stdout);
    const scr::SessionResult r = server.run();
    std::printf("session %s after %zu steps (%zu malformed)\n", scr::to_string(r.status), r.steps,
                r.malformed);
    return r.status == scr::SessionStatus::Timeout ? kRuntimeError : 0;
}

int cmd_drive(const RunConfig& cfg, const std::string& endpoint, const fs::path& checkpoint,
              std::size_t steps, double timeout_s)
{
    const auto colon = endpoint.rfind(':');
    if (colon == std::string::npos) throw std::invalid_argument("--scr-connect expects host:port");
    scr::ClientOptions opts;
    opts.host = endpoint.substr(0, colon);
    const int port = std::stoi(endpoint.substr(colon + 1));
    if (port <= 0 || port > 65535) throw std::invalid_argument("port out of range in " + endpoint);
    opts.port = static_cast<std::uint16_t>(port);
    opts.max_steps = steps;
    opts.timeout = std::chrono::milliseconds(static_cast<long>(timeout_s * 1000.0));
    const HybridController controller =
        HybridController::from_config(load_policy(checkpoint), cfg, resolve_track(cfg.track).half_width());
    const scr::SessionResult r = scr::run_client(opts, controller, cfg.sensors);
    std::printf("session %s after %zu steps (%zu malformed)\n", scr::to_string(r.status), r.steps,
                r.malformed);
    return r.status == scr::SessionStatus::Timeout ? kRuntimeError : 0;
}

int cmd_check_gradients(std::size_t nets, std::uint64_t seed, double tolerance)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> width(1, 16);
    std::uniform_int_distribution<int> depth(1, 3);
    std::bernoulli_distribution use_tanh(0.5);
    std::normal_distribution<double> normal(0.0, 1.0);
    double worst = 0.0;
    for (std::size_t n = 0; n < nets; ++n) {
        const std::size_t in = width(rng);
        std::vector<LayerSpec> layers;
        for (int d = depth(rng); d > 0; --d)
            layers.push_back({width(rng), use_tanh(rng) ? Activation::Tanh : Activation::Relu});
        layers.push_back({width(rng), Activation::Identity});
        const NetworkParams net = make_mlp(in, layers, rng, 1.0);
        Eigen::VectorXd x(in);
        for (auto& v : x) v = normal(rng);
        Eigen::VectorXd up(layers.back().units);
        for (auto& v : up) v = normal(rng);
        const GradientCheck c = finite_diff_check(net, x, 1e-5, up);
        worst = std::max(worst, c.max_relative_error);
        std::printf("net %zu: %zu params checked, %zu at a relu kink, max rel err %.3e\n", n,
                    c.checked, c.skipped_at_kink, c.max_relative_error);
    }
    const bool ok = worst <= tolerance;
    std::printf("%s: worst relative error %.3e (tolerance %.1e)\n", ok ? "PASS" : "FAIL", worst,
                tolerance);
    return ok ? 0 : kRuntimeError;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Hybrid DDPG / potential-field / path-tracking driving stack"};
    app.require_subcommand(1);
    CommonOptions common;

    auto* train = app.add_subcommand("train", "train a policy on the opponent-free track");
    add_common(train, common);
    long long train_steps = -1;
    bool quiet = false;
    train->add_option("--steps", train_steps, "environment steps (overrides trainer.total_steps)")
        ->check(CLI::NonNegativeNumber);
    train->add_flag("-q,--quiet", quiet, "no per-episode lines");

    auto* eval = app.add_subcommand("eval", "roll out a checkpoint without exploration noise");
    add_common(eval, common);
    std::string checkpoint = data_path("toy_policy").string();
    std::string track;
    std::size_t episodes = 0;
    eval->add_option("--checkpoint", checkpoint, "checkpoint directory");
    eval->add_option("--track", track, "built-in track name or track file");
    eval->add_option("--episodes", episodes, "evaluation episodes");

    auto* scenario = app.add_subcommand("scenario", "run driving scenarios and export command logs");
    add_common(scenario, common);
    std::vector<std::string> scenario_ids;
    std::string scenario_dir = data_path("scenarios").string();
    scenario->add_option("id", scenario_ids, "scenario ids (A B C D) or .scn files")->required();
    scenario->add_option("--checkpoint", checkpoint, "checkpoint directory");
    scenario->add_option("--scenario-dir", scenario_dir, "directory of <id>.scn files");

    auto* serve = app.add_subcommand("serve-scr", "serve the built-in simulator over SCR/UDP");
    add_common(serve, common);
    std::uint16_t listen_port = 3001;
    std::size_t session_steps = 1000;
    double timeout_s = 10.0;
    serve->add_option("--scr-listen", listen_port, "udp port (0 picks one)");
    serve->add_option("--steps", session_steps, "control steps before shutdown");
    serve->add_option("--track", track, "built-in track name or track file");
    serve->add_option("--timeout", timeout_s, "receive timeout in seconds");

    auto* drive = app.add_subcommand("drive-scr", "drive an SCR server with the blended controller");
    add_common(drive, common);
    std::string endpoint = "127.0.0.1:3001";
    std::size_t drive_steps = 0;
    drive->add_option("--scr-connect", endpoint, "host:port of the SCR server");
    drive->add_option("--checkpoint", checkpoint, "checkpoint directory");
    drive->add_option("--steps", drive_steps, "stop after this many steps (0 = until shutdown)");
    drive->add_option("--track", track, "track used for the half width");
    drive->add_option("--timeout", timeout_s, "receive timeout in seconds");

    auto* grads = app.add_subcommand("check-gradients", "finite-difference check of backprop");
    std::size_t nets = 20;
    std::uint64_t grad_seed = 1;
    double tolerance = 1e-4;
    grads->add_option("--nets", nets, "random networks to check");
    grads->add_option("--seed", grad_seed, "rng seed");
    grads->add_option("--tolerance", tolerance, "max relative error");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kValidationError;
    }

    try {
        if (grads->parsed()) return cmd_check_gradients(nets, grad_seed, tolerance);

        RunConfig cfg = build_config(common);
        if (!track.empty()) cfg.track = track;
        if (episodes > 0) cfg.eval.episodes = episodes;
        if (train_steps >= 0) cfg.trainer.total_steps = static_cast<std::size_t>(train_steps);
        cfg.validate();

        if (train->parsed()) return cmd_train(cfg, quiet);
        if (eval->parsed()) return cmd_eval(cfg, checkpoint);
        if (scenario->parsed()) return cmd_scenario(cfg, scenario_ids, scenario_dir, checkpoint);
        if (serve->parsed()) return cmd_serve(cfg, listen_port, session_steps, timeout_s);
        if (drive->parsed()) return cmd_drive(cfg, endpoint, checkpoint, drive_steps, timeout_s);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kValidationError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kRuntimeError;
    }
    return 0;
}
