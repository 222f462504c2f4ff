#include "hybrid_drive/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "hybrid_drive/csv.hpp"

namespace hybrid_drive {

namespace {

void write_methods(std::ostream& out, const MethodCommands& m, Command blended)
{
    for (double v : {m.learn.steer, m.learn.accel, m.apf.steer, m.apf.accel, m.track.steer,
                     m.track.accel, blended.steer, blended.accel})
        out << ',' << csv_number(v);
}

} // namespace

HybridController HybridController::from_config(NetworkParams actor, const RunConfig& cfg,
                                               double half_width)
{
    return {std::move(actor), cfg.apf, cfg.tracking, cfg.weights, cfg.sensors, half_width};
}

MethodCommands HybridController::methods(const SensorFrame& frame) const
{
    MethodCommands m;
    m.learn = policy_act(actor, frame, sensors);
    const auto readings = obstacle_readings(frame.opponents);
    m.apf = apf_command(repulsive_force(readings, apf), apf);
    TrackRelativePose rel;
    rel.delta_psi = frame.angle;
    rel.track_pos = frame.track_pos;
    rel.e = frame.track_pos * half_width;
    m.track = tracking_command(rel, frame.speed, tracking);
    return m;
}

ScenarioLog run_scenario(const Scenario& sc, const RunConfig& cfg, const NetworkParams& policy)
{
    cfg.validate();
    const TrackGeometry geom = resolve_track(sc.track);
    WorldState state = scenario_world(sc, geom);
    WorldParams world = cfg.world;
    world.target_laps = 0;
    const HybridController controller = HybridController::from_config(policy, cfg, geom.half_width());

    ScenarioLog log;
    log.scenario_id = sc.id;
    const auto steps = static_cast<std::size_t>(std::llround(sc.duration / world.dt));
    for (std::size_t i = 0; i < steps; ++i) {
        const SensorFrame frame = sensor_frame(state, geom, cfg.sensors);
        StepRecord rec;
        rec.t = state.t;
        rec.pose = state.ego;
        rec.rel = track_relative_pose(geom, state.ego);
        rec.nearest_opponent = *std::min_element(frame.opponents.begin(), frame.opponents.end());
        rec.methods = controller.methods(frame);
        rec.blended = blend(rec.methods, controller.weights);
        state = step(state, rec.blended, geom, world);
        rec.status = episode_status(state, geom, world).kind;
        log.steps.push_back(rec);
        if (rec.status != EpisodeStatusKind::Running) break;
    }
    return log;
}

WorldFactory training_world_factory(const TrackGeometry& geom, const StartDistribution& start)
{
    return [geom, start](std::size_t, std::mt19937_64& rng) {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double s = unit(rng) * geom.total_length();
        const double e = (2.0 * unit(rng) - 1.0) * start.max_offset;
        const double dpsi = (2.0 * unit(rng) - 1.0) * start.max_heading;
        const double speed = unit(rng) * start.max_speed;
        return make_world(geom, pose_from_track(geom, s, e, dpsi, speed));
    };
}

TrainResult run_training(const RunConfig& cfg, const EpisodeCallback& on_episode)
{
    cfg.validate();
    const TrackGeometry geom = resolve_track(cfg.track);
    TrainerConfig trainer = cfg.trainer;
    trainer.seed = cfg.seed;
    WorldParams world = cfg.world;
    world.target_laps = 0;
    return train(trainer, geom, world, cfg.sensors, training_world_factory(geom, cfg.start),
                 on_episode);
}

std::uint64_t eval_episode_seed(std::uint64_t master, std::size_t k)
{
    return derive_seed(master, k);
}

EvalSummary evaluate_policy(const NetworkParams& actor, const TrackGeometry& geom,
                            const RunConfig& cfg)
{
    if (actor.input_width() != kStateWidth)
        throw std::invalid_argument("policy expects " + std::to_string(actor.input_width())
                                    + " state inputs; the sensors produce 29");
    WorldParams world = cfg.world;
    world.target_laps = 1;
    EvalSummary summary;
    double return_sum = 0.0;
    for (std::size_t k = 0; k < cfg.eval.episodes; ++k) {
        std::mt19937_64 rng(eval_episode_seed(cfg.seed, k));
        std::uniform_real_distribution<double> sym(-1.0, 1.0);
        const double s = geom.total_length() * static_cast<double>(k)
                         / static_cast<double>(cfg.eval.episodes);
        const double e = sym(rng) * cfg.eval.max_offset;
        const double dpsi = sym(rng) * cfg.eval.max_heading;
        WorldState state = make_world(geom, pose_from_track(geom, s, e, dpsi, 0.0));

        EvalEpisode ep;
        ep.episode = k;
        while (ep.steps < cfg.eval.max_steps) {
            const Command cmd = policy_act(actor, sensor_frame(state, geom, cfg.sensors), cfg.sensors);
            state = step(state, cmd, geom, world);
            ++ep.steps;
            ep.episode_return += step_reward(state.ego.speed,
                                             track_relative_pose(geom, state.ego).delta_psi,
                                             cfg.trainer.reward_scale);
            const EpisodeStatus status = episode_status(state, geom, world);
            if (status.terminal()) {
                ep.end = status.kind;
                break;
            }
        }
        ep.completed = ep.end == EpisodeStatusKind::LapDone;
        summary.completed += ep.completed ? 1 : 0;
        summary.off_track += ep.end == EpisodeStatusKind::OffTrack ? 1 : 0;
        return_sum += ep.episode_return;
        summary.episodes.push_back(ep);
    }
    const auto n = static_cast<double>(cfg.eval.episodes);
    summary.completion_rate = static_cast<double>(summary.completed) / n;
    summary.mean_return = return_sum / n;
    return summary;
}

std::string scenario_csv_header()
{
    return "t,x,y,heading,speed,s,e,delta_psi,track_pos,nearest_opponent,"
           "steer_learn,accel_learn,steer_apf,accel_apf,steer_track,accel_track,"
           "steer,accel,status";
}

std::string commands_csv_header()
{
    return "scenario,t,steer_learn,accel_learn,steer_apf,accel_apf,steer_track,accel_track,"
           "steer,accel";
}

void write_scenario_csv(std::ostream& out, const ScenarioLog& log)
{
    out << scenario_csv_header() << '\n';
    for (const auto& r : log.steps) {
        out << csv_number(r.t);
        for (double v : {r.pose.x, r.pose.y, r.pose.heading, r.pose.speed, r.rel.s, r.rel.e,
                         r.rel.delta_psi, r.rel.track_pos, r.nearest_opponent})
            out << ',' << csv_number(v);
        write_methods(out, r.methods, r.blended);
        out << ',' << to_string(r.status) << '\n';
    }
}

void write_commands_csv(std::ostream& out, std::span<const ScenarioLog> logs)
{
    out << commands_csv_header() << '\n';
    for (const auto& log : logs) {
        for (const auto& r : log.steps) {
            out << log.scenario_id << ',' << csv_number(r.t);
            write_methods(out, r.methods, r.blended);
            out << '\n';
        }
    }
}

void write_eval_csv(std::ostream& out, const EvalSummary& summary)
{
    out << "episode,steps,return,end,completed\n";
    for (const auto& e : summary.episodes)
        out << e.episode << ',' << e.steps << ',' << csv_number(e.episode_return) << ','
            << to_string(e.end) << ',' << (e.completed ? 1 : 0) << '\n';
}

std::vector<std::filesystem::path> export_csv(const std::filesystem::path& dir,
                                              std::span<const ScenarioLog> logs)
{
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    const auto open = [&](const std::filesystem::path& p) {
        std::ofstream out(p);
        if (!out) throw std::runtime_error("cannot write " + p.string());
        written.push_back(p);
        return out;
    };
    for (const auto& log : logs) {
        auto out = open(dir / ("scenario_" + log.scenario_id + ".csv"));
        write_scenario_csv(out, log);
    }
    auto out = open(dir / "commands.csv");
    write_commands_csv(out, logs);
    return written;
}

} // namespace hybrid_drive
