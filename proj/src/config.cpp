#include "hybrid_drive/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace hybrid_drive {

namespace {

struct Entry
{
    std::string key;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text)
{
    T v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw std::invalid_argument("config " + key + ": cannot parse '" + text + "'");
    return v;
}

std::string render(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T, typename Access>
Entry number(std::string key, Access access)
{
    Entry e;
    e.key = key;
    e.set = [key, access](RunConfig& c, const std::string& v) { access(c) = parse_number<T>(key, v); };
    e.get = [access](const RunConfig& c) {
        RunConfig copy = c;
        if constexpr (std::is_floating_point_v<T>) return render(access(copy));
        else return std::to_string(access(copy));
    };
    return e;
}

const std::vector<Entry>& registry()
{
    static const std::vector<Entry> entries = [] {
        std::vector<Entry> r;
        r.push_back(number<std::uint64_t>("run.seed", [](RunConfig& c) -> auto& { return c.seed; }));
        r.push_back({"run.track", [](RunConfig& c, const std::string& v) { c.track = v; },
                     [](const RunConfig& c) { return c.track; }});
        r.push_back({"run.output_dir", [](RunConfig& c, const std::string& v) { c.output_dir = v; },
                     [](const RunConfig& c) { return c.output_dir.string(); }});

        r.push_back(number<double>("trainer.actor_lr", [](RunConfig& c) -> auto& { return c.trainer.actor_lr; }));
        r.push_back(number<double>("trainer.critic_lr", [](RunConfig& c) -> auto& { return c.trainer.critic_lr; }));
        r.push_back(number<double>("trainer.gamma", [](RunConfig& c) -> auto& { return c.trainer.gamma; }));
        r.push_back(number<std::size_t>("trainer.batch", [](RunConfig& c) -> auto& { return c.trainer.batch; }));
        r.push_back(number<double>("trainer.tau_soft", [](RunConfig& c) -> auto& { return c.trainer.tau_soft; }));
        r.push_back(number<std::size_t>("trainer.buffer_capacity", [](RunConfig& c) -> auto& { return c.trainer.buffer_capacity; }));
        r.push_back(number<std::size_t>("trainer.warmup", [](RunConfig& c) -> auto& { return c.trainer.warmup; }));
        r.push_back(number<double>("trainer.ou_theta", [](RunConfig& c) -> auto& { return c.trainer.ou_theta; }));
        r.push_back(number<double>("trainer.ou_sigma", [](RunConfig& c) -> auto& { return c.trainer.ou_sigma; }));
        r.push_back(number<std::size_t>("trainer.total_steps", [](RunConfig& c) -> auto& { return c.trainer.total_steps; }));
        r.push_back(number<std::size_t>("trainer.max_episode_steps", [](RunConfig& c) -> auto& { return c.trainer.max_episode_steps; }));
        r.push_back(number<double>("trainer.reward_scale", [](RunConfig& c) -> auto& { return c.trainer.reward_scale; }));
        r.push_back({"trainer.profile",
                     [](RunConfig& c, const std::string& v) { c.trainer.profile = parse_profile(v); },
                     [](const RunConfig& c) { return std::string(to_string(c.trainer.profile)); }});

        r.push_back(number<double>("start.max_offset", [](RunConfig& c) -> auto& { return c.start.max_offset; }));
        r.push_back(number<double>("start.max_heading", [](RunConfig& c) -> auto& { return c.start.max_heading; }));
        r.push_back(number<double>("start.max_speed", [](RunConfig& c) -> auto& { return c.start.max_speed; }));

        r.push_back(number<std::size_t>("eval.episodes", [](RunConfig& c) -> auto& { return c.eval.episodes; }));
        r.push_back(number<std::size_t>("eval.max_steps", [](RunConfig& c) -> auto& { return c.eval.max_steps; }));
        r.push_back(number<double>("eval.max_offset", [](RunConfig& c) -> auto& { return c.eval.max_offset; }));
        r.push_back(number<double>("eval.max_heading", [](RunConfig& c) -> auto& { return c.eval.max_heading; }));

        r.push_back(number<double>("apf.k_fx", [](RunConfig& c) -> auto& { return c.apf.k_fx; }));
        r.push_back(number<double>("apf.k_fy", [](RunConfig& c) -> auto& { return c.apf.k_fy; }));
        r.push_back(number<double>("apf.eta", [](RunConfig& c) -> auto& { return c.apf.eta; }));
        r.push_back(number<double>("apf.d_cut", [](RunConfig& c) -> auto& { return c.apf.d_cut; }));

        r.push_back(number<double>("tracking.eta1", [](RunConfig& c) -> auto& { return c.tracking.eta1; }));
        r.push_back(number<double>("tracking.eta2", [](RunConfig& c) -> auto& { return c.tracking.eta2; }));
        r.push_back(number<double>("tracking.v_ref", [](RunConfig& c) -> auto& { return c.tracking.v_ref; }));
        r.push_back(number<double>("tracking.v_min", [](RunConfig& c) -> auto& { return c.tracking.v_min; }));
        r.push_back(number<double>("tracking.k_slow", [](RunConfig& c) -> auto& { return c.tracking.k_slow; }));
        r.push_back(number<double>("tracking.k_speed", [](RunConfig& c) -> auto& { return c.tracking.k_speed; }));

        r.push_back(number<double>("blend.alpha", [](RunConfig& c) -> auto& { return c.weights.alpha; }));
        r.push_back(number<double>("blend.beta", [](RunConfig& c) -> auto& { return c.weights.beta; }));
        r.push_back(number<double>("blend.gamma", [](RunConfig& c) -> auto& { return c.weights.gamma; }));

        r.push_back(number<double>("vehicle.wheelbase", [](RunConfig& c) -> auto& { return c.world.vehicle.wheelbase; }));
        r.push_back(number<double>("vehicle.max_steer", [](RunConfig& c) -> auto& { return c.world.vehicle.max_steer; }));
        r.push_back(number<double>("vehicle.max_accel", [](RunConfig& c) -> auto& { return c.world.vehicle.max_accel; }));
        r.push_back(number<double>("vehicle.max_brake", [](RunConfig& c) -> auto& { return c.world.vehicle.max_brake; }));
        r.push_back(number<double>("vehicle.max_speed", [](RunConfig& c) -> auto& { return c.world.vehicle.max_speed; }));
        r.push_back(number<double>("vehicle.half_length", [](RunConfig& c) -> auto& { return c.world.vehicle.half_length; }));

        r.push_back(number<double>("world.dt", [](RunConfig& c) -> auto& { return c.world.dt; }));
        r.push_back(number<double>("world.collision_radius", [](RunConfig& c) -> auto& { return c.world.collision_radius; }));
        r.push_back(number<int>("world.target_laps", [](RunConfig& c) -> auto& { return c.world.target_laps; }));

        r.push_back(number<double>("sensors.rpm_per_mps", [](RunConfig& c) -> auto& { return c.sensors.rpm_per_mps; }));
        r.push_back(number<double>("sensors.rpm_max", [](RunConfig& c) -> auto& { return c.sensors.rpm_max; }));
        return r;
    }();
    return entries;
}

} // namespace

void RunConfig::validate() const
{
    trainer.validate();
    apf.validate();
    tracking.validate();
    validate_weights(weights);
    const auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("config: ") + what);
    };
    const auto& v = world.vehicle;
    require(v.wheelbase > 0.0 && v.max_steer > 0.0 && v.max_steer < kPi / 2.0,
            "vehicle geometry must be positive with max_steer below pi/2");
    require(v.max_accel > 0.0 && v.max_brake > 0.0 && v.max_speed > 0.0,
            "vehicle limits must be positive");
    require(world.dt > 0.0, "world.dt must be positive");
    require(world.collision_radius >= 0.0, "world.collision_radius must be non-negative");
    require(sensors.max_speed == v.max_speed, "sensor speed scale must match vehicle.max_speed");
    require(sensors.rpm_per_mps > 0.0 && sensors.rpm_max > 0.0, "rpm constants must be positive");
    require(start.max_offset >= 0.0 && start.max_heading >= 0.0 && start.max_speed >= 0.0,
            "start spread must be non-negative");
    require(eval.episodes >= 1 && eval.max_steps >= 1, "eval needs episodes and steps");
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value)
{
    for (const auto& e : registry()) {
        if (e.key == key) {
            e.set(cfg, value);
            if (key == "vehicle.max_speed") cfg.sensors.max_speed = cfg.world.vehicle.max_speed;
            return;
        }
    }
    throw std::invalid_argument("unknown config key '" + key + "'");
}

void parse_config(std::istream& in, RunConfig& cfg)
{
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
        apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void load_config(const std::filesystem::path& path, RunConfig& cfg)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path.string());
    parse_config(in, cfg);
}

std::string dump_config(const RunConfig& cfg)
{
    std::ostringstream out;
    for (const auto& e : registry()) out << e.key << " = " << e.get(cfg) << '\n';
    return out.str();
}

std::vector<std::string> config_keys()
{
    std::vector<std::string> keys;
    for (const auto& e : registry()) keys.push_back(e.key);
    return keys;
}

} // namespace hybrid_drive
