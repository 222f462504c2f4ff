#include "hybrid_drive/scr_protocol.hpp"

#include <charconv>
#include <cmath>

namespace hybrid_drive::scr {

namespace {

constexpr double kKmhPerMps = 3.6;
constexpr double kWheelRadius = 0.3; // m, converts wheel surface speed to spin rate
// wire sector i starts at -180 deg clockwise from the car axis; ours start due left
constexpr std::size_t kWireSectorShift = 9;

bool is_name_start(char c)
{
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}

bool is_name_char(char c)
{
    return is_name_start(c) || (c >= '0' && c <= '9');
}

bool is_space(char c)
{
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

std::string render(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v + 0.0);
    return std::string(buf, res.ptr);
}

std::string group(std::string_view name, std::initializer_list<double> values)
{
    std::string out = "(";
    out += name;
    for (double v : values) out += ' ' + render(v);
    out += ')';
    return out;
}

template <std::size_t N>
std::string group(std::string_view name, const std::array<double, N>& values)
{
    std::string out = "(";
    out += name;
    for (double v : values) out += ' ' + render(v);
    out += ')';
    return out;
}

template <std::size_t N>
std::array<double, N> take(std::string_view name, const std::vector<double>& v)
{
    if (v.size() != N)
        throw ProtocolError("arity: " + std::string(name) + " expects " + std::to_string(N)
                            + ", got " + std::to_string(v.size()));
    std::array<double, N> out{};
    std::copy(v.begin(), v.end(), out.begin());
    return out;
}

struct Group
{
    std::string name;
    std::vector<double> values;
};

/// Tokenizes `(name v ...)(name v ...)`; throws ProtocolError on any deviation.
std::vector<Group> parse_groups(std::string_view text)
{
    if (const auto nul = text.find('\0'); nul != std::string_view::npos) text = text.substr(0, nul);
    while (!text.empty() && is_space(text.back())) text.remove_suffix(1);

    std::vector<Group> groups;
    std::size_t i = 0;
    const auto skip_space = [&]() {
        while (i < text.size() && is_space(text[i])) ++i;
    };
    skip_space();
    while (i < text.size()) {
        if (text[i] != '(') throw ProtocolError("expected '(' at offset " + std::to_string(i));
        ++i;
        const std::size_t name_begin = i;
        if (i >= text.size() || !is_name_start(text[i]))
            throw ProtocolError("expected group name at offset " + std::to_string(i));
        while (i < text.size() && is_name_char(text[i])) ++i;
        Group g{std::string(text.substr(name_begin, i - name_begin)), {}};

        while (true) {
            if (i >= text.size()) throw ProtocolError("unbalanced parenthesis in group " + g.name);
            if (text[i] == ')') break;
            if (!is_space(text[i]))
                throw ProtocolError("expected separator in group " + g.name);
            skip_space();
            if (i >= text.size()) throw ProtocolError("unbalanced parenthesis in group " + g.name);
            if (text[i] == ')') break;
            double v = 0.0;
            const char* begin = text.data() + i;
            const char* end = text.data() + text.size();
            const auto [ptr, ec] = std::from_chars(begin, end, v);
            if (ec != std::errc{} || ptr == begin || !std::isfinite(v))
                throw ProtocolError("non-numeric token in group " + g.name);
            i += static_cast<std::size_t>(ptr - begin);
            g.values.push_back(v);
        }
        ++i; // ')'
        if (g.values.empty()) throw ProtocolError("group " + g.name + " has no values");
        groups.push_back(std::move(g));
        skip_space();
    }
    if (groups.empty()) throw ProtocolError("empty message");
    return groups;
}

} // namespace

SensorMessage parse_sensor_string(std::string_view text)
{
    SensorMessage msg;
    for (auto& g : parse_groups(text)) {
        if (g.name == "angle") msg.angle = take<1>(g.name, g.values)[0];
        else if (g.name == "trackPos") msg.track_pos = take<1>(g.name, g.values)[0];
        else if (g.name == "speedX") msg.speed_x = take<1>(g.name, g.values)[0];
        else if (g.name == "rpm") msg.rpm = take<1>(g.name, g.values)[0];
        else if (g.name == "wheelSpinVel") msg.wheel_spin_vel = take<4>(g.name, g.values);
        else if (g.name == "track") msg.track = take<kTrackRayCount>(g.name, g.values);
        else if (g.name == "opponents") msg.opponents = take<kOpponentSectorCount>(g.name, g.values);
        else msg.other.emplace_back(std::move(g.name), std::move(g.values));
    }
    return msg;
}

std::string format_sensor_string(const SensorMessage& msg)
{
    std::string out;
    if (msg.angle) out += group("angle", {*msg.angle});
    if (msg.track_pos) out += group("trackPos", {*msg.track_pos});
    if (msg.speed_x) out += group("speedX", {*msg.speed_x});
    if (msg.wheel_spin_vel) out += group("wheelSpinVel", *msg.wheel_spin_vel);
    if (msg.rpm) out += group("rpm", {*msg.rpm});
    if (msg.track) out += group("track", *msg.track);
    if (msg.opponents) out += group("opponents", *msg.opponents);
    for (const auto& [name, values] : msg.other) {
        out += '(' + name;
        for (double v : values) out += ' ' + render(v);
        out += ')';
    }
    return out;
}

ActuatorMessage actuator_from_command(Command cmd)
{
    cmd = clamp_unit(cmd);
    ActuatorMessage a;
    a.accel = std::max(cmd.accel, 0.0) + 0.0;
    a.brake = std::max(-cmd.accel, 0.0) + 0.0;
    a.gear = 1;
    a.steer = cmd.steer + 0.0;
    return a;
}

Command command_from_actuator(const ActuatorMessage& a)
{
    return {a.steer, a.accel - a.brake};
}

std::string format_action_string(const ActuatorMessage& a)
{
    const auto in = [](double v, double lo, double hi) { return std::isfinite(v) && v >= lo && v <= hi; };
    if (!in(a.accel, 0.0, 1.0)) throw ProtocolError("accel outside [0, 1]");
    if (!in(a.brake, 0.0, 1.0)) throw ProtocolError("brake outside [0, 1]");
    if (!in(a.steer, -1.0, 1.0)) throw ProtocolError("steer outside [-1, 1]");
    if (a.gear < -1 || a.gear > 7) throw ProtocolError("gear outside [-1, 7]");
    return group("accel", {a.accel}) + group("brake", {a.brake}) + "(gear " + std::to_string(a.gear)
           + ")" + group("steer", {a.steer});
}

ActuatorMessage parse_action_string(std::string_view text)
{
    ActuatorMessage a;
    bool seen_accel = false, seen_brake = false, seen_gear = false, seen_steer = false;
    for (const auto& g : parse_groups(text)) {
        if (g.name == "accel") {
            a.accel = take<1>(g.name, g.values)[0];
            seen_accel = true;
        } else if (g.name == "brake") {
            a.brake = take<1>(g.name, g.values)[0];
            seen_brake = true;
        } else if (g.name == "gear") {
            const double gear = take<1>(g.name, g.values)[0];
            if (gear != std::floor(gear) || gear < -1.0 || gear > 7.0)
                throw ProtocolError("gear must be an integer in [-1, 7]");
            a.gear = static_cast<int>(gear);
            seen_gear = true;
        } else if (g.name == "steer") {
            a.steer = take<1>(g.name, g.values)[0];
            seen_steer = true;
        }
        // clutch, focus, meta and friends are accepted and ignored
    }
    if (!(seen_accel && seen_brake && seen_gear && seen_steer))
        throw ProtocolError("action message needs accel, brake, gear and steer");
    if (a.accel < 0.0 || a.accel > 1.0 || a.brake < 0.0 || a.brake > 1.0 || a.steer < -1.0
        || a.steer > 1.0)
        throw ProtocolError("action field out of range");
    return a;
}

SensorMessage sensor_message_from_frame(const SensorFrame& f)
{
    SensorMessage m;
    m.angle = f.angle;
    m.track_pos = -f.track_pos;
    m.speed_x = f.speed * kKmhPerMps;
    std::array<double, 4> spin{};
    for (std::size_t i = 0; i < 4; ++i) spin[i] = f.wheel_speeds[i] / kWheelRadius;
    m.wheel_spin_vel = spin;
    m.rpm = f.engine_rpm;
    m.track = f.track_rays;
    OpponentSectors wire{};
    for (std::size_t j = 0; j < kOpponentSectorCount; ++j)
        wire[(j + kWireSectorShift) % kOpponentSectorCount] = f.opponents[j];
    m.opponents = wire;
    m.other.push_back({"speedY", {f.speed_y * kKmhPerMps}});
    m.other.push_back({"speedZ", {f.speed_z * kKmhPerMps}});
    m.other.push_back({"curLapTime", {f.t}});
    return m;
}

SensorFrame frame_from_sensor_message(const SensorMessage& m, const SensorConfig& cfg)
{
    SensorFrame f;
    f.angle = m.angle.value_or(0.0);
    f.track_pos = -m.track_pos.value_or(0.0) + 0.0;
    f.speed = m.speed_x.value_or(0.0) / kKmhPerMps;
    if (m.wheel_spin_vel)
        for (std::size_t i = 0; i < 4; ++i) f.wheel_speeds[i] = (*m.wheel_spin_vel)[i] * kWheelRadius;
    f.engine_rpm = m.rpm.value_or(std::min(f.speed * cfg.rpm_per_mps, cfg.rpm_max));
    if (m.track) f.track_rays = *m.track;
    else f.track_rays.fill(kSensorRange);
    f.opponents.fill(kSensorRange);
    if (m.opponents)
        for (std::size_t j = 0; j < kOpponentSectorCount; ++j)
            f.opponents[j] = (*m.opponents)[(j + kWireSectorShift) % kOpponentSectorCount];
    for (const auto& [name, values] : m.other) {
        if (name == "speedY") f.speed_y = values.front() / kKmhPerMps;
        else if (name == "speedZ") f.speed_z = values.front() / kKmhPerMps;
        else if (name == "curLapTime") f.t = values.front();
    }
    return f;
}

std::string identification_string(std::string_view client_id)
{
    std::string out(client_id);
    out += "(init";
    for (std::size_t k = 0; k < kTrackRayCount; ++k)
        out += ' ' + render(-90.0 + 10.0 * static_cast<double>(k));
    out += ')';
    return out;
}

} // namespace hybrid_drive::scr
