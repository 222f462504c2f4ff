#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hybrid_drive/common.hpp"
#include "hybrid_drive/sensors.hpp"

namespace hybrid_drive::scr {

/// Raised for malformed wire text; never for I/O.
class ProtocolError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Sensor datagram in the Simulated Car Racing text format. Only the groups
/// the controllers read are arity-checked; everything else passes through
/// in arrival order.
struct SensorMessage
{
    std::optional<double> angle;
    std::optional<double> track_pos;
    std::optional<double> speed_x;
    std::optional<std::array<double, 4>> wheel_spin_vel;
    std::optional<double> rpm;
    std::optional<TrackRays> track;
    std::optional<OpponentSectors> opponents;
    std::vector<std::pair<std::string, std::vector<double>>> other;

    friend bool operator==(const SensorMessage&, const SensorMessage&) = default;
};

struct ActuatorMessage
{
    double accel = 0.0; ///< [0, 1]
    double brake = 0.0; ///< [0, 1]
    int gear = 1;
    double steer = 0.0; ///< [-1, 1]

    friend bool operator==(const ActuatorMessage&, const ActuatorMessage&) = default;
};

/// message := group+ ; group := '(' name (' ' number)+ ')'.
/// Trailing NUL bytes and whitespace (C senders include the terminator) are ignored.
SensorMessage parse_sensor_string(std::string_view text);

/// Groups in canonical order: angle, trackPos, speedX, wheelSpinVel, rpm,
/// track, opponents, then pass-through groups.
std::string format_sensor_string(const SensorMessage& msg);

/// Splits tau into accel = max(tau, 0), brake = max(-tau, 0); gear fixed at 1.
ActuatorMessage actuator_from_command(Command cmd);
Command command_from_actuator(const ActuatorMessage& a);

/// Exactly `(accel X)(brake X)(gear N)(steer X)` with shortest round-trip
/// decimals. Throws ProtocolError on out-of-range fields.
std::string format_action_string(const ActuatorMessage& a);
ActuatorMessage parse_action_string(std::string_view text);

/// Sensor message for a frame. The kinematic model has no lateral or
/// vertical velocity, so only the groups in SensorMessage are populated.
SensorMessage sensor_message_from_frame(const SensorFrame& frame);

/// Rebuilds a frame from a message; absent groups read as zero (rays/sectors as 200).
SensorFrame frame_from_sensor_message(const SensorMessage& msg, const SensorConfig& cfg = {});

/// `SCR(init a0 ... a18)` with the ray angles in degrees.
std::string identification_string(std::string_view client_id = "SCR");

inline constexpr std::string_view kIdentified = "***identified***";
inline constexpr std::string_view kShutdown = "***shutdown***";
inline constexpr std::string_view kRestart = "***restart***";

} // namespace hybrid_drive::scr
