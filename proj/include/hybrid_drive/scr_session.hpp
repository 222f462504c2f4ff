#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include <netinet/in.h>

#include "hybrid_drive/scr_protocol.hpp"
#include "hybrid_drive/sensors.hpp"
#include "hybrid_drive/track.hpp"
#include "hybrid_drive/world.hpp"

namespace hybrid_drive::scr {

/// Owning IPv4 UDP socket.
class UdpSocket
{
public:
    UdpSocket();
    ~UdpSocket();
    UdpSocket(UdpSocket&& other) noexcept;
    UdpSocket& operator=(UdpSocket&& other) noexcept;
    UdpSocket(const UdpSocket&) = delete;
    UdpSocket& operator=(const UdpSocket&) = delete;

    /// Binds to 0.0.0.0:`port`; port 0 picks an ephemeral port.
    void bind(std::uint16_t port);
    std::uint16_t local_port() const;

    void send_to(const std::string& payload, const sockaddr_in& peer);

    struct Datagram
    {
        std::string payload;
        sockaddr_in from{};
    };
    /// Empty when nothing arrives within `timeout`.
    std::optional<Datagram> receive(std::chrono::milliseconds timeout);

private:
    int fd_ = -1;
};

/// Resolves `host` (name or dotted quad) to an IPv4 address.
sockaddr_in resolve_endpoint(const std::string& host, std::uint16_t port);

enum class SessionStatus { Completed, Shutdown, Restart, Timeout };

const char* to_string(SessionStatus status);

struct SessionResult
{
    SessionStatus status = SessionStatus::Completed;
    std::size_t steps = 0;     ///< control steps exchanged
    std::size_t malformed = 0; ///< datagrams that failed to parse and were skipped
};

using Controller = std::function<Command(const SensorFrame&)>;

struct ClientOptions
{
    std::string host = "127.0.0.1";
    std::uint16_t port = 3001;
    std::string client_id = "SCR";
    std::chrono::milliseconds timeout{1000};
    int identify_attempts = 10;
    std::size_t max_steps = 0; ///< 0 runs until the server ends the session
};

/// Drives an SCR server: identifies, then answers each sensor datagram with
/// one actuator datagram until a shutdown/restart token or a timeout.
SessionResult run_client(const ClientOptions& opts, const Controller& controller,
                         const SensorConfig& sensors = {});

struct ServerOptions
{
    std::uint16_t port = 3001; ///< 0 picks an ephemeral port
    std::string client_id = "SCR";
    std::chrono::milliseconds timeout{1000};
    std::size_t max_steps = 1000;
};

/// Serves the built-in simulator to one SCR client in lockstep: one sensor
/// datagram out, one actuator datagram back, one world step.
class SimulatorServer
{
public:
    SimulatorServer(const ServerOptions& opts, TrackGeometry geom, WorldParams world,
                    WorldState initial, SensorConfig sensors = {});

    std::uint16_t port() const { return socket_.local_port(); }

    /// Blocks until the episode ends, max_steps elapse or the client times out.
    SessionResult run();

    const WorldState& state() const { return state_; }

private:
    ServerOptions opts_;
    TrackGeometry geom_;
    WorldParams world_;
    WorldState state_;
    SensorConfig sensors_;
    UdpSocket socket_;
};

} // namespace hybrid_drive::scr
