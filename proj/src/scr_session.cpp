#include "hybrid_drive/scr_session.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <iostream>
#include <stdexcept>
#include <system_error>

namespace hybrid_drive::scr {

namespace {

constexpr std::size_t kMaxDatagram = 65536;

[[noreturn]] void throw_errno(const char* what)
{
    throw std::system_error(errno, std::generic_category(), what);
}

bool starts_with(const std::string& s, std::string_view prefix)
{
    return s.compare(0, prefix.size(), prefix) == 0;
}

} // namespace

UdpSocket::UdpSocket()
{
    fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd_ < 0) throw_errno("socket");
}

UdpSocket::~UdpSocket()
{
    if (fd_ >= 0) ::close(fd_);
}

UdpSocket::UdpSocket(UdpSocket&& other) noexcept : fd_(other.fd_)
{
    other.fd_ = -1;
}

UdpSocket& UdpSocket::operator=(UdpSocket&& other) noexcept
{
    if (this != &other) {
        if (fd_ >= 0) ::close(fd_);
        fd_ = other.fd_;
        other.fd_ = -1;
    }
    return *this;
}

void UdpSocket::bind(std::uint16_t port)
{
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    addr.sin_port = htons(port);
    if (::bind(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) throw_errno("bind");
}

std::uint16_t UdpSocket::local_port() const
{
    sockaddr_in addr{};
    socklen_t len = sizeof addr;
    if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) != 0) throw_errno("getsockname");
    return ntohs(addr.sin_port);
}

void UdpSocket::send_to(const std::string& payload, const sockaddr_in& peer)
{
    const auto sent = ::sendto(fd_, payload.data(), payload.size(), 0,
                               reinterpret_cast<const sockaddr*>(&peer), sizeof peer);
    if (sent < 0) throw_errno("sendto");
}

std::optional<UdpSocket::Datagram> UdpSocket::receive(std::chrono::milliseconds timeout)
{
    pollfd pfd{fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
    if (ready < 0) throw_errno("poll");
    if (ready == 0) return std::nullopt;

    Datagram d;
    d.payload.resize(kMaxDatagram);
    socklen_t len = sizeof d.from;
    const auto got = ::recvfrom(fd_, d.payload.data(), d.payload.size(), 0,
                                reinterpret_cast<sockaddr*>(&d.from), &len);
    if (got < 0) throw_errno("recvfrom");
    d.payload.resize(static_cast<std::size_t>(got));
    return d;
}

sockaddr_in resolve_endpoint(const std::string& host, std::uint16_t port)
{
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_DGRAM;
    addrinfo* res = nullptr;
    if (const int rc = ::getaddrinfo(host.c_str(), nullptr, &hints, &res); rc != 0 || !res)
        throw std::runtime_error("cannot resolve '" + host + "': " + ::gai_strerror(rc));
    sockaddr_in addr{};
    std::memcpy(&addr, res->ai_addr, sizeof addr);
    ::freeaddrinfo(res);
    addr.sin_port = htons(port);
    return addr;
}

const char* to_string(SessionStatus status)
{
    switch (status) {
    case SessionStatus::Completed: return "completed";
    case SessionStatus::Shutdown: return "shutdown";
    case SessionStatus::Restart: return "restart";
    case SessionStatus::Timeout: return "timeout";
    }
    return "unknown";
}

SessionResult run_client(const ClientOptions& opts, const Controller& controller,
                         const SensorConfig& sensors)
{
    UdpSocket socket;
    const sockaddr_in server = resolve_endpoint(opts.host, opts.port);
    SessionResult result;

    bool identified = false;
    for (int attempt = 0; attempt < opts.identify_attempts && !identified; ++attempt) {
        socket.send_to(identification_string(opts.client_id), server);
        const auto reply = socket.receive(opts.timeout);
        identified = reply && starts_with(reply->payload, kIdentified);
    }
    if (!identified) {
        result.status = SessionStatus::Timeout;
        return result;
    }

    while (opts.max_steps == 0 || result.steps < opts.max_steps) {
        const auto datagram = socket.receive(opts.timeout);
        if (!datagram) {
            std::cerr << "scr client: no sensor datagram within " << opts.timeout.count() << " ms\n";
            result.status = SessionStatus::Timeout;
            return result;
        }
        if (starts_with(datagram->payload, kShutdown)) {
            result.status = SessionStatus::Shutdown;
            return result;
        }
        if (starts_with(datagram->payload, kRestart)) {
            result.status = SessionStatus::Restart;
            return result;
        }
        SensorMessage msg;
        try {
            msg = parse_sensor_string(datagram->payload);
        } catch (const ProtocolError& e) {
            std::cerr << "scr client: skipping malformed datagram: " << e.what() << '\n';
            ++result.malformed;
            continue;
        }
        const Command cmd = controller(frame_from_sensor_message(msg, sensors));
        socket.send_to(format_action_string(actuator_from_command(cmd)), server);
        ++result.steps;
    }
    result.status = SessionStatus::Completed;
    return result;
}

SimulatorServer::SimulatorServer(const ServerOptions& opts, TrackGeometry geom, WorldParams world,
                                 WorldState initial, SensorConfig sensors)
    : opts_(opts), geom_(std::move(geom)), world_(world), state_(std::move(initial)),
      sensors_(sensors)
{
    socket_.bind(opts_.port);
}

SessionResult SimulatorServer::run()
{
    SessionResult result;
    sockaddr_in client{};
    bool identified = false;
    while (!identified) {
        const auto hello = socket_.receive(opts_.timeout);
        if (!hello) {
            result.status = SessionStatus::Timeout;
            return result;
        }
        if (starts_with(hello->payload, opts_.client_id)) {
            client = hello->from;
            socket_.send_to(std::string(kIdentified), client);
            identified = true;
        }
    }

    Command last{};
    while (result.steps < opts_.max_steps && !episode_status(state_, geom_, world_).terminal()) {
        const SensorFrame frame = sensor_frame(state_, geom_, sensors_);
        socket_.send_to(format_sensor_string(sensor_message_from_frame(frame)), client);

        const auto reply = socket_.receive(opts_.timeout);
        if (!reply) {
            std::cerr << "scr server: no action within " << opts_.timeout.count() << " ms\n";
            result.status = SessionStatus::Timeout;
            return result;
        }
        try {
            last = command_from_actuator(parse_action_string(reply->payload));
        } catch (const ProtocolError& e) {
            // hold the previous command for this step
            std::cerr << "scr server: malformed action: " << e.what() << '\n';
            ++result.malformed;
        }
        state_ = step(state_, last, geom_, world_);
        ++result.steps;
    }
    socket_.send_to(std::string(kShutdown), client);
    result.status = SessionStatus::Completed;
    return result;
}

} // namespace hybrid_drive::scr
