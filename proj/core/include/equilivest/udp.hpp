#pragma once

#include <cstdint>
#include <string>

#include "equilivest/telemetry.hpp"

namespace equilivest::telemetry {

// Datagram source bound to a local UDP port. next() blocks until a datagram
// arrives or idle_timeout_ms passes with none; a timeout ends the stream.
// Pass port 0 to let the kernel pick one (see port()).
class UdpSource : public DatagramSource {
public:
    UdpSource(std::uint16_t port, int idle_timeout_ms);
    ~UdpSource() override;

    UdpSource(const UdpSource&) = delete;
    UdpSource& operator=(const UdpSource&) = delete;

    std::optional<std::vector<std::uint8_t>> next() override;
    std::uint16_t port() const noexcept { return port_; }

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

class UdpSender {
public:
    UdpSender(const std::string& host, std::uint16_t port);
    ~UdpSender();

    UdpSender(const UdpSender&) = delete;
    UdpSender& operator=(const UdpSender&) = delete;

    void send(std::span<const std::uint8_t> datagram);

private:
    int fd_ = -1;
};

}  // namespace equilivest::telemetry
