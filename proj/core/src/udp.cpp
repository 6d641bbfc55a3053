#include "equilivest/udp.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace equilivest::telemetry {

namespace {

[[noreturn]] void transport_fail(const std::string& what) {
    throw Error(errc::transport, what + ": " + std::strerror(errno));
}

}  // namespace

UdpSource::UdpSource(std::uint16_t port, int idle_timeout_ms) {
    fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd_ < 0) transport_fail("socket");

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    addr.sin_port = htons(port);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
        ::close(fd_);
        fd_ = -1;
        transport_fail("bind port " + std::to_string(port));
    }

    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len) == 0) {
        port_ = ntohs(bound.sin_port);
    } else {
        port_ = port;
    }

    // Small telemetry datagrams burn kernel buffer accounting fast; ask for
    // room to absorb bursts. Best effort, the force variant needs privileges.
    int rcvbuf = 1 << 22;
    if (::setsockopt(fd_, SOL_SOCKET, SO_RCVBUFFORCE, &rcvbuf, sizeof(rcvbuf)) < 0) {
        ::setsockopt(fd_, SOL_SOCKET, SO_RCVBUF, &rcvbuf, sizeof(rcvbuf));
    }

    if (idle_timeout_ms > 0) {
        timeval tv{};
        tv.tv_sec = idle_timeout_ms / 1000;
        tv.tv_usec = (idle_timeout_ms % 1000) * 1000;
        if (::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv)) < 0) {
            ::close(fd_);
            fd_ = -1;
            transport_fail("setsockopt SO_RCVTIMEO");
        }
    }
}

UdpSource::~UdpSource() {
    if (fd_ >= 0) ::close(fd_);
}

std::optional<std::vector<std::uint8_t>> UdpSource::next() {
    std::vector<std::uint8_t> buf(2048);
    while (true) {
        ssize_t n = ::recvfrom(fd_, buf.data(), buf.size(), 0, nullptr, nullptr);
        if (n >= 0) {
            buf.resize(static_cast<std::size_t>(n));
            return buf;
        }
        if (errno == EINTR) continue;
        if (errno == EAGAIN || errno == EWOULDBLOCK) return std::nullopt;
        transport_fail("recvfrom");
    }
}

UdpSender::UdpSender(const std::string& host, std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd_ < 0) transport_fail("socket");

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd_);
        fd_ = -1;
        throw Error(errc::transport, "bad IPv4 address: " + host);
    }
    if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
        ::close(fd_);
        fd_ = -1;
        transport_fail("connect " + host + ":" + std::to_string(port));
    }
}

UdpSender::~UdpSender() {
    if (fd_ >= 0) ::close(fd_);
}

void UdpSender::send(std::span<const std::uint8_t> datagram) {
    ssize_t n = ::send(fd_, datagram.data(), datagram.size(), 0);
    if (n < 0) transport_fail("send");
}

}  // namespace equilivest::telemetry
