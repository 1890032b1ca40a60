// Copyright 2026 The SEDG Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sedg/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <system_error>

namespace sedg::transport {

namespace {

[[noreturn]] void throw_errno(const char* what)
{
    throw std::system_error(errno, std::generic_category(), what);
}

// Reads exactly out.size() bytes; returns how many were read before EOF.
std::size_t read_full(int fd, std::span<std::uint8_t> out)
{
    std::size_t got = 0;
    while (got < out.size()) {
        const ssize_t n = ::recv(fd, out.data() + got, out.size() - got, 0);
        if (n == 0) {
            break;
        }
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw_errno("recv");
        }
        got += static_cast<std::size_t>(n);
    }
    return got;
}

}  // namespace

SocketEndpoint::~SocketEndpoint()
{
    close();
}

SocketEndpoint::SocketEndpoint(SocketEndpoint&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}

SocketEndpoint& SocketEndpoint::operator=(SocketEndpoint&& o) noexcept
{
    if (this != &o) {
        close();
        fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
}

void SocketEndpoint::close()
{
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

std::pair<SocketEndpoint, SocketEndpoint> SocketEndpoint::pair()
{
    int fds[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0) {
        throw_errno("socketpair");
    }
    return {SocketEndpoint(fds[0]), SocketEndpoint(fds[1])};
}

SocketEndpoint SocketEndpoint::connect_tcp(const std::string& host, std::uint16_t port)
{
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) {
        throw_errno("socket");
    }
    SocketEndpoint ep(fd);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        throw std::invalid_argument("connect_tcp: bad IPv4 address '" + host + "'");
    }
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        throw_errno("connect");
    }
    return ep;
}

void SocketEndpoint::send_raw(ByteView bytes)
{
    if (fd_ < 0) {
        throw TransportError(TransportErrc::Closed);
    }
    std::size_t sent = 0;
    while (sent < bytes.size()) {
        const ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            if (errno == EPIPE || errno == ECONNRESET) {
                close();
                throw TransportError(TransportErrc::Closed, "peer went away");
            }
            throw_errno("send");
        }
        sent += static_cast<std::size_t>(n);
    }
}

void SocketEndpoint::send(const Envelope& e)
{
    // Encode first so an oversized envelope writes nothing.
    send_raw(frame_encode(e));
}

Envelope SocketEndpoint::recv()
{
    if (fd_ < 0) {
        throw TransportError(TransportErrc::Closed);
    }
    std::array<std::uint8_t, 4> prefix{};
    const std::size_t got = read_full(fd_, prefix);
    if (got == 0) {
        close();
        throw TransportError(TransportErrc::Closed);
    }
    if (got < prefix.size()) {
        close();
        throw TransportError(TransportErrc::MalformedFrame, "truncated length prefix");
    }
    const std::uint32_t n = (std::uint32_t{prefix[0]} << 24) | (std::uint32_t{prefix[1]} << 16) |
                            (std::uint32_t{prefix[2]} << 8) | std::uint32_t{prefix[3]};
    if (n > kMaxFrameBytes) {
        close();
        throw TransportError(TransportErrc::FrameTooLarge, std::to_string(n) + " bytes");
    }
    Bytes payload(n);
    if (read_full(fd_, payload) < n) {
        close();
        throw TransportError(TransportErrc::MalformedFrame, "truncated payload");
    }
    try {
        return envelope_from_json(std::string_view(reinterpret_cast<const char*>(payload.data()), n));
    } catch (const TransportError&) {
        close();
        throw;
    }
}

//------------------------------------------------------------------------------

SocketListener::SocketListener(std::uint16_t port, const std::string& host)
{
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) {
        throw_errno("socket");
    }
    const int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd_);
        throw std::invalid_argument("listener: bad IPv4 address '" + host + "'");
    }
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 || ::listen(fd_, 8) != 0) {
        const int err = errno;
        ::close(fd_);
        throw std::system_error(err, std::generic_category(), "bind/listen");
    }
    socklen_t len = sizeof(addr);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

SocketListener::~SocketListener()
{
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

SocketEndpoint SocketListener::accept()
{
    for (;;) {
        const int fd = ::accept(fd_, nullptr, nullptr);
        if (fd >= 0) {
            return SocketEndpoint(fd);
        }
        if (errno != EINTR) {
            throw_errno("accept");
        }
    }
}

}  // namespace sedg::transport
