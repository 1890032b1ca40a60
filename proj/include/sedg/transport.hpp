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

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sedg/cert.hpp"
#include "sedg/crypto.hpp"

namespace sedg::transport {

using crypto::Bytes;
using crypto::ByteView;

struct Envelope
{
    cert::PartyId from;
    cert::PartyId to;
    std::string body;  // serialized ProtocolMessage
    std::uint64_t nonce = 0;

    bool operator==(const Envelope&) const = default;
};

enum class TransportErrc { Closed, FrameTooLarge, MalformedFrame };

std::string_view to_string(TransportErrc e);

class TransportError : public std::runtime_error
{
public:
    explicit TransportError(TransportErrc code, const std::string& detail = {});
    TransportErrc code() const { return code_; }

private:
    TransportErrc code_;
};

inline constexpr std::size_t kMaxFrameBytes = 16u * 1024u * 1024u;

//------------------------------------------------------------------------------
// Frame: 4-byte big-endian payload length, then the envelope as UTF-8 JSON
// {"body":..,"from":..,"nonce":..,"to":..} (keys sorted, no whitespace).

std::string envelope_json(const Envelope& e);
Envelope envelope_from_json(std::string_view text);  // MalformedFrame on error

Bytes frame_encode(const Envelope& e);  // FrameTooLarge past kMaxFrameBytes

struct DecodedFrame
{
    Envelope envelope;
    ByteView remainder;
};

// Throws MalformedFrame when the input is incomplete or not an envelope and
// FrameTooLarge when the prefix exceeds kMaxFrameBytes.
DecodedFrame frame_decode(ByteView bytes);

//------------------------------------------------------------------------------
// In-process network. Sent envelopes sit in a pending set until the scheduler
// picks one to deliver, so delivery order is the scheduler's choice.

struct Receipt
{
    std::uint64_t nonce = 0;
    std::size_t pending_index = 0;
};

class InProcessNetwork
{
public:
    void open(const cert::PartyId& endpoint);
    void close(const cert::PartyId& endpoint);
    bool is_open(const cert::PartyId& endpoint) const;

    // The envelope nonce is assigned here, per (from, to) pair.
    Receipt send(Envelope e);
    std::optional<Envelope> recv(const cert::PartyId& endpoint);

    const std::vector<Envelope>& pending() const { return pending_; }
    // Moves pending()[index] into the recipient's mailbox.
    const Envelope& deliver(std::size_t index);

    std::uint64_t sent_count() const { return sent_; }
    std::uint64_t delivered_count() const { return delivered_; }
    std::uint64_t duplicate_deliveries() const { return duplicates_; }

    bool operator==(const InProcessNetwork&) const = default;

private:
    using Pair = std::pair<Bytes, Bytes>;

    std::set<Bytes> open_;
    std::map<Pair, std::uint64_t> next_nonce_;
    std::set<std::pair<Pair, std::uint64_t>> delivered_ids_;
    std::vector<Envelope> pending_;
    std::map<Bytes, std::deque<Envelope>> mailboxes_;
    std::uint64_t sent_ = 0;
    std::uint64_t delivered_ = 0;
    std::uint64_t duplicates_ = 0;
};

//------------------------------------------------------------------------------
// Framed stream socket. Not encrypted: a deployment needs an encrypted channel
// underneath (the protocol assumes private end-to-end links).

class SocketEndpoint
{
public:
    explicit SocketEndpoint(int fd) : fd_(fd) {}
    ~SocketEndpoint();
    SocketEndpoint(SocketEndpoint&& o) noexcept;
    SocketEndpoint& operator=(SocketEndpoint&& o) noexcept;
    SocketEndpoint(const SocketEndpoint&) = delete;
    SocketEndpoint& operator=(const SocketEndpoint&) = delete;

    // A connected AF_UNIX pair, mostly for tests.
    static std::pair<SocketEndpoint, SocketEndpoint> pair();
    static SocketEndpoint connect_tcp(const std::string& host, std::uint16_t port);

    void send(const Envelope& e);
    // Blocks for one frame. Closed on orderly shutdown at a frame boundary;
    // MalformedFrame (and the socket is closed) on a truncated or bad frame.
    Envelope recv();
    // Raw write, for exercising the framing defence.
    void send_raw(ByteView bytes);

    bool is_open() const { return fd_ >= 0; }
    void close();
    int fd() const { return fd_; }

private:
    int fd_ = -1;
};

class SocketListener
{
public:
    // Port 0 picks an ephemeral port.
    explicit SocketListener(std::uint16_t port, const std::string& host = "127.0.0.1");
    ~SocketListener();
    SocketListener(const SocketListener&) = delete;
    SocketListener& operator=(const SocketListener&) = delete;

    std::uint16_t port() const { return port_; }
    SocketEndpoint accept();

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

}  // namespace sedg::transport
