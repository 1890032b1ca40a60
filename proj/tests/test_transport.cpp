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

#include <thread>

#include "doctest.h"
#include "sedg/transport.hpp"

using namespace sedg;
using namespace sedg::transport;

namespace {

Envelope env(const char* from, const char* to, std::string body)
{
    return Envelope{cert::PartyId::named(from), cert::PartyId::named(to), std::move(body), 0};
}

}  // namespace

TEST_CASE("frame layout")
{
    Envelope e = env("a", "b", "hi");
    e.nonce = 3;
    const Bytes f = frame_encode(e);
    const std::string expect = R"({"body":"hi","from":"61","nonce":3,"to":"62"})";
    REQUIRE(f.size() == 4 + expect.size());
    CHECK(f[0] == 0);
    CHECK(f[1] == 0);
    CHECK(f[2] == 0);
    CHECK(f[3] == expect.size());
    CHECK(std::string(f.begin() + 4, f.end()) == expect);

    const DecodedFrame d = frame_decode(f);
    CHECK(d.envelope == e);
    CHECK(d.remainder.empty());
}

TEST_CASE("frames concatenate and split")
{
    Bytes stream;
    for (int i = 0; i < 3; ++i) {
        Envelope e = env("x", "y", std::string(static_cast<std::size_t>(i) * 100, 'q'));
        e.nonce = static_cast<std::uint64_t>(i);
        const Bytes f = frame_encode(e);
        stream.insert(stream.end(), f.begin(), f.end());
    }
    ByteView rest = stream;
    for (std::uint64_t i = 0; i < 3; ++i) {
        const DecodedFrame d = frame_decode(rest);
        CHECK(d.envelope.nonce == i);
        CHECK(d.envelope.body.size() == i * 100);
        rest = d.remainder;
    }
    CHECK(rest.empty());
}

TEST_CASE("malformed and oversized frames")
{
    const Bytes f = frame_encode(env("a", "b", "payload"));
    for (std::size_t cut = 0; cut < f.size(); ++cut) {
        try {
            frame_decode(ByteView(f).first(cut));
            FAIL("decoded a truncated frame");
        } catch (const TransportError& e) {
            CHECK(e.code() == TransportErrc::MalformedFrame);
        }
    }

    const Bytes huge_prefix{0x01, 0x00, 0x00, 0x01};
    try {
        frame_decode(huge_prefix);
        FAIL("accepted an oversized length");
    } catch (const TransportError& e) {
        CHECK(e.code() == TransportErrc::FrameTooLarge);
    }

    Envelope big = env("a", "b", std::string(kMaxFrameBytes, 'z'));
    try {
        frame_encode(big);
        FAIL("encoded an oversized frame");
    } catch (const TransportError& e) {
        CHECK(e.code() == TransportErrc::FrameTooLarge);
    }

    const std::string bad_json = "{\"body\":1}";
    Bytes raw{0, 0, 0, static_cast<std::uint8_t>(bad_json.size())};
    raw.insert(raw.end(), bad_json.begin(), bad_json.end());
    CHECK_THROWS_AS(frame_decode(raw), TransportError);
}

TEST_CASE("in-process network delivers each envelope once")
{
    InProcessNetwork net;
    const auto a = cert::PartyId::named("a");
    const auto b = cert::PartyId::named("b");
    net.open(a);
    net.open(b);
    const Receipt r0 = net.send(env("a", "b", "one"));
    const Receipt r1 = net.send(env("a", "b", "two"));
    CHECK(r0.nonce == 0);
    CHECK(r1.nonce == 1);
    CHECK(net.pending().size() == 2);

    // Out of order delivery is the scheduler's choice.
    net.deliver(1);
    net.deliver(0);
    CHECK(net.recv(b)->body == "two");
    CHECK(net.recv(b)->body == "one");
    CHECK_FALSE(net.recv(b).has_value());
    CHECK(net.sent_count() == 2);
    CHECK(net.delivered_count() == 2);
    CHECK(net.duplicate_deliveries() == 0);
    CHECK_THROWS_AS(net.deliver(0), std::out_of_range);

    net.close(b);
    CHECK_THROWS_AS(net.send(env("a", "b", "late")), TransportError);
    CHECK_THROWS_AS(net.recv(b), TransportError);
}

TEST_CASE("socket pair carries framed envelopes")
{
    auto [left, right] = SocketEndpoint::pair();
    Envelope e = env("seller-1", "buyer-1", R"({"type":"abort","reason":"x"})");
    e.nonce = 9;
    left.send(e);
    left.send(env("seller-1", "buyer-1", std::string(200000, 'p')));
    CHECK(right.recv() == e);
    CHECK(right.recv().body.size() == 200000);

    left.close();
    try {
        right.recv();
        FAIL("read past an orderly close");
    } catch (const TransportError& err) {
        CHECK(err.code() == TransportErrc::Closed);
    }
}

TEST_CASE("a truncated frame on a socket is rejected and closes it")
{
    auto [left, right] = SocketEndpoint::pair();
    const Bytes f = frame_encode(env("a", "b", "partial"));
    left.send_raw(ByteView(f).first(f.size() - 3));
    left.close();
    try {
        right.recv();
        FAIL("accepted a truncated frame");
    } catch (const TransportError& err) {
        CHECK(err.code() == TransportErrc::MalformedFrame);
    }
    CHECK_FALSE(right.is_open());
}

TEST_CASE("an oversized length prefix on a socket is rejected")
{
    auto [left, right] = SocketEndpoint::pair();
    left.send_raw(Bytes{0x7f, 0xff, 0xff, 0xff});
    try {
        right.recv();
        FAIL("accepted an oversized frame");
    } catch (const TransportError& err) {
        CHECK(err.code() == TransportErrc::FrameTooLarge);
    }
    CHECK_FALSE(right.is_open());
}

TEST_CASE("tcp loopback")
{
    SocketListener listener(0);
    REQUIRE(listener.port() != 0);
    std::thread client([port = listener.port()] {
        SocketEndpoint c = SocketEndpoint::connect_tcp("127.0.0.1", port);
        c.send(env("a", "b", "over tcp"));
        const Envelope back = c.recv();
        CHECK(back.body == "ack");
    });
    SocketEndpoint server = listener.accept();
    CHECK(server.recv().body == "over tcp");
    server.send(env("b", "a", "ack"));
    client.join();
}
