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

#include "json.hpp"

namespace sedg::transport {

using json = nlohmann::json;

std::string_view to_string(TransportErrc e)
{
    switch (e) {
    case TransportErrc::Closed: return "Closed";
    case TransportErrc::FrameTooLarge: return "FrameTooLarge";
    case TransportErrc::MalformedFrame: return "MalformedFrame";
    }
    return "?";
}

TransportError::TransportError(TransportErrc code, const std::string& detail)
    : std::runtime_error("transport: " + std::string(to_string(code)) +
                         (detail.empty() ? "" : ": " + detail)),
      code_(code)
{
}

std::string envelope_json(const Envelope& e)
{
    json j{{"from", crypto::to_hex(e.from.id)},
           {"to", crypto::to_hex(e.to.id)},
           {"nonce", e.nonce},
           {"body", e.body}};
    return j.dump();
}

Envelope envelope_from_json(std::string_view text)
{
    try {
        const json j = json::parse(text);
        if (!j.is_object() || j.size() != 4 || !j.at("from").is_string() || !j.at("to").is_string() ||
            !j.at("body").is_string() || !j.at("nonce").is_number_unsigned()) {
            throw TransportError(TransportErrc::MalformedFrame, "not an envelope object");
        }
        Envelope e;
        e.from.id = crypto::from_hex(j.at("from").get<std::string>());
        e.to.id = crypto::from_hex(j.at("to").get<std::string>());
        e.body = j.at("body").get<std::string>();
        e.nonce = j.at("nonce").get<std::uint64_t>();
        return e;
    } catch (const TransportError&) {
        throw;
    } catch (const std::exception& ex) {
        throw TransportError(TransportErrc::MalformedFrame, ex.what());
    }
}

Bytes frame_encode(const Envelope& e)
{
    const std::string payload = envelope_json(e);
    if (payload.size() > kMaxFrameBytes) {
        throw TransportError(TransportErrc::FrameTooLarge, std::to_string(payload.size()) + " bytes");
    }
    const auto n = static_cast<std::uint32_t>(payload.size());
    Bytes out;
    out.reserve(4 + payload.size());
    out.push_back(static_cast<std::uint8_t>(n >> 24));
    out.push_back(static_cast<std::uint8_t>(n >> 16));
    out.push_back(static_cast<std::uint8_t>(n >> 8));
    out.push_back(static_cast<std::uint8_t>(n));
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

DecodedFrame frame_decode(ByteView bytes)
{
    if (bytes.size() < 4) {
        throw TransportError(TransportErrc::MalformedFrame, "incomplete length prefix");
    }
    const std::uint32_t n = (std::uint32_t{bytes[0]} << 24) | (std::uint32_t{bytes[1]} << 16) |
                            (std::uint32_t{bytes[2]} << 8) | std::uint32_t{bytes[3]};
    if (n > kMaxFrameBytes) {
        throw TransportError(TransportErrc::FrameTooLarge, std::to_string(n) + " bytes");
    }
    if (bytes.size() - 4 < n) {
        throw TransportError(TransportErrc::MalformedFrame, "incomplete payload");
    }
    const std::string_view text(reinterpret_cast<const char*>(bytes.data() + 4), n);
    return DecodedFrame{envelope_from_json(text), bytes.subspan(4 + n)};
}

//------------------------------------------------------------------------------

void InProcessNetwork::open(const cert::PartyId& endpoint)
{
    open_.insert(endpoint.id);
}

void InProcessNetwork::close(const cert::PartyId& endpoint)
{
    open_.erase(endpoint.id);
}

bool InProcessNetwork::is_open(const cert::PartyId& endpoint) const
{
    return open_.count(endpoint.id) != 0;
}

Receipt InProcessNetwork::send(Envelope e)
{
    if (!is_open(e.from) || !is_open(e.to)) {
        throw TransportError(TransportErrc::Closed);
    }
    e.nonce = next_nonce_[{e.from.id, e.to.id}]++;
    const Receipt r{e.nonce, pending_.size()};
    pending_.push_back(std::move(e));
    ++sent_;
    return r;
}

const Envelope& InProcessNetwork::deliver(std::size_t index)
{
    if (index >= pending_.size()) {
        throw std::out_of_range("deliver: no pending envelope at that index");
    }
    Envelope e = std::move(pending_[index]);
    pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(index));
    if (!delivered_ids_.insert({{e.from.id, e.to.id}, e.nonce}).second) {
        ++duplicates_;
    }
    ++delivered_;
    auto& box = mailboxes_[e.to.id];
    box.push_back(std::move(e));
    return box.back();
}

std::optional<Envelope> InProcessNetwork::recv(const cert::PartyId& endpoint)
{
    if (!is_open(endpoint)) {
        throw TransportError(TransportErrc::Closed);
    }
    auto it = mailboxes_.find(endpoint.id);
    if (it == mailboxes_.end() || it->second.empty()) {
        return std::nullopt;
    }
    Envelope e = std::move(it->second.front());
    it->second.pop_front();
    return e;
}

}  // namespace sedg::transport
