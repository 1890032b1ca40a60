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

// JSON forms of the domain types. Byte strings are lowercase hex without a
// prefix, big integers are decimal strings, token amounts and ticks are JSON
// numbers. Decoders throw CodecError on any structural or range problem.

#pragma once

#include <stdexcept>

#include "json.hpp"

#include "sedg/cert.hpp"
#include "sedg/crypto.hpp"
#include "sedg/ledger.hpp"

namespace sedg::codec {

using json = nlohmann::json;

class CodecError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

json encode(const crypto::GroupParams& g);
crypto::GroupRef decode_group(const json& j);

json encode(const crypto::Ciphertext& c);
crypto::Ciphertext decode_ciphertext(const json& j);

json encode(const cert::Commitment2& h2);
// |group| is required for the group_power form.
cert::Commitment2 decode_commitment(const json& j, const crypto::GroupRef& group);

json encode(const cert::Certificate& c);
cert::Certificate decode_certificate(const json& j);

json encode(const ledger::Address& a);
ledger::Address decode_address(const json& j);

json encode(const ledger::Condition& c);
ledger::Condition decode_condition(const json& j);

json encode(const ledger::Witness& w);
ledger::Witness decode_witness(const json& j);

json encode(const ledger::EscrowContract& c);
ledger::EscrowContract decode_contract(const json& j);

json encode(const ledger::LedgerEvent& e);
ledger::LedgerEvent decode_event(const json& j);

// Field accessors used by every decoder.
const json& field(const json& j, const char* name);
std::string string_field(const json& j, const char* name);
std::uint64_t uint_field(const json& j, const char* name);
crypto::Bytes hex_field(const json& j, const char* name);

}  // namespace sedg::codec
