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

#include "sedg/codec.hpp"

namespace sedg::codec {

using crypto::Bytes;

const json& field(const json& j, const char* name)
{
    if (!j.is_object()) {
        throw CodecError(std::string("expected an object holding '") + name + "'");
    }
    auto it = j.find(name);
    if (it == j.end()) {
        throw CodecError(std::string("missing field '") + name + "'");
    }
    return *it;
}

std::string string_field(const json& j, const char* name)
{
    const json& v = field(j, name);
    if (!v.is_string()) {
        throw CodecError(std::string("field '") + name + "' must be a string");
    }
    return v.get<std::string>();
}

std::uint64_t uint_field(const json& j, const char* name)
{
    const json& v = field(j, name);
    if (!v.is_number_unsigned()) {
        throw CodecError(std::string("field '") + name + "' must be an unsigned integer");
    }
    return v.get<std::uint64_t>();
}

Bytes hex_field(const json& j, const char* name)
{
    try {
        return crypto::from_hex(string_field(j, name));
    } catch (const std::invalid_argument& e) {
        throw CodecError(std::string("field '") + name + "': " + e.what());
    }
}

namespace {

template <std::size_t N>
std::array<std::uint8_t, N> fixed_field(const json& j, const char* name)
{
    const Bytes b = hex_field(j, name);
    if (b.size() != N) {
        throw CodecError(std::string("field '") + name + "' must be " + std::to_string(N) +
                         " bytes");
    }
    std::array<std::uint8_t, N> out{};
    std::copy(b.begin(), b.end(), out.begin());
    return out;
}

mpz_class decimal_field(const json& j, const char* name)
{
    try {
        return crypto::from_decimal(string_field(j, name));
    } catch (const std::invalid_argument& e) {
        throw CodecError(std::string("field '") + name + "': " + e.what());
    }
}

crypto::Digest digest_field(const json& j, const char* name)
{
    return crypto::Digest{fixed_field<32>(j, name)};
}

template <class Fn>
auto guarded(const char* what, Fn&& fn)
{
    try {
        return fn();
    } catch (const CodecError&) {
        throw;
    } catch (const std::exception& e) {
        throw CodecError(std::string(what) + ": " + e.what());
    }
}

}  // namespace

//------------------------------------------------------------------------------

json encode(const crypto::GroupParams& g)
{
    return json{{"name", g.name},
                {"p", crypto::to_decimal(g.p)},
                {"q", crypto::to_decimal(g.q)},
                {"g", crypto::to_decimal(g.g)}};
}

crypto::GroupRef decode_group(const json& j)
{
    return guarded("group", [&] {
        mpz_class p = decimal_field(j, "p");
        mpz_class q = decimal_field(j, "q");
        mpz_class g = decimal_field(j, "g");
        // Reuse the shared instance for built-in groups.
        for (const auto& builtin : {crypto::GroupParams::test_group(), crypto::GroupParams::modp2048()}) {
            if (builtin->p == p && builtin->q == q && builtin->g == g) {
                return builtin;
            }
        }
        std::string name = j.contains("name") ? string_field(j, "name") : "custom";
        return crypto::GroupParams::make(std::move(p), std::move(q), std::move(g), std::move(name));
    });
}

json encode(const crypto::Ciphertext& c)
{
    return json{{"nonce", crypto::to_hex(c.nonce)}, {"body", crypto::to_hex(c.body)}};
}

crypto::Ciphertext decode_ciphertext(const json& j)
{
    crypto::Ciphertext c;
    c.nonce = fixed_field<12>(j, "nonce");
    c.body = hex_field(j, "body");
    if (c.body.size() < crypto::kTagSize) {
        throw CodecError("ciphertext body shorter than the authentication tag");
    }
    return c;
}

json encode(const cert::Commitment2& h2)
{
    if (const auto* c = std::get_if<cert::commit::HashOfKey>(&h2)) {
        return json{{"tag", "hash_of_key"}, {"value", crypto::to_hex(c->digest.bytes)}};
    }
    if (const auto* c = std::get_if<cert::commit::HashOfKeyAndNotary>(&h2)) {
        return json{{"tag", "hash_of_key_and_notary"}, {"value", crypto::to_hex(c->digest.bytes)}};
    }
    const auto& e = std::get<cert::commit::GroupPower>(h2).element;
    return json{{"tag", "group_power"}, {"value", crypto::to_decimal(e.value())}};
}

cert::Commitment2 decode_commitment(const json& j, const crypto::GroupRef& group)
{
    const std::string tag = string_field(j, "tag");
    if (tag == "hash_of_key") {
        return cert::commit::HashOfKey{digest_field(j, "value")};
    }
    if (tag == "hash_of_key_and_notary") {
        return cert::commit::HashOfKeyAndNotary{digest_field(j, "value")};
    }
    if (tag == "group_power") {
        if (!group) {
            throw CodecError("group_power commitment without group parameters");
        }
        return guarded("h2", [&] {
            return cert::Commitment2{cert::commit::GroupPower{
                crypto::GroupElement::make(group, decimal_field(j, "value"))}};
        });
    }
    throw CodecError("unknown commitment tag '" + tag + "'");
}

json encode(const cert::Certificate& c)
{
    json j{{"variant", std::string(cert::variant_name(c.variant))},
           {"h1", crypto::to_hex(c.h1.bytes)},
           {"h2", encode(c.h2)},
           {"seller_id", crypto::to_hex(c.seller_id.id)},
           {"notary_id", crypto::to_hex(c.notary_id.id)},
           {"sigma", crypto::to_hex(c.sigma)}};
    if (c.group) {
        j["group"] = encode(*c.group);
    }
    return j;
}

cert::Certificate decode_certificate(const json& j)
{
    cert::Certificate c;
    c.variant = guarded("variant", [&] { return cert::parse_variant(string_field(j, "variant")); });
    c.h1 = digest_field(j, "h1");
    if (j.contains("group")) {
        c.group = decode_group(j["group"]);
    }
    c.h2 = decode_commitment(field(j, "h2"), c.group);
    c.seller_id.id = hex_field(j, "seller_id");
    c.notary_id.id = hex_field(j, "notary_id");
    if (c.seller_id.id.empty() || c.notary_id.id.empty() ||
        c.seller_id.id.size() > cert::kMaxPartyIdBytes ||
        c.notary_id.id.size() > cert::kMaxPartyIdBytes) {
        throw CodecError("party id must be 1..64 bytes");
    }
    c.sigma = fixed_field<64>(j, "sigma");
    return c;
}

//------------------------------------------------------------------------------

json encode(const ledger::Address& a)
{
    return crypto::to_hex(a.bytes);
}

ledger::Address decode_address(const json& j)
{
    if (!j.is_string()) {
        throw CodecError("address must be a hex string");
    }
    return guarded("address",
                   [&] { return ledger::Address{crypto::from_hex_fixed<32>(j.get<std::string>())}; });
}

json encode(const ledger::Condition& c)
{
    if (const auto* h = std::get_if<ledger::cond::HashLock>(&c)) {
        return json{{"type", "hash_lock"}, {"h2", crypto::to_hex(h->h2.bytes)}};
    }
    if (const auto* h = std::get_if<ledger::cond::NotaryHashLock>(&c)) {
        return json{{"type", "notary_hash_lock"},
                    {"h2", crypto::to_hex(h->h2.bytes)},
                    {"notary", encode(h->notary)},
                    {"fee", h->fee}};
    }
    const auto& d = std::get<ledger::cond::DlogLock>(c);
    return json{{"type", "dlog_lock"},
                {"c", crypto::to_decimal(d.c.value())},
                {"group", encode(*d.c.params())}};
}

ledger::Condition decode_condition(const json& j)
{
    const std::string type = string_field(j, "type");
    if (type == "hash_lock") {
        return ledger::cond::HashLock{digest_field(j, "h2")};
    }
    if (type == "notary_hash_lock") {
        return ledger::cond::NotaryHashLock{digest_field(j, "h2"), decode_address(field(j, "notary")),
                                            uint_field(j, "fee")};
    }
    if (type == "dlog_lock") {
        auto group = decode_group(field(j, "group"));
        return guarded("condition", [&] {
            return ledger::Condition{
                ledger::cond::DlogLock{crypto::GroupElement::make(group, decimal_field(j, "c"))}};
        });
    }
    throw CodecError("unknown condition type '" + type + "'");
}

json encode(const ledger::Witness& w)
{
    if (const auto* p = std::get_if<ledger::wit::Preimage>(&w)) {
        return json{{"type", "preimage"}, {"x", crypto::to_hex(p->x)}};
    }
    if (const auto* p = std::get_if<ledger::wit::PreimageWithNotary>(&w)) {
        return json{{"type", "preimage_with_notary"},
                    {"x", crypto::to_hex(p->x)},
                    {"n", crypto::to_hex(p->n.id)}};
    }
    const auto& e = std::get<ledger::wit::Exponent>(w);
    return json{{"type", "exponent"},
                {"x", crypto::to_decimal(e.x.value())},
                {"group", encode(*e.x.params())}};
}

ledger::Witness decode_witness(const json& j)
{
    const std::string type = string_field(j, "type");
    if (type == "preimage") {
        return ledger::wit::Preimage{hex_field(j, "x")};
    }
    if (type == "preimage_with_notary") {
        cert::PartyId n{hex_field(j, "n"), std::nullopt};
        return ledger::wit::PreimageWithNotary{hex_field(j, "x"), std::move(n)};
    }
    if (type == "exponent") {
        auto group = decode_group(field(j, "group"));
        return guarded("witness", [&] {
            return ledger::Witness{ledger::wit::Exponent{crypto::Scalar::make(group, decimal_field(j, "x"))}};
        });
    }
    throw CodecError("unknown witness type '" + type + "'");
}

json encode(const ledger::EscrowContract& c)
{
    return json{{"id", c.id},
                {"payer", encode(c.payer)},
                {"payee", encode(c.payee)},
                {"amount", c.amount},
                {"condition", encode(c.condition)},
                {"deadline", c.deadline},
                {"state", std::string(ledger::to_string(c.state))}};
}

ledger::EscrowContract decode_contract(const json& j)
{
    ledger::EscrowContract c;
    c.id = uint_field(j, "id");
    c.payer = decode_address(field(j, "payer"));
    c.payee = decode_address(field(j, "payee"));
    c.amount = uint_field(j, "amount");
    c.condition = decode_condition(field(j, "condition"));
    c.deadline = uint_field(j, "deadline");
    const std::string state = string_field(j, "state");
    if (state == "open") {
        c.state = ledger::ContractState::Open;
    } else if (state == "claimed") {
        c.state = ledger::ContractState::Claimed;
    } else if (state == "refunded") {
        c.state = ledger::ContractState::Refunded;
    } else {
        throw CodecError("unknown contract state '" + state + "'");
    }
    return c;
}

json encode(const ledger::LedgerEvent& e)
{
    json j{{"seq", e.seq}, {"tick", e.tick}};
    if (e.contract_id) {
        j["contract_id"] = *e.contract_id;
    }
    std::visit(
        [&j](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, ledger::ev::Funded>) {
                j["kind"] = "funded";
                j["account"] = encode(k.account);
                j["amount"] = k.amount;
            } else if constexpr (std::is_same_v<K, ledger::ev::ContractPublished>) {
                j["kind"] = "contract_published";
                j["contract"] = encode(k.contract);
            } else if constexpr (std::is_same_v<K, ledger::ev::Claimed>) {
                j["kind"] = "claimed";
                j["witness"] = encode(k.witness);
                json credits = json::array();
                for (const auto& c : k.credits) {
                    credits.push_back(json{{"account", encode(c.account)}, {"amount", c.amount}});
                }
                j["credits"] = std::move(credits);
            } else {
                j["kind"] = "refunded";
                j["payer"] = encode(k.payer);
                j["amount"] = k.amount;
            }
        },
        e.kind);
    return j;
}

ledger::LedgerEvent decode_event(const json& j)
{
    ledger::LedgerEvent e;
    e.seq = uint_field(j, "seq");
    e.tick = uint_field(j, "tick");
    if (j.contains("contract_id")) {
        e.contract_id = uint_field(j, "contract_id");
    }
    const std::string kind = string_field(j, "kind");
    if (kind == "funded") {
        e.kind = ledger::ev::Funded{decode_address(field(j, "account")), uint_field(j, "amount")};
    } else if (kind == "contract_published") {
        e.kind = ledger::ev::ContractPublished{decode_contract(field(j, "contract"))};
    } else if (kind == "claimed") {
        ledger::ev::Claimed c{decode_witness(field(j, "witness")), {}};
        const json& credits = field(j, "credits");
        if (!credits.is_array()) {
            throw CodecError("credits must be an array");
        }
        for (const auto& cr : credits) {
            c.credits.push_back({decode_address(field(cr, "account")), uint_field(cr, "amount")});
        }
        e.kind = std::move(c);
    } else if (kind == "refunded") {
        e.kind = ledger::ev::Refunded{decode_address(field(j, "payer")), uint_field(j, "amount")};
    } else {
        throw CodecError("unknown event kind '" + kind + "'");
    }
    return e;
}

}  // namespace sedg::codec
