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

#include "sedg/protocol.hpp"

#include <algorithm>

#include "sedg/codec.hpp"

namespace sedg::protocol {

using codec::json;
using crypto::Bytes;

namespace {

template <class E, std::size_t N>
E parse_enum(std::string_view s, const std::array<E, N>& values, std::string_view what)
{
    for (E v : values) {
        if (to_string(v) == s) {
            return v;
        }
    }
    throw std::invalid_argument("unknown " + std::string(what) + ": " + std::string(s));
}

constexpr std::array<SellerPolicy, 5> kSellerPolicies = {
    SellerPolicy::Honest, SellerPolicy::WithholdKey, SellerPolicy::ClaimWrongWitness,
    SellerPolicy::SendCorruptCiphertext, SellerPolicy::SendMismatchedH2};
constexpr std::array<BuyerPolicy, 4> kBuyerPolicies = {
    BuyerPolicy::Honest, BuyerPolicy::NeverPublishContract, BuyerPolicy::PublishUnderpricedContract,
    BuyerPolicy::RefundEagerly};

}  // namespace

std::string_view to_string(SellerPolicy p)
{
    switch (p) {
    case SellerPolicy::Honest: return "honest";
    case SellerPolicy::WithholdKey: return "withhold_key";
    case SellerPolicy::ClaimWrongWitness: return "claim_wrong_witness";
    case SellerPolicy::SendCorruptCiphertext: return "send_corrupt_ciphertext";
    case SellerPolicy::SendMismatchedH2: return "send_mismatched_h2";
    }
    return "?";
}

std::string_view to_string(BuyerPolicy p)
{
    switch (p) {
    case BuyerPolicy::Honest: return "honest";
    case BuyerPolicy::NeverPublishContract: return "never_publish_contract";
    case BuyerPolicy::PublishUnderpricedContract: return "publish_underpriced_contract";
    case BuyerPolicy::RefundEagerly: return "refund_eagerly";
    }
    return "?";
}

SellerPolicy parse_seller_policy(std::string_view s)
{
    return parse_enum(s, kSellerPolicies, "seller policy");
}

BuyerPolicy parse_buyer_policy(std::string_view s)
{
    return parse_enum(s, kBuyerPolicies, "buyer policy");
}

const std::vector<SellerPolicy>& all_seller_policies()
{
    static const std::vector<SellerPolicy> v(kSellerPolicies.begin(), kSellerPolicies.end());
    return v;
}

const std::vector<BuyerPolicy>& all_buyer_policies()
{
    static const std::vector<BuyerPolicy> v(kBuyerPolicies.begin(), kBuyerPolicies.end());
    return v;
}

std::string_view to_string(AbortReason r)
{
    switch (r) {
    case AbortReason::UnknownNotary: return "UnknownNotary";
    case AbortReason::BadSignature: return "BadSignature";
    case AbortReason::CiphertextMismatch: return "CiphertextMismatch";
    case AbortReason::SellerMismatch: return "SellerMismatch";
    case AbortReason::PriceMismatch: return "PriceMismatch";
    case AbortReason::PublishRejected: return "PublishRejected";
    }
    return "?";
}

std::string_view to_string(BuyerState s)
{
    switch (s) {
    case BuyerState::Init: return "Init";
    case BuyerState::OfferReceived: return "OfferReceived";
    case BuyerState::Verified: return "Verified";
    case BuyerState::Blinded: return "Blinded";
    case BuyerState::ContractPublished: return "ContractPublished";
    case BuyerState::Settled: return "Settled";
    case BuyerState::Refunded: return "Refunded";
    case BuyerState::Aborted: return "Aborted";
    case BuyerState::DecryptFailed: return "DecryptFailed";
    }
    return "?";
}

std::string_view to_string(SellerState s)
{
    switch (s) {
    case SellerState::Init: return "Init";
    case SellerState::OfferSent: return "OfferSent";
    case SellerState::AwaitingContract: return "AwaitingContract";
    case SellerState::AwaitingBlind: return "AwaitingBlind";
    case SellerState::Claimed: return "Claimed";
    case SellerState::Expired: return "Expired";
    case SellerState::Declined: return "Declined";
    case SellerState::Aborted: return "Aborted";
    }
    return "?";
}

std::string_view to_string(DeclineReason r)
{
    switch (r) {
    case DeclineReason::ContractMismatch: return "ContractMismatch";
    case DeclineReason::Withheld: return "Withheld";
    }
    return "?";
}

//------------------------------------------------------------------------------

std::string_view message_type(const ProtocolMessage& m)
{
    switch (m.index()) {
    case 0: return "offer";
    case 1: return "blind";
    case 2: return "contract_ref";
    default: return "abort";
    }
}

std::string serialize(const ProtocolMessage& m)
{
    json j;
    if (const auto* o = std::get_if<msg::Offer>(&m)) {
        j = codec::encode(o->certificate);
        j["ciphertext"] = codec::encode(o->ciphertext);
        j["price"] = o->price;
        j["meta"] = o->meta;
    } else if (const auto* b = std::get_if<msg::Blind>(&m)) {
        j["r"] = crypto::to_decimal(b->r.value());
        j["group"] = codec::encode(*b->r.params());
    } else if (const auto* c = std::get_if<msg::ContractRef>(&m)) {
        j["contract_id"] = c->id;
    } else {
        j["reason"] = std::get<msg::Abort>(m).reason;
    }
    j["type"] = message_type(m);
    return j.dump();
}

ProtocolMessage parse_message(std::string_view text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw codec::CodecError(std::string("message: ") + e.what());
    }
    const std::string type = codec::string_field(j, "type");
    if (type == "offer") {
        msg::Offer o;
        o.certificate = codec::decode_certificate(j);
        o.ciphertext = codec::decode_ciphertext(codec::field(j, "ciphertext"));
        o.price = codec::uint_field(j, "price");
        o.meta = codec::string_field(j, "meta");
        return o;
    }
    if (type == "blind") {
        auto group = codec::decode_group(codec::field(j, "group"));
        try {
            return msg::Blind{crypto::Scalar::make(group, crypto::from_decimal(codec::string_field(j, "r")))};
        } catch (const std::invalid_argument& e) {
            throw codec::CodecError(std::string("blind: ") + e.what());
        } catch (const crypto::DomainError& e) {
            throw codec::CodecError(std::string("blind: ") + e.what());
        }
    }
    if (type == "contract_ref") {
        return msg::ContractRef{codec::uint_field(j, "contract_id")};
    }
    if (type == "abort") {
        return msg::Abort{codec::string_field(j, "reason")};
    }
    throw codec::CodecError("unknown message type '" + type + "'");
}

//------------------------------------------------------------------------------
// Buyer

BuyerSession::BuyerSession(BuyerConfig config, crypto::Rng rng)
    : config_(std::move(config)), rng_(std::move(rng))
{
}

BuyerAction BuyerSession::on_offer(const msg::Offer& offer, const cert::PartyId& sender, Tick now)
{
    if (state_ != BuyerState::Init) {
        return act::Idle{};
    }
    state_ = BuyerState::OfferReceived;
    offer_ = offer;

    auto abort = [this](AbortReason r) {
        state_ = BuyerState::Aborted;
        abort_reason_ = r;
        return act::Abort{r};
    };

    const cert::VerifyResult vr =
        cert::verify_certificate(offer.certificate, config_.registry, sender, offer.ciphertext);
    switch (vr.failure) {
    case cert::VerifyFailure::None: break;
    case cert::VerifyFailure::UnknownNotary: return abort(AbortReason::UnknownNotary);
    case cert::VerifyFailure::BadSignature: return abort(AbortReason::BadSignature);
    case cert::VerifyFailure::CiphertextMismatch: return abort(AbortReason::CiphertextMismatch);
    case cert::VerifyFailure::SellerMismatch: return abort(AbortReason::SellerMismatch);
    }
    if (offer.price != config_.price) {
        return abort(AbortReason::PriceMismatch);
    }
    state_ = BuyerState::Verified;

    if (config_.policy == BuyerPolicy::NeverPublishContract) {
        return act::Idle{};
    }

    act::PublishContract p;
    p.amount = config_.price;
    if (config_.policy == BuyerPolicy::PublishUnderpricedContract) {
        p.amount = std::max<Amount>(1, config_.price / 2);
    }
    p.deadline = now + config_.deadline_offset;

    const cert::Certificate& c = offer.certificate;
    switch (c.variant) {
    case cert::Variant::V1:
        p.condition = ledger::cond::HashLock{std::get<cert::commit::HashOfKey>(c.h2).digest};
        break;
    case cert::Variant::V2:
        p.condition = ledger::cond::NotaryHashLock{
            std::get<cert::commit::HashOfKeyAndNotary>(c.h2).digest,
            ledger::address_of(c.notary_id), std::min(config_.notary_fee, p.amount)};
        break;
    case cert::Variant::V3: {
        const auto& h2 = std::get<cert::commit::GroupPower>(c.h2).element;
        blind_ = forced_blind_ ? *forced_blind_ : crypto::Scalar::random(h2.params(), rng_);
        p.blind = blind_;
        p.condition = ledger::cond::DlogLock{crypto::group_exp(h2, *blind_)};
        state_ = BuyerState::Blinded;
        break;
    }
    }
    return p;
}

void BuyerSession::on_published(ContractId id, Tick deadline)
{
    contract_id_ = id;
    deadline_ = deadline;
    state_ = BuyerState::ContractPublished;
}

void BuyerSession::on_publish_failed()
{
    state_ = BuyerState::Aborted;
    abort_reason_ = AbortReason::PublishRejected;
}

const Bytes& BuyerSession::on_claim(const ledger::LedgerEvent& claimed)
{
    const auto* ev = std::get_if<ledger::ev::Claimed>(&claimed.kind);
    if (state_ != BuyerState::ContractPublished || !ev || claimed.contract_id != contract_id_ ||
        !offer_) {
        throw std::logic_error("buyer: not a claim of this session's contract");
    }

    auto fail = [this](const std::string& why) -> DecryptFailure {
        state_ = BuyerState::DecryptFailed;
        return DecryptFailure(why);
    };

    crypto::SecretKey key;
    if (const auto* w = std::get_if<ledger::wit::Preimage>(&ev->witness)) {
        if (w->x.size() != key.bytes.size()) {
            throw fail("published preimage is not a 32-byte key");
        }
        std::copy(w->x.begin(), w->x.end(), key.bytes.begin());
    } else if (const auto* w = std::get_if<ledger::wit::PreimageWithNotary>(&ev->witness)) {
        if (w->x.size() != key.bytes.size()) {
            throw fail("published preimage is not a 32-byte key");
        }
        std::copy(w->x.begin(), w->x.end(), key.bytes.begin());
    } else {
        const auto& x = std::get<ledger::wit::Exponent>(ev->witness).x;
        if (!blind_) {
            throw fail("exponent witness without a blinding factor");
        }
        // k = x * r^-1 mod q
        key = crypto::dlog_kdf(crypto::scalar_mul(x, crypto::scalar_inv(*blind_)));
    }

    try {
        plaintext_ = crypto::decrypt(key, offer_->ciphertext);
    } catch (const crypto::AuthenticationFailure&) {
        throw fail("published key does not decrypt the certified ciphertext");
    }
    state_ = BuyerState::Settled;
    return plaintext_;
}

std::optional<act::Refund> BuyerSession::check_timeout(Tick now, const ledger::Ledger& ledger) const
{
    if (state_ != BuyerState::ContractPublished || !contract_id_) {
        return std::nullopt;
    }
    const ledger::EscrowContract* c = ledger.find_contract(*contract_id_);
    if (!c || c->state != ledger::ContractState::Open) {
        return std::nullopt;
    }
    if (now > deadline_ || config_.policy == BuyerPolicy::RefundEagerly) {
        return act::Refund{*contract_id_};
    }
    return std::nullopt;
}

void BuyerSession::on_refunded()
{
    state_ = BuyerState::Refunded;
}

//------------------------------------------------------------------------------
// Seller

SellerSession::SellerSession(SellerConfig config, cert::CertificatePackage package, crypto::Rng rng)
    : config_(std::move(config)), package_(std::move(package)), rng_(std::move(rng))
{
}

msg::Offer SellerSession::start()
{
    msg::Offer o{package_.certificate, package_.ciphertext, config_.price, {}};
    state_ = SellerState::OfferSent;

    switch (config_.policy) {
    case SellerPolicy::SendCorruptCiphertext: {
        const std::size_t bit = rng_.next() % (o.ciphertext.body.size() * 8);
        o.ciphertext.body[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
        break;
    }
    case SellerPolicy::SendMismatchedH2: {
        cert::Certificate& c = o.certificate;
        const Bytes garbage = rng_.bytes(32);
        if (std::holds_alternative<cert::commit::HashOfKey>(c.h2)) {
            c.h2 = cert::commit::HashOfKey{crypto::hash(garbage)};
        } else if (std::holds_alternative<cert::commit::HashOfKeyAndNotary>(c.h2)) {
            c.h2 = cert::commit::HashOfKeyAndNotary{crypto::hash(garbage)};
        } else {
            const auto real = std::get<cert::commit::GroupPower>(c.h2).element;
            const auto gen = crypto::GroupElement::generator(real.params());
            auto fake = crypto::group_exp(gen, crypto::Scalar::random(real.params(), rng_));
            while (fake == real) {
                fake = crypto::group_exp(gen, crypto::Scalar::random(real.params(), rng_));
            }
            c.h2 = cert::commit::GroupPower{fake};
        }
        break;
    }
    default:
        break;
    }
    return o;
}

bool SellerSession::contract_acceptable(const ledger::EscrowContract& c) const
{
    if (c.payee != config_.address || c.amount < config_.price) {
        return false;
    }
    const cert::Certificate& cert = package_.certificate;
    switch (cert.variant) {
    case cert::Variant::V1: {
        const auto* h = std::get_if<ledger::cond::HashLock>(&c.condition);
        return h && h->h2 == std::get<cert::commit::HashOfKey>(cert.h2).digest;
    }
    case cert::Variant::V2: {
        const auto* h = std::get_if<ledger::cond::NotaryHashLock>(&c.condition);
        return h && h->h2 == std::get<cert::commit::HashOfKeyAndNotary>(cert.h2).digest &&
               h->notary == config_.notary_address && h->fee <= config_.notary_fee;
    }
    case cert::Variant::V3: {
        const auto* d = std::get_if<ledger::cond::DlogLock>(&c.condition);
        if (!d || !(*d->c.params() == *cert.group)) {
            return false;
        }
        if (blind_) {
            const auto& h2 = std::get<cert::commit::GroupPower>(cert.h2).element;
            return crypto::group_exp(h2, *blind_) == d->c;
        }
        return true;
    }
    }
    return false;
}

std::optional<WitnessDecision> SellerSession::on_contract(const ledger::EscrowContract& contract)
{
    switch (state_) {
    case SellerState::Claimed:
    case SellerState::Expired:
    case SellerState::Declined:
    case SellerState::Aborted:
        return std::nullopt;
    default:
        break;
    }
    if (attempted_.count(contract.id) != 0) {
        return std::nullopt;
    }
    if (!contract_acceptable(contract)) {
        state_ = SellerState::Declined;
        decline_ = DeclineReason::ContractMismatch;
        return DeclineReason::ContractMismatch;
    }
    if (package_.certificate.variant == cert::Variant::V3 && !blind_) {
        pending_contract_ = contract;
        state_ = SellerState::AwaitingBlind;
        return std::nullopt;
    }
    WitnessDecision d = build_witness(contract, blind_);
    if (std::holds_alternative<ledger::Witness>(d)) {
        attempted_.insert(contract.id);
    } else {
        state_ = SellerState::Declined;
        decline_ = std::get<DeclineReason>(d);
    }
    return d;
}

std::optional<WitnessDecision> SellerSession::on_blind(const crypto::Scalar& r)
{
    if (blind_) {
        return std::nullopt;
    }
    blind_ = r;
    if (state_ == SellerState::OfferSent) {
        state_ = SellerState::AwaitingContract;
        return std::nullopt;
    }
    if (state_ == SellerState::AwaitingBlind && pending_contract_) {
        const ledger::EscrowContract c = *pending_contract_;
        pending_contract_.reset();
        state_ = SellerState::AwaitingContract;
        return on_contract(c);
    }
    return std::nullopt;
}

void SellerSession::on_abort()
{
    if (state_ == SellerState::OfferSent || state_ == SellerState::AwaitingContract) {
        state_ = SellerState::Aborted;
    }
}

WitnessDecision SellerSession::build_witness(const ledger::EscrowContract& contract,
                                             const std::optional<crypto::Scalar>& blind)
{
    (void)contract;
    const cert::Certificate& cert = package_.certificate;
    if (config_.policy == SellerPolicy::WithholdKey) {
        return DeclineReason::Withheld;
    }
    const bool wrong = config_.policy == SellerPolicy::ClaimWrongWitness;
    const Bytes k = crypto::to_bytes(package_.key.bytes);

    switch (cert.variant) {
    case cert::Variant::V1:
        return ledger::Witness{ledger::wit::Preimage{wrong ? rng_.bytes(32) : k}};
    case cert::Variant::V2:
        return ledger::Witness{
            ledger::wit::PreimageWithNotary{wrong ? rng_.bytes(32) : k, cert.notary_id}};
    case cert::Variant::V3: {
        if (!blind) {
            throw std::logic_error("seller: exponent witness needs the blinding factor");
        }
        const crypto::Scalar x =
            crypto::scalar_mul(crypto::Scalar::from_key(cert.group, package_.key), *blind);
        if (!wrong) {
            return ledger::Witness{ledger::wit::Exponent{x}};
        }
        crypto::Scalar bad = crypto::Scalar::random(cert.group, rng_);
        if (bad == x) {
            // q > 2, so x+1 or 1 is a different nonzero scalar.
            mpz_class v = (x.value() + 1) % cert.group->q;
            bad = crypto::Scalar::make(cert.group, v == 0 ? mpz_class(1) : v);
        }
        return ledger::Witness{ledger::wit::Exponent{bad}};
    }
    }
    throw std::logic_error("seller: unknown variant");
}

void SellerSession::on_claim_result(ContractId id, std::optional<ledger::LedgerErrc> error)
{
    attempted_.insert(id);
    if (!error) {
        state_ = SellerState::Claimed;
    } else {
        state_ = SellerState::Expired;
        claim_error_ = error;
    }
}

}  // namespace sedg::protocol
