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

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "sedg/cert.hpp"
#include "sedg/crypto.hpp"
#include "sedg/ledger.hpp"

namespace sedg::protocol {

using ledger::Amount;
using ledger::ContractId;
using ledger::Tick;

enum class SellerPolicy { Honest, WithholdKey, ClaimWrongWitness, SendCorruptCiphertext, SendMismatchedH2 };
enum class BuyerPolicy { Honest, NeverPublishContract, PublishUnderpricedContract, RefundEagerly };

std::string_view to_string(SellerPolicy p);
std::string_view to_string(BuyerPolicy p);
SellerPolicy parse_seller_policy(std::string_view s);
BuyerPolicy parse_buyer_policy(std::string_view s);
const std::vector<SellerPolicy>& all_seller_policies();
const std::vector<BuyerPolicy>& all_buyer_policies();

//------------------------------------------------------------------------------
// Off-chain messages.

namespace msg {
// Carries the certificate (sigma, h1, h2, ids, variant, group) and C.
struct Offer
{
    cert::Certificate certificate;
    crypto::Ciphertext ciphertext;
    Amount price = 0;
    std::string meta;

    bool operator==(const Offer&) const = default;
};
struct Blind
{
    crypto::Scalar r;
    bool operator==(const Blind&) const = default;
};
struct ContractRef
{
    ContractId id = 0;
    bool operator==(const ContractRef&) const = default;
};
struct Abort
{
    std::string reason;
    bool operator==(const Abort&) const = default;
};
}  // namespace msg

using ProtocolMessage = std::variant<msg::Offer, msg::Blind, msg::ContractRef, msg::Abort>;

std::string_view message_type(const ProtocolMessage& m);
// JSON with a "type" discriminator.
std::string serialize(const ProtocolMessage& m);
ProtocolMessage parse_message(std::string_view text);  // throws codec::CodecError

//------------------------------------------------------------------------------
// Buyer.

enum class AbortReason {
    UnknownNotary,
    BadSignature,
    CiphertextMismatch,
    SellerMismatch,
    PriceMismatch,
    PublishRejected,
};

std::string_view to_string(AbortReason r);

enum class BuyerState {
    Init,
    OfferReceived,
    Verified,
    Blinded,
    ContractPublished,
    Settled,
    Refunded,
    Aborted,
    DecryptFailed,
};

std::string_view to_string(BuyerState s);

struct BuyerConfig
{
    cert::PartyId self;
    ledger::Address address;
    Amount price = 0;
    Tick deadline_offset = ledger::kDefaultDeadlineOffset;
    Amount notary_fee = 0;  // V2 only
    cert::TrustRegistry registry;
    BuyerPolicy policy = BuyerPolicy::Honest;
};

namespace act {
struct PublishContract
{
    ledger::Condition condition;
    Amount amount = 0;
    Tick deadline = 0;
    std::optional<crypto::Scalar> blind;  // sent to the seller before publishing (V3)
};
struct Abort
{
    AbortReason reason;
};
struct Idle
{
};
struct Refund
{
    ContractId id = 0;
};
}  // namespace act

using BuyerAction = std::variant<act::PublishContract, act::Abort, act::Idle>;

class DecryptFailure : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class BuyerSession
{
public:
    BuyerSession(BuyerConfig config, crypto::Rng rng);

    // Verify the offer and decide what to publish.
    BuyerAction on_offer(const msg::Offer& offer, const cert::PartyId& sender, Tick now);
    void on_published(ContractId id, Tick deadline);
    void on_publish_failed();

    // Recover the key from a Claimed event for our contract and decrypt C.
    // Throws DecryptFailure and moves to DecryptFailed if that fails.
    const crypto::Bytes& on_claim(const ledger::LedgerEvent& claimed);

    // Refund decision once the contract deadline has passed.
    std::optional<act::Refund> check_timeout(Tick now, const ledger::Ledger& ledger) const;
    void on_refunded();

    BuyerState state() const { return state_; }
    const BuyerConfig& config() const { return config_; }
    std::optional<AbortReason> abort_reason() const { return abort_reason_; }
    std::optional<ContractId> contract_id() const { return contract_id_; }
    Tick deadline() const { return deadline_; }
    const std::optional<crypto::Scalar>& blind() const { return blind_; }
    const crypto::Bytes& plaintext() const { return plaintext_; }
    const std::optional<msg::Offer>& offer() const { return offer_; }

    // How far the buyer has read the public event log.
    std::uint64_t cursor = 0;

    // Test hook: use this blinding factor instead of drawing one.
    void force_blind(crypto::Scalar r) { forced_blind_ = std::move(r); }

private:
    BuyerConfig config_;
    crypto::Rng rng_;
    BuyerState state_ = BuyerState::Init;
    std::optional<AbortReason> abort_reason_;
    std::optional<msg::Offer> offer_;
    std::optional<crypto::Scalar> blind_;
    std::optional<crypto::Scalar> forced_blind_;
    std::optional<ContractId> contract_id_;
    Tick deadline_ = 0;
    crypto::Bytes plaintext_;
};

//------------------------------------------------------------------------------
// Seller.

enum class SellerState {
    Init,
    OfferSent,
    AwaitingContract,
    AwaitingBlind,
    Claimed,
    Expired,
    Declined,
    Aborted,
};

std::string_view to_string(SellerState s);

enum class DeclineReason { ContractMismatch, Withheld };

std::string_view to_string(DeclineReason r);

struct SellerConfig
{
    cert::PartyId self;
    ledger::Address address;
    ledger::Address notary_address;
    Amount price = 0;
    Amount notary_fee = 0;
    SellerPolicy policy = SellerPolicy::Honest;
};

using WitnessDecision = std::variant<ledger::Witness, DeclineReason>;

class SellerSession
{
public:
    SellerSession(SellerConfig config, cert::CertificatePackage package, crypto::Rng rng);

    msg::Offer start();
    // Returns a decision when a contract was waiting for this factor.
    std::optional<WitnessDecision> on_blind(const crypto::Scalar& r);
    void on_abort();

    // The contract named by a ContractRef, looked up on the ledger. Returns
    // the witness to claim with (at most once per contract), a decline, or
    // nothing when the blinding factor has not arrived yet.
    std::optional<WitnessDecision> on_contract(const ledger::EscrowContract& contract);
    void on_claim_result(ContractId id, std::optional<ledger::LedgerErrc> error);

    // Witness construction against an already-checked contract.
    WitnessDecision build_witness(const ledger::EscrowContract& contract,
                                  const std::optional<crypto::Scalar>& blind);

    SellerState state() const { return state_; }
    const SellerConfig& config() const { return config_; }
    const cert::CertificatePackage& package() const { return package_; }
    std::optional<DeclineReason> decline_reason() const { return decline_; }
    std::optional<ledger::LedgerErrc> claim_error() const { return claim_error_; }
    const std::set<ContractId>& attempted() const { return attempted_; }

private:
    bool contract_acceptable(const ledger::EscrowContract& c) const;

    SellerConfig config_;
    cert::CertificatePackage package_;
    crypto::Rng rng_;
    SellerState state_ = SellerState::Init;
    std::optional<crypto::Scalar> blind_;
    std::optional<ledger::EscrowContract> pending_contract_;
    std::optional<DeclineReason> decline_;
    std::optional<ledger::LedgerErrc> claim_error_;
    std::set<ContractId> attempted_;
};

//------------------------------------------------------------------------------

struct PartyBalances
{
    Amount buyer = 0;
    Amount seller = 0;
    Amount notary = 0;
    bool operator==(const PartyBalances&) const = default;
};

// Terminal summary of one run. Flags derive from ledger events and session states.
struct ScenarioReport
{
    cert::Variant variant = cert::Variant::V1;
    SellerPolicy seller_policy = SellerPolicy::Honest;
    BuyerPolicy buyer_policy = BuyerPolicy::Honest;
    std::uint64_t seed = 0;

    BuyerState buyer_state = BuyerState::Init;
    SellerState seller_state = SellerState::Init;
    std::optional<AbortReason> abort_reason;
    std::optional<DeclineReason> decline_reason;
    std::optional<ledger::LedgerErrc> claim_error;

    bool buyer_has_plaintext = false;
    bool plaintext_matches_payload = false;
    bool seller_paid = false;
    bool notary_paid = false;
    bool buyer_refunded = false;
    bool decrypt_failure = false;

    Amount price = 0;
    Amount notary_fee = 0;
    PartyBalances initial;
    PartyBalances final_balances;

    std::uint64_t event_count = 0;
    std::string event_log_sha256;
    std::vector<std::string> schedule;

    bool operator==(const ScenarioReport&) const = default;
};

}  // namespace sedg::protocol
