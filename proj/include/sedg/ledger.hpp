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
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "sedg/cert.hpp"
#include "sedg/crypto.hpp"

namespace sedg::ledger {

using crypto::Bytes;
using Amount = std::uint64_t;
using Tick = std::uint64_t;
using ContractId = std::uint64_t;

struct Address
{
    std::array<std::uint8_t, 32> bytes{};
    auto operator<=>(const Address&) const = default;
};

// Account address bound to a party handle.
Address address_of(const cert::PartyId& party);

namespace cond {
struct HashLock
{
    crypto::Digest h2;
    bool operator==(const HashLock&) const = default;
};
struct NotaryHashLock
{
    crypto::Digest h2;
    Address notary;
    Amount fee = 0;
    bool operator==(const NotaryHashLock&) const = default;
};
// Claimable by x with G^x = c. c is the blinded commitment h2^r.
struct DlogLock
{
    crypto::GroupElement c;
    bool operator==(const DlogLock&) const = default;
};
}  // namespace cond

using Condition = std::variant<cond::HashLock, cond::NotaryHashLock, cond::DlogLock>;

namespace wit {
struct Preimage
{
    Bytes x;
    bool operator==(const Preimage&) const = default;
};
struct PreimageWithNotary
{
    Bytes x;
    cert::PartyId n;
    bool operator==(const PreimageWithNotary& o) const { return x == o.x && n == o.n; }
};
struct Exponent
{
    crypto::Scalar x;
    bool operator==(const Exponent&) const = default;
};
}  // namespace wit

using Witness = std::variant<wit::Preimage, wit::PreimageWithNotary, wit::Exponent>;

enum class ContractState { Open, Claimed, Refunded };
std::string_view to_string(ContractState s);

struct EscrowContract
{
    ContractId id = 0;
    Address payer;
    Address payee;
    Amount amount = 0;
    Condition condition;
    Tick deadline = 0;
    ContractState state = ContractState::Open;

    bool operator==(const EscrowContract&) const = default;
};

struct Credit
{
    Address account;
    Amount amount = 0;
    bool operator==(const Credit&) const = default;
};

namespace ev {
struct Funded
{
    Address account;
    Amount amount = 0;
    bool operator==(const Funded&) const = default;
};
struct ContractPublished
{
    EscrowContract contract;
    bool operator==(const ContractPublished&) const = default;
};
struct Claimed
{
    Witness witness;
    std::vector<Credit> credits;
    bool operator==(const Claimed&) const = default;
};
struct Refunded
{
    Address payer;
    Amount amount = 0;
    bool operator==(const Refunded&) const = default;
};
}  // namespace ev

using EventKind = std::variant<ev::Funded, ev::ContractPublished, ev::Claimed, ev::Refunded>;

struct LedgerEvent
{
    std::uint64_t seq = 0;
    Tick tick = 0;
    EventKind kind;
    std::optional<ContractId> contract_id;

    bool operator==(const LedgerEvent&) const = default;
};

struct Settlement
{
    ContractId contract_id = 0;
    ContractState state = ContractState::Open;
    std::vector<Credit> credits;
    std::uint64_t seq = 0;
};

enum class LedgerErrc {
    InvalidAmount,
    InsufficientFunds,
    PastDeadline,
    InvalidCondition,
    UnknownContract,
    WrongWitness,
    Expired,
    AlreadySettled,
    VariantMismatch,
    NotExpired,
    NotPayer,
};

std::string_view to_string(LedgerErrc e);

class LedgerError : public std::runtime_error
{
public:
    explicit LedgerError(LedgerErrc code);
    LedgerErrc code() const { return code_; }

private:
    LedgerErrc code_;
};

// Fault injection for detector tests. A correct ledger uses the defaults.
struct LedgerFaults
{
    // Skip the Open-state and deadline checks on claim and refund.
    bool allow_double_settlement = false;
};

inline constexpr Tick kDefaultDeadlineOffset = 100;

//------------------------------------------------------------------------------
// Sequential ledger. Every operation either applies fully and appends one
// event or throws LedgerError and leaves the state untouched.
class Ledger
{
public:
    Ledger() = default;
    explicit Ledger(LedgerFaults faults) : faults_(faults) {}

    Amount fund(const Address& account, Amount amount);
    ContractId publish_contract(const Address& payer, const Address& payee, Amount amount,
                                Condition condition, Tick deadline);
    Settlement claim(ContractId id, const Witness& witness);
    Settlement refund(ContractId id, const Address& caller);

    Tick advance_time(Tick ticks);
    Tick now() const { return now_; }
    Amount get_balance(const Address& account) const;
    std::vector<LedgerEvent> read_events(std::uint64_t from_seq = 0) const;
    const std::vector<LedgerEvent>& events() const { return events_; }
    std::size_t event_count() const { return events_.size(); }

    const EscrowContract* find_contract(ContractId id) const;
    const std::map<ContractId, EscrowContract>& contracts() const { return contracts_; }
    const std::map<Address, Amount>& balances() const { return balances_; }

    // Sum of balances and Open escrows.
    Amount total_supply() const;
    // Sum of all Funded events.
    Amount total_funded() const { return total_funded_; }

    // Everything except the fault configuration.
    bool operator==(const Ledger& o) const;

    // One compact JSON object per line.
    void write_log(std::ostream& out) const;
    std::string log_text() const;

    // Rebuilds a ledger by re-executing every logged operation and checking
    // that each regenerated event equals the logged one. Throws
    // std::runtime_error on any divergence.
    static Ledger replay(std::istream& in);
    static Ledger replay(const std::vector<LedgerEvent>& events);

private:
    bool evaluate(const Condition& c, const Witness& w) const;
    std::uint64_t append(EventKind kind, std::optional<ContractId> id);

    LedgerFaults faults_{};
    Tick now_ = 0;
    ContractId next_id_ = 1;
    Amount total_funded_ = 0;
    std::map<Address, Amount> balances_;
    std::map<ContractId, EscrowContract> contracts_;
    std::vector<LedgerEvent> events_;
};

bool condition_matches(const Condition& c, const Witness& w);

//------------------------------------------------------------------------------
// Serialises concurrent submitters onto one Ledger. Readers get a snapshot.
class SharedLedger
{
public:
    explicit SharedLedger(Ledger ledger = {}) : ledger_(std::move(ledger)) {}

    template <class Fn>
    auto submit(Fn&& fn)
    {
        std::lock_guard lock(mu_);
        return fn(ledger_);
    }

    Ledger snapshot() const
    {
        std::lock_guard lock(mu_);
        return ledger_;
    }

private:
    mutable std::mutex mu_;
    Ledger ledger_;
};

}  // namespace sedg::ledger
