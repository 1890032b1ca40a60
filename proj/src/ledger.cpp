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

#include "sedg/ledger.hpp"

#include <sstream>

#include "sedg/codec.hpp"

namespace sedg::ledger {

Address address_of(const cert::PartyId& party)
{
    return Address{crypto::hash(crypto::canonical_encode({crypto::to_bytes("sedg-address"), party.id})).bytes};
}

std::string_view to_string(ContractState s)
{
    switch (s) {
    case ContractState::Open: return "open";
    case ContractState::Claimed: return "claimed";
    case ContractState::Refunded: return "refunded";
    }
    return "?";
}

std::string_view to_string(LedgerErrc e)
{
    switch (e) {
    case LedgerErrc::InvalidAmount: return "InvalidAmount";
    case LedgerErrc::InsufficientFunds: return "InsufficientFunds";
    case LedgerErrc::PastDeadline: return "PastDeadline";
    case LedgerErrc::InvalidCondition: return "InvalidCondition";
    case LedgerErrc::UnknownContract: return "UnknownContract";
    case LedgerErrc::WrongWitness: return "WrongWitness";
    case LedgerErrc::Expired: return "Expired";
    case LedgerErrc::AlreadySettled: return "AlreadySettled";
    case LedgerErrc::VariantMismatch: return "VariantMismatch";
    case LedgerErrc::NotExpired: return "NotExpired";
    case LedgerErrc::NotPayer: return "NotPayer";
    }
    return "?";
}

LedgerError::LedgerError(LedgerErrc code)
    : std::runtime_error("ledger: " + std::string(to_string(code))), code_(code)
{
}

bool condition_matches(const Condition& c, const Witness& w)
{
    return c.index() == w.index();
}

//------------------------------------------------------------------------------

std::uint64_t Ledger::append(EventKind kind, std::optional<ContractId> id)
{
    const std::uint64_t seq = events_.size();
    events_.push_back(LedgerEvent{seq, now_, std::move(kind), id});
    return seq;
}

Amount Ledger::fund(const Address& account, Amount amount)
{
    if (amount == 0) {
        throw LedgerError(LedgerErrc::InvalidAmount);
    }
    Amount& bal = balances_[account];
    bal += amount;
    total_funded_ += amount;
    append(ev::Funded{account, amount}, std::nullopt);
    return bal;
}

ContractId Ledger::publish_contract(const Address& payer, const Address& payee, Amount amount,
                                    Condition condition, Tick deadline)
{
    if (amount == 0) {
        throw LedgerError(LedgerErrc::InvalidAmount);
    }
    if (const auto* n = std::get_if<cond::NotaryHashLock>(&condition); n && n->fee > amount) {
        throw LedgerError(LedgerErrc::InvalidCondition);
    }
    if (const auto* d = std::get_if<cond::DlogLock>(&condition);
        d && !crypto::in_subgroup(*d->c.params(), d->c.value())) {
        throw LedgerError(LedgerErrc::InvalidCondition);
    }
    if (deadline <= now_) {
        throw LedgerError(LedgerErrc::PastDeadline);
    }
    if (get_balance(payer) < amount) {
        throw LedgerError(LedgerErrc::InsufficientFunds);
    }

    const ContractId id = next_id_++;
    balances_[payer] -= amount;
    EscrowContract c{id, payer, payee, amount, std::move(condition), deadline, ContractState::Open};
    contracts_.emplace(id, c);
    append(ev::ContractPublished{std::move(c)}, id);
    return id;
}

bool Ledger::evaluate(const Condition& c, const Witness& w) const
{
    if (const auto* h = std::get_if<cond::HashLock>(&c)) {
        return crypto::hash(std::get<wit::Preimage>(w).x) == h->h2;
    }
    if (const auto* h = std::get_if<cond::NotaryHashLock>(&c)) {
        const auto& p = std::get<wit::PreimageWithNotary>(w);
        return crypto::hash(crypto::canonical_encode({p.x, p.n.id})) == h->h2;
    }
    const auto& d = std::get<cond::DlogLock>(c);
    const auto& x = std::get<wit::Exponent>(w).x;
    if (!(*x.params() == *d.c.params())) {
        return false;
    }
    return crypto::group_exp(crypto::GroupElement::generator(d.c.params()), x) == d.c;
}

Settlement Ledger::claim(ContractId id, const Witness& witness)
{
    auto it = contracts_.find(id);
    if (it == contracts_.end()) {
        throw LedgerError(LedgerErrc::UnknownContract);
    }
    EscrowContract& c = it->second;
    if (!faults_.allow_double_settlement) {
        if (c.state != ContractState::Open) {
            throw LedgerError(LedgerErrc::AlreadySettled);
        }
        if (now_ > c.deadline) {
            throw LedgerError(LedgerErrc::Expired);
        }
    }
    if (!condition_matches(c.condition, witness)) {
        throw LedgerError(LedgerErrc::VariantMismatch);
    }
    if (!evaluate(c.condition, witness)) {
        throw LedgerError(LedgerErrc::WrongWitness);
    }

    std::vector<Credit> credits;
    if (const auto* n = std::get_if<cond::NotaryHashLock>(&c.condition)) {
        credits.push_back({c.payee, c.amount - n->fee});
        credits.push_back({n->notary, n->fee});
    } else {
        credits.push_back({c.payee, c.amount});
    }
    for (const Credit& cr : credits) {
        balances_[cr.account] += cr.amount;
    }
    c.state = ContractState::Claimed;
    const auto seq = append(ev::Claimed{witness, credits}, id);
    return Settlement{id, c.state, std::move(credits), seq};
}

Settlement Ledger::refund(ContractId id, const Address& caller)
{
    auto it = contracts_.find(id);
    if (it == contracts_.end()) {
        throw LedgerError(LedgerErrc::UnknownContract);
    }
    EscrowContract& c = it->second;
    if (!faults_.allow_double_settlement && c.state != ContractState::Open) {
        throw LedgerError(LedgerErrc::AlreadySettled);
    }
    if (caller != c.payer) {
        throw LedgerError(LedgerErrc::NotPayer);
    }
    if (!faults_.allow_double_settlement && now_ <= c.deadline) {
        throw LedgerError(LedgerErrc::NotExpired);
    }
    balances_[c.payer] += c.amount;
    c.state = ContractState::Refunded;
    const auto seq = append(ev::Refunded{c.payer, c.amount}, id);
    return Settlement{id, c.state, {Credit{c.payer, c.amount}}, seq};
}

Tick Ledger::advance_time(Tick ticks)
{
    now_ += ticks;
    return now_;
}

Amount Ledger::get_balance(const Address& account) const
{
    auto it = balances_.find(account);
    return it == balances_.end() ? 0 : it->second;
}

std::vector<LedgerEvent> Ledger::read_events(std::uint64_t from_seq) const
{
    if (from_seq >= events_.size()) {
        return {};
    }
    return std::vector<LedgerEvent>(events_.begin() + static_cast<std::ptrdiff_t>(from_seq),
                                    events_.end());
}

const EscrowContract* Ledger::find_contract(ContractId id) const
{
    auto it = contracts_.find(id);
    return it == contracts_.end() ? nullptr : &it->second;
}

Amount Ledger::total_supply() const
{
    Amount total = 0;
    for (const auto& [addr, bal] : balances_) {
        total += bal;
    }
    for (const auto& [id, c] : contracts_) {
        if (c.state == ContractState::Open) {
            total += c.amount;
        }
    }
    return total;
}

bool Ledger::operator==(const Ledger& o) const
{
    // Advancing time appends no event, so the clock is not part of the
    // replayable state.
    return next_id_ == o.next_id_ && total_funded_ == o.total_funded_ && balances_ == o.balances_ &&
           contracts_ == o.contracts_ && events_ == o.events_;
}

void Ledger::write_log(std::ostream& out) const
{
    for (const LedgerEvent& e : events_) {
        out << codec::encode(e).dump() << '\n';
    }
}

std::string Ledger::log_text() const
{
    std::ostringstream out;
    write_log(out);
    return out.str();
}

Ledger Ledger::replay(const std::vector<LedgerEvent>& events)
{
    Ledger l;
    for (const LedgerEvent& e : events) {
        if (e.seq != l.events_.size()) {
            throw std::runtime_error("replay: non-contiguous sequence number " + std::to_string(e.seq));
        }
        if (e.tick < l.now_) {
            throw std::runtime_error("replay: time went backwards at seq " + std::to_string(e.seq));
        }
        l.now_ = e.tick;
        try {
            std::visit(
                [&](const auto& k) {
                    using K = std::decay_t<decltype(k)>;
                    if constexpr (std::is_same_v<K, ev::Funded>) {
                        l.fund(k.account, k.amount);
                    } else if constexpr (std::is_same_v<K, ev::ContractPublished>) {
                        const auto& c = k.contract;
                        l.publish_contract(c.payer, c.payee, c.amount, c.condition, c.deadline);
                    } else if constexpr (std::is_same_v<K, ev::Claimed>) {
                        l.claim(e.contract_id.value_or(0), k.witness);
                    } else {
                        l.refund(e.contract_id.value_or(0), k.payer);
                    }
                },
                e.kind);
        } catch (const LedgerError& err) {
            throw std::runtime_error("replay: seq " + std::to_string(e.seq) + " rejected: " + err.what());
        }
        if (!(l.events_.back() == e)) {
            throw std::runtime_error("replay: regenerated event differs at seq " + std::to_string(e.seq));
        }
    }
    return l;
}

Ledger Ledger::replay(std::istream& in)
{
    std::vector<LedgerEvent> events;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        try {
            events.push_back(codec::decode_event(codec::json::parse(line)));
        } catch (const codec::json::exception& e) {
            throw codec::CodecError(std::string("event log: ") + e.what());
        }
    }
    return replay(events);
}

}  // namespace sedg::ledger
