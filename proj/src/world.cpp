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

#include <algorithm>
#include <map>

#include "sedg/codec.hpp"
#include "sedg/harness.hpp"

namespace sedg::harness {

namespace {

std::string short_text(const std::string& h)
{
    return h.size() > 16 ? h.substr(0, 16) + ".." : h;
}

std::string short_hex(crypto::ByteView b)
{
    return short_text(crypto::to_hex(b));
}

std::string describe_witness(const ledger::Witness& w)
{
    if (const auto* p = std::get_if<ledger::wit::Preimage>(&w)) {
        return "x=" + short_hex(p->x);
    }
    if (const auto* p = std::get_if<ledger::wit::PreimageWithNotary>(&w)) {
        return "x=" + short_hex(p->x) + ", n=" + p->n.display();
    }
    return "x=" + short_text(std::get<ledger::wit::Exponent>(w).x.value().get_str(16));
}

const ledger::EscrowContract* open_contract(const ledger::Ledger& l, ledger::ContractId id)
{
    const auto* c = l.find_contract(id);
    return (c && c->state == ledger::ContractState::Open) ? c : nullptr;
}

}  // namespace

World World::create(const ScenarioConfig& config, const ScenarioHooks& hooks,
                    ledger::LedgerFaults faults, TraceSink trace)
{
    validate(config);

    World w;
    w.config_ = config;
    w.trace_ = std::move(trace);
    w.ledger_ = ledger::Ledger(faults);

    crypto::Rng notary_rng = crypto::Rng::derive(config.seed, "notary");
    w.notary_ = cert::Notary::create(kNotaryName, notary_rng);
    w.seller_id_ = cert::PartyId::named(kSellerName);
    w.buyer_id_ = cert::PartyId::named(kBuyerName);
    w.seller_addr_ = ledger::address_of(w.seller_id_);
    w.buyer_addr_ = ledger::address_of(w.buyer_id_);
    w.notary_addr_ = ledger::address_of(w.notary_.id);

    crypto::GroupRef group;
    if (config.variant == cert::Variant::V3) {
        group = crypto::GroupParams::named(config.group);
    }

    cert::NotarizeOptions nopts;
    nopts.fixed_key = hooks.fixed_key;
    const cert::SellerData data{config.payload, w.seller_id_, config.meta};
    w.package_ = cert::notarize(w.notary_, data, config.variant, group, notary_rng, nopts);

    const cert::Certificate& cert = w.package_.certificate;
    if (w.trace_) {
        w.note("notary: validate(Data) ok, " + std::to_string(config.payload.size()) + " bytes");
        if (config.variant == cert::Variant::V3) {
            w.note("notary: k = Random() in Z_q, k = " +
                   short_text(crypto::Scalar::from_key(group, w.package_.key).value().get_str(16)));
        } else {
            w.note("notary: k = Random(), k = " + short_hex(w.package_.key.bytes));
        }
        w.note("notary: C = E_k(Data), " + std::to_string(w.package_.ciphertext.body.size()) +
               " bytes");
        w.note("notary: h1 = H(C) = " + short_hex(cert.h1.bytes));
        const char* h2_form = config.variant == cert::Variant::V1   ? "H(k)"
                              : config.variant == cert::Variant::V2 ? "H(k || notary-1)"
                                                                    : "G^k";
        const std::string h2_text =
            config.variant == cert::Variant::V3
                ? short_text(std::get<cert::commit::GroupPower>(cert.h2).element.value().get_str(16))
                : short_hex(cert::encode_commitment(cert.h2));
        w.note(std::string("notary: h2 = ") + h2_form + " = " + h2_text);
        w.note("notary: sigma = Sign(" + std::string(cert::variant_tag(config.variant)) +
               ", h1, h2, seller-1) = " + short_hex(cert.sigma));
    }

    if (config.buyer_balance > 0) {
        w.ledger_.fund(w.buyer_addr_, config.buyer_balance);
    }
    w.initial_ = {w.ledger_.get_balance(w.buyer_addr_), w.ledger_.get_balance(w.seller_addr_),
                  w.ledger_.get_balance(w.notary_addr_)};

    protocol::BuyerConfig bc;
    bc.self = w.buyer_id_;
    bc.address = w.buyer_addr_;
    bc.price = config.price;
    bc.deadline_offset = config.deadline_offset;
    bc.notary_fee = config.fee();
    bc.registry.add(w.notary_.id, w.notary_.keys.public_key);
    bc.policy = config.buyer_policy;
    w.buyer_.emplace(std::move(bc), crypto::Rng::derive(config.seed, "buyer"));
    if (hooks.fixed_blind && group) {
        w.buyer_->force_blind(crypto::Scalar::make(group, *hooks.fixed_blind));
    }

    protocol::SellerConfig sc;
    sc.self = w.seller_id_;
    sc.address = w.seller_addr_;
    sc.notary_address = w.notary_addr_;
    sc.price = config.price;
    sc.notary_fee = config.fee();
    sc.policy = config.seller_policy;
    w.seller_.emplace(std::move(sc), w.package_, crypto::Rng::derive(config.seed, "seller"));

    w.network_.open(w.seller_id_);
    w.network_.open(w.buyer_id_);
    w.send(w.seller_id_, w.buyer_id_, w.seller_->start());
    return w;
}

void World::note(const std::string& line) const
{
    if (trace_) {
        trace_(line);
    }
}

void World::send(const cert::PartyId& from, const cert::PartyId& to,
                 const protocol::ProtocolMessage& m)
{
    note(from.display() + " -> " + to.display() + ": " + std::string(protocol::message_type(m)));
    network_.send(transport::Envelope{from, to, protocol::serialize(m), 0});
}

//------------------------------------------------------------------------------

bool World::buyer_wants_wake() const
{
    if (buyer_->state() != protocol::BuyerState::ContractPublished) {
        return false;
    }
    if (buyer_->cursor < ledger_.event_count()) {
        return true;
    }
    if (buyer_->config().policy == BuyerPolicy::RefundEagerly && !eager_refund_tried_) {
        return true;
    }
    const auto* c = open_contract(ledger_, *buyer_->contract_id());
    return c && ledger_.now() > c->deadline;
}

std::vector<Action> World::enabled() const
{
    std::vector<Action> out;
    for (std::size_t i = 0; i < network_.pending().size(); ++i) {
        out.push_back({Action::Kind::Deliver, i});
    }
    if (buyer_wants_wake()) {
        out.push_back({Action::Kind::BuyerWake, 0});
    }
    for (const auto& [id, c] : ledger_.contracts()) {
        if (c.state == ledger::ContractState::Open && c.deadline >= ledger_.now()) {
            out.push_back({Action::Kind::Tick, 0});
            break;
        }
    }
    return out;
}

std::string World::describe(const Action& a) const
{
    switch (a.kind) {
    case Action::Kind::Deliver: {
        const transport::Envelope& e = network_.pending().at(a.index);
        // Only the discriminator; a full parse would re-verify group elements.
        const auto j = nlohmann::json::parse(e.body, nullptr, false);
        std::string type = "?";
        if (j.is_object() && j.contains("type") && j["type"].is_string()) {
            type = j["type"].get<std::string>();
        }
        return "deliver " + type + " " + e.from.display() + "->" + e.to.display();
    }
    case Action::Kind::BuyerWake: return "buyer wake";
    case Action::Kind::Tick: return "tick";
    }
    return "?";
}

void World::apply(const Action& a)
{
    schedule_.push_back(describe(a));
    switch (a.kind) {
    case Action::Kind::Deliver: {
        const cert::PartyId to = network_.deliver(a.index).to;
        drain(to);
        break;
    }
    case Action::Kind::BuyerWake: buyer_wake(); break;
    case Action::Kind::Tick: {
        std::optional<Tick> next;
        for (const auto& [id, c] : ledger_.contracts()) {
            if (c.state == ledger::ContractState::Open && c.deadline >= ledger_.now()) {
                next = std::min(next.value_or(c.deadline), c.deadline);
            }
        }
        if (!next) {
            throw std::logic_error("tick: no open deadline ahead");
        }
        ledger_.advance_time(*next + 1 - ledger_.now());
        note("clock: now = " + std::to_string(ledger_.now()));
        break;
    }
    }
}

void World::drain(const cert::PartyId& who)
{
    while (auto e = network_.recv(who)) {
        if (who == buyer_id_) {
            buyer_handle(*e);
        } else if (who == seller_id_) {
            seller_handle(*e);
        }
    }
}

//------------------------------------------------------------------------------

void World::buyer_handle(const transport::Envelope& e)
{
    protocol::ProtocolMessage m;
    try {
        m = protocol::parse_message(e.body);
    } catch (const codec::CodecError& ex) {
        note("buyer-1: dropped malformed message: " + std::string(ex.what()));
        return;
    }
    const auto* offer = std::get_if<protocol::msg::Offer>(&m);
    if (!offer) {
        return;
    }

    const protocol::BuyerAction act = buyer_->on_offer(*offer, e.from, ledger_.now());
    if (const auto* ab = std::get_if<protocol::act::Abort>(&act)) {
        note("buyer-1: Verify(sigma, h1, h2, seller-1) failed or offer rejected: " +
             std::string(protocol::to_string(ab->reason)));
        send(buyer_id_, seller_id_, protocol::msg::Abort{std::string(protocol::to_string(ab->reason))});
        return;
    }
    note("buyer-1: Verify(sigma, h1, h2, seller-1) ok");
    note("buyer-1: check H(C) = h1 ok");
    if (const auto* p = std::get_if<protocol::act::PublishContract>(&act)) {
        buyer_publish(*p);
    } else {
        note("buyer-1: verified, not publishing");
    }
}

void World::buyer_publish(const protocol::act::PublishContract& p)
{
    if (p.blind) {
        note("buyer-1: r = Random() in Z_q, c = h2^r");
        send(buyer_id_, seller_id_, protocol::msg::Blind{*p.blind});
    }
    ledger::ContractId id = 0;
    try {
        id = ledger_.publish_contract(buyer_addr_, seller_addr_, p.amount, p.condition, p.deadline);
    } catch (const ledger::LedgerError& ex) {
        note("buyer-1: Publish(T) rejected: " + std::string(ledger::to_string(ex.code())));
        buyer_->on_publish_failed();
        send(buyer_id_, seller_id_,
             protocol::msg::Abort{std::string(protocol::to_string(protocol::AbortReason::PublishRejected))});
        return;
    }
    buyer_->on_published(id, p.deadline);
    note("buyer-1: Publish(T) contract " + std::to_string(id) + ", amount " +
         std::to_string(p.amount) + ", deadline " + std::to_string(p.deadline));
    send(buyer_id_, seller_id_, protocol::msg::ContractRef{id});
}

void World::seller_handle(const transport::Envelope& e)
{
    protocol::ProtocolMessage m;
    try {
        m = protocol::parse_message(e.body);
    } catch (const codec::CodecError& ex) {
        note("seller-1: dropped malformed message: " + std::string(ex.what()));
        return;
    }
    if (const auto* b = std::get_if<protocol::msg::Blind>(&m)) {
        const auto d = seller_->on_blind(b->r);
        if (d) {
            // A contract was parked waiting for r; it is the only candidate.
            for (const auto& [id, c] : ledger_.contracts()) {
                if (c.payee == seller_addr_ && !seller_->attempted().count(id) &&
                    c.state == ledger::ContractState::Open) {
                    seller_decide(id, d);
                    break;
                }
            }
        }
    } else if (const auto* ref = std::get_if<protocol::msg::ContractRef>(&m)) {
        const auto* c = ledger_.find_contract(ref->id);
        if (!c) {
            note("seller-1: unknown contract " + std::to_string(ref->id));
            return;
        }
        seller_decide(ref->id, seller_->on_contract(*c));
    } else if (std::holds_alternative<protocol::msg::Abort>(m)) {
        seller_->on_abort();
        note("seller-1: buyer aborted");
    }
}

void World::seller_decide(ledger::ContractId id, const std::optional<protocol::WitnessDecision>& d)
{
    if (!d) {
        note("seller-1: contract " + std::to_string(id) + " waits for r");
        return;
    }
    if (const auto* why = std::get_if<protocol::DeclineReason>(&*d)) {
        note("seller-1: declines contract " + std::to_string(id) + ": " +
             std::string(protocol::to_string(*why)));
        return;
    }
    const auto& w = std::get<ledger::Witness>(*d);
    try {
        ledger_.claim(id, w);
        note("seller-1: Publish_T(" + describe_witness(w) + ") accepted");
        seller_->on_claim_result(id, std::nullopt);
    } catch (const ledger::LedgerError& ex) {
        note("seller-1: Publish_T(" + describe_witness(w) +
             ") rejected: " + std::string(ledger::to_string(ex.code())));
        seller_->on_claim_result(id, ex.code());
    }
}

void World::buyer_wake()
{
    const auto events = ledger_.read_events(buyer_->cursor);
    buyer_->cursor = ledger_.event_count();
    for (const ledger::LedgerEvent& ev : events) {
        if (!std::holds_alternative<ledger::ev::Claimed>(ev.kind) ||
            ev.contract_id != buyer_->contract_id() ||
            buyer_->state() != protocol::BuyerState::ContractPublished) {
            continue;
        }
        try {
            const crypto::Bytes& pt = buyer_->on_claim(ev);
            if (config_.variant == cert::Variant::V3) {
                note("buyer-1: k = x * r^-1 mod q, Data = D_k(C)");
            } else {
                note("buyer-1: k = x, Data = D_k(C)");
            }
            note("buyer-1: plaintext " + std::to_string(pt.size()) + " bytes, H(C) = h1 holds");
        } catch (const protocol::DecryptFailure& ex) {
            decrypt_failed_ = true;
            note("buyer-1: decrypt failed: " + std::string(ex.what()));
        }
    }

    const bool eager = buyer_->config().policy == BuyerPolicy::RefundEagerly && !eager_refund_tried_;
    if (eager) {
        eager_refund_tried_ = true;
    }
    if (auto r = buyer_->check_timeout(ledger_.now(), ledger_)) {
        const auto* c = open_contract(ledger_, r->id);
        if (!eager && !(c && ledger_.now() > c->deadline)) {
            return;
        }
        try {
            ledger_.refund(r->id, buyer_addr_);
            buyer_->on_refunded();
            buyer_->cursor = ledger_.event_count();
            note("buyer-1: refund of contract " + std::to_string(r->id) + " accepted");
        } catch (const ledger::LedgerError& ex) {
            note("buyer-1: refund rejected: " + std::string(ledger::to_string(ex.code())));
        }
    }
}

//------------------------------------------------------------------------------

std::vector<std::string> World::check() const
{
    std::vector<std::string> bad;
    const ScenarioReport r = report();

    if (r.buyer_has_plaintext != r.seller_paid) {
        bad.emplace_back("atomicity");
    }
    if (config_.variant == cert::Variant::V2 && r.notary_paid != r.seller_paid) {
        bad.emplace_back("notary_atomicity");
    }
    if (r.buyer_has_plaintext && !r.plaintext_matches_payload) {
        bad.emplace_back("plaintext_soundness");
    }
    // The buyer either keeps its funds or pays and holds the right plaintext.
    const bool kept = r.final_balances.buyer == r.initial.buyer;
    const bool bought = r.plaintext_matches_payload && r.initial.buyer >= r.price &&
                        r.final_balances.buyer == r.initial.buyer - r.price;
    if (!kept && !bought) {
        bad.emplace_back("buyer_no_loss");
    }

    std::map<ledger::ContractId, int> settlements;
    for (const ledger::LedgerEvent& ev : ledger_.events()) {
        if (std::holds_alternative<ledger::ev::Claimed>(ev.kind) ||
            std::holds_alternative<ledger::ev::Refunded>(ev.kind)) {
            ++settlements[ev.contract_id.value_or(0)];
        }
        if (const auto* cl = std::get_if<ledger::ev::Claimed>(&ev.kind)) {
            // The seller releases its key only into a contract worth the price.
            const auto* c = ledger_.find_contract(ev.contract_id.value_or(0));
            Amount to_seller = 0;
            for (const ledger::Credit& cr : cl->credits) {
                if (cr.account == seller_addr_) {
                    to_seller += cr.amount;
                }
            }
            if (!c || c->amount < config_.price || to_seller + config_.fee() < config_.price) {
                bad.emplace_back("seller_no_loss");
            }
        }
    }
    for (const auto& [id, n] : settlements) {
        if (n > 1) {
            bad.emplace_back("single_settlement");
        }
    }
    if (ledger_.total_supply() != ledger_.total_funded()) {
        bad.emplace_back("conservation");
    }
    if (r.buyer_state == protocol::BuyerState::Aborted && r.final_balances.buyer != r.initial.buyer) {
        bad.emplace_back("abort_before_pay");
    }
    if (!network_.pending().empty() || network_.sent_count() != network_.delivered_count() ||
        network_.duplicate_deliveries() != 0) {
        bad.emplace_back("exactly_once_delivery");
    }

    std::sort(bad.begin(), bad.end());
    bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
    return bad;
}

ScenarioReport World::report() const
{
    ScenarioReport r;
    r.variant = config_.variant;
    r.seller_policy = config_.seller_policy;
    r.buyer_policy = config_.buyer_policy;
    r.seed = config_.seed;
    r.buyer_state = buyer_->state();
    r.seller_state = seller_->state();
    r.abort_reason = buyer_->abort_reason();
    r.decline_reason = seller_->decline_reason();
    r.claim_error = seller_->claim_error();
    r.buyer_has_plaintext = buyer_->state() == protocol::BuyerState::Settled;
    r.plaintext_matches_payload = r.buyer_has_plaintext && buyer_->plaintext() == config_.payload;
    r.decrypt_failure = decrypt_failed_;
    for (const ledger::LedgerEvent& ev : ledger_.events()) {
        if (const auto* cl = std::get_if<ledger::ev::Claimed>(&ev.kind)) {
            for (const ledger::Credit& cr : cl->credits) {
                r.seller_paid = r.seller_paid || (cr.account == seller_addr_ && cr.amount > 0);
                r.notary_paid = r.notary_paid || (cr.account == notary_addr_ && cr.amount > 0);
            }
        } else if (const auto* rf = std::get_if<ledger::ev::Refunded>(&ev.kind)) {
            r.buyer_refunded = r.buyer_refunded || rf->payer == buyer_addr_;
        }
    }
    r.price = config_.price;
    r.notary_fee = config_.fee();
    r.initial = initial_;
    r.final_balances = {ledger_.get_balance(buyer_addr_), ledger_.get_balance(seller_addr_),
                        ledger_.get_balance(notary_addr_)};
    r.event_count = ledger_.event_count();
    const std::string log = ledger_.log_text();
    r.event_log_sha256 = crypto::to_hex(crypto::hash(log).bytes);
    r.schedule = schedule_;
    return r;
}

}  // namespace sedg::harness
