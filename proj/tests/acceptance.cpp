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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "sedg/harness.hpp"

namespace {

using namespace sedg;
using cert::Variant;
using harness::Amount;
using harness::BuyerPolicy;
using harness::SellerPolicy;
using Clock = std::chrono::steady_clock;

const Variant kAll[] = {Variant::V1, Variant::V2, Variant::V3};

struct Outcome
{
    bool pass = true;
    std::string detail;

    void fail(const std::string& why)
    {
        if (pass) {
            detail = why;
        }
        pass = false;
    }
};

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Runs the CLI and returns (exit status, stdout).
std::pair<int, std::string> run_cli(const std::string& args)
{
    const std::string cmd = std::string(SEDG_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* p = ::popen(cmd.c_str(), "r");
    if (!p) {
        return {-1, ""};
    }
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof(buf), p)) {
        out.append(buf, n);
    }
    const int status = ::pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

//------------------------------------------------------------------------------

Outcome happy_path()
{
    Outcome o;
    for (Variant v : kAll) {
        const std::string name(cert::variant_name(v));
        const auto t0 = Clock::now();
        const auto [rc, out] = run_cli("demo --protocol " + name);
        const double dt = seconds_since(t0);
        if (rc != 0) {
            o.fail(name + ": demo exited " + std::to_string(rc));
        }
        if (dt >= 1.0) {
            o.fail(name + ": demo took " + std::to_string(dt) + " s");
        }
        if (out.find("plaintext equals the seller payload: yes") == std::string::npos) {
            o.fail(name + ": demo did not confirm the plaintext");
        }

        const harness::RunResult r = harness::run_demo(v, {});
        const auto& rep = r.report;
        const Amount fee = harness::demo_config(v).fee();
        if (!rep.plaintext_matches_payload) {
            o.fail(name + ": plaintext differs from the payload");
        }
        if (rep.final_balances.seller - rep.initial.seller != rep.price - fee) {
            o.fail(name + ": seller gained the wrong amount");
        }
        if (rep.final_balances.notary - rep.initial.notary != fee) {
            o.fail(name + ": notary gained the wrong amount");
        }
        if (rep.initial.buyer - rep.final_balances.buyer != rep.price) {
            o.fail(name + ": buyer paid the wrong amount");
        }
        if (v == Variant::V2 && fee == 0) {
            o.fail("v2 demo has no notary fee");
        }
    }
    return o;
}

Outcome fairness_exploration()
{
    Outcome o;
    const auto t0 = Clock::now();
    std::uint64_t schedules = 0;
    std::size_t combos = 0;
    for (Variant v : kAll) {
        harness::ScenarioConfig c;
        c.variant = v;
        c.group = "modp2048";
        c.seed = 2026;
        harness::ExploreOptions opts;
        opts.depth = 12;
        for (const auto& e : harness::explore_policies(c, opts)) {
            ++combos;
            schedules += e.result.schedules_explored;
            if (e.result.schedules_explored == 0) {
                o.fail("no schedules explored");
            }
            for (const auto& x : e.result.violations) {
                o.fail(std::string(cert::variant_name(v)) + " " +
                       std::string(protocol::to_string(e.seller_policy)) + "/" +
                       std::string(protocol::to_string(e.buyer_policy)) + ": " + x.property);
            }
        }
    }
    const double dt = seconds_since(t0);
    if (dt >= 60.0) {
        o.fail("exploration took " + std::to_string(dt) + " s");
    }
    if (o.pass) {
        o.detail = std::to_string(combos) + " policy pairs, " + std::to_string(schedules) + " schedules, " +
                   std::to_string(dt).substr(0, 5) + " s";
    }

    // The checks themselves must be able to fire.
    harness::ScenarioConfig c;
    c.group = "test";
    c.buyer_policy = BuyerPolicy::RefundEagerly;
    harness::ExploreOptions broken;
    broken.faults.allow_double_settlement = true;
    if (harness::explore(c, broken).violations.empty()) {
        o.fail("a double-settling ledger went unnoticed");
    }
    return o;
}

// Every (k, r) on the small group, through the full stack.
struct SmallGroupSweep
{
    struct Row
    {
        unsigned long k = 0, r = 0, x = 0;
        harness::RunResult run;
    };
    std::vector<Row> rows;

    SmallGroupSweep()
    {
        for (unsigned long k = 1; k <= 10; ++k) {
            for (unsigned long r = 1; r <= 10; ++r) {
                harness::ScenarioConfig c;
                c.variant = Variant::V3;
                c.group = "test";
                c.seed = k * 100 + r;
                harness::RunOptions opts;
                crypto::SecretKey key{};
                key.bytes[31] = static_cast<std::uint8_t>(k);
                opts.hooks.fixed_key = key;
                opts.hooks.fixed_blind = mpz_class(r);
                Row row{k, r, 0, harness::run_scenario(c, opts)};
                for (const auto& ev : row.run.ledger.events()) {
                    if (const auto* cl = std::get_if<ledger::ev::Claimed>(&ev.kind)) {
                        row.x = std::get<ledger::wit::Exponent>(cl->witness).x.value().get_ui();
                    }
                }
                rows.push_back(std::move(row));
            }
        }
    }
};

Outcome dlog_algebra(const SmallGroupSweep& sweep)
{
    Outcome o;
    const auto g = crypto::GroupParams::test_group();
    const auto gen = crypto::GroupElement::generator(g);
    int checked = 0;
    for (unsigned long k = 1; k <= 10; ++k) {
        for (unsigned long r = 1; r <= 10; ++r) {
            const auto sk = crypto::Scalar::make(g, k);
            const auto sr = crypto::Scalar::make(g, r);
            const auto x = crypto::scalar_mul(sk, sr);
            if (x.value() != (k * r) % 11) {
                o.fail("k*r mod 11 wrong at k=" + std::to_string(k) + " r=" + std::to_string(r));
            }
            if (!(crypto::group_exp(gen, x) == crypto::group_exp(crypto::group_exp(gen, sk), sr))) {
                o.fail("G^(kr) != (G^k)^r at k=" + std::to_string(k) + " r=" + std::to_string(r));
            }
            if (!(crypto::scalar_mul(x, crypto::scalar_inv(sr)) == sk)) {
                o.fail("recovery failed at k=" + std::to_string(k) + " r=" + std::to_string(r));
            }
            ++checked;
        }
    }
    for (const auto& row : sweep.rows) {
        if (!row.run.report.plaintext_matches_payload || !row.run.violations.empty()) {
            o.fail("exchange did not settle at k=" + std::to_string(row.k) + " r=" + std::to_string(row.r));
        }
    }
    if (o.pass) {
        o.detail = std::to_string(checked) + " pairs, " + std::to_string(sweep.rows.size()) + " full exchanges";
    }
    return o;
}

Outcome unlinkability(const SmallGroupSweep& sweep)
{
    Outcome o;
    const auto g = crypto::GroupParams::test_group();
    const auto gen = crypto::GroupElement::generator(g);
    std::map<unsigned long, std::set<unsigned long>> xs_by_k;
    for (const auto& row : sweep.rows) {
        bool found = false;
        for (const auto& [id, c] : row.run.ledger.contracts()) {
            const auto* lock = std::get_if<ledger::cond::DlogLock>(&c.condition);
            if (!lock || c.state != ledger::ContractState::Claimed) {
                continue;
            }
            found = true;
            if (!(crypto::group_exp(gen, mpz_class(row.x)) == lock->c)) {
                o.fail("c != G^x at k=" + std::to_string(row.k) + " r=" + std::to_string(row.r));
            }
        }
        if (!found) {
            o.fail("no settled lock at k=" + std::to_string(row.k) + " r=" + std::to_string(row.r));
        }
        xs_by_k[row.k].insert(row.x);
    }
    for (const auto& [k, xs] : xs_by_k) {
        if (xs.size() != 10 || *xs.begin() != 1 || *xs.rbegin() != 10) {
            o.fail("r -> x is not a bijection onto [1,10] for k=" + std::to_string(k));
        }
    }
    return o;
}

Outcome ledger_properties()
{
    Outcome o;
    const auto t0 = Clock::now();
    const ledger::Address accounts[] = {ledger::address_of(cert::PartyId::named("a")),
                                        ledger::address_of(cert::PartyId::named("b")),
                                        ledger::address_of(cert::PartyId::named("c"))};
    crypto::SecretKey keys[2];
    keys[0].bytes.fill(1);
    keys[1].bytes.fill(2);
    crypto::Rng rng(515);
    std::uint64_t ops = 0, rejected = 0;
    constexpr int kSequences = 1000;
    for (int seq = 0; seq < kSequences; ++seq) {
        ledger::Ledger l;
        for (int step = 0; step < 50; ++step) {
            const auto pick = [&](std::uint64_t n) { return rng.next() % n; };
            const auto& who = accounts[pick(3)];
            const ledger::Ledger before = l;
            ++ops;
            try {
                switch (pick(5)) {
                case 0: l.fund(who, pick(40)); break;
                case 1:
                    l.publish_contract(who, accounts[pick(3)], pick(30),
                                       ledger::cond::HashLock{crypto::hash(keys[pick(2)].view())},
                                       l.now() + pick(5));
                    break;
                case 2:
                    l.claim(1 + pick(l.contracts().size() + 1),
                            ledger::wit::Preimage{crypto::to_bytes(keys[pick(2)].bytes)});
                    break;
                case 3: l.refund(1 + pick(l.contracts().size() + 1), who); break;
                case 4: l.advance_time(pick(3)); break;
                }
            } catch (const ledger::LedgerError&) {
                ++rejected;
                if (!(l == before)) {
                    o.fail("a rejected operation changed the ledger");
                }
            }
            if (l.total_supply() != l.total_funded()) {
                o.fail("conservation broken in sequence " + std::to_string(seq));
            }
        }
        std::map<ledger::ContractId, int> settled;
        for (const auto& e : l.events()) {
            if (std::holds_alternative<ledger::ev::Claimed>(e.kind) ||
                std::holds_alternative<ledger::ev::Refunded>(e.kind)) {
                if (++settled[*e.contract_id] > 1) {
                    o.fail("contract settled twice in sequence " + std::to_string(seq));
                }
            }
        }
    }
    const double dt = seconds_since(t0);
    if (dt >= 30.0) {
        o.fail("took " + std::to_string(dt) + " s");
    }
    if (o.pass) {
        o.detail = std::to_string(kSequences) + " sequences, " + std::to_string(ops) + " ops (" +
                   std::to_string(rejected) + " rejected)";
    }
    return o;
}

Outcome binding()
{
    Outcome o;
    crypto::Rng rng(66);
    int mutated = 0, wrong_witnesses = 0;
    for (Variant v : kAll) {
        const auto group = v == Variant::V3 ? crypto::GroupParams::modp2048() : nullptr;
        const cert::Notary notary = cert::Notary::create("notary-1", rng);
        const cert::PartyId seller = cert::PartyId::named("seller-1");
        cert::TrustRegistry registry;
        registry.add(notary.id, notary.keys.public_key);
        const auto pkg = cert::notarize(notary, cert::SellerData{rng.bytes(64), seller, ""}, v, group, rng);
        if (!cert::verify_certificate(pkg.certificate, registry, seller, pkg.ciphertext)) {
            o.fail("untouched certificate rejected");
        }

        for (int i = 0; i < 100; ++i) {
            cert::Certificate c = pkg.certificate;
            crypto::Ciphertext ct = pkg.ciphertext;
            cert::PartyId claimed = seller;
            switch (i % 4) {
            case 0: {
                const std::size_t bit = rng.next() % (ct.body.size() * 8);
                ct.body[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
                break;
            }
            case 1: c.h1.bytes[rng.next() % 32] ^= static_cast<std::uint8_t>(1 + rng.next() % 255); break;
            case 2:
                if (auto* h = std::get_if<cert::commit::HashOfKey>(&c.h2)) {
                    h->digest.bytes[rng.next() % 32] ^= 0x01;
                } else if (auto* h = std::get_if<cert::commit::HashOfKeyAndNotary>(&c.h2)) {
                    h->digest.bytes[rng.next() % 32] ^= 0x01;
                } else {
                    auto& gp = std::get<cert::commit::GroupPower>(c.h2);
                    gp.element = crypto::group_exp(gp.element, mpz_class(2 + i));
                }
                break;
            case 3: {
                const std::string other = "seller-" + std::to_string(2 + i);
                // Either the certificate names someone else, or someone else presents it.
                if (i % 8 == 3) {
                    c.seller_id = cert::PartyId::named(other);
                } else {
                    claimed = cert::PartyId::named(other);
                }
                break;
            }
            }
            ++mutated;
            if (cert::verify_certificate(c, registry, claimed, ct)) {
                o.fail(std::string(cert::variant_name(v)) + ": mutation " + std::to_string(i) + " accepted");
            }
        }

        // Wrong witnesses against an open contract of the matching kind.
        ledger::Ledger l;
        const auto buyer = ledger::address_of(cert::PartyId::named("buyer-1"));
        l.fund(buyer, 100);
        ledger::Condition cond;
        std::optional<crypto::Scalar> blind;
        switch (v) {
        case Variant::V1:
            cond = ledger::cond::HashLock{std::get<cert::commit::HashOfKey>(pkg.certificate.h2).digest};
            break;
        case Variant::V2:
            cond = ledger::cond::NotaryHashLock{std::get<cert::commit::HashOfKeyAndNotary>(pkg.certificate.h2).digest,
                                                ledger::address_of(notary.id), 5};
            break;
        case Variant::V3:
            blind = crypto::Scalar::random(group, rng);
            cond = ledger::cond::DlogLock{
                crypto::group_exp(std::get<cert::commit::GroupPower>(pkg.certificate.h2).element, *blind)};
            break;
        }
        const auto id = l.publish_contract(buyer, ledger::address_of(seller), 50, cond, 100);
        for (int i = 0; i < 100; ++i) {
            ledger::Witness w;
            switch (v) {
            case Variant::V1: w = ledger::wit::Preimage{rng.bytes(i % 3 == 0 ? 32 : 1 + rng.next() % 64)}; break;
            case Variant::V2: {
                // Alternate a wrong key with the right key under the wrong notary.
                const bool right_key = i % 2 == 0;
                w = ledger::wit::PreimageWithNotary{right_key ? crypto::to_bytes(pkg.key.bytes) : rng.bytes(32),
                                                    right_key ? cert::PartyId::named("notary-x") : notary.id};
                break;
            }
            case Variant::V3: {
                // Includes the unblinded k itself.
                const auto k = crypto::Scalar::from_key(group, pkg.key);
                w = ledger::wit::Exponent{i == 0 ? k : crypto::Scalar::random(group, rng)};
                break;
            }
            }
            const ledger::Ledger before = l;
            try {
                l.claim(id, w);
                o.fail(std::string(cert::variant_name(v)) + ": wrong witness " + std::to_string(i) + " accepted");
            } catch (const ledger::LedgerError& e) {
                if (e.code() != ledger::LedgerErrc::WrongWitness) {
                    o.fail("unexpected error " + std::string(ledger::to_string(e.code())));
                }
            }
            if (!(l == before)) {
                o.fail("a rejected claim changed the ledger");
            }
            ++wrong_witnesses;
        }
    }
    if (o.pass) {
        o.detail = std::to_string(mutated) + " mutated certificates, " + std::to_string(wrong_witnesses) +
                   " wrong witnesses";
    }
    return o;
}

Outcome wire_determinism()
{
    Outcome o;
    for (Variant v : kAll) {
        for (SellerPolicy sp : protocol::all_seller_policies()) {
            harness::ScenarioConfig c;
            c.variant = v;
            c.seller_policy = sp;
            c.seed = 99;
            const auto a = harness::run_scenario(c);
            const auto b = harness::run_scenario(c);
            if (a.event_log != b.event_log || !(a.report == b.report)) {
                o.fail(std::string(cert::variant_name(v)) + ": equal seeds gave different logs");
            }
            std::istringstream in(a.event_log);
            const ledger::Ledger back = ledger::Ledger::replay(in);
            if (!(back == a.ledger) || back.log_text() != a.event_log) {
                o.fail(std::string(cert::variant_name(v)) + ": replay diverged");
            }
        }
    }

    // Through the command line: two runs, same bytes on disk.
    const auto dir = std::filesystem::temp_directory_path();
    const auto cfg = dir / "sedg_accept.json";
    std::ofstream(cfg) << R"({"variant":"v3","seed":4242,"payload":"wire check"})";
    std::string logs[2];
    for (int i = 0; i < 2; ++i) {
        const auto out = dir / ("sedg_accept_" + std::to_string(i) + ".jsonl");
        if (run_cli("run --config " + cfg.string() + " --out " + out.string()).first != 0) {
            o.fail("cli run failed");
        }
        std::ifstream in(out, std::ios::binary);
        logs[i].assign(std::istreambuf_iterator<char>(in), {});
    }
    if (logs[0].empty() || logs[0] != logs[1]) {
        o.fail("cli logs differ between equal-seed runs");
    }
    return o;
}

}  // namespace

int main()
{
    struct Criterion
    {
        const char* name;
        std::function<Outcome()> run;
    };
    std::optional<SmallGroupSweep> sweep;
    auto sweep_ref = [&]() -> const SmallGroupSweep& {
        if (!sweep) {
            sweep.emplace();
        }
        return *sweep;
    };

    const std::vector<Criterion> criteria = {
        {"happy path for every variant", happy_path},
        {"fairness exploration at depth 12", fairness_exploration},
        {"exhaustive discrete-log algebra on p=23", [&] { return dlog_algebra(sweep_ref()); }},
        {"settled locks are certificate independent", [&] { return unlinkability(sweep_ref()); }},
        {"ledger conservation and single settlement", ledger_properties},
        {"certificate and witness binding", binding},
        {"wire determinism and replay", wire_determinism},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        const double dt = seconds_since(t0);
        char timing[32];
        std::snprintf(timing, sizeof(timing), "%.2fs", dt);
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].name << "  [" << timing
                  << "]" << (o.detail.empty() ? "" : "  " + o.detail) << std::endl;
        failures += o.pass ? 0 : 1;
    }
    std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
