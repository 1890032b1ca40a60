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
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "sedg/cert.hpp"
#include "sedg/crypto.hpp"
#include "sedg/explorer.hpp"
#include "sedg/ledger.hpp"
#include "sedg/protocol.hpp"
#include "sedg/transport.hpp"

namespace sedg::harness {

using ledger::Amount;
using ledger::Tick;
using protocol::BuyerPolicy;
using protocol::ScenarioReport;
using protocol::SellerPolicy;

class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct ScenarioConfig
{
    cert::Variant variant = cert::Variant::V1;
    Amount price = 60;
    Amount buyer_balance = 100;
    Tick deadline_offset = ledger::kDefaultDeadlineOffset;
    std::optional<Amount> notary_fee;  // V2; defaults to price / 10
    std::string group = "modp2048";    // V3: "modp2048" or "test"
    SellerPolicy seller_policy = SellerPolicy::Honest;
    BuyerPolicy buyer_policy = BuyerPolicy::Honest;
    std::uint64_t seed = 1;
    crypto::Bytes payload = crypto::to_bytes("example dataset");
    std::string meta;

    Amount fee() const;  // 0 outside V2
};

// Throws ConfigError on anything out of range.
void validate(const ScenarioConfig& c);
ScenarioConfig config_from_json(const nlohmann::json& j);
ScenarioConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ScenarioConfig& c);

inline const char* const kSellerName = "seller-1";
inline const char* const kBuyerName = "buyer-1";
inline const char* const kNotaryName = "notary-1";

struct ScenarioHooks
{
    std::optional<crypto::SecretKey> fixed_key;
    std::optional<mpz_class> fixed_blind;
};

using TraceSink = std::function<void(const std::string&)>;

//------------------------------------------------------------------------------
// One scenario as a deterministic state machine. The schedule choices are
// which pending envelope to deliver, when the buyer looks at the ledger, and
// when the clock jumps past the next open deadline. Everything else happens
// inside the step of the party that acts.

struct Action
{
    enum class Kind { Deliver, BuyerWake, Tick };
    Kind kind = Kind::Deliver;
    std::size_t index = 0;  // pending envelope for Deliver

    bool operator==(const Action&) const = default;
};

class World
{
public:
    static World create(const ScenarioConfig& config, const ScenarioHooks& hooks = {},
                        ledger::LedgerFaults faults = {}, TraceSink trace = {});

    std::vector<Action> enabled() const;
    void apply(const Action& a);
    std::string describe(const Action& a) const;
    bool terminal() const { return enabled().empty(); }

    // Names of the invariants that fail in this state. Meaningful at a
    // terminal state.
    std::vector<std::string> check() const;
    ScenarioReport report() const;

    const ScenarioConfig& config() const { return config_; }
    const ledger::Ledger& ledger() const { return ledger_; }
    const transport::InProcessNetwork& network() const { return network_; }
    const protocol::BuyerSession& buyer() const { return *buyer_; }
    const protocol::SellerSession& seller() const { return *seller_; }
    const cert::CertificatePackage& package() const { return package_; }
    const std::vector<std::string>& schedule() const { return schedule_; }

private:
    World() = default;

    void note(const std::string& line) const;
    void send(const cert::PartyId& from, const cert::PartyId& to, const protocol::ProtocolMessage& m);
    void drain(const cert::PartyId& who);
    void buyer_handle(const transport::Envelope& e);
    void seller_handle(const transport::Envelope& e);
    void buyer_publish(const protocol::act::PublishContract& p);
    void seller_decide(ledger::ContractId id, const std::optional<protocol::WitnessDecision>& d);
    void buyer_wake();
    bool buyer_wants_wake() const;

    ScenarioConfig config_;
    cert::Notary notary_;
    cert::PartyId seller_id_;
    cert::PartyId buyer_id_;
    ledger::Address seller_addr_;
    ledger::Address buyer_addr_;
    ledger::Address notary_addr_;
    cert::CertificatePackage package_;
    ledger::Ledger ledger_;
    transport::InProcessNetwork network_;
    std::optional<protocol::BuyerSession> buyer_;
    std::optional<protocol::SellerSession> seller_;
    protocol::PartyBalances initial_;
    bool eager_refund_tried_ = false;
    bool decrypt_failed_ = false;
    std::vector<std::string> schedule_;
    TraceSink trace_;
};

// Adapter for the generic explorer.
struct ScenarioModel
{
    using State = World;
    using Action = harness::Action;

    std::vector<Action> enabled(const World& w) const { return w.enabled(); }
    void apply(World& w, const Action& a) const { w.apply(a); }
    std::vector<std::string> check(const World& w) const { return w.check(); }
    std::string describe(const World& w, const Action& a) const { return w.describe(a); }
};

//------------------------------------------------------------------------------

struct RunOptions
{
    ScenarioHooks hooks;
    ledger::LedgerFaults faults;
    TraceSink trace;
};

struct RunResult
{
    ScenarioReport report;
    std::vector<std::string> violations;
    std::string event_log;  // JSON lines
    ledger::Ledger ledger;
};

// Takes the first enabled action until the world is terminal.
RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

inline constexpr std::size_t kDefaultDepth = 12;
inline constexpr std::size_t kDefaultMaxDepth = 12;

class DepthExceeded : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

struct ExploreOptions
{
    std::size_t depth = kDefaultDepth;
    std::size_t max_depth = kDefaultMaxDepth;
    bool parallel = true;
    ledger::LedgerFaults faults;
    ScenarioHooks hooks;
};

// Throws DepthExceeded when depth is 0 or above max_depth.
explore::ExplorationResult explore(const ScenarioConfig& config, const ExploreOptions& options = {});

struct SweepEntry
{
    SellerPolicy seller_policy;
    BuyerPolicy buyer_policy;
    explore::ExplorationResult result;
};

// Every seller policy against every buyer policy.
std::vector<SweepEntry> explore_policies(const ScenarioConfig& config,
                                         const ExploreOptions& options = {});

//------------------------------------------------------------------------------

enum class ReportFormat { Json, Text };

nlohmann::ordered_json report_to_json(const ScenarioReport& r);
std::string emit_report(const ScenarioReport& r, ReportFormat format);
nlohmann::ordered_json exploration_to_json(const explore::ExplorationResult& r);

// Fixed configuration for the step-by-step walkthrough of one protocol.
ScenarioConfig demo_config(cert::Variant v);
RunResult run_demo(cert::Variant v, const TraceSink& sink);

}  // namespace sedg::harness
