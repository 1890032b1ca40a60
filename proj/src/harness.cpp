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

#include <fstream>
#include <set>

#include "sedg/harness.hpp"

namespace sedg::harness {

using json = nlohmann::json;

Amount ScenarioConfig::fee() const
{
    if (variant != cert::Variant::V2) {
        return 0;
    }
    return notary_fee.value_or(price / 10);
}

void validate(const ScenarioConfig& c)
{
    if (c.price == 0) {
        throw ConfigError("price must be positive");
    }
    if (c.deadline_offset == 0) {
        throw ConfigError("deadline_offset must be positive");
    }
    if (c.payload.empty()) {
        throw ConfigError("payload must not be empty");
    }
    if (c.variant == cert::Variant::V2) {
        const Amount fee = c.fee();
        if (fee == 0 || fee >= c.price) {
            throw ConfigError("notary_fee must satisfy 1 <= fee < price (got " + std::to_string(fee) +
                              ")");
        }
    }
    if (c.variant == cert::Variant::V3 && c.group != "test" && c.group != "modp2048") {
        throw ConfigError("group must be \"test\" or \"modp2048\"");
    }
}

namespace {

std::uint64_t get_uint(const json& j, const char* key, std::uint64_t fallback)
{
    if (!j.contains(key)) {
        return fallback;
    }
    const json& v = j.at(key);
    if (!v.is_number_unsigned()) {
        throw ConfigError(std::string(key) + " must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

std::string get_string(const json& j, const char* key, const std::string& fallback)
{
    if (!j.contains(key)) {
        return fallback;
    }
    const json& v = j.at(key);
    if (!v.is_string()) {
        throw ConfigError(std::string(key) + " must be a string");
    }
    return v.get<std::string>();
}

}  // namespace

ScenarioConfig config_from_json(const json& j)
{
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    static const std::set<std::string> known = {
        "variant",      "price",         "buyer_balance", "deadline_offset", "notary_fee",
        "group",        "seller_policy", "buyer_policy",  "seed",            "payload",
        "payload_hex",  "payload_size",  "meta"};
    for (const auto& [k, v] : j.items()) {
        if (!known.count(k)) {
            throw ConfigError("unknown config key '" + k + "'");
        }
    }

    ScenarioConfig c;
    try {
        c.variant = cert::parse_variant(get_string(j, "variant", "v1"));
        c.seller_policy = protocol::parse_seller_policy(get_string(j, "seller_policy", "honest"));
        c.buyer_policy = protocol::parse_buyer_policy(get_string(j, "buyer_policy", "honest"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    c.price = get_uint(j, "price", c.price);
    c.buyer_balance = get_uint(j, "buyer_balance", c.buyer_balance);
    c.deadline_offset = get_uint(j, "deadline_offset", c.deadline_offset);
    if (j.contains("notary_fee")) {
        c.notary_fee = get_uint(j, "notary_fee", 0);
    }
    c.group = get_string(j, "group", c.group);
    c.seed = get_uint(j, "seed", c.seed);
    c.meta = get_string(j, "meta", c.meta);

    const int payload_forms = int(j.contains("payload")) + int(j.contains("payload_hex")) +
                              int(j.contains("payload_size"));
    if (payload_forms > 1) {
        throw ConfigError("give at most one of payload, payload_hex, payload_size");
    }
    if (j.contains("payload")) {
        c.payload = crypto::to_bytes(get_string(j, "payload", ""));
    } else if (j.contains("payload_hex")) {
        try {
            c.payload = crypto::from_hex(get_string(j, "payload_hex", ""));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("payload_hex: ") + e.what());
        }
    } else if (j.contains("payload_size")) {
        const std::uint64_t n = get_uint(j, "payload_size", 0);
        if (n > (std::uint64_t{1} << 26)) {
            throw ConfigError("payload_size above 64 MiB");
        }
        crypto::Rng rng = crypto::Rng::derive(c.seed, "payload");
        c.payload = rng.bytes(static_cast<std::size_t>(n));
    }
    validate(c);
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config " + path.string());
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

json config_to_json(const ScenarioConfig& c)
{
    json j{{"variant", cert::variant_name(c.variant)},
           {"price", c.price},
           {"buyer_balance", c.buyer_balance},
           {"deadline_offset", c.deadline_offset},
           {"seller_policy", protocol::to_string(c.seller_policy)},
           {"buyer_policy", protocol::to_string(c.buyer_policy)},
           {"seed", c.seed},
           {"payload_hex", crypto::to_hex(c.payload)},
           {"meta", c.meta}};
    if (c.variant == cert::Variant::V2) {
        j["notary_fee"] = c.fee();
    }
    if (c.variant == cert::Variant::V3) {
        j["group"] = c.group;
    }
    return j;
}

//------------------------------------------------------------------------------

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options)
{
    World w = World::create(config, options.hooks, options.faults, options.trace);
    constexpr std::size_t kStepLimit = 10000;
    for (std::size_t step = 0;; ++step) {
        const auto acts = w.enabled();
        if (acts.empty()) {
            break;
        }
        if (step == kStepLimit) {
            throw std::runtime_error("run_scenario: no terminal state after " +
                                     std::to_string(kStepLimit) + " steps");
        }
        w.apply(acts.front());
    }
    return RunResult{w.report(), w.check(), w.ledger().log_text(), w.ledger()};
}

explore::ExplorationResult explore(const ScenarioConfig& config, const ExploreOptions& options)
{
    if (options.depth == 0 || options.depth > options.max_depth) {
        throw DepthExceeded("depth " + std::to_string(options.depth) + " outside 1.." +
                            std::to_string(options.max_depth));
    }
    World root = World::create(config, options.hooks, options.faults);
    const explore::Limits lim{options.depth, 10000};
    const ScenarioModel model;
    return options.parallel ? explore::explore_parallel(model, std::move(root), lim)
                            : explore::explore_serial(model, std::move(root), lim);
}

std::vector<SweepEntry> explore_policies(const ScenarioConfig& config, const ExploreOptions& options)
{
    std::vector<SweepEntry> out;
    for (SellerPolicy sp : protocol::all_seller_policies()) {
        for (BuyerPolicy bp : protocol::all_buyer_policies()) {
            ScenarioConfig c = config;
            c.seller_policy = sp;
            c.buyer_policy = bp;
            out.push_back(SweepEntry{sp, bp, explore(c, options)});
        }
    }
    return out;
}

//------------------------------------------------------------------------------

ScenarioConfig demo_config(cert::Variant v)
{
    ScenarioConfig c;
    c.variant = v;
    c.price = 60;
    c.buyer_balance = 100;
    c.seed = 7;
    c.group = "modp2048";
    c.payload = crypto::to_bytes("weather station readings, 2026-03");
    c.meta = "csv, 31 rows";
    if (v == cert::Variant::V2) {
        c.notary_fee = 6;
    }
    return c;
}

RunResult run_demo(cert::Variant v, const TraceSink& sink)
{
    const ScenarioConfig c = demo_config(v);
    RunOptions opts;
    opts.trace = sink;
    RunResult r = run_scenario(c, opts);
    if (sink) {
        sink("balances: buyer " + std::to_string(r.report.initial.buyer) + " -> " +
             std::to_string(r.report.final_balances.buyer) + ", seller " +
             std::to_string(r.report.initial.seller) + " -> " +
             std::to_string(r.report.final_balances.seller) + ", notary " +
             std::to_string(r.report.initial.notary) + " -> " +
             std::to_string(r.report.final_balances.notary));
        sink(std::string("check: plaintext equals the seller payload: ") +
             (r.report.plaintext_matches_payload ? "yes" : "no"));
        sink(std::string("outcome: buyer ") + std::string(protocol::to_string(r.report.buyer_state)) +
             ", seller " + std::string(protocol::to_string(r.report.seller_state)));
    }
    return r;
}

}  // namespace sedg::harness
