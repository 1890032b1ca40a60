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

// sedg: run, explore and demonstrate escrowed data exchanges.
//
// Exit status: 0 clean, 1 invariant violations found, 2 bad configuration.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "sedg/harness.hpp"

namespace {

using namespace sedg;

constexpr int kExitViolations = 1;
constexpr int kExitConfig = 2;

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& out_path, const std::string& format)
{
    harness::ScenarioConfig c = harness::load_config(config_path);
    if (seed) {
        c.seed = *seed;
    }
    const harness::RunResult r = harness::run_scenario(c);
    const auto fmt = format == "text" ? harness::ReportFormat::Text : harness::ReportFormat::Json;
    std::cout << harness::emit_report(r.report, fmt);
    if (!out_path.empty()) {
        std::ofstream log(out_path, std::ios::binary);
        if (!log) {
            throw harness::ConfigError("cannot write " + out_path);
        }
        log << r.event_log;
    }
    for (const std::string& v : r.violations) {
        std::cerr << "violation: " << v << "\n";
    }
    return r.violations.empty() ? 0 : kExitViolations;
}

int cmd_explore(const std::string& config_path, std::size_t depth, std::size_t max_depth,
                bool all_policies, bool serial)
{
    const harness::ScenarioConfig c = harness::load_config(config_path);
    harness::ExploreOptions opts;
    opts.depth = depth;
    opts.max_depth = max_depth;
    opts.parallel = !serial;

    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    std::size_t violations = 0;
    auto add = [&](harness::SellerPolicy sp, harness::BuyerPolicy bp,
                   const explore::ExplorationResult& r) {
        auto j = harness::exploration_to_json(r);
        j["seller_policy"] = protocol::to_string(sp);
        j["buyer_policy"] = protocol::to_string(bp);
        violations += r.violations.size();
        out.push_back(std::move(j));
    };
    if (all_policies) {
        for (const auto& e : harness::explore_policies(c, opts)) {
            add(e.seller_policy, e.buyer_policy, e.result);
        }
    } else {
        add(c.seller_policy, c.buyer_policy, harness::explore(c, opts));
    }
    std::cout << out.dump(2) << "\n";
    return violations == 0 ? 0 : kExitViolations;
}

int cmd_demo(const std::string& protocol_name)
{
    const cert::Variant v = cert::parse_variant(protocol_name);
    std::cout << "protocol " << cert::variant_tag(v) << "\n";
    const harness::RunResult r =
        harness::run_demo(v, [](const std::string& line) { std::cout << "  " << line << "\n"; });
    return r.violations.empty() ? 0 : kExitViolations;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Escrowed data exchange simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    std::string format = "json";
    auto* run = app.add_subcommand("run", "Run one scenario to completion");
    run->add_option("--config", config_path, "Scenario JSON")->required();
    run->add_option("--seed", seed, "Override the configured seed");
    run->add_option("--out", out_path, "Write the ledger event log here");
    run->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text"}));

    std::size_t depth = harness::kDefaultDepth;
    std::size_t max_depth = harness::kDefaultMaxDepth;
    bool all_policies = false;
    bool serial = false;
    auto* exp = app.add_subcommand("explore", "Check invariants over every bounded schedule");
    exp->add_option("--config", config_path, "Scenario JSON")->required();
    exp->add_option("--depth", depth, "Scheduler choices per schedule");
    exp->add_option("--max-depth", max_depth, "Largest depth accepted");
    exp->add_flag("--all-policies", all_policies, "Sweep every seller and buyer policy");
    exp->add_flag("--serial", serial, "Use the single-threaded explorer");

    std::string protocol_name = "v1";
    auto* demo = app.add_subcommand("demo", "Walk through one honest exchange");
    demo->add_option("--protocol", protocol_name, "v1, v2 or v3")
        ->check(CLI::IsMember({"v1", "v2", "v3", "sedg1", "sedg2", "sedg3"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) {
            return cmd_run(config_path, seed, out_path, format);
        }
        if (*exp) {
            return cmd_explore(config_path, depth, max_depth, all_policies, serial);
        }
        return cmd_demo(protocol_name);
    } catch (const harness::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const harness::DepthExceeded& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
}
