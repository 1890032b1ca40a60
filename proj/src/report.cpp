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

#include <sstream>

#include "sedg/harness.hpp"

namespace sedg::harness {

using ojson = nlohmann::ordered_json;

namespace {

template <class E>
ojson opt_name(const std::optional<E>& v)
{
    return v ? ojson(std::string(to_string(*v))) : ojson(nullptr);
}

ojson balances(const protocol::PartyBalances& b)
{
    return ojson{{"buyer", b.buyer}, {"seller", b.seller}, {"notary", b.notary}};
}

}  // namespace

ojson report_to_json(const ScenarioReport& r)
{
    using protocol::to_string;
    using ledger::to_string;
    ojson j;
    j["variant"] = cert::variant_name(r.variant);
    j["seller_policy"] = to_string(r.seller_policy);
    j["buyer_policy"] = to_string(r.buyer_policy);
    j["seed"] = r.seed;
    j["buyer_state"] = to_string(r.buyer_state);
    j["seller_state"] = to_string(r.seller_state);
    j["abort_reason"] = opt_name(r.abort_reason);
    j["decline_reason"] = opt_name(r.decline_reason);
    j["claim_error"] = opt_name(r.claim_error);
    j["buyer_has_plaintext"] = r.buyer_has_plaintext;
    j["plaintext_matches_payload"] = r.plaintext_matches_payload;
    j["seller_paid"] = r.seller_paid;
    j["notary_paid"] = r.notary_paid;
    j["buyer_refunded"] = r.buyer_refunded;
    j["decrypt_failure"] = r.decrypt_failure;
    j["price"] = r.price;
    j["notary_fee"] = r.notary_fee;
    j["initial_balances"] = balances(r.initial);
    j["final_balances"] = balances(r.final_balances);
    j["event_count"] = r.event_count;
    j["event_log_sha256"] = r.event_log_sha256;
    j["schedule"] = r.schedule;
    return j;
}

std::string emit_report(const ScenarioReport& r, ReportFormat format)
{
    const ojson j = report_to_json(r);
    if (format == ReportFormat::Json) {
        return j.dump(2) + "\n";
    }
    std::ostringstream out;
    for (const auto& [k, v] : j.items()) {
        if (k == "schedule") {
            out << "schedule:\n";
            for (const auto& step : v) {
                out << "  " << step.get<std::string>() << "\n";
            }
            continue;
        }
        out << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    }
    return out.str();
}

ojson exploration_to_json(const explore::ExplorationResult& r)
{
    ojson j;
    j["schedules_explored"] = r.schedules_explored;
    j["max_depth"] = r.max_depth;
    j["truncated"] = r.truncated;
    ojson v = ojson::array();
    for (const explore::Violation& x : r.violations) {
        v.push_back(ojson{{"property", x.property}, {"trace", x.trace}});
    }
    j["violations"] = std::move(v);
    return j;
}

}  // namespace sedg::harness
