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

#include <numeric>

#include "doctest.h"
#include "sedg/explorer.hpp"

using namespace sedg::explore;

namespace {

// Independent chains of unit steps. Each schedule is one interleaving, so the
// count is the multinomial coefficient (sum n_i)! / prod(n_i!).
struct Chains
{
    struct State
    {
        std::vector<int> left;
        std::vector<int> order;
    };
    using Action = std::size_t;

    // Flags schedules in which chain 0 finishes last.
    bool flag_zero_last = false;

    std::vector<Action> enabled(const State& s) const
    {
        std::vector<Action> a;
        for (std::size_t i = 0; i < s.left.size(); ++i) {
            if (s.left[i] > 0) {
                a.push_back(i);
            }
        }
        return a;
    }
    void apply(State& s, const Action& a) const
    {
        --s.left[a];
        s.order.push_back(static_cast<int>(a));
    }
    std::vector<std::string> check(const State& s) const
    {
        if (flag_zero_last && !s.order.empty() && s.order.back() == 0) {
            return {"zero_last"};
        }
        return {};
    }
    std::string describe(const State&, const Action& a) const { return "c" + std::to_string(a); }
};

// A model whose only action never ends.
struct Spinner
{
    using State = int;
    using Action = int;
    std::vector<Action> enabled(const State&) const { return {0}; }
    void apply(State& s, const Action&) const { ++s; }
    std::vector<std::string> check(const State&) const { return {}; }
    std::string describe(const State&, const Action&) const { return "spin"; }
};

std::uint64_t multinomial(const std::vector<int>& n)
{
    std::uint64_t r = 1;
    int total = 0;
    for (int k : n) {
        for (int i = 1; i <= k; ++i) {
            ++total;
            // r *= total / i, kept exact by multiplying first.
            r = r * static_cast<std::uint64_t>(total) / static_cast<std::uint64_t>(i);
        }
    }
    return r;
}

}  // namespace

TEST_CASE("multinomial oracle")
{
    CHECK(multinomial({1, 1, 1}) == 6);
    CHECK(multinomial({2, 1}) == 3);
    CHECK(multinomial({2, 2}) == 6);
    CHECK(multinomial({3, 2, 1}) == 60);
}

TEST_CASE("schedule counts match the multinomial")
{
    const Chains m;
    for (const std::vector<int>& n :
         {std::vector<int>{1, 1, 1}, {2, 1}, {2, 2}, {3, 2, 1}, {2, 2, 2}, {4, 3}, {1}}) {
        const Limits lim{64, 100};
        const auto serial = explore_serial(m, Chains::State{n, {}}, lim);
        CHECK(serial.schedules_explored == multinomial(n));
        CHECK(serial.truncated == 0);
        CHECK(serial.max_depth == static_cast<std::size_t>(std::accumulate(n.begin(), n.end(), 0)));
        CHECK(explore_parallel(m, Chains::State{n, {}}, lim) == serial);
    }
}

TEST_CASE("serial and parallel agree on violations")
{
    const Chains m{true};
    const std::vector<int> n{2, 2, 1};
    for (std::size_t frontier : {1u, 2u, 5u, 17u, 1000u}) {
        const auto serial = explore_serial(m, Chains::State{n, {}});
        const auto par = explore_parallel(m, Chains::State{n, {}}, Limits{}, frontier);
        CHECK(par == serial);
        // Chain 0 last: the last step is c0, the other four of (2,2,1)->(1,2,1) in any order.
        CHECK(serial.violations.size() == multinomial({1, 2, 1}));
        for (const Violation& v : serial.violations) {
            CHECK(v.trace.back() == "c0");
            CHECK(v.property == "zero_last");
        }
    }
}

TEST_CASE("the depth bound completes branches canonically")
{
    const Chains m;
    const std::vector<int> n{2, 2};
    // Two free choices, then first-enabled completion.
    const auto r = explore_serial(m, Chains::State{n, {}}, Limits{2, 100});
    // Prefixes of length 2: c0c0, c0c1, c1c0, c1c1.
    CHECK(r.schedules_explored == 4);
    CHECK(r.truncated == 4);
    CHECK(r.max_depth == 2);
    CHECK(explore_parallel(m, Chains::State{n, {}}, Limits{2, 100}) == r);
}

TEST_CASE("non-terminating completion is reported")
{
    const Spinner m;
    const auto r = explore_serial(m, 0, Limits{3, 50});
    CHECK(r.schedules_explored == 1);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].property == kNonTerminating);
}
