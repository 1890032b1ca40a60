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

// Bounded exhaustive schedule exploration over a deterministic model.
//
// A model exposes the actions enabled in a state and a way to apply one. The
// explorer walks every sequence of choices up to the depth bound, copying the
// state at each branch, and evaluates the model's invariants at every
// terminal state (no action enabled). A branch that hits the depth bound is
// driven to quiescence by always taking the first enabled action, so every
// explored schedule ends in a checked terminal state.
//
// explore_serial is the reference walk. explore_parallel expands the tree
// breadth-first until the frontier is wide enough, then walks the frontier
// subtrees on OpenMP threads; results are merged and sorted, so both produce
// identical ExplorationResults.

#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <string>
#include <vector>

#include <omp.h>

namespace sedg::explore {

struct Violation
{
    std::vector<std::string> trace;
    std::string property;

    auto operator<=>(const Violation&) const = default;
};

struct ExplorationResult
{
    std::uint64_t schedules_explored = 0;
    std::vector<Violation> violations;
    std::size_t max_depth = 0;
    std::uint64_t truncated = 0;

    void merge(ExplorationResult&& o)
    {
        schedules_explored += o.schedules_explored;
        truncated += o.truncated;
        max_depth = std::max(max_depth, o.max_depth);
        violations.insert(violations.end(), std::make_move_iterator(o.violations.begin()),
                          std::make_move_iterator(o.violations.end()));
    }

    void normalize() { std::sort(violations.begin(), violations.end()); }

    bool operator==(const ExplorationResult&) const = default;
};

struct Limits
{
    std::size_t depth = 12;
    // Steps allowed when driving a truncated branch to quiescence.
    std::size_t completion_limit = 10000;
};

inline constexpr const char* kNonTerminating = "non_terminating";

template <class M>
concept Model = requires(const M& m, typename M::State& s, const typename M::State& cs,
                         const typename M::Action& a) {
    { m.enabled(cs) } -> std::convertible_to<std::vector<typename M::Action>>;
    m.apply(s, a);
    { m.check(cs) } -> std::convertible_to<std::vector<std::string>>;
    { m.describe(cs, a) } -> std::convertible_to<std::string>;
};

namespace detail {

template <Model M>
void evaluate(const M& m, const typename M::State& s, const std::vector<std::string>& trace,
              ExplorationResult& out)
{
    ++out.schedules_explored;
    out.max_depth = std::max(out.max_depth, trace.size());
    for (std::string& p : m.check(s)) {
        out.violations.push_back({trace, std::move(p)});
    }
}

template <Model M>
void complete(const M& m, typename M::State s, std::vector<std::string> trace, const Limits& lim,
              ExplorationResult& out)
{
    ++out.truncated;
    const std::size_t chosen = trace.size();
    for (std::size_t step = 0;; ++step) {
        auto acts = m.enabled(s);
        if (acts.empty()) {
            break;
        }
        if (step == lim.completion_limit) {
            ++out.schedules_explored;
            out.violations.push_back({std::move(trace), kNonTerminating});
            return;
        }
        trace.push_back("~" + m.describe(s, acts.front()));
        m.apply(s, acts.front());
    }
    // max_depth counts scheduler choices, not the forced completion.
    ++out.schedules_explored;
    out.max_depth = std::max(out.max_depth, chosen);
    for (std::string& p : m.check(s)) {
        out.violations.push_back({trace, std::move(p)});
    }
}

template <Model M>
void dfs(const M& m, typename M::State s, std::vector<std::string>& trace, const Limits& lim,
         ExplorationResult& out)
{
    auto acts = m.enabled(s);
    if (acts.empty()) {
        evaluate(m, s, trace, out);
        return;
    }
    if (trace.size() >= lim.depth) {
        complete(m, std::move(s), trace, lim, out);
        return;
    }
    for (std::size_t i = 0; i < acts.size(); ++i) {
        trace.push_back(m.describe(s, acts[i]));
        typename M::State child = (i + 1 == acts.size()) ? std::move(s) : s;
        m.apply(child, acts[i]);
        dfs(m, std::move(child), trace, lim, out);
        trace.pop_back();
    }
}

}  // namespace detail

template <Model M>
ExplorationResult explore_serial(const M& m, typename M::State init, const Limits& lim = {})
{
    ExplorationResult out;
    std::vector<std::string> trace;
    detail::dfs(m, std::move(init), trace, lim, out);
    out.normalize();
    return out;
}

// |min_frontier| = 0 picks four subtrees per OpenMP thread.
template <Model M>
ExplorationResult explore_parallel(const M& m, typename M::State init, const Limits& lim = {},
                                   std::size_t min_frontier = 0)
{
    struct Node
    {
        typename M::State state;
        std::vector<std::string> trace;
    };

    const std::size_t target =
        min_frontier != 0 ? min_frontier : 4 * static_cast<std::size_t>(omp_get_max_threads());

    ExplorationResult out;
    std::vector<Node> frontier;
    frontier.push_back(Node{std::move(init), {}});

    while (!frontier.empty() && frontier.size() < target) {
        std::vector<Node> next;
        for (Node& n : frontier) {
            auto acts = m.enabled(n.state);
            if (acts.empty()) {
                detail::evaluate(m, n.state, n.trace, out);
                continue;
            }
            if (n.trace.size() >= lim.depth) {
                detail::complete(m, std::move(n.state), n.trace, lim, out);
                continue;
            }
            for (const auto& a : acts) {
                Node child{n.state, n.trace};
                child.trace.push_back(m.describe(n.state, a));
                m.apply(child.state, a);
                next.push_back(std::move(child));
            }
        }
        frontier = std::move(next);
    }

    std::vector<ExplorationResult> partial(frontier.size());
    const auto count = static_cast<std::ptrdiff_t>(frontier.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        Node& n = frontier[static_cast<std::size_t>(i)];
        detail::dfs(m, std::move(n.state), n.trace, lim, partial[static_cast<std::size_t>(i)]);
    }
    for (ExplorationResult& p : partial) {
        out.merge(std::move(p));
    }
    out.normalize();
    return out;
}

}  // namespace sedg::explore
