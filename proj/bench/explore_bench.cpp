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

// Serial versus OpenMP schedule exploration over the policy sweep.

#include <benchmark/benchmark.h>

#include "sedg/harness.hpp"

namespace {

using namespace sedg;

harness::ScenarioConfig bench_config(int variant)
{
    harness::ScenarioConfig c;
    c.variant = static_cast<cert::Variant>(variant);
    c.group = "test";
    c.seed = 11;
    return c;
}

void run_sweep(benchmark::State& state, bool parallel)
{
    const harness::ScenarioConfig c = bench_config(static_cast<int>(state.range(0)));
    harness::ExploreOptions opts;
    opts.parallel = parallel;
    std::uint64_t schedules = 0;
    for (auto _ : state) {
        const auto sweep = harness::explore_policies(c, opts);
        for (const auto& e : sweep) {
            schedules += e.result.schedules_explored;
        }
        benchmark::DoNotOptimize(schedules);
    }
    state.counters["schedules/s"] =
        benchmark::Counter(static_cast<double>(schedules), benchmark::Counter::kIsRate);
}

void BM_ExploreSerial(benchmark::State& state) { run_sweep(state, false); }
void BM_ExploreParallel(benchmark::State& state) { run_sweep(state, true); }

BENCHMARK(BM_ExploreSerial)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExploreParallel)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
