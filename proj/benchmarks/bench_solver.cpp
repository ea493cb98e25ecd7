/*
Copyright 2026 The n2n-lite Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "n2n/bnb.hpp"
#include "n2n/lp.hpp"

using namespace n2n;

static void BM_RootRelaxation(benchmark::State &state) {
    const auto inst = bench::knapsack(1, static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    std::int64_t iters = 0;
    for (auto _ : state) {
        auto r = lp::solve_relaxation(inst);
        iters += r.iterations;
        benchmark::DoNotOptimize(r.objective);
    }
    state.counters["pivots"] = benchmark::Counter(static_cast<double>(iters), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_RootRelaxation)->Args({20, 3})->Args({60, 8})->Args({120, 16});

static void BM_SubtreeSolve(benchmark::State &state) {
    const auto inst = bench::knapsack(2, static_cast<int>(state.range(0)), 4);
    bnb::SolverConfig cfg;
    cfg.node_limit = state.range(1);
    for (auto _ : state) {
        auto out = bnb::solve_subproblem(inst, {}, cfg);
        benchmark::DoNotOptimize(out.dual_bound);
        state.counters["nodes"] = static_cast<double>(out.nodes_processed);
    }
}
BENCHMARK(BM_SubtreeSolve)->Args({20, 200})->Args({40, 200})->Args({40, 2000})->Unit(benchmark::kMillisecond);

static void BM_Propagate(benchmark::State &state) {
    const auto inst = bench::knapsack(3, 60, 8);
    for (auto _ : state) {
        auto boxes = inst.boxes();
        boxes[0] = {1, 1};
        benchmark::DoNotOptimize(bnb::propagate(inst, boxes, {}));
    }
}
BENCHMARK(BM_Propagate);
