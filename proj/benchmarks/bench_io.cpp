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
#include "n2n/mps.hpp"
#include "n2n/protocol.hpp"

using namespace n2n;

namespace {

proto::TaskResult sample_result(std::size_t open) {
    const auto inst = bench::knapsack(4, 40, 4);
    bnb::SolverConfig cfg;
    cfg.node_limit = static_cast<std::int64_t>(open);
    return {1, bnb::solve_subproblem(inst, {}, cfg)};
}

} // namespace

static void BM_EncodeTaskResult(benchmark::State &state) {
    const proto::Message m = sample_result(static_cast<std::size_t>(state.range(0)));
    std::size_t bytes = 0;
    for (auto _ : state) {
        auto b = proto::encode(m);
        bytes += b.size();
        benchmark::DoNotOptimize(b.data());
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(bytes));
}
BENCHMARK(BM_EncodeTaskResult)->Arg(10)->Arg(200);

static void BM_DecodeTaskResult(benchmark::State &state) {
    const auto b = proto::encode(sample_result(static_cast<std::size_t>(state.range(0))));
    for (auto _ : state)
        benchmark::DoNotOptimize(proto::decode(b));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * b.size()));
}
BENCHMARK(BM_DecodeTaskResult)->Arg(10)->Arg(200);

static void BM_InstanceHash(benchmark::State &state) {
    const auto mps = write_mps(bench::knapsack(5, static_cast<int>(state.range(0)), 16));
    for (auto _ : state)
        benchmark::DoNotOptimize(proto::instance_hash(mps));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * mps.size()));
}
BENCHMARK(BM_InstanceHash)->Arg(100)->Arg(1000);

static void BM_MpsWrite(benchmark::State &state) {
    const auto inst = bench::knapsack(6, static_cast<int>(state.range(0)), 16);
    for (auto _ : state)
        benchmark::DoNotOptimize(write_mps(inst));
}
BENCHMARK(BM_MpsWrite)->Arg(100)->Arg(1000);

static void BM_MpsRead(benchmark::State &state) {
    const auto text = write_mps(bench::knapsack(7, static_cast<int>(state.range(0)), 16));
    for (auto _ : state)
        benchmark::DoNotOptimize(read_mps(text));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_MpsRead)->Arg(100)->Arg(1000);
