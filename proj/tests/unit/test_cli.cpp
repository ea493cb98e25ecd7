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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "n2n/metrics.hpp"
#include "n2n/params.hpp"
#include "n2n/runner.hpp"
#include "oracle.hpp"

using namespace n2n;
using namespace n2n::cli;

namespace {

// Independent reference: the geometric mean as an n-th root of a product.
double sgm_ref(const std::vector<double> &t, double shift) {
    long double prod = 1.0L;
    for (double x : t)
        prod *= static_cast<long double>(x) + shift;
    return static_cast<double>(std::pow(prod, 1.0L / static_cast<long double>(t.size())) - shift);
}

std::filesystem::path fixture_path(const std::string &stem) {
    return testkit::data_dir() / "fixtures" / (stem + ".mps");
}

std::vector<std::string> csv_fields(const std::string &line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ','))
        out.push_back(f);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

} // namespace

TEST(Params, EmptyFileGivesDefaults) {
    const auto p = parse_params("");
    EXPECT_EQ(p, RunParams{});
    EXPECT_EQ(p.mode, orch::Mode::Nondeterministic);
    EXPECT_EQ(p.workers, 4u);
    EXPECT_EQ(p.transport, Transport::Local);
    EXPECT_EQ(parse_params("# only a comment\n\n   \n"), RunParams{});
}

TEST(Params, DeterministicWithWindow) {
    const auto p = parse_params("mode = deterministic\nwindow = 8   # W\n");
    EXPECT_EQ(p.mode, orch::Mode::Deterministic);
    EXPECT_EQ(p.window, 8u);
    EXPECT_EQ(p.run_options().effective_window(), 8u);
}

TEST(Params, AllKeys) {
    const auto p = parse_params("mode = nondeterministic\n"
                                "workers = 3\n"
                                "det_task_nodes = 50\n"
                                "nondet_task_nodes = 70\n"
                                "racing = false\n"
                                "racing_nodes = 9\n"
                                "gap_limit = 0.01\n"
                                "time_limit = 12.5\n"
                                "node_limit = 1000\n"
                                "transport = tcp\n"
                                "listen = 0.0.0.0:7000\n"
                                "connect = host:7000\n"
                                "memory_per_worker_mib = 512\n"
                                "seed = 11\n"
                                "fj_effort = 0\n"
                                "presolve = light, aggressive\n"
                                "log_level = debug\n");
    EXPECT_EQ(p.workers, 3u);
    EXPECT_EQ(p.det_task_nodes, 50);
    EXPECT_EQ(p.nondet_task_nodes, 70);
    EXPECT_FALSE(p.racing);
    EXPECT_EQ(p.racing_nodes, 9);
    EXPECT_DOUBLE_EQ(p.gap_limit, 0.01);
    EXPECT_DOUBLE_EQ(p.time_limit, 12.5);
    EXPECT_EQ(p.node_limit, 1000u);
    EXPECT_EQ(p.transport, Transport::Tcp);
    EXPECT_EQ(p.listen, "0.0.0.0:7000");
    EXPECT_EQ(p.connect, "host:7000");
    EXPECT_EQ(p.memory_per_worker_mib, 512u);
    EXPECT_EQ(p.seed, 11u);
    EXPECT_EQ(p.fj_effort, 0);
    EXPECT_EQ(p.presolve, (std::vector<presolve::Strategy>{presolve::Strategy::Light, presolve::Strategy::Aggressive}));
    EXPECT_EQ(p.log_level, "debug");
    const auto o = p.run_options();
    EXPECT_EQ(o.workers, 3u);
    // The budget is per worker; the orchestrator sees the total.
    EXPECT_EQ(o.memory_budget, 3 * (512ull << 20));
    EXPECT_DOUBLE_EQ(o.limits.time_limit_s, 12.5);
}

TEST(Params, Errors) {
    auto line_of = [](const std::string &text) -> std::size_t {
        try {
            parse_params(text);
        } catch (const ParamError &e) {
            return e.line();
        }
        return 0;
    };
    EXPECT_EQ(line_of("workers = 0\n"), 1u);
    EXPECT_EQ(line_of("mode = det\nbogus = 1\n"), 2u);
    EXPECT_EQ(line_of("seed = 1\nseed = 2\n"), 2u);
    EXPECT_EQ(line_of("workers = two\n"), 1u);
    EXPECT_EQ(line_of("workers = 2.5\n"), 1u);
    EXPECT_EQ(line_of("gap_limit = -1\n"), 1u);
    EXPECT_EQ(line_of("racing = maybe\n"), 1u);
    EXPECT_EQ(line_of("transport = udp\n"), 1u);
    EXPECT_EQ(line_of("presolve = heavy\n"), 1u);
    EXPECT_EQ(line_of("window\n"), 1u);
    EXPECT_EQ(line_of("window =\n"), 1u);
    EXPECT_EQ(line_of("\n\n = 3\n"), 3u);
}

TEST(Metrics, SgmExamples) {
    const std::vector<double> a{90, 390};
    EXPECT_EQ(sgm(a, 10), 190.0);
    EXPECT_EQ(sgm(std::vector<double>{0, 0}, 10), 0.0);
    for (double t : {0.0, 0.5, 3.0, 17.25, 1000.0})
        for (double s : {0.0, 1.0, 10.0})
            EXPECT_NEAR(sgm(std::vector<double>(7, t), s), t, 1e-12 * std::max(1.0, t)) << t << " " << s;
    EXPECT_THROW(sgm(std::vector<double>{}, 10), ContractViolation);
    EXPECT_THROW(sgm(std::vector<double>{-1}, 10), ContractViolation);
    EXPECT_THROW(sgm(std::vector<double>{1}, -1), ContractViolation);
}

TEST(Metrics, SgmMatchesReferenceAndIsShiftMonotone) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> t(0.0, 100.0);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> v(1 + rng() % 9);
        for (auto &x : v)
            x = t(rng);
        double mean = 0;
        for (double x : v)
            mean += x;
        mean /= static_cast<double>(v.size());
        double prev = kInf;
        for (double s : {0.0, 1.0, 5.0, 10.0, 100.0, 1e4}) {
            const double g = sgm(v, s);
            EXPECT_NEAR(g, sgm_ref(v, s), 1e-9 * std::max(1.0, g));
            const double dist = std::abs(g - mean);
            EXPECT_LE(dist, prev + 1e-9);
            prev = dist;
        }
    }
}

TEST(Batch, SpeedupColumnMatchesHandComputedRatios) {
    std::vector<BatchEntry> entries;
    const std::vector<double> base{4, 40, 400}, fast{2, 25, 100}, broken{1, 1};
    for (std::size_t i = 0; i < 3; ++i)
        entries.push_back({"base", {}, "i" + std::to_string(i)});
    for (std::size_t i = 0; i < 3; ++i)
        entries.push_back({"fast", {}, "i" + std::to_string(i)});
    entries.push_back({"broken", {}, "i0"});
    entries.push_back({"broken", {}, "i1"});
    entries.push_back({"broken", {}, "i2"});
    std::size_t k = 0;
    auto runner = [&](const BatchEntry &e) {
        const std::size_t i = k++;
        if (e.label == "broken" && i == 8)
            throw std::runtime_error("boom, with a comma");
        BatchCell c;
        c.verdict = "optimal";
        c.time_s = e.label == "base" ? base[i] : e.label == "fast" ? fast[i - 3] : broken[i - 6];
        return c;
    };
    const auto r = batch_run(entries, runner);
    ASSERT_EQ(r.summary.size(), 3u);
    EXPECT_EQ(r.summary[0].label, "base");
    EXPECT_EQ(r.summary[0].speedup, 1.0);
    EXPECT_EQ(r.summary[2].solved, 2u);
    EXPECT_EQ(r.cells[8].verdict, "error");

    const auto csv = batch_csv(r);
    std::stringstream ss(csv);
    std::string line;
    std::map<std::string, double> speedup;
    bool in_summary = false;
    while (std::getline(ss, line)) {
        if (line.empty())
            continue;
        if (line == "solver,# solved,SGM,Speedup") {
            in_summary = true;
            continue;
        }
        if (in_summary) {
            const auto f = csv_fields(line);
            ASSERT_EQ(f.size(), 4u);
            speedup[f[0]] = std::stod(f[3]);
        } else {
            EXPECT_EQ(csv_fields(line).size(), 8u) << line;
        }
    }
    const double b = sgm_ref(base, 10);
    EXPECT_NEAR(speedup.at("base"), 1.0, 1e-9);
    EXPECT_NEAR(speedup.at("fast"), b / sgm_ref(fast, 10), 1e-9);
    EXPECT_NEAR(speedup.at("broken"), b / sgm_ref(broken, 10), 1e-9);
}

TEST(Batch, SingleConfigurationHasUnitSpeedup) {
    const auto r = batch_run({{"only", {}, "x"}}, [](const BatchEntry &) {
        BatchCell c;
        c.verdict = "optimal";
        c.time_s = 3;
        return c;
    });
    EXPECT_EQ(r.summary.at(0).speedup, 1.0);
}

TEST(Batch, ManifestResolvesRelativePaths) {
    const auto dir = std::filesystem::temp_directory_path() / "n2n_manifest_test";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "det.set") << "mode = deterministic\nworkers = 2\n";
    std::ofstream(dir / "m.csv") << "label,params,instance\n# comment\ndet1,det.set,a.mps\ndefault,,/abs/b.mps\n";
    const auto m = read_manifest(dir / "m.csv");
    ASSERT_EQ(m.size(), 2u);
    EXPECT_EQ(m[0].params.workers, 2u);
    EXPECT_EQ(m[0].instance, (dir / "a.mps").string());
    EXPECT_EQ(m[1].params, RunParams{});
    EXPECT_EQ(m[1].instance, "/abs/b.mps");
    std::ofstream(dir / "bad.csv") << "name,instance\n";
    EXPECT_THROW(read_manifest(dir / "bad.csv"), std::runtime_error);
    std::filesystem::remove_all(dir);
}

TEST(Solve, KnapsackFixtureDeterministic) {
    RunParams p;
    p.mode = orch::Mode::Deterministic;
    p.window = 8;
    p.det_task_nodes = 2;
    p.workers = 1;
    const auto one = run_solve(p, fixture_path("f01_knapsack"));
    EXPECT_EQ(one.verdict, orch::Verdict::Optimal);
    EXPECT_NEAR(one.objective, -11, 1e-6);
    const auto inst = testkit::hand_fixtures().at(0).second;
    EXPECT_NEAR(one.objective, testkit::brute_force(inst).objective, 1e-6);
    ASSERT_TRUE(one.solution);
    const auto sol_text = format_solution(inst, *one.solution);
    EXPECT_EQ(sol_text.rfind("# objective = -11\n", 0), 0u);

    p.workers = 8;
    auto eight = run_solve(p, fixture_path("f01_knapsack"));
    // Worker counts are part of the report; everything else must match.
    eight.workers = one.workers;
    eight.active_workers = one.active_workers;
    EXPECT_EQ(format_report(eight, false), format_report(one, false));
    EXPECT_EQ(eight.solution->values, one.solution->values);
}

TEST(Solve, InfeasibleFixture) {
    for (auto mode : {orch::Mode::Deterministic, orch::Mode::Nondeterministic}) {
        RunParams p;
        p.mode = mode;
        const auto r = run_solve(p, fixture_path("f03_infeasible"));
        EXPECT_EQ(r.verdict, orch::Verdict::Infeasible);
        EXPECT_FALSE(r.solution);
    }
}

TEST(Solve, TcpMatchesLocal) {
    RunParams p;
    p.mode = orch::Mode::Deterministic;
    p.window = 4;
    p.det_task_nodes = 2;
    p.workers = 2;
    const auto local = run_solve(p, fixture_path("f14_general_int"));
    p.transport = Transport::Tcp;
    const auto tcp = run_solve(p, fixture_path("f14_general_int"));
    EXPECT_EQ(format_report(tcp, false), format_report(local, false));
}

TEST(Solve, MissingFileIsAnError) {
    EXPECT_ANY_THROW(run_solve(RunParams{}, std::filesystem::path("/nonexistent/x.mps")));
}
