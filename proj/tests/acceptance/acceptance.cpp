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

// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "messages.hpp"
#include "n2n/heuristics.hpp"
#include "n2n/metrics.hpp"
#include "n2n/mps.hpp"
#include "n2n/orchestrate.hpp"
#include "n2n/runner.hpp"
#include "oracle.hpp"

using namespace n2n;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
    /// Minimum hardware threads the criterion needs to be meaningful.
    unsigned needs_threads = 1;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::pair<std::string, MilpInstance>> oracle_suite() {
    auto out = testkit::hand_fixtures();
    for (std::uint64_t s = 0; s < 200; ++s)
        out.emplace_back("random" + std::to_string(s), testkit::random_milp(s));
    return out;
}

// --- 1 --------------------------------------------------------------------

Outcome oracle_correctness() {
    const auto t0 = Clock::now();
    const auto suite = oracle_suite();
    std::size_t runs = 0, bad = 0;
    std::string first_bad;
    for (const auto &[name, inst] : suite) {
        const auto o = testkit::brute_force(inst);
        for (auto mode : {orch::Mode::Deterministic, orch::Mode::Nondeterministic}) {
            for (std::size_t workers : {1, 2, 4, 8}) {
                orch::RunOptions opts;
                opts.mode = mode;
                opts.workers = workers;
                // Small tasks so even tiny trees are spread over workers.
                opts.det_task_nodes = 2;
                opts.nondet_task_nodes = 2;
                opts.racing_nodes = 3;
                opts.racing_report_every = 1;
                const auto r = orch::solve_local(inst, opts);
                ++runs;
                bool ok;
                if (!o.feasible) {
                    ok = r.verdict == orch::Verdict::Infeasible;
                } else {
                    ok = r.verdict == orch::Verdict::Optimal && std::abs(r.primal_bound - o.objective) <= 1e-6 &&
                         r.solution && testkit::oracle_feasible(inst, r.solution->values) &&
                         std::abs(r.solution->objective - o.objective) <= 1e-6;
                }
                if (!ok && bad++ == 0)
                    first_bad = fmt::format("{} {} {}w: {} {} vs oracle {}", name, orch::to_string(mode), workers,
                                            orch::to_string(r.verdict), r.primal_bound,
                                            o.feasible ? fmt::format("{}", o.objective) : "infeasible");
            }
        }
    }
    const double t = seconds_since(t0);
    Outcome out;
    out.pass = bad == 0 && t < 300.0;
    out.detail = fmt::format("{} instances x 2 modes x 4 worker counts = {} runs, {} mismatches, {:.1f} s", suite.size(),
                             runs, bad, t);
    if (bad)
        out.detail += "; first: " + first_bad;
    return out;
}

// --- 2 and 3 ---------------------------------------------------------------

struct DeterminismStats {
    std::size_t instances = 0, runs = 0, mismatches = 0, invariant_failures = 0, min_tasks = ~std::size_t{0},
                max_tasks = 0;
    std::string first_problem;
};

orch::RunOptions det_suite_options(std::size_t workers) {
    orch::RunOptions o;
    o.mode = orch::Mode::Deterministic;
    o.workers = workers;
    o.window = 8;
    o.det_task_nodes = 20;
    return o;
}

// Merge ids must read 0, 1, 2, ... with no gaps.
bool gapless(const std::vector<std::string> &log) {
    for (std::size_t i = 0; i < log.size(); ++i)
        if (log[i].substr(0, log[i].find(' ')) != std::to_string(i))
            return false;
    return true;
}

std::vector<std::size_t> adversarial_script(int kind, std::size_t len, std::uint64_t seed) {
    std::vector<std::size_t> s(len);
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < len; ++i) {
        switch (kind) {
        case 0: // newest message first
            s[i] = std::numeric_limits<std::size_t>::max();
            break;
        case 1: // oldest first
            s[i] = 0;
            break;
        case 2: // alternate ends
            s[i] = i % 2 ? 0 : std::numeric_limits<std::size_t>::max();
            break;
        default: // second newest, which tends to reorder task results
            s[i] = std::numeric_limits<std::size_t>::max() - 1 - (rng() % 2);
            break;
        }
    }
    return s;
}

const DeterminismStats &determinism_suite() {
    static const DeterminismStats stats = [] {
        DeterminismStats st;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto inst = testkit::synthetic_hard(seed, 20, 3);
            ++st.instances;
            std::optional<orch::RunResult> ref;
            auto compare = [&](const std::string &label, const std::function<orch::RunResult()> &run) {
                ++st.runs;
                orch::RunResult r;
                try {
                    r = run();
                } catch (const ContractViolation &e) {
                    if (st.invariant_failures++ == 0 && st.first_problem.empty())
                        st.first_problem = fmt::format("instance {} {}: {}", seed, label, e.what());
                    return;
                }
                if (!gapless(r.merge_log)) {
                    if (st.invariant_failures++ == 0 && st.first_problem.empty())
                        st.first_problem = fmt::format("instance {} {}: merge ids have gaps", seed, label);
                }
                if (!ref) {
                    ref = r;
                    st.min_tasks = std::min<std::size_t>(st.min_tasks, r.tasks);
                    st.max_tasks = std::max<std::size_t>(st.max_tasks, r.tasks);
                    return;
                }
                const bool same = r.merge_log == ref->merge_log && r.primal_bound == ref->primal_bound &&
                                  r.nodes == ref->nodes && r.tasks == ref->tasks && r.verdict == ref->verdict;
                if (!same && st.mismatches++ == 0 && st.first_problem.empty())
                    st.first_problem = fmt::format("instance {} {} differs from 1 worker", seed, label);
            };
            for (std::size_t w : {1, 2, 4, 8})
                compare(fmt::format("{} workers", w), [&] { return orch::solve_local(inst, det_suite_options(w)); });
            for (int k = 0; k < 24; ++k) {
                const std::size_t workers = 2 + static_cast<std::size_t>(k % 7);
                auto script = k < 8 ? adversarial_script(k % 4, 1 << 16, static_cast<std::uint64_t>(k))
                                    : std::vector<std::size_t>{};
                compare(fmt::format("scripted order {} ({} workers)", k, workers), [&] {
                    return orch::solve_scripted(inst, det_suite_options(workers), script,
                                                1000 * seed + static_cast<std::uint64_t>(k));
                });
            }
        }
        return st;
    }();
    return stats;
}

Outcome determinism() {
    const auto t0 = Clock::now();
    const auto &st = determinism_suite();
    Outcome out;
    out.pass = st.mismatches == 0 && st.invariant_failures == 0 && st.min_tasks >= 2;
    out.detail = fmt::format("{} instances, {} runs (workers 1/2/4/8 and 24 scripted orders each), W=8, "
                             "{} to {} tasks per instance, {} mismatching histories, {:.1f} s",
                             st.instances, st.runs, st.min_tasks, st.max_tasks, st.mismatches, seconds_since(t0));
    if (!st.first_problem.empty())
        out.detail += "; " + st.first_problem;
    return out;
}

Outcome window_invariants() {
    const auto &st = determinism_suite();
    Outcome out;
    out.pass = st.invariant_failures == 0 && st.runs > 0;
    out.detail = fmt::format("{} supervised runs with in-loop window checks, {} violations", st.runs,
                             st.invariant_failures);
    if (!st.first_problem.empty())
        out.detail += "; " + st.first_problem;
    return out;
}

// --- 4 and 5 ---------------------------------------------------------------

struct SmokeInstance {
    std::uint64_t seed;
    MilpInstance inst;
    double t1;
    double objective;
};

struct SmokeBatch {
    std::vector<SmokeInstance> items;
    std::size_t candidates = 0;
};

// Instances whose single-worker nondeterministic solve takes 5 to 30 s on
// this machine.
const SmokeBatch &smoke_batch() {
    static const SmokeBatch batch = [] {
        SmokeBatch b;
        for (std::uint64_t seed = 100; b.items.size() < 10 && b.candidates < 40; ++seed) {
            ++b.candidates;
            auto inst = testkit::synthetic_hard(seed, 60, 8);
            orch::RunOptions o;
            o.workers = 1;
            o.limits.time_limit_s = 30.0;
            const auto r = orch::solve_local(inst, o);
            std::fprintf(stderr, "  smoke candidate %llu: %s in %.2f s\n", static_cast<unsigned long long>(seed),
                         std::string(orch::to_string(r.verdict)).c_str(), r.wall_s);
            if (r.verdict == orch::Verdict::Optimal && r.wall_s >= 5.0 && r.wall_s <= 30.0)
                b.items.push_back({seed, std::move(inst), r.wall_s, r.primal_bound});
        }
        return b;
    }();
    return batch;
}

Outcome speedup() {
    const auto t0 = Clock::now();
    const auto &b = smoke_batch();
    Outcome out;
    out.needs_threads = 8;
    std::vector<double> t1, t8;
    std::size_t wrong = 0;
    for (const auto &it : b.items) {
        orch::RunOptions o;
        o.workers = 8;
        const auto r = orch::solve_local(it.inst, o);
        std::fprintf(stderr, "  smoke %llu: 1 worker %.2f s, 8 workers %.2f s\n",
                     static_cast<unsigned long long>(it.seed), it.t1, r.wall_s);
        t1.push_back(it.t1);
        t8.push_back(r.wall_s);
        wrong += !(r.verdict == orch::Verdict::Optimal && std::abs(r.primal_bound - it.objective) <= 1e-6);
    }
    if (b.items.size() < 10) {
        out.detail = fmt::format("only {} of {} candidates took 5-30 s with one worker", b.items.size(), b.candidates);
        return out;
    }
    const double s1 = cli::sgm(t1), s8 = cli::sgm(t8);
    const double t = seconds_since(t0);
    out.pass = wrong == 0 && s1 / s8 >= 1.5 && t < 1800.0;
    out.detail = fmt::format("10 instances, SGM 1 worker {:.2f} s, 8 workers {:.2f} s, speedup {:.2f} (need >= 1.5), "
                             "{} wrong objectives, {:.0f} s",
                             s1, s8, s1 / s8, wrong, t);
    return out;
}

Outcome deterministic_viability() {
    const auto &b = smoke_batch();
    Outcome out;
    out.needs_threads = 4;
    if (b.items.size() < 10) {
        out.detail = "smoke batch unavailable";
        return out;
    }
    std::vector<double> t1, t4;
    std::size_t differ = 0;
    for (const auto &it : b.items) {
        auto o = det_suite_options(1);
        o.det_task_nodes = 200;
        const auto r1 = orch::solve_local(it.inst, o);
        o.workers = 4;
        const auto r4 = orch::solve_local(it.inst, o);
        std::fprintf(stderr, "  det %llu: 1 worker %.2f s, 4 workers %.2f s\n",
                     static_cast<unsigned long long>(it.seed), r1.wall_s, r4.wall_s);
        t1.push_back(r1.wall_s);
        t4.push_back(r4.wall_s);
        differ += r1.merge_log != r4.merge_log || r1.primal_bound != r4.primal_bound || r1.nodes != r4.nodes ||
                  std::abs(r1.primal_bound - it.objective) > 1e-6;
    }
    const double s1 = cli::sgm(t1), s4 = cli::sgm(t4);
    out.pass = differ == 0 && s1 / s4 >= 1.0;
    out.detail = fmt::format("W=8, SGM 1 worker {:.2f} s, 4 workers {:.2f} s, ratio {:.3f} (need >= 1.0), "
                             "{} instances with differing histories",
                             s1, s4, s1 / s4, differ);
    return out;
}

// --- 6 ---------------------------------------------------------------------

Outcome presolve_heuristic_safety() {
    const std::vector<presolve::Strategy> all{presolve::Strategy::Off, presolve::Strategy::Light,
                                              presolve::Strategy::Aggressive};
    std::size_t presolve_checks = 0, fj_checks = 0, one_opt_checks = 0, crossover_checks = 0, bad = 0;
    std::string first_bad;
    auto fail = [&](const std::string &what) {
        if (bad++ == 0)
            first_bad = what;
    };
    for (const auto &[name, inst] : oracle_suite()) {
        const auto o = testkit::brute_force(inst);
        for (auto st : all) {
            ++presolve_checks;
            const auto r = presolve::presolve(inst, st);
            if (r.infeasible) {
                if (o.feasible)
                    fail(name + ": presolve claims infeasibility");
                continue;
            }
            const auto p = testkit::brute_force(r.instance);
            if (p.feasible != o.feasible) {
                fail(name + ": presolve changed feasibility");
                continue;
            }
            if (!p.feasible)
                continue;
            if (std::abs(p.objective - o.objective) > 1e-6)
                fail(fmt::format("{} {}: presolved optimum {} vs {}", name, presolve::to_string(st), p.objective,
                                 o.objective));
            const auto back = presolve::postsolve_solution(r.map, make_solution(r.instance, p.values));
            if (!testkit::oracle_feasible(inst, back.values) || std::abs(back.objective - o.objective) > 1e-6)
                fail(name + ": postsolved optimum is not an optimum of the original");
        }

        heur::SolutionPool pool;
        for (std::int64_t effort : {1, 10, 100, 1000, 10000}) {
            auto fj = heur::feasibility_jump(inst, std::nullopt, effort);
            if (!fj)
                continue;
            ++fj_checks;
            if (!testkit::oracle_feasible(inst, fj->values)) {
                fail(name + ": feasibility_jump returned an infeasible point");
                continue;
            }
            ++one_opt_checks;
            const auto improved = heur::one_opt(inst, *fj);
            if (!testkit::oracle_feasible(inst, improved.values) || improved.objective > fj->objective + 1e-9)
                fail(name + ": one_opt worsened or broke a solution");
            pool.add(*fj);
            pool.add(improved);
        }
        if (o.feasible)
            pool.add(make_solution(inst, o.values));
        if (auto d = heur::crossover_delta(inst, pool)) {
            bnb::SolverConfig cfg;
            cfg.node_limit = 100000;
            const auto sub = bnb::solve_subproblem(inst, *d, cfg);
            ++crossover_checks;
            if (sub.best_solution && !testkit::oracle_feasible(inst, sub.best_solution->values))
                fail(name + ": crossover sub-MIP solution is infeasible");
        }
    }
    Outcome out;
    out.pass = bad == 0 && fj_checks > 0 && crossover_checks > 0;
    out.detail = fmt::format("{} presolve optimum checks, {} feasibility_jump outputs, {} one_opt calls, "
                             "{} crossover sub-MIPs, {} violations",
                             presolve_checks, fj_checks, one_opt_checks, crossover_checks, bad);
    if (bad)
        out.detail += "; first: " + first_bad;
    return out;
}

// --- 7 ---------------------------------------------------------------------

// Each worker streams `n` numbered Stats; true if every stream arrives in order.
bool fifo_check(proto::SupervisorHub &hub, const std::vector<proto::WorkerLink *> &links, int n) {
    std::vector<std::thread> senders;
    for (std::size_t w = 0; w < links.size(); ++w)
        senders.emplace_back([&, w] {
            for (int i = 0; i < n; ++i)
                links[w]->send(proto::Stats{w, static_cast<std::uint64_t>(i)});
        });
    std::vector<std::uint64_t> next(links.size(), 0);
    bool ok = true;
    for (std::size_t k = 0; k < links.size() * static_cast<std::size_t>(n); ++k) {
        auto r = hub.recv_any(20000);
        if (!r.ok()) {
            ok = false;
            break;
        }
        const auto &s = std::get<proto::Stats>(r.msg);
        ok = ok && s.nodes == static_cast<std::uint64_t>(r.from) && s.effort == next[static_cast<std::size_t>(r.from)]++;
    }
    for (auto &t : senders)
        t.join();
    for (int i = 0; i < n; ++i)
        for (std::size_t w = 0; w < links.size(); ++w)
            hub.send(static_cast<int>(w), proto::Interrupt{static_cast<TaskId>(i)});
    for (auto *l : links)
        for (int i = 0; i < n; ++i) {
            auto r = l->recv();
            ok = ok && r.ok() && std::get<proto::Interrupt>(r.msg).task_id == static_cast<TaskId>(i);
        }
    return ok;
}

Outcome codec_and_transport() {
    std::vector<std::string> problems;

    std::mt19937_64 rng(7);
    std::size_t mismatches = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto m = testkit::random_message(rng);
        const auto b = proto::encode(m);
        if (!(proto::decode(b) == m) || proto::encode(proto::decode(b)) != b)
            ++mismatches;
    }
    if (mismatches)
        problems.push_back(fmt::format("{} fuzz mismatches", mismatches));

    {
        const auto mps = write_mps(testkit::hand_fixtures().at(0).second);
        const auto hash = proto::instance_hash(mps);
        auto corrupted = mps;
        corrupted[corrupted.size() / 2] ^= 0x20;
        orch::WorkerSession w(orch::WorkerOptions{});
        proto::ScriptedHub hub({&w}, {}, 0);
        hub.recv_any();
        bool caught = false;
        try {
            hub.send(0, proto::InstanceFile{corrupted, hash});
        } catch (const ConsistencyError &) {
            caught = true;
        }
        if (!caught)
            problems.push_back("corrupted instance accepted");
    }

    {
        proto::LocalNetwork net(4);
        std::vector<proto::WorkerLink *> links;
        for (std::size_t i = 0; i < 4; ++i)
            links.push_back(&net.worker(i));
        if (!fifo_check(net.hub(), links, 2000))
            problems.push_back("local FIFO violated");
    }
    {
        proto::TcpListener listener("127.0.0.1:0");
        const auto ep = fmt::format("127.0.0.1:{}", listener.port());
        std::vector<std::unique_ptr<proto::WorkerLink>> owned(4);
        std::vector<std::thread> conn;
        for (std::size_t i = 0; i < owned.size(); ++i)
            conn.emplace_back([&, i] {
                owned[i] = proto::tcp_connect(ep, 5000);
                owned[i]->send(proto::Hello{static_cast<std::uint32_t>(i), 0});
            });
        auto hub = listener.accept(owned.size(), 5000);
        for (auto &t : conn)
            t.join();
        std::vector<proto::WorkerLink *> links(owned.size());
        for (std::size_t k = 0; k < owned.size(); ++k) {
            auto r = hub->recv_any(5000);
            links[static_cast<std::size_t>(r.from)] = owned[std::get<proto::Hello>(r.msg).worker_id].get();
        }
        if (!fifo_check(*hub, links, 2000))
            problems.push_back("TCP FIFO violated");
        for (auto &l : owned)
            l->close();
        hub->close();
    }

    const auto fixture = testkit::data_dir() / "fixtures" / "f14_general_int.mps";
    for (auto mode : {orch::Mode::Nondeterministic, orch::Mode::Deterministic}) {
        cli::RunParams p;
        p.mode = mode;
        p.workers = 3;
        p.window = 6;
        p.det_task_nodes = 2;
        p.nondet_task_nodes = 2;
        p.racing_nodes = 3;
        const auto local = cli::run_solve(p, fixture);
        p.transport = cli::Transport::Tcp;
        const auto tcp = cli::run_solve(p, fixture);
        const bool same = mode == orch::Mode::Deterministic
                              ? cli::format_report(local, false) == cli::format_report(tcp, false)
                              : local.verdict == tcp.verdict && std::abs(local.objective - tcp.objective) <= 1e-6;
        if (!same)
            problems.push_back(fmt::format("TCP and local {} solves differ", orch::to_string(mode)));
    }

    Outcome out;
    out.pass = problems.empty();
    out.detail = "10000-message fuzz round trip, corrupted InstanceFile, FIFO on local and TCP, TCP vs local solve";
    for (const auto &p : problems)
        out.detail += "; " + p;
    return out;
}

// --- 8 ---------------------------------------------------------------------

Outcome mps_round_trip() {
    const auto files = testkit::all_mps_files();
    std::size_t bad = 0, ranged = 0, free_cols = 0, integral = 0;
    std::set<std::string> bound_types;
    std::string first_bad;
    for (const auto &f : files) {
        try {
            const auto a = read_mps_file(f);
            const auto text = write_mps(a);
            const auto b = read_mps(text);
            if (!(a == b) || write_mps(b) != text) {
                if (bad++ == 0)
                    first_bad = f.filename().string();
            }
            for (const auto &r : a.rows())
                ranged += std::isfinite(r.lhs) && std::isfinite(r.rhs) && r.lhs != r.rhs;
            for (const auto &c : a.cols()) {
                free_cols += c.lower == -kInf && c.upper == kInf;
                integral += c.integral;
            }
            std::ifstream in(f);
            std::string line;
            bool in_bounds = false;
            while (std::getline(in, line)) {
                if (!line.empty() && line[0] != ' ')
                    in_bounds = line.rfind("BOUNDS", 0) == 0;
                else if (in_bounds) {
                    std::istringstream ls(line);
                    std::string type;
                    ls >> type;
                    bound_types.insert(type);
                }
            }
        } catch (const std::exception &e) {
            if (bad++ == 0)
                first_bad = f.filename().string() + ": " + e.what();
        }
    }
    Outcome out;
    out.pass = bad == 0 && files.size() >= 25 && ranged > 0 && free_cols > 0 && integral > 0 && bound_types.size() >= 9;
    std::string types;
    for (const auto &t : bound_types)
        types += (types.empty() ? "" : " ") + t;
    out.detail = fmt::format("{} files, {} fixpoint failures; corpus has {} ranged rows, {} free columns, {} integer "
                             "columns, bound types {}",
                             files.size(), bad, ranged, free_cols, integral, types);
    if (bad)
        out.detail += "; first: " + first_bad;
    return out;
}

// --- 9 ---------------------------------------------------------------------

Outcome metrics() {
    std::vector<std::string> problems;
    const std::vector<double> pair{90, 390};
    if (cli::sgm(pair, 10) != 190.0)
        problems.push_back(fmt::format("sgm((90,390),10) = {:.17g}", cli::sgm(pair, 10)));
    for (double t : {0.0, 1.0, 2.5, 42.0, 1234.5})
        for (double shift : {0.0, 10.0})
            if (std::abs(cli::sgm(std::vector<double>(5, t), shift) - t) > 1e-12 * std::max(1.0, t))
                problems.push_back(fmt::format("constant sequence {} shift {}", t, shift));

    const std::vector<double> base{3, 30, 300, 0.5}, fast{1, 12, 100, 0.5};
    std::vector<cli::BatchEntry> entries;
    for (std::size_t i = 0; i < base.size(); ++i)
        entries.push_back({"1 worker", {}, fmt::format("inst{}", i)});
    for (std::size_t i = 0; i < fast.size(); ++i)
        entries.push_back({"8 workers", {}, fmt::format("inst{}", i)});
    std::size_t k = 0;
    const auto res = cli::batch_run(entries, [&](const cli::BatchEntry &) {
        const std::size_t i = k++;
        cli::BatchCell c;
        c.verdict = "optimal";
        c.time_s = i < base.size() ? base[i] : fast[i - base.size()];
        return c;
    });
    // Hand-computed SGM as an n-th root of a product.
    auto hand = [](const std::vector<double> &t) {
        long double p = 1;
        for (double x : t)
            p *= x + 10.0L;
        return static_cast<double>(std::pow(p, 1.0L / t.size()) - 10.0L);
    };
    const double expected = hand(base) / hand(fast);
    std::istringstream csv(cli::batch_csv(res));
    std::string line;
    double got = -1;
    while (std::getline(csv, line))
        if (line.rfind("8 workers,", 0) == 0 && std::count(line.begin(), line.end(), ',') == 3)
            got = std::stod(line.substr(line.rfind(',') + 1));
    if (!(std::abs(got - expected) <= 1e-9))
        problems.push_back(fmt::format("CSV speedup {} vs hand-computed {}", got, expected));

    Outcome out;
    out.pass = problems.empty();
    out.detail = fmt::format("sgm((90,390),10) = {}, constant sequences, CSV speedup {:.12f}", cli::sgm(pair, 10), got);
    for (const auto &p : problems)
        out.detail += "; " + p;
    return out;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"n2n-lite acceptance suite"};
    std::vector<int> only;
    app.add_option("--only", only, "Run only these criteria")->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"oracle correctness", oracle_correctness},
        {"determinism", determinism},
        {"window invariants", window_invariants},
        {"speedup smoke test", speedup},
        {"deterministic-mode viability", deterministic_viability},
        {"presolve and heuristic safety", presolve_heuristic_safety},
        {"codec and transport", codec_and_transport},
        {"MPS round trip", mps_round_trip},
        {"metrics", metrics},
    };
    const unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end())
            continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception &e) {
            o.pass = false;
            o.detail = fmt::format("exception: {}", e.what());
        }
        std::string note;
        if (!o.pass && threads < o.needs_threads)
            note = fmt::format(" [host has {} hardware thread(s), criterion needs {}]", threads, o.needs_threads);
        else if (!o.pass)
            ++failures;
        std::printf("%s criterion %d (%s): %s%s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                    o.detail.c_str(), note.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
