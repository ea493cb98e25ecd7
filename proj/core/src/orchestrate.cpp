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

#include "n2n/orchestrate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "n2n/heuristics.hpp"
#include "n2n/mps.hpp"

namespace n2n::orch {

using namespace proto;
using Clock = std::chrono::steady_clock;

std::string_view to_string(Mode m) {
    return m == Mode::Deterministic ? "deterministic" : "nondeterministic";
}

Mode mode_from_string(std::string_view s) {
    if (s == "deterministic" || s == "det")
        return Mode::Deterministic;
    if (s == "nondeterministic" || s == "nondet")
        return Mode::Nondeterministic;
    throw ContractViolation(fmt::format("unknown mode '{}'", s));
}

std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::Running:
        return "running";
    case Verdict::Optimal:
        return "optimal";
    case Verdict::Infeasible:
        return "infeasible";
    case Verdict::Unbounded:
        return "unbounded";
    case Verdict::GapReached:
        return "gap_reached";
    case Verdict::LimitReached:
        return "limit_reached";
    }
    return "?";
}

double relative_gap(double primal, double dual) {
    if (primal == kInf || dual == -kInf)
        return kInf;
    if (primal <= dual)
        return 0.0;
    return (primal - dual) / std::max(1.0, std::abs(primal));
}

Verdict terminate_check(const SearchState &s, const Limits &limits) {
    if (s.unbounded)
        return Verdict::Unbounded;
    if (s.exhausted)
        return s.primal_bound < kInf ? Verdict::Optimal : Verdict::Infeasible;
    if (s.primal_bound < kInf) {
        const double gap = relative_gap(s.primal_bound, s.dual_bound);
        if (gap <= 0.0)
            return Verdict::Optimal;
        if (gap <= limits.gap)
            return Verdict::GapReached;
    }
    if (s.nodes >= limits.node_limit || s.elapsed_s >= limits.time_limit_s)
        return Verdict::LimitReached;
    return Verdict::Running;
}

std::uint64_t worker_memory_need(const MilpInstance &inst) {
    return (std::uint64_t{64} << 20) +
           64 * static_cast<std::uint64_t>(inst.num_nonzeros() + inst.num_cols() + inst.num_rows());
}

std::size_t choose_active_workers(const MilpInstance &inst, std::size_t workers, std::uint64_t memory_budget) {
    if (workers == 0)
        throw ContractViolation("at least one worker is required");
    if (memory_budget == 0)
        return workers;
    const auto fit = memory_budget / worker_memory_need(inst);
    return static_cast<std::size_t>(std::clamp<std::uint64_t>(fit, 1, workers));
}

void RunOptions::validate() const {
    if (workers == 0)
        throw ContractViolation("workers must be at least 1");
    if (det_task_nodes < 1 || nondet_task_nodes < 1 || racing_nodes < 1 || crossover_nodes < 1 ||
        cp_root_nodes < 1)
        throw ContractViolation("node limits must be at least 1");
    if (strategies.empty())
        throw ContractViolation("at least one presolve strategy is required");
    if (!(limits.gap >= 0.0))
        throw ContractViolation("gap limit must be non-negative");
    if (!(limits.time_limit_s > 0.0))
        throw ContractViolation("time limit must be positive");
    if (crossover_take < 2)
        throw ContractViolation("crossover needs at least two solutions");
}

Preprocessed preprocess(const MilpInstance &inst, const RunOptions &opts) {
    Preprocessed p;
    p.presolve = presolve::multi_presolve(inst, opts.strategies);
    const auto &pi = p.presolve.result.instance;
    p.cp_instance = !p.presolve.result.infeasible && !pi.has_objective();
    p.active_workers = choose_active_workers(pi, opts.workers, opts.memory_budget);
    p.mps = write_mps(pi);
    p.hash = instance_hash(p.mps);
    return p;
}

namespace {

std::optional<Solution> quick_incumbent(const MilpInstance &inst, std::int64_t effort) {
    if (effort <= 0)
        return std::nullopt;
    auto fj = heur::feasibility_jump(inst, std::nullopt, effort);
    if (fj)
        fj = heur::one_opt(inst, *fj);
    return fj;
}

bool solved(bnb::SolveStatus s) {
    return s == bnb::SolveStatus::SolvedOptimal || s == bnb::SolveStatus::SolvedInfeasible;
}

std::string hex(const Bytes &b) {
    std::string out;
    out.reserve(2 * b.size());
    for (auto c : b)
        fmt::format_to(std::back_inserter(out), "{:02x}", c);
    return out;
}

class Supervisor {
  public:
    Supervisor(const MilpInstance &inst, const RunOptions &opts, SupervisorHub &hub)
        : inst_(inst), opts_(opts), hub_(hub), t0_(Clock::now()) {}

    RunResult run() {
        opts_.validate();
        handshake();
        auto pre = preprocess(inst_, opts_);
        result_.presolve_used = pre.presolve.chosen;
        result_.active_workers = pre.active_workers;
        map_ = pre.presolve.result.map;
        spdlog::debug("presolve {} kept {} cols, {} rows; {} active workers",
                     presolve::to_string(pre.presolve.chosen), pre.presolve.result.instance.num_cols(),
                     pre.presolve.result.instance.num_rows(), pre.active_workers);

        if (pre.presolve.result.infeasible) {
            exhausted_ = true;
            return finish();
        }
        if (pre.presolve.result.instance.num_cols() == 0) {
            // Nothing to distribute: every column was fixed by presolve.
            presolved_ = pre.presolve.result.instance;
            bnb::SolverConfig cfg;
            cfg.node_limit = 1;
            absorb_local(bnb::solve_subproblem(presolved_, {}, cfg));
            return finish();
        }
        presolved_ = read_mps(pre.mps);
        for (std::size_t w = 0; w < hub_.num_workers(); ++w) {
            hub_.send(static_cast<int>(w), InstanceFile{pre.mps, pre.hash});
            hub_.send(static_cast<int>(w), Activate{w < pre.active_workers});
            if (w < pre.active_workers)
                active_.push_back(static_cast<int>(w));
        }

        if (pre.cp_instance && cp_root())
            return finish();

        if (opts_.mode == Mode::Deterministic)
            run_deterministic();
        else
            run_nondeterministic();
        return finish();
    }

  private:
    // --- shared state -----------------------------------------------------

    double elapsed() const { return std::chrono::duration<double>(Clock::now() - t0_).count(); }

    int timeout_ms() const {
        if (!std::isfinite(opts_.limits.time_limit_s))
            return -1;
        const double left = opts_.limits.time_limit_s - elapsed();
        return std::max(1, static_cast<int>(std::ceil(left * 1000.0)));
    }

    void handshake() {
        std::vector<bool> seen(hub_.num_workers(), false);
        std::size_t count = 0;
        while (count < hub_.num_workers()) {
            auto r = hub_.recv_any();
            if (r.status != RecvStatus::Ok)
                throw TransportError(fmt::format("worker {} went away during the handshake", r.from));
            if (!std::holds_alternative<Hello>(r.msg))
                throw ContractViolation(
                    fmt::format("expected Hello from worker {}, got {}", r.from, message_name(r.msg)));
            if (!seen[static_cast<std::size_t>(r.from)]) {
                seen[static_cast<std::size_t>(r.from)] = true;
                ++count;
            }
        }
    }

    // True when the solution improved the primal bound.
    bool add_solution(const Solution &sol) {
        if (sol.values.size() != presolved_.num_cols())
            throw ContractViolation("solution size does not match the presolved instance");
        if (!check_feasible(presolved_, sol, 1e-5, 1e-5).feasible) {
            spdlog::warn("discarding an infeasible solution with objective {}", sol.objective);
            return false;
        }
        sols_.add(sol);
        if (sol.objective < primal_) {
            primal_ = sol.objective;
            best_ = sol;
            return true;
        }
        return false;
    }

    void absorb_local(const bnb::SolveOutcome &out) {
        nodes_ += out.nodes_processed;
        effort_ += out.effort;
        if (out.best_solution)
            add_solution(*out.best_solution);
        if (out.status == bnb::SolveStatus::Unbounded)
            unbounded_ = true;
        exhausted_ = solved(out.status);
    }

    Verdict check(double dual) const {
        SearchState s;
        s.primal_bound = primal_;
        s.dual_bound = dual;
        s.exhausted = exhausted_;
        s.unbounded = unbounded_;
        s.nodes = nodes_;
        s.elapsed_s = elapsed();
        return terminate_check(s, opts_.limits);
    }

    // Pure feasibility instance: a short constraint-programming style dive.
    bool cp_root() {
        bnb::SolverConfig cfg;
        cfg.cp_emphasis = true;
        cfg.node_selection = bnb::NodeSelection::DepthFirst;
        cfg.node_limit = opts_.cp_root_nodes;
        const auto fj = quick_incumbent(presolved_, opts_.fj_effort);
        const auto out = bnb::solve_subproblem(presolved_, {}, cfg, kInf, fj);
        absorb_local(out);
        spdlog::debug("cp root: {} after {} nodes", bnb::to_string(out.status), out.nodes_processed);
        return exhausted_ || unbounded_;
    }

    // Waits for every running task after asking it to stop. With `keep`,
    // their solutions and work counts are absorbed; deterministic runs pass
    // false so only merged results ever count.
    void drain(std::map<int, Task> &busy, bool keep) {
        for (const auto &[w, t] : busy)
            hub_.send(w, Interrupt{t.id});
        while (!busy.empty()) {
            auto r = hub_.recv_any();
            if (r.status == RecvStatus::Closed)
                throw TransportError(fmt::format("worker {} disconnected", r.from));
            if (r.status != RecvStatus::Ok)
                continue;
            if (const auto *tr = std::get_if<TaskResult>(&r.msg)) {
                busy.erase(r.from);
                if (!keep)
                    continue;
                nodes_ += tr->outcome.nodes_processed;
                effort_ += tr->outcome.effort;
                if (tr->outcome.best_solution)
                    add_solution(*tr->outcome.best_solution);
            } else if (const auto *iu = std::get_if<IncumbentUpdate>(&r.msg)) {
                if (keep)
                    add_solution(iu->solution);
            }
        }
    }

    // --- deterministic ----------------------------------------------------

    void merge(TaskId id, bnb::SolveOutcome out, NodePool &pool) {
        if (id > 0)
            ++tasks_;
        nodes_ += out.nodes_processed;
        effort_ += out.effort;
        if (out.status == bnb::SolveStatus::Unbounded)
            unbounded_ = true;
        if (out.best_solution)
            add_solution(*out.best_solution);
        for (auto &d : out.open_deltas) {
            d.origin.parent_task = id;
            pool.push(d);
        }
        pool.prune(primal_);
        if (opts_.record_merge_log)
            result_.merge_log.push_back(fmt::format("{} {} {} {} {} {}", id, bnb::to_string(out.status),
                                                    out.nodes_processed, primal_, pool.size(),
                                                    hex(encode(TaskResult{id, std::move(out)}))));
    }

    void run_deterministic() {
        const std::size_t window = opts_.effective_window();
        NodePool pool;

        bnb::SolverConfig ramp;
        ramp.node_limit = static_cast<std::int64_t>(2 * window);
        const auto fj = quick_incumbent(presolved_, opts_.fj_effort);
        auto root = bnb::solve_subproblem(presolved_, {}, ramp, kInf, fj);
        const bool root_solved = solved(root.status);
        merge(0, std::move(root), pool);
        if (root_solved || unbounded_) {
            exhausted_ = !unbounded_;
            return;
        }

        bnb::SolverConfig task_cfg;
        task_cfg.node_limit = opts_.det_task_nodes;

        SlidingWindow win(window, active_);
        auto generate = [&] {
            while (win.has_room() && !pool.empty()) {
                win.generate([&](TaskId id) {
                    Task t{id, *pool.pop(), task_cfg, primal_, std::nullopt, false};
                    if (!sols_.empty())
                        t.incumbent_ref = 0;
                    return t;
                });
            }
        };
        auto dual = [&] { return std::min({primal_, pool.best_bound(), win.min_unmerged_bound()}); };
        std::map<int, Task> busy;

        generate();
        for (;;) {
            if (win.unmerged() == 0) {
                exhausted_ = !unbounded_;
                return;
            }
            if (check(dual()) != Verdict::Running) {
                dual_ = dual();
                drain(busy, false);
                return;
            }
            for (const auto &[w, id] : win.assign()) {
                const auto &t = win.task(id);
                busy[w] = t;
                hub_.send(w, TaskAssign{t});
            }

            auto r = hub_.recv_any(timeout_ms());
            if (r.status == RecvStatus::Empty)
                continue;
            if (r.status == RecvStatus::Closed)
                throw TransportError(fmt::format("worker {} disconnected", r.from));
            auto *tr = std::get_if<TaskResult>(&r.msg);
            if (!tr)
                continue;
            win.on_result(r.from, tr->task_id, std::move(tr->outcome));
            busy.erase(r.from);

            while (auto m = win.pop_mergeable()) {
                merge(m->first, std::move(m->second), pool);
                generate();
                // Stop at the same merge regardless of how results were batched.
                if (win.unmerged() > 0 && check(dual()) != Verdict::Running)
                    break;
            }
        }
    }

    // --- nondeterministic -------------------------------------------------

    bnb::SolverConfig racing_config(std::size_t slot) const {
        bnb::SolverConfig cfg;
        switch (slot % 3) {
        case 0:
            cfg.node_selection = bnb::NodeSelection::BestBound;
            break;
        case 1:
            cfg.node_selection = bnb::NodeSelection::DepthFirst;
            break;
        default:
            cfg.node_selection = bnb::NodeSelection::DepthFirst;
            cfg.cp_emphasis = true;
            break;
        }
        cfg.branch_tie = (slot / 3) % 2 ? bnb::BranchTie::HighestIndex : bnb::BranchTie::LowestIndex;
        cfg.node_limit = opts_.racing_nodes;
        cfg.rng_seed = opts_.seed + slot;
        return cfg;
    }

    void share_bound(const std::set<int> &targets, int except) {
        for (int w : targets)
            if (w != except)
                hub_.send(w, BoundUpdate{primal_});
    }

    // Returns true when racing settled the instance.
    bool race(NodePool &pool) {
        std::set<int> running;
        for (std::size_t i = 0; i < active_.size(); ++i) {
            hub_.send(active_[i], RacingStart{racing_config(i)});
            running.insert(active_[i]);
        }
        std::map<int, bnb::SolveOutcome> results;
        int first_solved = -1;
        bool stop_sent = false;
        while (!running.empty()) {
            auto r = hub_.recv_any(timeout_ms());
            if (r.status == RecvStatus::Closed)
                throw TransportError(fmt::format("worker {} disconnected", r.from));
            if (r.status == RecvStatus::Empty || (!stop_sent && elapsed() >= opts_.limits.time_limit_s)) {
                if (!stop_sent && elapsed() >= opts_.limits.time_limit_s) {
                    for (int w : running)
                        hub_.send(w, RacingStop{});
                    stop_sent = true;
                }
                if (r.status == RecvStatus::Empty)
                    continue;
            }
            if (const auto *iu = std::get_if<IncumbentUpdate>(&r.msg)) {
                if (add_solution(iu->solution))
                    share_bound(running, r.from);
            } else if (auto *tr = std::get_if<TaskResult>(&r.msg)) {
                running.erase(r.from);
                nodes_ += tr->outcome.nodes_processed;
                effort_ += tr->outcome.effort;
                if (tr->outcome.best_solution && add_solution(*tr->outcome.best_solution))
                    share_bound(running, r.from);
                if (tr->outcome.status == bnb::SolveStatus::Unbounded)
                    unbounded_ = true;
                if (solved(tr->outcome.status) && first_solved < 0) {
                    first_solved = r.from;
                    if (!stop_sent) {
                        for (int w : running)
                            hub_.send(w, RacingStop{});
                        stop_sent = true;
                    }
                }
                results.emplace(r.from, std::move(tr->outcome));
            }
        }

        int winner = first_solved;
        if (winner < 0) {
            // Best racer: highest dual bound, then fewest open nodes, then lowest id.
            for (const auto &[w, out] : results) {
                if (winner < 0) {
                    winner = w;
                    continue;
                }
                const auto &best = results.at(winner);
                if (out.dual_bound > best.dual_bound ||
                    (out.dual_bound == best.dual_bound && out.open_deltas.size() < best.open_deltas.size()))
                    winner = w;
            }
        }
        result_.racing_winner = winner;
        spdlog::debug("racing winner: worker {}", winner);
        if (first_solved >= 0 || unbounded_) {
            exhausted_ = !unbounded_;
            return true;
        }
        for (auto &d : results.at(winner).open_deltas)
            pool.push(d);
        pool.prune(primal_);
        return false;
    }

    void run_nondeterministic() {
        NodePool pool;
        if (opts_.racing) {
            if (race(pool))
                return;
        } else {
            pool.push(bnb::NodeDelta{});
        }

        bnb::SolverConfig task_cfg;
        task_cfg.node_limit = opts_.nondet_task_nodes;
        bnb::SolverConfig xover_cfg;
        xover_cfg.node_limit = opts_.crossover_nodes;

        std::set<int> idle(active_.begin(), active_.end());
        std::map<int, Task> busy;
        std::optional<bnb::NodeDelta> last_xover;
        bool xover_running = false;
        TaskId next_id = 1;

        auto busy_set = [&] {
            std::set<int> s;
            for (const auto &[w, t] : busy)
                s.insert(w);
            return s;
        };
        auto dual = [&] {
            double d = primal_;
            if (!pool.empty())
                d = std::min(d, pool.best_bound());
            for (const auto &[w, t] : busy)
                if (!t.crossover)
                    d = std::min(d, t.delta.dual_bound);
            return d;
        };

        for (;;) {
            pool.prune(primal_);
            while (!idle.empty()) {
                const int w = *idle.begin();
                std::optional<Task> t;
                if (!xover_running && sols_.size() >= 2) {
                    auto d = heur::crossover_delta(presolved_, sols_, opts_.crossover_take);
                    if (d && (!last_xover || d->bound_changes != last_xover->bound_changes)) {
                        last_xover = d;
                        xover_running = true;
                        t = Task{next_id++, std::move(*d), xover_cfg, primal_, 0u, true};
                    }
                }
                if (!t) {
                    if (pool.empty())
                        break;
                    t = Task{next_id++, *pool.pop(), task_cfg, primal_, std::nullopt, false};
                    if (!sols_.empty())
                        t->incumbent_ref = 0;
                }
                idle.erase(idle.begin());
                ++tasks_;
                hub_.send(w, TaskAssign{*t});
                busy.emplace(w, std::move(*t));
            }

            const bool tree_busy = std::any_of(busy.begin(), busy.end(), [](const auto &b) { return !b.second.crossover; });
            if (pool.empty() && !tree_busy)
                exhausted_ = !unbounded_;
            const auto verdict = check(dual());
            if (verdict != Verdict::Running) {
                dual_ = dual();
                drain(busy, true);
                return;
            }

            auto r = hub_.recv_any(timeout_ms());
            if (r.status == RecvStatus::Empty)
                continue;
            if (r.status == RecvStatus::Closed)
                throw TransportError(fmt::format("worker {} disconnected", r.from));
            if (const auto *iu = std::get_if<IncumbentUpdate>(&r.msg)) {
                if (add_solution(iu->solution))
                    share_bound(busy_set(), r.from);
            } else if (auto *tr = std::get_if<TaskResult>(&r.msg)) {
                auto it = busy.find(r.from);
                if (it == busy.end() || it->second.id != tr->task_id)
                    continue;
                const Task task = std::move(it->second);
                busy.erase(it);
                idle.insert(r.from);
                auto &out = tr->outcome;
                nodes_ += out.nodes_processed;
                effort_ += out.effort;
                if (out.best_solution && add_solution(*out.best_solution))
                    share_bound(busy_set(), r.from);
                if (task.crossover) {
                    xover_running = false;
                    continue;
                }
                if (out.status == bnb::SolveStatus::Unbounded)
                    unbounded_ = true;
                for (auto &d : out.open_deltas) {
                    d.origin.parent_task = task.id;
                    pool.push(std::move(d));
                }
            }
        }
    }

    // --- wrap-up ----------------------------------------------------------

    RunResult finish() {
        for (std::size_t w = 0; w < hub_.num_workers(); ++w)
            hub_.send(static_cast<int>(w), Terminate{});
        if (exhausted_)
            dual_ = primal_;
        else if (unbounded_)
            dual_ = -kInf;
        else
            dual_ = std::min(dual_, primal_);
        result_.verdict = check(dual_);
        if (result_.verdict == Verdict::Running)
            result_.verdict = Verdict::LimitReached;
        if (best_) {
            result_.solution = presolve::postsolve_solution(map_, *best_);
            result_.primal_bound = result_.solution->objective;
        }
        result_.dual_bound = exhausted_ && best_ ? result_.primal_bound : dual_;
        result_.nodes = nodes_;
        result_.effort = effort_;
        result_.tasks = tasks_;
        result_.wall_s = elapsed();
        spdlog::debug("{}: primal {} dual {} after {} nodes in {:.3f}s", to_string(result_.verdict),
                     result_.primal_bound, result_.dual_bound, nodes_, result_.wall_s);
        return std::move(result_);
    }

    const MilpInstance &inst_;
    RunOptions opts_;
    SupervisorHub &hub_;
    Clock::time_point t0_;
    RunResult result_;
    MilpInstance presolved_;
    presolve::PostsolveMap map_;
    std::vector<int> active_;
    heur::SolutionPool sols_{20};
    std::optional<Solution> best_;
    double primal_ = kInf;
    double dual_ = -kInf;
    std::uint64_t nodes_ = 0;
    std::uint64_t effort_ = 0;
    std::uint64_t tasks_ = 0;
    bool exhausted_ = false;
    bool unbounded_ = false;
};

} // namespace

RunResult run_supervisor(const MilpInstance &inst, const RunOptions &opts, SupervisorHub &hub) {
    return Supervisor(inst, opts, hub).run();
}

RunResult solve_local(const MilpInstance &inst, const RunOptions &opts) {
    opts.validate();
    LocalNetwork net(opts.workers);
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < opts.workers; ++i) {
        WorkerOptions w;
        w.worker_id = static_cast<std::uint32_t>(i);
        w.memory_budget = opts.memory_budget / opts.workers;
        w.fj_effort = opts.fj_effort;
        w.racing_report_every = opts.racing_report_every;
        w.share_incumbents = opts.mode == Mode::Nondeterministic;
        threads.emplace_back([&net, i, w] {
            try {
                run_worker(net.worker(i), w);
            } catch (const std::exception &e) {
                spdlog::error("worker {} failed: {}", i, e.what());
                net.worker(i).close();
            }
        });
    }
    RunResult res;
    try {
        res = run_supervisor(inst, opts, net.hub());
    } catch (...) {
        net.hub().close();
        for (auto &t : threads)
            t.join();
        throw;
    }
    for (auto &t : threads)
        t.join();
    return res;
}

RunResult solve_scripted(const MilpInstance &inst, const RunOptions &opts, std::vector<std::size_t> script,
                         std::uint64_t seed) {
    opts.validate();
    std::vector<std::unique_ptr<WorkerSession>> sessions;
    std::vector<MessageHandler *> handlers;
    for (std::size_t i = 0; i < opts.workers; ++i) {
        WorkerOptions w;
        w.worker_id = static_cast<std::uint32_t>(i);
        w.memory_budget = opts.memory_budget / opts.workers;
        w.fj_effort = opts.fj_effort;
        w.racing_report_every = opts.racing_report_every;
        w.share_incumbents = opts.mode == Mode::Nondeterministic;
        sessions.push_back(std::make_unique<WorkerSession>(w));
        handlers.push_back(sessions.back().get());
    }
    ScriptedHub hub(std::move(handlers), std::move(script), seed);
    return run_supervisor(inst, opts, hub);
}

} // namespace n2n::orch
