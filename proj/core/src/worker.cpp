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

#include <spdlog/spdlog.h>

#include "n2n/heuristics.hpp"
#include "n2n/mps.hpp"
#include "n2n/orchestrate.hpp"

namespace n2n::orch {

using namespace proto;

/// Solver hooks for one task or racing run. Drains the link between nodes.
class TaskHooks : public bnb::SolveHooks {
  public:
    TaskHooks(WorkerSession &session, WorkerLink &link, const presolve::RestoreMap &restore,
              TaskId task, bool racing)
        : s_(session), link_(link), restore_(restore), task_(task), racing_(racing) {}

    bool interrupted() override {
        poll();
        return stop_;
    }

    void on_incumbent(const Solution &sol) override {
        if (s_.opts_.share_incumbents)
            link_.send(IncumbentUpdate{presolve::restore_solution(restore_, sol)});
    }

    void on_progress(const bnb::Progress &p) override {
        if (racing_ && s_.opts_.racing_report_every > 0 &&
            p.nodes_processed % static_cast<std::uint64_t>(s_.opts_.racing_report_every) == 0)
            link_.send(RacingReport{p.dual_bound, p.open_nodes, false});
    }

    double external_primal_bound() override { return s_.bound_hint_; }

  private:
    void poll() {
        for (;;) {
            auto r = link_.try_recv();
            if (r.status == RecvStatus::Empty)
                return;
            if (r.status == RecvStatus::Closed) {
                stop_ = true;
                s_.finished_ = true;
                return;
            }
            std::visit(
                [&](const auto &m) {
                    using T = std::decay_t<decltype(m)>;
                    if constexpr (std::is_same_v<T, Interrupt>) {
                        if (m.task_id == task_)
                            stop_ = true;
                    } else if constexpr (std::is_same_v<T, RacingStop>) {
                        if (racing_)
                            stop_ = true;
                    } else if constexpr (std::is_same_v<T, BoundUpdate>) {
                        s_.bound_hint_ = std::min(s_.bound_hint_, m.primal_bound);
                    } else if constexpr (std::is_same_v<T, IncumbentUpdate>) {
                        s_.bound_hint_ = std::min(s_.bound_hint_, m.solution.objective);
                    } else if constexpr (std::is_same_v<T, Terminate>) {
                        stop_ = true;
                        s_.deferred_.push_back(m);
                    } else {
                        s_.deferred_.push_back(m);
                    }
                },
                r.msg);
        }
    }

    WorkerSession &s_;
    WorkerLink &link_;
    const presolve::RestoreMap &restore_;
    TaskId task_;
    bool racing_;
    bool stop_ = false;
};

namespace {

std::optional<Solution> quick_incumbent(const MilpInstance &inst, std::int64_t effort) {
    if (effort <= 0)
        return std::nullopt;
    auto fj = heur::feasibility_jump(inst, std::nullopt, effort);
    if (fj)
        fj = heur::one_opt(inst, *fj);
    return fj;
}

} // namespace

WorkerSession::WorkerSession(WorkerOptions opts) : opts_(opts) {}

void WorkerSession::start(WorkerLink &link) { link.send(Hello{opts_.worker_id, opts_.memory_budget}); }

void WorkerSession::handle(const Message &msg, WorkerLink &link) {
    std::visit(
        [&](const auto &m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, InstanceFile>) {
                const auto h = instance_hash(m.mps);
                if (h != m.hash)
                    throw ConsistencyError(fmt::format(
                        "worker {}: instance hash {:016x} does not match announced {:016x}",
                        opts_.worker_id, h, m.hash));
                instance_ = read_mps(m.mps);
            } else if constexpr (std::is_same_v<T, Activate>) {
                active_ = m.active;
            } else if constexpr (std::is_same_v<T, TaskAssign>) {
                run_task(m.task, link);
            } else if constexpr (std::is_same_v<T, RacingStart>) {
                run_racing(m.cfg, link);
            } else if constexpr (std::is_same_v<T, BoundUpdate>) {
                bound_hint_ = std::min(bound_hint_, m.primal_bound);
            } else if constexpr (std::is_same_v<T, IncumbentUpdate>) {
                bound_hint_ = std::min(bound_hint_, m.solution.objective);
            } else if constexpr (std::is_same_v<T, Terminate>) {
                finished_ = true;
            } else if constexpr (std::is_same_v<T, Interrupt> || std::is_same_v<T, RacingStop>) {
                // Arrived after the work finished.
            } else {
                throw ContractViolation(fmt::format("worker {} cannot handle {}", opts_.worker_id,
                                                    message_name(msg)));
            }
        },
        msg);
    dispatch_deferred(link);
}

void WorkerSession::dispatch_deferred(WorkerLink &link) {
    while (!deferred_.empty() && !finished_) {
        auto m = std::move(deferred_.front());
        deferred_.erase(deferred_.begin());
        handle(m, link);
    }
}

void WorkerSession::run_task(const Task &task, WorkerLink &link) {
    if (!instance_ || !active_)
        throw ContractViolation(fmt::format("worker {} got task {} before activation", opts_.worker_id, task.id));
    auto strip = presolve::strip_fixed(*instance_, task.delta);
    std::optional<Solution> incumbent;
    if (task.primal_bound == kInf)
        incumbent = quick_incumbent(strip.reduced, opts_.fj_effort);
    TaskHooks hooks(*this, link, strip.restore, task.id, false);
    auto out = bnb::solve_subproblem(strip.reduced, strip.reduced_delta, task.cfg, task.primal_bound,
                                     incumbent, &hooks);
    spdlog::debug("worker {} task {}: {} after {} nodes", opts_.worker_id, task.id,
                  bnb::to_string(out.status), out.nodes_processed);
    link.send(TaskResult{task.id, presolve::restore_results(strip.restore, out)});
}

void WorkerSession::run_racing(const bnb::SolverConfig &cfg, WorkerLink &link) {
    if (!instance_ || !active_)
        throw ContractViolation(fmt::format("worker {} asked to race before activation", opts_.worker_id));
    const bnb::NodeDelta root;
    auto strip = presolve::strip_fixed(*instance_, root);
    auto incumbent = quick_incumbent(strip.reduced, opts_.fj_effort);
    if (incumbent && opts_.share_incumbents)
        link.send(IncumbentUpdate{presolve::restore_solution(strip.restore, *incumbent)});
    TaskHooks hooks(*this, link, strip.restore, 0, true);
    auto out = bnb::solve_subproblem(strip.reduced, strip.reduced_delta, cfg, bound_hint_, incumbent, &hooks);
    const bool solved = out.status == bnb::SolveStatus::SolvedOptimal ||
                        out.status == bnb::SolveStatus::SolvedInfeasible;
    link.send(RacingReport{out.dual_bound, out.open_deltas.size(), solved});
    link.send(TaskResult{0, presolve::restore_results(strip.restore, out)});
}

void run_worker(WorkerLink &link, const WorkerOptions &opts) {
    WorkerSession session(opts);
    session.start(link);
    while (!session.finished()) {
        auto r = link.recv();
        if (!r.ok())
            break;
        session.handle(r.msg, link);
    }
    link.close();
}

} // namespace n2n::orch
