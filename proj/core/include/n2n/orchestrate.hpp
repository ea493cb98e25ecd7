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

#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "n2n/bnb.hpp"
#include "n2n/model.hpp"
#include "n2n/presolve.hpp"
#include "n2n/protocol.hpp"
#include "n2n/transport.hpp"

namespace n2n::orch {

enum class Mode : std::uint8_t { Deterministic, Nondeterministic };

std::string_view to_string(Mode m);
Mode mode_from_string(std::string_view s);

enum class Verdict : std::uint8_t { Running, Optimal, Infeasible, Unbounded, GapReached, LimitReached };

std::string_view to_string(Verdict v);

struct Limits {
    double time_limit_s = kInf;
    /// Relative gap (p - d) / max(1, |p|) at which the search may stop.
    double gap = 0.0;
    std::uint64_t node_limit = std::numeric_limits<std::uint64_t>::max();
};

/// Global picture the supervisor checks after every event.
struct SearchState {
    double primal_bound = kInf;
    double dual_bound = -kInf;
    /// Pool empty and no task outstanding.
    bool exhausted = false;
    bool unbounded = false;
    std::uint64_t nodes = 0;
    double elapsed_s = 0.0;
};

double relative_gap(double primal, double dual);

Verdict terminate_check(const SearchState &s, const Limits &limits);

/// Per-worker memory need: 64 MiB plus 64 bytes per nonzero, column and row.
std::uint64_t worker_memory_need(const MilpInstance &inst);

/// Number of workers that fit in `memory_budget` bytes (0 means no limit),
/// at least one and at most `workers`.
std::size_t choose_active_workers(const MilpInstance &inst, std::size_t workers,
                                  std::uint64_t memory_budget);

/// Open nodes ordered by (dual bound, parent task, child ordinal), so the
/// pop order is a function of the contents alone.
class NodePool {
  public:
    /// Throws ContractViolation if a node with the same key is present.
    void push(bnb::NodeDelta node);
    std::optional<bnb::NodeDelta> pop();
    /// Removes nodes whose bound is >= primal_bound - 1e-9; returns how many.
    std::size_t prune(double primal_bound);

    bool empty() const { return nodes_.empty(); }
    std::size_t size() const { return nodes_.size(); }
    /// +inf when empty.
    double best_bound() const;
    /// Nodes in pop order.
    std::vector<bnb::NodeDelta> contents() const;

  private:
    struct Key {
        double bound;
        TaskId parent;
        std::uint32_t ordinal;
        auto operator<=>(const Key &) const = default;
    };
    std::map<Key, bnb::NodeDelta> nodes_;
};

/// Bookkeeping of the deterministic scheduler: at most `width` tasks are
/// generated but not merged, results merge in id order, and waiting tasks go
/// to idle workers in ascending worker id. Every violation throws
/// ContractViolation.
class SlidingWindow {
  public:
    SlidingWindow(std::size_t width, std::vector<int> workers);

    std::size_t width() const { return width_; }
    bool has_room() const { return unmerged_.size() < width_; }

    /// Registers the next task; `make` receives the id to use.
    const proto::Task &generate(const std::function<proto::Task(TaskId)> &make);

    /// Pairs waiting tasks with idle workers, lowest worker id first.
    std::vector<std::pair<int, TaskId>> assign();

    /// Buffers a result from `worker`, which must be running `id`.
    void on_result(int worker, TaskId id, bnb::SolveOutcome outcome);

    /// Removes and returns the result of the next id to merge, if buffered.
    std::optional<std::pair<TaskId, bnb::SolveOutcome>> pop_mergeable();

    const proto::Task &task(TaskId id) const;
    std::size_t unmerged() const { return unmerged_.size(); }
    TaskId next_id() const { return next_id_; }
    TaskId next_merge() const { return next_merge_; }
    const std::deque<TaskId> &waiting() const { return waiting_; }
    const std::map<int, TaskId> &running() const { return running_; }
    std::vector<TaskId> buffered() const;
    std::vector<int> idle() const { return {idle_.begin(), idle_.end()}; }
    /// Smallest dual bound among unmerged tasks, +inf when none.
    double min_unmerged_bound() const;

  private:
    void check_invariants() const;

    std::size_t width_;
    TaskId next_id_ = 1;
    TaskId next_merge_ = 1;
    std::map<TaskId, proto::Task> unmerged_;
    std::deque<TaskId> waiting_;
    std::map<TaskId, bnb::SolveOutcome> buffer_;
    std::set<int> idle_;
    std::map<int, TaskId> running_;
};

struct RunOptions {
    Mode mode = Mode::Nondeterministic;
    std::size_t workers = 4;
    Limits limits;
    /// Deterministic window; 0 means 2 x workers.
    std::size_t window = 0;
    std::int64_t det_task_nodes = 200;
    std::int64_t nondet_task_nodes = 5000;
    bool racing = true;
    std::int64_t racing_nodes = 2000;
    std::int64_t racing_report_every = 100;
    std::vector<presolve::Strategy> strategies = {presolve::Strategy::Off, presolve::Strategy::Light,
                                                  presolve::Strategy::Aggressive};
    std::uint64_t memory_budget = 0;
    std::int64_t fj_effort = 2000;
    std::size_t crossover_take = 3;
    std::int64_t crossover_nodes = 500;
    std::int64_t cp_root_nodes = 1000;
    std::uint64_t seed = 0;
    /// Supervisor asserts (window bound, gapless merges) stay on in release.
    bool record_merge_log = true;

    void validate() const;
    std::size_t effective_window() const { return window ? window : 2 * workers; }
};

struct Preprocessed {
    presolve::MultiPresolveResult presolve;
    bool cp_instance = false;
    std::size_t active_workers = 1;
    std::string mps;
    std::uint64_t hash = 0;
};

Preprocessed preprocess(const MilpInstance &inst, const RunOptions &opts);

struct RunResult {
    Verdict verdict = Verdict::Running;
    /// Best solution in the original space.
    std::optional<Solution> solution;
    double primal_bound = kInf;
    double dual_bound = -kInf;
    presolve::Strategy presolve_used = presolve::Strategy::Off;
    std::size_t active_workers = 0;
    std::uint64_t nodes = 0;
    /// Simplex iterations summed over every solve, a machine-independent cost.
    std::uint64_t effort = 0;
    std::uint64_t tasks = 0;
    double wall_s = 0.0;
    /// Deterministic mode: one line per merged task, in merge order.
    std::vector<std::string> merge_log;
    /// Nondeterministic mode: index of the racing winner, -1 without racing.
    int racing_winner = -1;
};

/// Drives one solve over an established hub. Hello handshakes are expected
/// from every worker before any instance data is sent.
RunResult run_supervisor(const MilpInstance &inst, const RunOptions &opts, proto::SupervisorHub &hub);

struct WorkerOptions {
    std::uint32_t worker_id = 0;
    std::uint64_t memory_budget = 0;
    std::int64_t fj_effort = 2000;
    std::int64_t racing_report_every = 100;
    /// Sends IncumbentUpdate as soon as a task improves (nondeterministic runs).
    bool share_incumbents = true;
};

/// Worker state machine shared by real worker loops and the scripted
/// transport. start() sends Hello; handle() reacts to one message.
class WorkerSession : public proto::MessageHandler {
  public:
    explicit WorkerSession(WorkerOptions opts);

    void start(proto::WorkerLink &link) override;
    void handle(const proto::Message &msg, proto::WorkerLink &link) override;
    bool finished() const { return finished_; }

  private:
    void run_task(const proto::Task &task, proto::WorkerLink &link);
    void run_racing(const bnb::SolverConfig &cfg, proto::WorkerLink &link);
    void dispatch_deferred(proto::WorkerLink &link);

    friend class TaskHooks;

    WorkerOptions opts_;
    std::optional<MilpInstance> instance_;
    bool active_ = false;
    bool finished_ = false;
    double bound_hint_ = kInf;
    std::vector<proto::Message> deferred_;
};

/// Blocking worker loop: Hello, then messages until Terminate or close.
void run_worker(proto::WorkerLink &link, const WorkerOptions &opts);

/// Threads-and-queues run on this machine.
RunResult solve_local(const MilpInstance &inst, const RunOptions &opts);

/// Single-threaded run through ScriptedHub: results are released in an
/// order picked by `script` and then by a generator seeded with `seed`.
RunResult solve_scripted(const MilpInstance &inst, const RunOptions &opts,
                         std::vector<std::size_t> script, std::uint64_t seed);

} // namespace n2n::orch
