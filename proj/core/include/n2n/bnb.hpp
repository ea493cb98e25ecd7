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
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "n2n/model.hpp"

namespace n2n::bnb {

/// Identifies where an open node came from; (parent_task, child_ordinal)
/// is the deterministic tie-break key used everywhere nodes are ordered.
struct NodeOrigin {
    TaskId parent_task = 0;
    std::uint32_t child_ordinal = 0;

    auto operator<=>(const NodeOrigin &) const = default;
};

/// An open node as absolute boxes and cuts on top of the presolved instance.
/// `dual_bound` is the relaxation bound inherited from the parent (or -inf).
struct NodeDelta {
    std::vector<BoundChange> bound_changes;
    std::vector<Cut> cuts;
    NodeOrigin origin;
    double dual_bound = -kInf;

    bool operator==(const NodeDelta &) const = default;
};

enum class NodeSelection : std::uint8_t { BestBound, DepthFirst };
enum class Branching : std::uint8_t { MostFractional };
enum class BranchTie : std::uint8_t { LowestIndex, HighestIndex };

struct SolverConfig {
    std::int64_t node_limit = 200;
    double gap_limit = 0.0;
    Branching branching = Branching::MostFractional;
    NodeSelection node_selection = NodeSelection::BestBound;
    BranchTie branch_tie = BranchTie::LowestIndex;
    /// Depth-first search, propagation to a fixpoint (max 20 rounds) and the
    /// objective cutoff propagated as a constraint at every node.
    bool cp_emphasis = false;
    std::uint64_t rng_seed = 0;
    double feas_tol = kDefaultFeasTol;
    double int_tol = kDefaultIntTol;

    void validate() const;
    bool operator==(const SolverConfig &) const = default;
};

enum class SolveStatus : std::uint8_t { SolvedOptimal, SolvedInfeasible, NodeLimit, Unbounded };

std::string_view to_string(SolveStatus s);

/// SolvedOptimal: the subtree was exhausted and best_solution is the best
/// point below the given primal bound. SolvedInfeasible: exhausted without
/// finding anything below the primal bound. NodeLimit: stopped early (node
/// limit or interrupt); open_deltas partition what is left.
struct SolveOutcome {
    SolveStatus status = SolveStatus::SolvedInfeasible;
    std::optional<Solution> best_solution;
    double dual_bound = kInf;
    std::vector<NodeDelta> open_deltas;
    std::uint64_t nodes_processed = 0;
    std::uint64_t effort = 0;

    bool operator==(const SolveOutcome &) const = default;
};

struct Progress {
    std::uint64_t nodes_processed = 0;
    std::size_t open_nodes = 0;
    double dual_bound = -kInf;
    double primal_bound = kInf;
};

/// Interaction points between a running solve and the framework. Everything
/// is polled between nodes, never during an LP.
class SolveHooks {
  public:
    virtual ~SolveHooks() = default;
    /// Interrupt or terminate request.
    virtual bool interrupted() { return false; }
    /// Called as soon as a new best solution is found.
    virtual void on_incumbent(const Solution &) {}
    /// Solver state after every processed node.
    virtual void on_progress(const Progress &) {}
    /// Best primal bound known elsewhere.
    virtual double external_primal_bound() { return kInf; }
};

struct BranchDecision {
    int col = -1;
    BoundChange down;
    BoundChange up;
};

/// Most-fractional branching. Throws ContractViolation when no integral
/// column is fractional beyond int_tol.
BranchDecision branch(std::span<const double> values, std::span<const int> integral_cols,
                      std::span<const Interval> boxes, double int_tol = kDefaultIntTol,
                      BranchTie tie = BranchTie::LowestIndex);

struct PropagationOptions {
    int max_rounds = 3;
    double feas_tol = kDefaultFeasTol;
    double int_tol = kDefaultIntTol;
    /// When finite, c^T x + offset <= cutoff is propagated as an extra row.
    double objective_cutoff = kInf;
};

/// Activity-based bound tightening over the rows of `inst` and `cuts`.
/// Integral bounds are rounded inward. Returns false once a box empties or a
/// row cannot be satisfied; `boxes` is then unspecified.
bool propagate(const MilpInstance &inst, std::vector<Interval> &boxes,
               std::span<const Cut> cuts = {}, const PropagationOptions &opts = {});

/// Boxes of `inst` with the delta's bound changes applied. Throws
/// ContractViolation for unknown columns.
std::vector<Interval> apply_delta(const MilpInstance &inst, const NodeDelta &delta);

/// Branch-and-bound on one subproblem. Pure in its arguments: equal inputs
/// (and equal hook behaviour) give equal outcomes.
SolveOutcome solve_subproblem(const MilpInstance &presolved, const NodeDelta &delta,
                              const SolverConfig &cfg, double primal_bound = kInf,
                              const std::optional<Solution> &incumbent = std::nullopt,
                              SolveHooks *hooks = nullptr);

} // namespace n2n::bnb
