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
#include <vector>

#include "n2n/bnb.hpp"
#include "n2n/model.hpp"

namespace n2n::heur {

/// Best-first bounded pool of feasible solutions. Callers only insert
/// solutions they have checked.
class SolutionPool {
  public:
    explicit SolutionPool(std::size_t capacity = 20) : capacity_(capacity) {}

    /// Inserts in objective order (stable for ties). Returns false for
    /// near-duplicates (max abs difference <= 1e-9) and for solutions that
    /// would fall off the end of a full pool.
    bool add(Solution sol);

    const std::vector<Solution> &solutions() const { return sols_; }
    std::size_t size() const { return sols_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return sols_.empty(); }
    const Solution &best() const { return sols_.front(); }

  private:
    std::size_t capacity_;
    std::vector<Solution> sols_;
};

struct FeasibilityJumpOptions {
    double feas_tol = kDefaultFeasTol;
    double int_tol = kDefaultIntTol;
};

/// Weighted-violation local search. Each step either moves one variable to
/// the value minimising the weighted row violation, or, at a local minimum,
/// bumps the weight of every violated row by one. `effort` caps the number
/// of steps. The returned point always passes check_feasible.
std::optional<Solution> feasibility_jump(const MilpInstance &inst, const std::optional<Solution> &start,
                                         std::int64_t effort,
                                         const FeasibilityJumpOptions &opts = {});

/// Best single-variable integer shifts, column by column, until no column
/// improves (at most 10 passes). Throws ContractViolation on an infeasible
/// input.
Solution one_opt(const MilpInstance &inst, const Solution &sol, double feas_tol = kDefaultFeasTol,
                 double int_tol = kDefaultIntTol);

/// Fixes every integral column on which the best `take` pooled solutions
/// agree. Empty when fewer than two solutions are usable or nothing agrees.
std::optional<bnb::NodeDelta> crossover_delta(const MilpInstance &inst, const SolutionPool &pool,
                                              std::size_t take = 3, double int_tol = kDefaultIntTol);

} // namespace n2n::heur
