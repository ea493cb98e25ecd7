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
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "n2n/bnb.hpp"
#include "n2n/model.hpp"

namespace n2n::presolve {

enum class Strategy : std::uint8_t { Off, Light, Aggressive };

std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view s);

struct FixedVar {
    int col;
    double value;
    bool operator==(const FixedVar &) const = default;
};
struct RemovedEmptyRow {
    int row;
    bool operator==(const RemovedEmptyRow &) const = default;
};
struct RemovedRedundantRow {
    int row;
    Row original;
    bool operator==(const RemovedRedundantRow &) const = default;
};
struct TightenedBound {
    int col;
    Interval old_box;
    bool operator==(const TightenedBound &) const = default;
};

using Reduction = std::variant<FixedVar, RemovedEmptyRow, RemovedRedundantRow, TightenedBound>;

/// Everything needed to map presolved-space solutions back. Indices in the
/// reduction records refer to the original instance.
struct PostsolveMap {
    std::size_t original_cols = 0;
    std::size_t original_rows = 0;
    std::vector<Reduction> reductions;
    /// original column -> presolved column, or -1 when removed.
    std::vector<int> col_map;
    std::vector<int> row_map;
    std::vector<double> original_obj;
    double original_offset = 0.0;

    static PostsolveMap identity(const MilpInstance &inst);
    bool operator==(const PostsolveMap &) const = default;
};

struct PresolveResult {
    bool infeasible = false;
    MilpInstance instance;
    PostsolveMap map;
};

/// Off: unchanged. Light: drop fixed columns, empty rows and rows made
/// redundant by the column boxes, repeated to a fixpoint. Aggressive: Light
/// plus activity-based bound tightening (at most 10 passes, integral bounds
/// rounded inward). No reduction changes the optimal objective value.
PresolveResult presolve(const MilpInstance &inst, Strategy strategy);

struct MultiPresolveResult {
    Strategy chosen = Strategy::Off;
    PresolveResult result;
    std::vector<std::size_t> scores;
};

/// Runs every strategy and keeps the smallest result by size_score; ties go
/// to the earlier strategy. Any strategy proving infeasibility wins outright.
MultiPresolveResult multi_presolve(const MilpInstance &inst, std::span<const Strategy> strategies);

/// Original-space solution; objective recomputed with the original costs.
Solution postsolve_solution(const PostsolveMap &map, const Solution &sol);

/// Maps the reduced instance of strip_fixed back onto the presolved one.
struct RestoreMap {
    std::size_t presolved_cols = 0;
    /// reduced column -> presolved column.
    std::vector<int> kept_cols;
    /// presolved column -> fixed value, for stripped columns (NaN when kept).
    std::vector<double> fixed_value;
    /// Presolved boxes after the delta, used to re-express open nodes.
    std::vector<Interval> presolved_boxes;
    std::vector<Interval> delta_boxes;
    std::vector<Cut> cuts;
    bnb::NodeOrigin origin;
    double dual_bound = -kInf;
};

struct StripResult {
    MilpInstance reduced;
    RestoreMap restore;
    /// The delta to solve the reduced instance with (dual bound carried over).
    bnb::NodeDelta reduced_delta;
};

/// Substitutes out every column the delta fixes (lower == upper) and bakes
/// the remaining delta boxes and cuts into a standalone reduced instance.
StripResult strip_fixed(const MilpInstance &presolved, const bnb::NodeDelta &delta);

/// Re-expresses solutions and open nodes of the reduced instance against the
/// presolved instance.
bnb::SolveOutcome restore_results(const RestoreMap &restore, const bnb::SolveOutcome &outcome);

/// Solution of the reduced instance in presolved space.
Solution restore_solution(const RestoreMap &restore, const Solution &sol);

} // namespace n2n::presolve
