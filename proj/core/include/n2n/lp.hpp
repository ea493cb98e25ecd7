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
#include <vector>

#include "n2n/model.hpp"

namespace n2n::lp {

enum class LpStatus : std::uint8_t { Optimal, Infeasible, Unbounded, IterLimit };

std::string_view to_string(LpStatus s);

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    /// Valid when Optimal or IterLimit.
    std::vector<double> values;
    double objective = kInf;
    std::int64_t iterations = 0;
};

inline constexpr std::int64_t kDefaultIterLimit = 1'000'000;

/// Dense-tableau bounded-variable primal simplex over the columns' boxes
/// (replaced by `boxes`) and the rows of `inst` followed by `cuts`.
///
/// Two phases: rows whose initial activity violates their range get an
/// artificial variable, phase one drives the artificials to zero. Entering
/// and leaving variables always follow Bland's lowest-index rule, so the
/// result (including the iteration count) is a pure function of the input.
LpResult solve_lp(const MilpInstance &inst, std::span<const Interval> boxes,
                  std::span<const Cut> cuts = {}, std::int64_t iter_limit = kDefaultIterLimit);

/// Relaxation of `inst` with the listed columns re-boxed.
LpResult solve_relaxation(const MilpInstance &inst, std::span<const BoundChange> overrides = {},
                          std::int64_t iter_limit = kDefaultIterLimit);

} // namespace n2n::lp
