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

#include "n2n/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_set>

#include <fmt/format.h>

namespace n2n {

namespace {

bool valid_name(const std::string &s) {
    return std::none_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

} // namespace

MilpInstance::MilpInstance(std::string name, std::vector<Column> cols, std::vector<Row> rows,
                           double obj_offset, std::string obj_name)
    : name_(std::move(name)), obj_name_(std::move(obj_name)), cols_(std::move(cols)),
      rows_(std::move(rows)), obj_offset_(obj_offset) {
    const auto n = static_cast<int>(cols_.size());
    if (obj_name_.empty())
        obj_name_ = "obj";
    if (!std::isfinite(obj_offset_))
        throw ModelError("objective offset must be finite");

    std::unordered_set<std::string> seen;
    for (std::size_t j = 0; j < cols_.size(); ++j) {
        auto &c = cols_[j];
        if (c.name.empty())
            c.name = fmt::format("C{}", j);
        if (!valid_name(c.name) || !seen.insert(c.name).second)
            throw ModelError(fmt::format("invalid or duplicate column name '{}'", c.name));
        if (std::isnan(c.lower) || std::isnan(c.upper) || !std::isfinite(c.obj))
            throw ModelError(fmt::format("column '{}' has non-numeric data", c.name));
        if (c.lower > c.upper)
            throw ModelError(fmt::format("column '{}' has empty box [{}, {}]", c.name, c.lower, c.upper));
        if (c.lower == kInf || c.upper == -kInf)
            throw ModelError(fmt::format("column '{}' has an unattainable bound", c.name));
    }

    seen.clear();
    seen.insert(obj_name_);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        auto &r = rows_[i];
        if (r.name.empty())
            r.name = fmt::format("R{}", i);
        if (!valid_name(r.name) || !seen.insert(r.name).second)
            throw ModelError(fmt::format("invalid or duplicate row name '{}'", r.name));
        if (std::isnan(r.lhs) || std::isnan(r.rhs) || r.lhs > r.rhs)
            throw ModelError(fmt::format("row '{}' has empty range [{}, {}]", r.name, r.lhs, r.rhs));
        if (r.lhs == kInf || r.rhs == -kInf)
            throw ModelError(fmt::format("row '{}' has an unattainable side", r.name));
        std::sort(r.entries.begin(), r.entries.end(),
                  [](const SparseEntry &a, const SparseEntry &b) { return a.col < b.col; });
        for (std::size_t k = 0; k < r.entries.size(); ++k) {
            const auto &e = r.entries[k];
            if (e.col < 0 || e.col >= n)
                throw ModelError(fmt::format("row '{}' references column {} (n = {})", r.name, e.col, n));
            if (!std::isfinite(e.value))
                throw ModelError(fmt::format("row '{}' has a non-finite coefficient", r.name));
            if (k > 0 && r.entries[k - 1].col == e.col)
                throw ModelError(fmt::format("row '{}' has duplicate entries for column {}", r.name, e.col));
        }
    }
}

std::size_t MilpInstance::num_nonzeros() const {
    std::size_t nnz = 0;
    for (const auto &r : rows_)
        nnz += r.entries.size();
    return nnz;
}

std::size_t MilpInstance::num_integral() const {
    return static_cast<std::size_t>(
        std::count_if(cols_.begin(), cols_.end(), [](const Column &c) { return c.integral; }));
}

std::vector<Interval> MilpInstance::boxes() const {
    std::vector<Interval> out;
    out.reserve(cols_.size());
    for (const auto &c : cols_)
        out.push_back(c.box());
    return out;
}

bool MilpInstance::has_objective() const {
    return std::any_of(cols_.begin(), cols_.end(), [](const Column &c) { return c.obj != 0.0; });
}

double evaluate_objective(const MilpInstance &inst, std::span<const double> values) {
    if (values.size() != inst.num_cols())
        throw ContractViolation("solution length does not match column count");
    double sum = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j)
        sum += inst.col(j).obj * values[j];
    return sum + inst.obj_offset();
}

Solution make_solution(const MilpInstance &inst, std::vector<double> values) {
    const double obj = evaluate_objective(inst, values);
    return Solution{std::move(values), obj};
}

double row_activity(const Row &row, std::span<const double> values) {
    double act = 0.0;
    for (const auto &e : row.entries)
        act += e.value * values[static_cast<std::size_t>(e.col)];
    return act;
}

FeasibilityReport check_feasible(const MilpInstance &inst, std::span<const double> values,
                                 double feas_tol, double int_tol) {
    if (values.size() != inst.num_cols())
        throw ContractViolation(fmt::format("solution has {} values, instance has {} columns",
                                            values.size(), inst.num_cols()));
    FeasibilityReport rep;
    for (std::size_t j = 0; j < values.size(); ++j) {
        const auto &c = inst.col(j);
        const double v = values[j];
        if (!std::isfinite(v)) {
            rep.max_bound_violation = kInf;
            continue;
        }
        rep.max_bound_violation = std::max({rep.max_bound_violation, c.lower - v, v - c.upper});
        if (c.integral)
            rep.max_int_violation = std::max(rep.max_int_violation, std::abs(v - std::round(v)));
    }
    for (const auto &r : inst.rows()) {
        const double act = row_activity(r, values);
        rep.max_row_violation = std::max({rep.max_row_violation, r.lhs - act, act - r.rhs});
    }
    rep.feasible = rep.max_row_violation <= feas_tol && rep.max_bound_violation <= feas_tol &&
                   rep.max_int_violation <= int_tol;
    return rep;
}

std::size_t size_score(const MilpInstance &inst) {
    return inst.num_cols() + inst.num_rows() + inst.num_nonzeros();
}

} // namespace n2n
