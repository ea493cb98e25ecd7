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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "n2n/common.hpp"

namespace n2n {

/// Closed interval [lower, upper]; either end may be infinite.
struct Interval {
    double lower = 0.0;
    double upper = kInf;

    bool empty() const { return lower > upper; }
    bool fixed() const { return lower == upper; }
    bool operator==(const Interval &) const = default;
};

struct SparseEntry {
    int col = 0;
    double value = 0.0;

    bool operator==(const SparseEntry &) const = default;
};

/// One two-sided row lhs <= sum(entries) <= rhs.
struct Row {
    std::string name;
    std::vector<SparseEntry> entries;
    double lhs = -kInf;
    double rhs = kInf;

    bool operator==(const Row &) const = default;
};

struct Column {
    std::string name;
    double obj = 0.0;
    double lower = 0.0;
    double upper = kInf;
    bool integral = false;

    Interval box() const { return {lower, upper}; }
    bool operator==(const Column &) const = default;
};

/// A minimization MILP: min c^T x + offset s.t. lhs <= Ax <= rhs, l <= x <= u,
/// x_j integral for integral columns.
///
/// Construction validates every structural invariant and canonicalizes the
/// sparse rows (entries sorted by column), so two instances holding the same
/// matrix compare equal regardless of the order entries were supplied in.
/// Empty row/column names are replaced by R<i>/C<j>.
class MilpInstance {
  public:
    MilpInstance() = default;
    MilpInstance(std::string name, std::vector<Column> cols, std::vector<Row> rows,
                 double obj_offset = 0.0, std::string obj_name = "obj");

    const std::string &name() const { return name_; }
    const std::string &obj_name() const { return obj_name_; }
    const std::vector<Column> &cols() const { return cols_; }
    const std::vector<Row> &rows() const { return rows_; }
    const Column &col(std::size_t j) const { return cols_[j]; }
    const Row &row(std::size_t i) const { return rows_[i]; }
    double obj_offset() const { return obj_offset_; }

    std::size_t num_cols() const { return cols_.size(); }
    std::size_t num_rows() const { return rows_.size(); }
    std::size_t num_nonzeros() const;
    std::size_t num_integral() const;

    std::vector<Interval> boxes() const;
    bool has_objective() const;

    bool operator==(const MilpInstance &) const = default;

  private:
    std::string name_;
    std::string obj_name_ = "obj";
    std::vector<Column> cols_;
    std::vector<Row> rows_;
    double obj_offset_ = 0.0;
};

/// Absolute replacement box for one column.
struct BoundChange {
    int col = 0;
    double lower = 0.0;
    double upper = 0.0;

    bool operator==(const BoundChange &) const = default;
};

/// Extra two-sided row attached to a subproblem.
struct Cut {
    std::vector<SparseEntry> entries;
    double lhs = -kInf;
    double rhs = kInf;

    bool operator==(const Cut &) const = default;
};

struct Solution {
    std::vector<double> values;
    double objective = 0.0;

    bool operator==(const Solution &) const = default;
};

struct FeasibilityReport {
    bool feasible = true;
    double max_row_violation = 0.0;
    double max_bound_violation = 0.0;
    double max_int_violation = 0.0;
};

/// c^T x + offset, summed in column order.
double evaluate_objective(const MilpInstance &inst, std::span<const double> values);

Solution make_solution(const MilpInstance &inst, std::vector<double> values);

double row_activity(const Row &row, std::span<const double> values);

/// Throws ContractViolation when values.size() != num_cols.
FeasibilityReport check_feasible(const MilpInstance &inst, std::span<const double> values,
                                 double feas_tol = kDefaultFeasTol,
                                 double int_tol = kDefaultIntTol);

inline FeasibilityReport check_feasible(const MilpInstance &inst, const Solution &sol,
                                        double feas_tol = kDefaultFeasTol,
                                        double int_tol = kDefaultIntTol) {
    return check_feasible(inst, sol.values, feas_tol, int_tol);
}

/// Size score used to rank presolved instances: columns + rows + nonzeros.
std::size_t size_score(const MilpInstance &inst);

} // namespace n2n
