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

#include "n2n/lp.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace n2n::lp {

std::string_view to_string(LpStatus s) {
    switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
    case LpStatus::IterLimit: return "IterLimit";
    }
    return "?";
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kPrimalTol = 1e-9;
constexpr double kPhaseOneTol = 1e-7;

// Variables are laid out as [structural | row activity | artificial]. Every
// constraint row reads  A_i x - s_i + sigma_i a_i = 0,  so the tableau
// T = B^-1 [A | -I | sigma E] satisfies  z_B = -T_N z_N.
class Tableau {
  public:
    Tableau(const MilpInstance &inst, std::span<const Interval> boxes, std::span<const Cut> cuts)
        : n_(inst.num_cols()), m_(inst.num_rows() + cuts.size()) {
        lower_.reserve(n_ + m_);
        upper_.reserve(n_ + m_);
        for (const auto &b : boxes) {
            lower_.push_back(b.lower);
            upper_.push_back(b.upper);
        }
        std::vector<const std::vector<SparseEntry> *> row_entries;
        for (const auto &r : inst.rows()) {
            row_entries.push_back(&r.entries);
            lower_.push_back(r.lhs);
            upper_.push_back(r.rhs);
        }
        for (const auto &c : cuts) {
            row_entries.push_back(&c.entries);
            lower_.push_back(c.lhs);
            upper_.push_back(c.rhs);
        }

        value_.assign(n_ + m_, 0.0);
        for (std::size_t j = 0; j < n_; ++j)
            value_[j] = initial_value(lower_[j], upper_[j]);

        // Decide per row whether the activity variable can start basic.
        std::vector<double> act(m_, 0.0);
        std::vector<double> sigma(m_, 0.0);
        std::size_t arts = 0;
        for (std::size_t i = 0; i < m_; ++i) {
            for (const auto &e : *row_entries[i])
                act[i] += e.value * value_[static_cast<std::size_t>(e.col)];
            const std::size_t s = n_ + i;
            if (act[i] < lower_[s] - kPrimalTol || act[i] > upper_[s] + kPrimalTol) {
                value_[s] = act[i] < lower_[s] ? lower_[s] : upper_[s];
                sigma[i] = value_[s] - act[i] > 0.0 ? 1.0 : -1.0;
                ++arts;
            }
        }
        width_ = n_ + m_ + arts;
        lower_.resize(width_, 0.0);
        upper_.resize(width_, kInf);
        value_.resize(width_, 0.0);
        basis_.assign(m_, 0);
        pos_.assign(width_, -1);
        tab_.assign(m_ * width_, 0.0);
        xb_.assign(m_, 0.0);

        std::size_t next_art = n_ + m_;
        for (std::size_t i = 0; i < m_; ++i) {
            double *row = &tab_[i * width_];
            const std::size_t s = n_ + i;
            if (sigma[i] == 0.0) {
                // Basic activity variable: row = -(A_i, -e_i).
                for (const auto &e : *row_entries[i])
                    row[e.col] = -e.value;
                row[s] = 1.0;
                set_basic(i, s, act[i]);
            } else {
                const double inv = 1.0 / sigma[i];
                for (const auto &e : *row_entries[i])
                    row[e.col] = e.value * inv;
                row[s] = -inv;
                row[next_art] = 1.0;
                set_basic(i, next_art, (value_[s] - act[i]) * sigma[i]);
                ++next_art;
            }
        }
        first_art_ = n_ + m_;
    }

    bool has_artificials() const { return width_ > first_art_; }

    /// Phase one. Returns the iteration budget status.
    LpStatus phase_one(std::int64_t &iters, std::int64_t limit) {
        std::vector<double> cost(width_, 0.0);
        for (std::size_t j = first_art_; j < width_; ++j)
            cost[j] = 1.0;
        const auto st = optimize(cost, iters, limit);
        if (st != LpStatus::Optimal)
            return st;
        double infeas = 0.0;
        for (std::size_t j = first_art_; j < width_; ++j)
            infeas += var_value(j);
        if (infeas > kPhaseOneTol)
            return LpStatus::Infeasible;
        for (std::size_t j = first_art_; j < width_; ++j) {
            upper_[j] = 0.0;
            if (pos_[j] < 0)
                value_[j] = 0.0;
        }
        return LpStatus::Optimal;
    }

    LpStatus phase_two(const MilpInstance &inst, std::int64_t &iters, std::int64_t limit) {
        std::vector<double> cost(width_, 0.0);
        for (std::size_t j = 0; j < n_; ++j)
            cost[j] = inst.col(j).obj;
        return optimize(cost, iters, limit);
    }

    std::vector<double> structural_values() const {
        std::vector<double> x(n_);
        for (std::size_t j = 0; j < n_; ++j)
            x[j] = std::clamp(var_value(j), lower_[j], upper_[j]);
        return x;
    }

  private:
    static double initial_value(double lo, double up) {
        if (lo > -kInf)
            return lo;
        if (up < kInf)
            return up;
        return 0.0;
    }

    void set_basic(std::size_t row, std::size_t var, double v) {
        basis_[row] = var;
        pos_[var] = static_cast<long>(row);
        xb_[row] = v;
    }

    double var_value(std::size_t j) const {
        return pos_[j] >= 0 ? xb_[static_cast<std::size_t>(pos_[j])] : value_[j];
    }

    LpStatus optimize(const std::vector<double> &cost, std::int64_t &iters, std::int64_t limit) {
        // Reduced costs d_j = c_j - c_B^T T_j.
        std::vector<double> d(cost);
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = cost[basis_[i]];
            if (cb == 0.0)
                continue;
            const double *row = &tab_[i * width_];
            for (std::size_t j = 0; j < width_; ++j)
                d[j] -= cb * row[j];
        }
        for (std::size_t i = 0; i < m_; ++i)
            d[basis_[i]] = 0.0;

        for (;;) {
            // Bland: the lowest-index improving nonbasic variable enters.
            std::size_t q = width_;
            double dir = 0.0;
            for (std::size_t j = 0; j < width_; ++j) {
                if (pos_[j] >= 0 || lower_[j] == upper_[j])
                    continue;
                const bool can_up = value_[j] < upper_[j];
                const bool can_down = value_[j] > lower_[j];
                if (d[j] < -kCostTol && can_up) {
                    q = j;
                    dir = 1.0;
                    break;
                }
                if (d[j] > kCostTol && can_down) {
                    q = j;
                    dir = -1.0;
                    break;
                }
            }
            if (q == width_)
                return LpStatus::Optimal;
            if (iters >= limit)
                return LpStatus::IterLimit;
            ++iters;

            // Ratio test; ties go to the lowest variable index, the entering
            // variable's own bound flip included.
            double best = upper_[q] - lower_[q];
            std::size_t leave_var = q;
            long leave_row = -1;
            for (std::size_t i = 0; i < m_; ++i) {
                const double alpha = tab_[i * width_ + q];
                if (std::abs(alpha) <= kPivotTol)
                    continue;
                const double rate = -alpha * dir;
                const std::size_t b = basis_[i];
                double lim;
                if (rate < 0.0) {
                    if (lower_[b] == -kInf)
                        continue;
                    lim = (xb_[i] - lower_[b]) / -rate;
                } else {
                    if (upper_[b] == kInf)
                        continue;
                    lim = (upper_[b] - xb_[i]) / rate;
                }
                lim = std::max(lim, 0.0);
                if (lim < best || (lim == best && b < leave_var)) {
                    best = lim;
                    leave_var = b;
                    leave_row = static_cast<long>(i);
                }
            }
            if (best == kInf)
                return LpStatus::Unbounded;

            for (std::size_t i = 0; i < m_; ++i)
                xb_[i] += -tab_[i * width_ + q] * dir * best;
            value_[q] += dir * best;

            if (leave_row < 0) {
                // Bound flip; snap to the bound it reached.
                value_[q] = dir > 0.0 ? upper_[q] : lower_[q];
                continue;
            }

            const auto r = static_cast<std::size_t>(leave_row);
            const double rate_r = -tab_[r * width_ + q] * dir;
            value_[leave_var] = rate_r < 0.0 ? lower_[leave_var] : upper_[leave_var];
            pos_[leave_var] = -1;
            pivot(r, q, d);
            set_basic(r, q, value_[q]);
        }
    }

    void pivot(std::size_t r, std::size_t q, std::vector<double> &d) {
        double *prow = &tab_[r * width_];
        const double inv = 1.0 / prow[q];
        for (std::size_t j = 0; j < width_; ++j)
            prow[j] *= inv;
        prow[q] = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r)
                continue;
            double *row = &tab_[i * width_];
            const double f = row[q];
            if (f == 0.0)
                continue;
            for (std::size_t j = 0; j < width_; ++j)
                row[j] -= f * prow[j];
            row[q] = 0.0;
        }
        const double f = d[q];
        if (f != 0.0) {
            for (std::size_t j = 0; j < width_; ++j)
                d[j] -= f * prow[j];
            d[q] = 0.0;
        }
    }

    std::size_t n_;
    std::size_t m_;
    std::size_t width_ = 0;
    std::size_t first_art_ = 0;
    std::vector<double> lower_, upper_, value_;
    std::vector<std::size_t> basis_;
    std::vector<long> pos_;
    std::vector<double> tab_;
    std::vector<double> xb_;
};

} // namespace

LpResult solve_lp(const MilpInstance &inst, std::span<const Interval> boxes,
                  std::span<const Cut> cuts, std::int64_t iter_limit) {
    if (boxes.size() != inst.num_cols())
        throw ContractViolation(fmt::format("{} boxes given for {} columns", boxes.size(), inst.num_cols()));
    LpResult res;
    for (const auto &b : boxes)
        if (b.empty())
            return res;
    for (const auto &r : inst.rows())
        if (r.entries.empty() && (r.lhs > kPrimalTol || r.rhs < -kPrimalTol))
            return res;

    Tableau tab(inst, boxes, cuts);
    if (tab.has_artificials()) {
        const auto st = tab.phase_one(res.iterations, iter_limit);
        if (st != LpStatus::Optimal) {
            res.status = st;
            if (st == LpStatus::IterLimit) {
                res.values = tab.structural_values();
                res.objective = evaluate_objective(inst, res.values);
            }
            return res;
        }
    }
    res.status = tab.phase_two(inst, res.iterations, iter_limit);
    if (res.status == LpStatus::Optimal || res.status == LpStatus::IterLimit) {
        res.values = tab.structural_values();
        res.objective = evaluate_objective(inst, res.values);
    } else {
        res.objective = -kInf;
    }
    return res;
}

LpResult solve_relaxation(const MilpInstance &inst, std::span<const BoundChange> overrides,
                          std::int64_t iter_limit) {
    auto boxes = inst.boxes();
    for (const auto &bc : overrides) {
        if (bc.col < 0 || static_cast<std::size_t>(bc.col) >= boxes.size())
            throw ContractViolation(fmt::format("bound override on unknown column {}", bc.col));
        boxes[static_cast<std::size_t>(bc.col)] = {bc.lower, bc.upper};
    }
    return solve_lp(inst, boxes, {}, iter_limit);
}

} // namespace n2n::lp
