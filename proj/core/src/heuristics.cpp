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

#include "n2n/heuristics.hpp"

#include <algorithm>
#include <cmath>

namespace n2n::heur {

bool SolutionPool::add(Solution sol) {
    if (capacity_ == 0)
        return false;
    for (const auto &s : sols_) {
        if (s.values.size() != sol.values.size())
            continue;
        bool same = true;
        for (std::size_t j = 0; j < s.values.size() && same; ++j)
            same = std::abs(s.values[j] - sol.values[j]) <= 1e-9;
        if (same)
            return false;
    }
    auto it = std::upper_bound(sols_.begin(), sols_.end(), sol.objective,
                               [](double obj, const Solution &s) { return obj < s.objective; });
    if (sols_.size() == capacity_ && it == sols_.end())
        return false;
    sols_.insert(it, std::move(sol));
    if (sols_.size() > capacity_)
        sols_.pop_back();
    return true;
}

namespace {

struct ColEntry {
    std::size_t row;
    double value;
};

double violation(const Row &r, double act) { return std::max({0.0, r.lhs - act, act - r.rhs}); }

// Integral columns move within [ceil(l), floor(u)].
Interval move_box(const Column &c) {
    if (!c.integral)
        return c.box();
    return {std::ceil(c.lower), std::floor(c.upper)};
}

double start_value(const Column &c) {
    const auto b = move_box(c);
    if (b.lower <= 0.0 && 0.0 <= b.upper)
        return 0.0;
    return b.lower > 0.0 ? b.lower : b.upper;
}

class JumpSearch {
  public:
    JumpSearch(const MilpInstance &inst, const FeasibilityJumpOptions &opts)
        : inst_(inst), opts_(opts), by_col_(inst.num_cols()), weight_(inst.num_rows(), 1.0),
          act_(inst.num_rows(), 0.0) {
        for (std::size_t i = 0; i < inst.num_rows(); ++i)
            for (const auto &e : inst.row(i).entries)
                by_col_[static_cast<std::size_t>(e.col)].push_back({i, e.value});
    }

    void reset(std::vector<double> x) {
        x_ = std::move(x);
        for (std::size_t i = 0; i < inst_.num_rows(); ++i)
            act_[i] = row_activity(inst_.row(i), x_);
    }

    std::optional<Solution> run(std::int64_t effort) {
        for (std::int64_t step = 0; step < effort; ++step) {
            if (total_violation() <= opts_.feas_tol) {
                if (check_feasible(inst_, x_, opts_.feas_tol, opts_.int_tol).feasible)
                    return make_solution(inst_, x_);
            }
            if (!move())
                bump_weights();
        }
        if (total_violation() <= opts_.feas_tol &&
            check_feasible(inst_, x_, opts_.feas_tol, opts_.int_tol).feasible)
            return make_solution(inst_, x_);
        return std::nullopt;
    }

  private:
    double total_violation() const {
        double t = 0.0;
        for (std::size_t i = 0; i < inst_.num_rows(); ++i)
            t += violation(inst_.row(i), act_[i]);
        return t;
    }

    // Weighted violation change of setting column j to v.
    double delta_of(std::size_t j, double v) const {
        const double shift = v - x_[j];
        double d = 0.0;
        for (const auto &ce : by_col_[j]) {
            const auto &r = inst_.row(ce.row);
            d += weight_[ce.row] * (violation(r, act_[ce.row] + ce.value * shift) - violation(r, act_[ce.row]));
        }
        return d;
    }

    void candidates(std::size_t j, std::vector<double> &out) const {
        out.clear();
        const auto &c = inst_.col(j);
        const auto box = move_box(c);
        auto push = [&](double v) {
            if (!std::isfinite(v))
                return;
            v = std::clamp(v, box.lower, box.upper);
            if (c.integral) {
                out.push_back(std::clamp(std::floor(v), box.lower, box.upper));
                out.push_back(std::clamp(std::ceil(v), box.lower, box.upper));
            } else {
                out.push_back(v);
            }
        };
        push(c.lower);
        push(c.upper);
        for (const auto &ce : by_col_[j]) {
            const auto &r = inst_.row(ce.row);
            if (r.lhs > -kInf)
                push(x_[j] + (r.lhs - act_[ce.row]) / ce.value);
            if (r.rhs < kInf)
                push(x_[j] + (r.rhs - act_[ce.row]) / ce.value);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }

    bool move() {
        std::vector<char> considered(inst_.num_cols(), 0);
        for (std::size_t i = 0; i < inst_.num_rows(); ++i) {
            if (violation(inst_.row(i), act_[i]) <= 0.0)
                continue;
            for (const auto &e : inst_.row(i).entries)
                considered[static_cast<std::size_t>(e.col)] = 1;
        }
        std::size_t best_col = inst_.num_cols();
        double best_gain = 1e-12;
        double best_value = 0.0;
        std::vector<double> cand;
        for (std::size_t j = 0; j < inst_.num_cols(); ++j) {
            if (!considered[j] || inst_.col(j).lower == inst_.col(j).upper)
                continue;
            candidates(j, cand);
            for (double v : cand) {
                if (v == x_[j])
                    continue;
                const double gain = -delta_of(j, v);
                if (gain > best_gain) {
                    best_gain = gain;
                    best_col = j;
                    best_value = v;
                }
            }
        }
        if (best_col == inst_.num_cols())
            return false;
        const double shift = best_value - x_[best_col];
        for (const auto &ce : by_col_[best_col])
            act_[ce.row] += ce.value * shift;
        x_[best_col] = best_value;
        return true;
    }

    void bump_weights() {
        for (std::size_t i = 0; i < inst_.num_rows(); ++i)
            if (violation(inst_.row(i), act_[i]) > 0.0)
                weight_[i] += 1.0;
    }

    const MilpInstance &inst_;
    FeasibilityJumpOptions opts_;
    std::vector<std::vector<ColEntry>> by_col_;
    std::vector<double> weight_;
    std::vector<double> act_;
    std::vector<double> x_;
};

} // namespace

std::optional<Solution> feasibility_jump(const MilpInstance &inst, const std::optional<Solution> &start,
                                         std::int64_t effort, const FeasibilityJumpOptions &opts) {
    if (effort < 1)
        throw ContractViolation("feasibility_jump needs effort >= 1");
    for (const auto &c : inst.cols())
        if (c.integral && std::ceil(c.lower - opts.int_tol) > std::floor(c.upper + opts.int_tol))
            return std::nullopt;

    std::vector<double> x(inst.num_cols());
    if (start && start->values.size() == inst.num_cols()) {
        if (check_feasible(inst, *start, opts.feas_tol, opts.int_tol).feasible)
            return start;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const auto &c = inst.col(j);
            double v = std::isfinite(start->values[j]) ? start->values[j] : start_value(c);
            if (c.integral)
                v = std::round(v);
            const auto box = move_box(c);
            x[j] = std::clamp(v, box.lower, box.upper);
        }
    } else {
        for (std::size_t j = 0; j < x.size(); ++j)
            x[j] = start_value(inst.col(j));
    }
    JumpSearch search(inst, opts);
    search.reset(std::move(x));
    return search.run(effort);
}

Solution one_opt(const MilpInstance &inst, const Solution &sol, double feas_tol, double int_tol) {
    if (!check_feasible(inst, sol, feas_tol, int_tol).feasible)
        throw ContractViolation("one_opt needs a feasible solution");

    std::vector<std::vector<ColEntry>> by_col(inst.num_cols());
    for (std::size_t i = 0; i < inst.num_rows(); ++i)
        for (const auto &e : inst.row(i).entries)
            by_col[static_cast<std::size_t>(e.col)].push_back({i, e.value});
    std::vector<double> act(inst.num_rows());
    for (std::size_t i = 0; i < inst.num_rows(); ++i)
        act[i] = row_activity(inst.row(i), sol.values);

    std::vector<double> x = sol.values;
    bool moved_any = false;
    for (int pass = 0; pass < 10; ++pass) {
        bool improved = false;
        for (std::size_t j = 0; j < inst.num_cols(); ++j) {
            const auto &c = inst.col(j);
            if (!c.integral || c.obj == 0.0)
                continue;
            const double dir = c.obj > 0.0 ? -1.0 : 1.0;
            double room = dir > 0.0 ? c.upper - x[j] : x[j] - c.lower;
            for (const auto &ce : by_col[j]) {
                const auto &r = inst.row(ce.row);
                const double rate = ce.value * dir;
                if (rate > 0.0 && r.rhs < kInf)
                    room = std::min(room, std::max(0.0, r.rhs - act[ce.row]) / rate);
                else if (rate < 0.0 && r.lhs > -kInf)
                    room = std::min(room, std::max(0.0, act[ce.row] - r.lhs) / -rate);
            }
            if (!std::isfinite(room))
                continue;
            const double step = std::floor(room + 1e-9);
            if (step < 1.0)
                continue;
            const double old = x[j];
            x[j] = old + dir * step;
            if (!check_feasible(inst, x, feas_tol, int_tol).feasible) {
                x[j] = old;
                continue;
            }
            for (const auto &ce : by_col[j])
                act[ce.row] += ce.value * dir * step;
            improved = true;
            moved_any = true;
        }
        if (!improved)
            break;
    }
    if (!moved_any)
        return sol;
    return make_solution(inst, std::move(x));
}

std::optional<bnb::NodeDelta> crossover_delta(const MilpInstance &inst, const SolutionPool &pool,
                                              std::size_t take, double int_tol) {
    if (take < 2 || pool.size() < 2)
        return std::nullopt;
    const std::size_t k = std::min(take, pool.size());
    const auto &sols = pool.solutions();
    bnb::NodeDelta delta;
    for (std::size_t j = 0; j < inst.num_cols(); ++j) {
        if (!inst.col(j).integral)
            continue;
        const double r = std::round(sols[0].values[j]);
        bool agree = true;
        for (std::size_t s = 0; s < k && agree; ++s)
            agree = std::abs(sols[s].values[j] - r) <= int_tol;
        if (agree)
            delta.bound_changes.push_back({static_cast<int>(j), r, r});
    }
    if (delta.bound_changes.empty())
        return std::nullopt;
    return delta;
}

} // namespace n2n::heur
