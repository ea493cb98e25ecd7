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

#include "n2n/bnb.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "n2n/lp.hpp"

namespace n2n::bnb {

std::string_view to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::SolvedOptimal: return "SolvedOptimal";
    case SolveStatus::SolvedInfeasible: return "SolvedInfeasible";
    case SolveStatus::NodeLimit: return "NodeLimit";
    case SolveStatus::Unbounded: return "Unbounded";
    }
    return "?";
}

void SolverConfig::validate() const {
    if (node_limit < 1)
        throw ContractViolation("node_limit must be >= 1");
    if (!(gap_limit >= 0.0))
        throw ContractViolation("gap_limit must be >= 0");
    if (!(feas_tol >= 0.0) || !(int_tol >= 0.0))
        throw ContractViolation("tolerances must be >= 0");
}

BranchDecision branch(std::span<const double> values, std::span<const int> integral_cols,
                      std::span<const Interval> boxes, double int_tol, BranchTie tie) {
    int best_col = -1;
    double best_score = 0.0;
    double best_value = 0.0;
    for (int j : integral_cols) {
        const double v = values[static_cast<std::size_t>(j)];
        const double frac = v - std::floor(v);
        const double score = std::min(frac, 1.0 - frac);
        if (score <= int_tol)
            continue;
        const bool better = score > best_score ||
                            (score == best_score && tie == BranchTie::HighestIndex && best_col >= 0);
        if (best_col < 0 || better) {
            best_col = j;
            best_score = score;
            best_value = v;
        }
    }
    if (best_col < 0)
        throw ContractViolation("branch called without a fractional integral column");
    const auto &box = boxes[static_cast<std::size_t>(best_col)];
    BranchDecision d;
    d.col = best_col;
    d.down = {best_col, box.lower, std::floor(best_value)};
    d.up = {best_col, std::ceil(best_value), box.upper};
    return d;
}

namespace {

constexpr double kContinuousTightenRel = 1e-7;

bool tighten_row(std::span<const SparseEntry> entries, double lhs, double rhs,
                 std::span<const char> integral, std::vector<Interval> &boxes,
                 const PropagationOptions &opts, bool &changed) {
    double min_fin = 0.0, max_fin = 0.0;
    int min_inf = 0, max_inf = 0;
    for (const auto &e : entries) {
        const auto &b = boxes[static_cast<std::size_t>(e.col)];
        const double lo_c = e.value > 0.0 ? b.lower : b.upper;
        const double hi_c = e.value > 0.0 ? b.upper : b.lower;
        if (std::isinf(lo_c))
            ++min_inf;
        else
            min_fin += e.value * lo_c;
        if (std::isinf(hi_c))
            ++max_inf;
        else
            max_fin += e.value * hi_c;
    }
    if (min_inf == 0 && min_fin > rhs + opts.feas_tol)
        return false;
    if (max_inf == 0 && max_fin < lhs - opts.feas_tol)
        return false;

    for (const auto &e : entries) {
        if (e.value == 0.0)
            continue;
        const auto j = static_cast<std::size_t>(e.col);
        auto &b = boxes[j];
        const double lo_c = e.value > 0.0 ? b.lower : b.upper;
        const double hi_c = e.value > 0.0 ? b.upper : b.lower;

        // Activity bounds of the row without this entry.
        double resid_min = kInf, resid_max = -kInf;
        if (std::isinf(lo_c))
            resid_min = min_inf == 1 ? min_fin : -kInf;
        else
            resid_min = min_inf == 0 ? min_fin - e.value * lo_c : -kInf;
        if (std::isinf(hi_c))
            resid_max = max_inf == 1 ? max_fin : kInf;
        else
            resid_max = max_inf == 0 ? max_fin - e.value * hi_c : kInf;

        double new_lo = b.lower, new_up = b.upper;
        if (rhs < kInf && resid_min > -kInf) {
            const double lim = (rhs - resid_min) / e.value;
            if (e.value > 0.0)
                new_up = std::min(new_up, lim);
            else
                new_lo = std::max(new_lo, lim);
        }
        if (lhs > -kInf && resid_max < kInf) {
            const double lim = (lhs - resid_max) / e.value;
            if (e.value > 0.0)
                new_lo = std::max(new_lo, lim);
            else
                new_up = std::min(new_up, lim);
        }
        if (integral[j]) {
            if (new_up < kInf)
                new_up = std::floor(new_up + opts.int_tol);
            if (new_lo > -kInf)
                new_lo = std::ceil(new_lo - opts.int_tol);
        } else {
            // Skip negligible continuous tightenings so rounds terminate.
            auto significant = [](double now, double before) {
                return std::isinf(before) ||
                       std::abs(now - before) > kContinuousTightenRel * std::max(1.0, std::abs(before));
            };
            if (!significant(new_up, b.upper))
                new_up = b.upper;
            if (!significant(new_lo, b.lower))
                new_lo = b.lower;
        }
        if (new_lo > new_up) {
            if (integral[j] || new_lo > new_up + opts.feas_tol)
                return false;
            new_lo = new_up = std::clamp(0.5 * (new_lo + new_up), b.lower, b.upper);
        }
        if (new_lo > b.lower || new_up < b.upper) {
            // Activity sums change; refresh them for the remaining entries.
            const double old_lo_c = lo_c, old_hi_c = hi_c;
            b.lower = std::max(b.lower, new_lo);
            b.upper = std::min(b.upper, new_up);
            changed = true;
            const double now_lo_c = e.value > 0.0 ? b.lower : b.upper;
            const double now_hi_c = e.value > 0.0 ? b.upper : b.lower;
            if (std::isinf(old_lo_c) && !std::isinf(now_lo_c)) {
                --min_inf;
                min_fin += e.value * now_lo_c;
            } else if (!std::isinf(old_lo_c)) {
                min_fin += e.value * (now_lo_c - old_lo_c);
            }
            if (std::isinf(old_hi_c) && !std::isinf(now_hi_c)) {
                --max_inf;
                max_fin += e.value * now_hi_c;
            } else if (!std::isinf(old_hi_c)) {
                max_fin += e.value * (now_hi_c - old_hi_c);
            }
        }
    }
    return true;
}

} // namespace

bool propagate(const MilpInstance &inst, std::vector<Interval> &boxes, std::span<const Cut> cuts,
               const PropagationOptions &opts) {
    std::vector<char> integral(inst.num_cols());
    for (std::size_t j = 0; j < inst.num_cols(); ++j)
        integral[j] = inst.col(j).integral ? 1 : 0;
    for (std::size_t j = 0; j < boxes.size(); ++j)
        if (boxes[j].lower > boxes[j].upper)
            return false;

    std::vector<SparseEntry> objective_row;
    const bool use_cutoff = opts.objective_cutoff < kInf;
    if (use_cutoff)
        for (std::size_t j = 0; j < inst.num_cols(); ++j)
            if (inst.col(j).obj != 0.0)
                objective_row.push_back({static_cast<int>(j), inst.col(j).obj});

    for (int round = 0; round < opts.max_rounds; ++round) {
        bool changed = false;
        for (const auto &r : inst.rows())
            if (!tighten_row(r.entries, r.lhs, r.rhs, integral, boxes, opts, changed))
                return false;
        for (const auto &c : cuts)
            if (!tighten_row(c.entries, c.lhs, c.rhs, integral, boxes, opts, changed))
                return false;
        if (use_cutoff &&
            !tighten_row(objective_row, -kInf, opts.objective_cutoff - inst.obj_offset(), integral,
                         boxes, opts, changed))
            return false;
        if (!changed)
            break;
    }
    return true;
}

std::vector<Interval> apply_delta(const MilpInstance &inst, const NodeDelta &delta) {
    auto boxes = inst.boxes();
    for (const auto &bc : delta.bound_changes) {
        if (bc.col < 0 || static_cast<std::size_t>(bc.col) >= boxes.size())
            throw ContractViolation(fmt::format("delta references unknown column {}", bc.col));
        boxes[static_cast<std::size_t>(bc.col)] = {bc.lower, bc.upper};
    }
    for (const auto &cut : delta.cuts)
        for (const auto &e : cut.entries)
            if (e.col < 0 || static_cast<std::size_t>(e.col) >= boxes.size())
                throw ContractViolation(fmt::format("cut references unknown column {}", e.col));
    return boxes;
}

namespace {

struct OpenNode {
    std::vector<Interval> boxes;
    double bound = -kInf;
    std::uint32_t depth = 0;
    std::uint64_t ordinal = 0;
};

class TreeSearch {
  public:
    TreeSearch(const MilpInstance &inst, const NodeDelta &delta, const SolverConfig &cfg,
               double primal_bound, SolveHooks *hooks)
        : inst_(inst), delta_(delta), cfg_(cfg), hooks_(hooks), primal_(primal_bound),
          cutoff_input_(primal_bound) {
        for (std::size_t j = 0; j < inst.num_cols(); ++j)
            if (inst.col(j).integral)
                integral_cols_.push_back(static_cast<int>(j));
        dfs_ = cfg.cp_emphasis || cfg.node_selection == NodeSelection::DepthFirst;
        prop_.max_rounds = cfg.cp_emphasis ? 20 : 3;
        prop_.feas_tol = cfg.feas_tol;
        prop_.int_tol = cfg.int_tol;
    }

    SolveOutcome run(std::vector<Interval> root_boxes, const std::optional<Solution> &incumbent) {
        if (incumbent && incumbent->values.size() == inst_.num_cols() && incumbent->objective < primal_) {
            best_ = *incumbent;
            primal_ = incumbent->objective;
        }
        push(OpenNode{std::move(root_boxes), delta_.dual_bound, 0, next_ordinal_++});

        bool stopped = false;
        while (!queue_.empty()) {
            if (static_cast<std::int64_t>(out_.nodes_processed) >= cfg_.node_limit) {
                stopped = true;
                break;
            }
            if (hooks_) {
                if (hooks_->interrupted()) {
                    stopped = true;
                    break;
                }
                const double ext = hooks_->external_primal_bound();
                if (ext < primal_)
                    primal_ = ext;
            }
            OpenNode node = pop();
            if (node.bound >= cutoff())
                continue;
            ++out_.nodes_processed;
            if (!process(std::move(node)))
                return std::move(out_);
            if (hooks_)
                hooks_->on_progress(Progress{out_.nodes_processed, queue_.size(), current_dual(), primal_});
        }
        finish(stopped);
        return std::move(out_);
    }

  private:
    using Key = std::tuple<double, double, std::uint64_t>;

    Key key_of(const OpenNode &n) const {
        if (dfs_)
            return {-static_cast<double>(n.depth), 0.0, n.ordinal};
        return {n.bound, -static_cast<double>(n.depth), n.ordinal};
    }

    void push(OpenNode n) {
        queue_.emplace(key_of(n), nodes_.size());
        nodes_.push_back(std::move(n));
    }

    OpenNode pop() {
        auto it = queue_.begin();
        OpenNode n = std::move(nodes_[it->second]);
        queue_.erase(it);
        return n;
    }

    double cutoff() const {
        if (primal_ == kInf)
            return kInf;
        double slack = kPruneSlack;
        if (cfg_.gap_limit > 0.0)
            slack = std::max(slack, cfg_.gap_limit * std::max(1.0, std::abs(primal_)));
        return primal_ - slack;
    }

    double current_dual() const {
        double d = best_ ? best_->objective : kInf;
        for (const auto &[key, idx] : queue_)
            d = std::min(d, nodes_[idx].bound);
        return d;
    }

    // Returns false when the search must stop (unbounded relaxation).
    bool process(OpenNode node) {
        auto opts = prop_;
        if (cfg_.cp_emphasis)
            opts.objective_cutoff = primal_ < kInf ? cutoff() : kInf;
        if (!propagate(inst_, node.boxes, delta_.cuts, opts))
            return true;

        const auto lp = lp::solve_lp(inst_, node.boxes, delta_.cuts);
        out_.effort += static_cast<std::uint64_t>(lp.iterations);
        switch (lp.status) {
        case lp::LpStatus::Infeasible:
            return true;
        case lp::LpStatus::Unbounded:
            out_.status = SolveStatus::Unbounded;
            out_.dual_bound = -kInf;
            out_.best_solution = best_;
            return false;
        case lp::LpStatus::IterLimit:
            branch_unsolved(std::move(node));
            return true;
        case lp::LpStatus::Optimal:
            break;
        }

        const double bound = std::max(node.bound, lp.objective);
        if (bound >= cutoff())
            return true;

        bool fractional = false;
        for (int j : integral_cols_) {
            const double v = lp.values[static_cast<std::size_t>(j)];
            if (std::abs(v - std::round(v)) > cfg_.int_tol) {
                fractional = true;
                break;
            }
        }
        if (!fractional) {
            consider_solution(lp.values);
            return true;
        }

        const auto d = branch(lp.values, integral_cols_, node.boxes, cfg_.int_tol, cfg_.branch_tie);
        OpenNode down{node.boxes, bound, node.depth + 1, next_ordinal_++};
        down.boxes[static_cast<std::size_t>(d.col)] = {d.down.lower, d.down.upper};
        OpenNode up{std::move(node.boxes), bound, node.depth + 1, next_ordinal_++};
        up.boxes[static_cast<std::size_t>(d.col)] = {d.up.lower, d.up.upper};
        push(std::move(down));
        push(std::move(up));
        return true;
    }

    void branch_unsolved(OpenNode node) {
        for (int j : integral_cols_) {
            const auto &b = node.boxes[static_cast<std::size_t>(j)];
            if (b.lower == b.upper)
                continue;
            double mid = std::floor(0.5 * (b.lower + b.upper));
            if (!std::isfinite(mid))
                mid = std::isfinite(b.lower) ? b.lower : (std::isfinite(b.upper) ? b.upper - 1.0 : 0.0);
            OpenNode down{node.boxes, node.bound, node.depth + 1, next_ordinal_++};
            down.boxes[static_cast<std::size_t>(j)].upper = mid;
            OpenNode up{std::move(node.boxes), node.bound, node.depth + 1, next_ordinal_++};
            up.boxes[static_cast<std::size_t>(j)].lower = mid + 1.0;
            push(std::move(down));
            push(std::move(up));
            return;
        }
        throw std::runtime_error("LP iteration limit reached on a node without integral freedom");
    }

    void consider_solution(const std::vector<double> &lp_values) {
        std::vector<double> vals = lp_values;
        for (int j : integral_cols_)
            vals[static_cast<std::size_t>(j)] = std::round(vals[static_cast<std::size_t>(j)]);
        if (!check_feasible(inst_, vals, cfg_.feas_tol, cfg_.int_tol).feasible)
            vals = lp_values;
        auto sol = make_solution(inst_, std::move(vals));
        if (sol.objective < primal_ - kPruneSlack || (!best_ && sol.objective < primal_)) {
            primal_ = sol.objective;
            best_ = sol;
            if (hooks_)
                hooks_->on_incumbent(*best_);
        }
    }

    NodeDelta to_delta(const OpenNode &n, std::uint32_t ordinal) const {
        NodeDelta d;
        for (std::size_t j = 0; j < inst_.num_cols(); ++j) {
            const auto &c = inst_.col(j);
            const auto &b = n.boxes[j];
            if (b.lower != c.lower || b.upper != c.upper)
                d.bound_changes.push_back({static_cast<int>(j), b.lower, b.upper});
        }
        d.cuts = delta_.cuts;
        d.origin = {0, ordinal};
        d.dual_bound = n.bound;
        return d;
    }

    void finish(bool stopped) {
        out_.best_solution = best_;
        std::vector<const OpenNode *> left;
        if (stopped) {
            const double cut = cutoff();
            for (const auto &[key, idx] : queue_)
                if (nodes_[idx].bound < cut)
                    left.push_back(&nodes_[idx]);
        }
        if (left.empty()) {
            out_.status = best_ ? SolveStatus::SolvedOptimal : SolveStatus::SolvedInfeasible;
            out_.dual_bound = best_ ? best_->objective : cutoff_input_;
            return;
        }
        std::sort(left.begin(), left.end(),
                  [](const OpenNode *a, const OpenNode *b) { return a->ordinal < b->ordinal; });
        out_.status = SolveStatus::NodeLimit;
        out_.dual_bound = best_ ? best_->objective : kInf;
        std::uint32_t k = 0;
        for (const auto *n : left) {
            out_.dual_bound = std::min(out_.dual_bound, n->bound);
            out_.open_deltas.push_back(to_delta(*n, k++));
        }
    }

    const MilpInstance &inst_;
    const NodeDelta &delta_;
    const SolverConfig &cfg_;
    SolveHooks *hooks_;
    PropagationOptions prop_;
    std::vector<int> integral_cols_;
    bool dfs_ = false;
    double primal_;
    double cutoff_input_;
    std::optional<Solution> best_;
    std::vector<OpenNode> nodes_;
    std::set<std::pair<Key, std::size_t>> queue_;
    std::uint64_t next_ordinal_ = 0;
    SolveOutcome out_;
};

} // namespace

SolveOutcome solve_subproblem(const MilpInstance &presolved, const NodeDelta &delta,
                              const SolverConfig &cfg, double primal_bound,
                              const std::optional<Solution> &incumbent, SolveHooks *hooks) {
    cfg.validate();
    auto boxes = apply_delta(presolved, delta);
    TreeSearch search(presolved, delta, cfg, primal_bound, hooks);
    for (const auto &b : boxes) {
        if (b.empty()) {
            SolveOutcome out;
            if (incumbent && incumbent->values.size() == presolved.num_cols() &&
                incumbent->objective < primal_bound) {
                out.status = SolveStatus::SolvedOptimal;
                out.best_solution = incumbent;
                out.dual_bound = incumbent->objective;
            } else {
                out.dual_bound = primal_bound;
            }
            return out;
        }
    }
    return search.run(std::move(boxes), incumbent);
}

} // namespace n2n::bnb
