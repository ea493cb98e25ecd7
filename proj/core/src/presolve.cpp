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

#include "n2n/presolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace n2n::presolve {

std::string_view to_string(Strategy s) {
    switch (s) {
    case Strategy::Off: return "off";
    case Strategy::Light: return "light";
    case Strategy::Aggressive: return "aggressive";
    }
    return "?";
}

Strategy strategy_from_string(std::string_view s) {
    if (s == "off") return Strategy::Off;
    if (s == "light") return Strategy::Light;
    if (s == "aggressive") return Strategy::Aggressive;
    throw std::invalid_argument(fmt::format("unknown presolve strategy '{}'", s));
}

PostsolveMap PostsolveMap::identity(const MilpInstance &inst) {
    PostsolveMap map;
    map.original_cols = inst.num_cols();
    map.original_rows = inst.num_rows();
    map.col_map.resize(inst.num_cols());
    map.row_map.resize(inst.num_rows());
    for (std::size_t j = 0; j < inst.num_cols(); ++j) {
        map.col_map[j] = static_cast<int>(j);
        map.original_obj.push_back(inst.col(j).obj);
    }
    for (std::size_t i = 0; i < inst.num_rows(); ++i)
        map.row_map[i] = static_cast<int>(i);
    map.original_offset = inst.obj_offset();
    return map;
}

namespace {

constexpr double kTol = 1e-9;

class Presolver {
  public:
    explicit Presolver(const MilpInstance &inst)
        : original_(inst), cols_(inst.cols()), rows_(inst.rows()), offset_(inst.obj_offset()),
          col_alive_(inst.num_cols(), true), row_alive_(inst.num_rows(), true) {
        map_ = PostsolveMap::identity(inst);
    }

    bool light() {
        bool changed = true;
        while (changed) {
            changed = false;
            if (!remove_fixed(changed) || !remove_rows(changed))
                return false;
        }
        return true;
    }

    bool aggressive() {
        for (std::size_t j = 0; j < cols_.size(); ++j) {
            auto &c = cols_[j];
            if (!c.integral)
                continue;
            const Interval old = c.box();
            c.lower = std::ceil(c.lower - kDefaultIntTol);
            c.upper = std::floor(c.upper + kDefaultIntTol);
            if (c.lower > c.upper)
                return false;
            if (c.box() != old)
                map_.reductions.emplace_back(TightenedBound{static_cast<int>(j), old});
        }
        for (int pass = 0; pass < 10; ++pass) {
            if (!light())
                return false;
            auto current = build();
            auto boxes = current.boxes();
            bnb::PropagationOptions opts;
            opts.max_rounds = 10;
            if (!bnb::propagate(current, boxes, {}, opts))
                return false;
            bool changed = false;
            for (std::size_t k = 0; k < boxes.size(); ++k) {
                const auto j = static_cast<std::size_t>(kept_[k]);
                auto &c = cols_[j];
                if (boxes[k] == c.box())
                    continue;
                map_.reductions.emplace_back(TightenedBound{static_cast<int>(j), c.box()});
                c.lower = boxes[k].lower;
                c.upper = boxes[k].upper;
                changed = true;
            }
            if (!changed)
                break;
        }
        return light();
    }

    PresolveResult finish() {
        PresolveResult res;
        res.instance = build();
        map_.col_map.assign(cols_.size(), -1);
        for (std::size_t k = 0; k < kept_.size(); ++k)
            map_.col_map[static_cast<std::size_t>(kept_[k])] = static_cast<int>(k);
        map_.row_map.assign(rows_.size(), -1);
        int next = 0;
        for (std::size_t i = 0; i < rows_.size(); ++i)
            if (row_alive_[i])
                map_.row_map[i] = next++;
        res.map = std::move(map_);
        return res;
    }

  private:
    bool remove_fixed(bool &changed) {
        std::vector<double> fixed(cols_.size(), std::numeric_limits<double>::quiet_NaN());
        bool any = false;
        for (std::size_t j = 0; j < cols_.size(); ++j) {
            auto &c = cols_[j];
            if (!col_alive_[j] || c.lower != c.upper)
                continue;
            if (c.integral && std::abs(c.lower - std::round(c.lower)) > kDefaultIntTol)
                return false;
            fixed[j] = c.lower;
            col_alive_[j] = false;
            offset_ += c.obj * c.lower;
            map_.reductions.emplace_back(FixedVar{static_cast<int>(j), c.lower});
            any = true;
        }
        if (!any)
            return true;
        changed = true;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (!row_alive_[i])
                continue;
            auto &r = rows_[i];
            double shift = 0.0;
            std::erase_if(r.entries, [&](const SparseEntry &e) {
                const double v = fixed[static_cast<std::size_t>(e.col)];
                if (std::isnan(v))
                    return false;
                shift += e.value * v;
                return true;
            });
            r.lhs -= shift;
            r.rhs -= shift;
        }
        return true;
    }

    bool remove_rows(bool &changed) {
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (!row_alive_[i])
                continue;
            const auto &r = rows_[i];
            if (r.entries.empty()) {
                if (r.lhs > kDefaultFeasTol || r.rhs < -kDefaultFeasTol)
                    return false;
                row_alive_[i] = false;
                map_.reductions.emplace_back(RemovedEmptyRow{static_cast<int>(i)});
                changed = true;
                continue;
            }
            double lo = 0.0, hi = 0.0;
            for (const auto &e : r.entries) {
                const auto &c = cols_[static_cast<std::size_t>(e.col)];
                lo += e.value > 0.0 ? e.value * c.lower : e.value * c.upper;
                hi += e.value > 0.0 ? e.value * c.upper : e.value * c.lower;
            }
            if (lo > r.rhs + kDefaultFeasTol || hi < r.lhs - kDefaultFeasTol)
                return false;
            if (lo >= r.lhs && hi <= r.rhs) {
                row_alive_[i] = false;
                map_.reductions.emplace_back(
                    RemovedRedundantRow{static_cast<int>(i), original_.row(i)});
                changed = true;
            }
        }
        return true;
    }

    MilpInstance build() {
        kept_.clear();
        std::vector<int> new_index(cols_.size(), -1);
        std::vector<Column> cols;
        for (std::size_t j = 0; j < cols_.size(); ++j) {
            if (!col_alive_[j])
                continue;
            new_index[j] = static_cast<int>(cols.size());
            kept_.push_back(static_cast<int>(j));
            cols.push_back(cols_[j]);
        }
        std::vector<Row> rows;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (!row_alive_[i])
                continue;
            Row r = rows_[i];
            for (auto &e : r.entries)
                e.col = new_index[static_cast<std::size_t>(e.col)];
            rows.push_back(std::move(r));
        }
        return MilpInstance(original_.name(), std::move(cols), std::move(rows), offset_,
                            original_.obj_name());
    }

    const MilpInstance &original_;
    std::vector<Column> cols_;
    std::vector<Row> rows_;
    double offset_;
    std::vector<bool> col_alive_;
    std::vector<bool> row_alive_;
    std::vector<int> kept_;
    PostsolveMap map_;
};

PresolveResult infeasible_result(const MilpInstance &inst) {
    PresolveResult res;
    res.infeasible = true;
    res.instance = inst;
    res.map = PostsolveMap::identity(inst);
    return res;
}

} // namespace

PresolveResult presolve(const MilpInstance &inst, Strategy strategy) {
    if (strategy == Strategy::Off)
        return PresolveResult{false, inst, PostsolveMap::identity(inst)};
    Presolver p(inst);
    const bool ok = strategy == Strategy::Light ? p.light() : p.aggressive();
    if (!ok)
        return infeasible_result(inst);
    return p.finish();
}

MultiPresolveResult multi_presolve(const MilpInstance &inst, std::span<const Strategy> strategies) {
    if (strategies.empty())
        throw ContractViolation("multi_presolve needs at least one strategy");
    MultiPresolveResult best;
    bool have = false;
    for (const auto s : strategies) {
        auto res = presolve(inst, s);
        if (res.infeasible) {
            MultiPresolveResult out;
            out.chosen = s;
            out.result = std::move(res);
            return out;
        }
        const auto score = size_score(res.instance);
        best.scores.push_back(score);
        if (!have || score < size_score(best.result.instance)) {
            best.chosen = s;
            best.result = std::move(res);
            have = true;
        }
    }
    return best;
}

Solution postsolve_solution(const PostsolveMap &map, const Solution &sol) {
    const auto kept = std::count_if(map.col_map.begin(), map.col_map.end(), [](int c) { return c >= 0; });
    if (sol.values.size() != static_cast<std::size_t>(kept))
        throw ContractViolation(fmt::format("presolved solution has {} values, expected {}",
                                            sol.values.size(), kept));
    std::vector<double> values(map.original_cols, 0.0);
    for (std::size_t j = 0; j < map.original_cols; ++j)
        if (map.col_map[j] >= 0)
            values[j] = sol.values[static_cast<std::size_t>(map.col_map[j])];
    for (const auto &red : map.reductions)
        if (const auto *f = std::get_if<FixedVar>(&red))
            values[static_cast<std::size_t>(f->col)] = f->value;
    double obj = 0.0;
    for (std::size_t j = 0; j < map.original_cols; ++j)
        obj += map.original_obj[j] * values[j];
    return Solution{std::move(values), obj + map.original_offset};
}

StripResult strip_fixed(const MilpInstance &presolved, const bnb::NodeDelta &delta) {
    const auto boxes = bnb::apply_delta(presolved, delta);
    StripResult out;
    auto &rm = out.restore;
    rm.presolved_cols = presolved.num_cols();
    rm.fixed_value.assign(presolved.num_cols(), std::numeric_limits<double>::quiet_NaN());
    rm.presolved_boxes = presolved.boxes();
    rm.delta_boxes = boxes;
    rm.cuts = delta.cuts;
    rm.origin = delta.origin;
    rm.dual_bound = delta.dual_bound;

    std::vector<int> new_index(presolved.num_cols(), -1);
    std::vector<Column> cols;
    double offset = presolved.obj_offset();
    for (std::size_t j = 0; j < presolved.num_cols(); ++j) {
        Column c = presolved.col(j);
        if (boxes[j].fixed()) {
            rm.fixed_value[j] = boxes[j].lower;
            offset += c.obj * boxes[j].lower;
            continue;
        }
        c.lower = boxes[j].lower;
        c.upper = boxes[j].upper;
        new_index[j] = static_cast<int>(cols.size());
        rm.kept_cols.push_back(static_cast<int>(j));
        cols.push_back(std::move(c));
    }

    auto substitute = [&](std::span<const SparseEntry> entries, double lhs, double rhs, std::string name) {
        Row r;
        r.name = std::move(name);
        double shift = 0.0;
        for (const auto &e : entries) {
            const int nj = new_index[static_cast<std::size_t>(e.col)];
            if (nj < 0)
                shift += e.value * rm.fixed_value[static_cast<std::size_t>(e.col)];
            else
                r.entries.push_back({nj, e.value});
        }
        r.lhs = lhs - shift;
        r.rhs = rhs - shift;
        return r;
    };
    std::vector<Row> rows;
    for (const auto &r : presolved.rows())
        rows.push_back(substitute(r.entries, r.lhs, r.rhs, r.name));
    for (std::size_t k = 0; k < delta.cuts.size(); ++k) {
        const auto &c = delta.cuts[k];
        rows.push_back(substitute(c.entries, c.lhs, c.rhs, fmt::format("__cut{}", k)));
    }
    // Substituting can leave rows with lhs > rhs by rounding noise only when
    // the delta is infeasible; clamp so construction succeeds and let the
    // solver report infeasibility.
    for (auto &r : rows)
        if (r.lhs > r.rhs && r.lhs - r.rhs <= kDefaultFeasTol)
            r.lhs = r.rhs;
    out.reduced = MilpInstance(presolved.name(), std::move(cols), std::move(rows), offset,
                               presolved.obj_name());
    out.reduced_delta.origin = delta.origin;
    out.reduced_delta.dual_bound = delta.dual_bound;
    return out;
}

Solution restore_solution(const RestoreMap &restore, const Solution &sol) {
    if (sol.values.size() != restore.kept_cols.size())
        throw ContractViolation(fmt::format("reduced solution has {} values, expected {}",
                                            sol.values.size(), restore.kept_cols.size()));
    std::vector<double> values(restore.presolved_cols, 0.0);
    for (std::size_t j = 0; j < restore.presolved_cols; ++j)
        if (!std::isnan(restore.fixed_value[j]))
            values[j] = restore.fixed_value[j];
    for (std::size_t k = 0; k < restore.kept_cols.size(); ++k)
        values[static_cast<std::size_t>(restore.kept_cols[k])] = sol.values[k];
    return Solution{std::move(values), sol.objective};
}

bnb::SolveOutcome restore_results(const RestoreMap &restore, const bnb::SolveOutcome &outcome) {
    bnb::SolveOutcome out;
    out.status = outcome.status;
    out.dual_bound = outcome.dual_bound;
    out.nodes_processed = outcome.nodes_processed;
    out.effort = outcome.effort;
    if (outcome.best_solution)
        out.best_solution = restore_solution(restore, *outcome.best_solution);
    for (const auto &d : outcome.open_deltas) {
        auto boxes = restore.delta_boxes;
        for (const auto &bc : d.bound_changes) {
            if (bc.col < 0 || static_cast<std::size_t>(bc.col) >= restore.kept_cols.size())
                throw ContractViolation(fmt::format("open node references reduced column {}", bc.col));
            boxes[static_cast<std::size_t>(restore.kept_cols[static_cast<std::size_t>(bc.col)])] = {bc.lower, bc.upper};
        }
        bnb::NodeDelta nd;
        for (std::size_t j = 0; j < boxes.size(); ++j)
            if (boxes[j] != restore.presolved_boxes[j])
                nd.bound_changes.push_back({static_cast<int>(j), boxes[j].lower, boxes[j].upper});
        nd.cuts = restore.cuts;
        nd.origin = d.origin;
        nd.dual_bound = d.dual_bound;
        out.open_deltas.push_back(std::move(nd));
    }
    return out;
}

} // namespace n2n::presolve
