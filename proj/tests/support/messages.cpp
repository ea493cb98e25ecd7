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

#include "messages.hpp"

#include <cmath>
#include <cstring>
#include <limits>

namespace n2n::testkit {

using namespace proto;

namespace {

struct Gen {
    std::mt19937_64 &rng;

    std::uint64_t u64() { return rng(); }
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : rng() % n; }
    bool coin() { return rng() & 1u; }

    std::uint64_t count_like() {
        switch (below(4)) {
        case 0:
            return below(16);
        case 1:
            return below(1u << 14);
        case 2:
            return below(1ull << 35);
        default:
            return u64();
        }
    }

    double number() {
        switch (below(9)) {
        case 0:
            return kInf;
        case 1:
            return -kInf;
        case 2:
            return static_cast<double>(static_cast<std::int64_t>(below(20001)) - 10000);
        case 3:
            return -0.0;
        case 4:
            return std::ldexp(1.0, 53) * (coin() ? 1 : -1);
        case 5:
            return std::ldexp(1.0, 53) + 2.0;
        case 6: {
            // Any finite bit pattern.
            for (;;) {
                const auto bits = u64();
                double d;
                std::memcpy(&d, &bits, sizeof d);
                if (std::isfinite(d))
                    return d;
            }
        }
        case 7:
            return std::numeric_limits<double>::denorm_min();
        default:
            return std::uniform_real_distribution<double>(-1e6, 1e6)(rng);
        }
    }

    double finite() {
        for (;;) {
            const double d = number();
            if (std::isfinite(d))
                return d;
        }
    }

    int col() { return static_cast<int>(coin() ? below(512) : below(1u << 30)); }

    BoundChange bound_change() {
        BoundChange b;
        b.col = col();
        if (below(3) == 0) {
            b.lower = b.upper = finite();
        } else {
            b.lower = number();
            b.upper = number();
            if (b.lower > b.upper)
                std::swap(b.lower, b.upper);
        }
        return b;
    }

    Cut cut() {
        Cut c;
        const auto n = below(6);
        for (std::size_t i = 0; i < n; ++i)
            c.entries.push_back({col(), finite()});
        c.lhs = number();
        c.rhs = number();
        return c;
    }

    bnb::NodeDelta delta() {
        bnb::NodeDelta d;
        const auto k = below(4) == 0 ? below(200) : below(8);
        for (std::size_t i = 0; i < k; ++i)
            d.bound_changes.push_back(bound_change());
        if (below(4) == 0) {
            const auto n = 1 + below(3);
            for (std::size_t i = 0; i < n; ++i)
                d.cuts.push_back(cut());
        }
        d.origin.parent_task = count_like();
        d.origin.child_ordinal = static_cast<std::uint32_t>(u64());
        d.dual_bound = number();
        return d;
    }

    bnb::SolverConfig cfg() {
        bnb::SolverConfig c;
        if (coin())
            return c;
        c.node_limit = 1 + static_cast<std::int64_t>(below(std::numeric_limits<std::int64_t>::max()));
        c.gap_limit = std::abs(finite());
        c.node_selection = coin() ? bnb::NodeSelection::BestBound : bnb::NodeSelection::DepthFirst;
        c.branch_tie = coin() ? bnb::BranchTie::LowestIndex : bnb::BranchTie::HighestIndex;
        c.cp_emphasis = coin();
        c.rng_seed = count_like();
        c.feas_tol = std::abs(finite());
        c.int_tol = std::abs(finite());
        return c;
    }

    Solution solution() {
        Solution s;
        const auto n = below(40);
        for (std::size_t i = 0; i < n; ++i)
            s.values.push_back(number());
        s.objective = number();
        return s;
    }

    bnb::SolveOutcome outcome() {
        bnb::SolveOutcome o;
        o.status = static_cast<bnb::SolveStatus>(below(4));
        if (coin())
            o.best_solution = solution();
        o.dual_bound = number();
        const auto n = below(5);
        for (std::size_t i = 0; i < n; ++i)
            o.open_deltas.push_back(delta());
        o.nodes_processed = count_like();
        o.effort = count_like();
        return o;
    }

    Task task() {
        Task t;
        t.id = count_like();
        t.delta = delta();
        t.cfg = cfg();
        t.primal_bound = number();
        if (coin())
            t.incumbent_ref = static_cast<std::uint32_t>(u64());
        t.crossover = coin();
        return t;
    }

    std::string bytes() {
        std::string s(below(4) == 0 ? below(20000) : below(64), '\0');
        for (auto &c : s)
            c = static_cast<char>(u64());
        return s;
    }
};

} // namespace

Message random_message(std::mt19937_64 &rng, std::size_t kind) {
    Gen g{rng};
    switch (kind) {
    case 0:
        return Hello{static_cast<std::uint32_t>(g.u64()), g.count_like()};
    case 1:
        return InstanceFile{g.bytes(), g.u64()};
    case 2:
        return Activate{g.coin()};
    case 3:
        return TaskAssign{g.task()};
    case 4:
        return TaskResult{g.count_like(), g.outcome()};
    case 5:
        return IncumbentUpdate{g.solution()};
    case 6:
        return BoundUpdate{g.number()};
    case 7:
        return Interrupt{g.count_like()};
    case 8:
        return Terminate{};
    case 9:
        return RacingStart{g.cfg()};
    case 10:
        return RacingReport{g.number(), g.count_like(), g.coin()};
    case 11:
        return RacingStop{};
    default:
        return Stats{g.count_like(), g.count_like()};
    }
}

Message random_message(std::mt19937_64 &rng) {
    return random_message(rng, rng() % std::variant_size_v<Message>);
}

} // namespace n2n::testkit
