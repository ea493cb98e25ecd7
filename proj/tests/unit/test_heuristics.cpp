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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "n2n/heuristics.hpp"
#include "n2n/mps.hpp"
#include "n2n/presolve.hpp"
#include "oracle.hpp"

using namespace n2n;

namespace {

MilpInstance knapsack() { return read_mps_file(testkit::data_dir() / "fixtures" / "f01_knapsack.mps"); }

// Best objective change reachable by moving one integral column, by
// enumeration of every value in its box.
double best_single_move(const MilpInstance &inst, const Solution &sol) {
    double best = 0.0;
    for (std::size_t j = 0; j < inst.num_cols(); ++j) {
        if (!inst.col(j).integral)
            continue;
        for (double v = inst.col(j).lower; v <= inst.col(j).upper; v += 1.0) {
            auto x = sol.values;
            x[j] = v;
            if (testkit::oracle_feasible(inst, x))
                best = std::min(best, inst.col(j).obj * (v - sol.values[j]));
        }
    }
    return best;
}

} // namespace

TEST(SolutionPool, SortedBoundedAndDeduplicated) {
    heur::SolutionPool pool(3);
    EXPECT_TRUE(pool.add({{1.0}, 5.0}));
    EXPECT_TRUE(pool.add({{2.0}, 3.0}));
    EXPECT_FALSE(pool.add({{2.0 + 1e-12}, 3.0}));
    EXPECT_TRUE(pool.add({{3.0}, 4.0}));
    EXPECT_FALSE(pool.add({{4.0}, 6.0}));
    EXPECT_TRUE(pool.add({{0.0}, 1.0}));
    ASSERT_EQ(pool.size(), 3u);
    EXPECT_EQ(pool.solutions()[0].objective, 1.0);
    EXPECT_EQ(pool.solutions()[1].objective, 3.0);
    EXPECT_EQ(pool.solutions()[2].objective, 4.0);
}

TEST(FeasibilityJump, FeasibleStartIsReturned) {
    auto inst = knapsack();
    auto start = make_solution(inst, {1.0, 0.0, 1.0});
    auto r = heur::feasibility_jump(inst, start, 50);
    ASSERT_TRUE(r);
    EXPECT_EQ(*r, start);
}

TEST(FeasibilityJump, CoversARowQuickly) {
    MilpInstance inst("c", {{"x", 1, 0, 1, true}, {"y", 1, 0, 1, true}}, {{"r", {{0, 1.0}, {1, 1.0}}, 1, kInf}});
    auto r = heur::feasibility_jump(inst, make_solution(inst, {0.0, 0.0}), 10);
    ASSERT_TRUE(r);
    EXPECT_GE(r->values[0] + r->values[1], 1.0);
    EXPECT_TRUE(testkit::oracle_feasible(inst, r->values));
}

TEST(FeasibilityJump, InfeasibleInstanceGivesNothing) {
    MilpInstance inst("i", {{"x", 0, 0, 5, true}}, {{"lo", {{0, 1.0}}, 2, kInf}, {"hi", {{0, 1.0}}, -kInf, 1}});
    EXPECT_FALSE(heur::feasibility_jump(inst, std::nullopt, 100));
}

TEST(FeasibilityJump, OutputsAreAlwaysFeasible) {
    int found = 0;
    auto suite = testkit::hand_fixtures();
    for (std::uint64_t s = 0; s < 200; ++s)
        suite.emplace_back("r", testkit::random_milp(s));
    for (const auto &[name, inst] : suite) {
        for (std::int64_t effort : {1, 10, 1000}) {
            auto r = heur::feasibility_jump(inst, std::nullopt, effort);
            if (!r)
                continue;
            ++found;
            EXPECT_TRUE(testkit::oracle_feasible(inst, r->values)) << name;
            EXPECT_NEAR(r->objective, evaluate_objective(inst, r->values), 1e-9);
        }
    }
    EXPECT_GT(found, 100);
}

TEST(FeasibilityJump, Deterministic) {
    for (std::uint64_t s = 0; s < 50; ++s) {
        auto inst = testkit::random_milp(s);
        EXPECT_EQ(heur::feasibility_jump(inst, std::nullopt, 500), heur::feasibility_jump(inst, std::nullopt, 500));
    }
}

TEST(OneOpt, LocalOptimumUnchanged) {
    auto inst = knapsack();
    auto sol = make_solution(inst, {0.0, 1.0, 1.0});
    EXPECT_EQ(heur::one_opt(inst, sol), sol);
}

TEST(OneOpt, MovesToTheBoxEnd) {
    MilpInstance inst("b", {{"x", -1, 0, 5, true}}, {});
    auto r = heur::one_opt(inst, make_solution(inst, {3.0}));
    EXPECT_EQ(r.values[0], 5.0);
    EXPECT_EQ(r.objective, -5.0);
}

TEST(OneOpt, ImprovesKnapsackAtLeastByTheBestFlip) {
    auto inst = knapsack();
    auto start = make_solution(inst, {0.0, 0.0, 0.0});
    const double flip = best_single_move(inst, start);
    ASSERT_LT(flip, 0.0);
    auto r = heur::one_opt(inst, start);
    EXPECT_LT(r.objective, start.objective);
    EXPECT_LE(r.objective, start.objective + flip + 1e-9);
    EXPECT_TRUE(testkit::oracle_feasible(inst, r.values));
}

TEST(OneOpt, InfeasibleInputIsAContractViolation) {
    auto inst = knapsack();
    EXPECT_THROW(heur::one_opt(inst, make_solution(inst, {1.0, 1.0, 1.0})), ContractViolation);
}

TEST(OneOpt, NeverWorsensAndIsAFixpoint) {
    for (std::uint64_t s = 0; s < 200; ++s) {
        auto inst = testkit::random_milp(s);
        auto start = heur::feasibility_jump(inst, std::nullopt, 1000);
        if (!start)
            continue;
        auto once = heur::one_opt(inst, *start);
        EXPECT_LE(once.objective, start->objective + 1e-12);
        EXPECT_TRUE(testkit::oracle_feasible(inst, once.values));
        auto twice = heur::one_opt(inst, once);
        EXPECT_EQ(twice, once) << inst.name();
        EXPECT_GE(best_single_move(inst, once), -1e-9) << inst.name();
    }
}

TEST(Crossover, IdenticalSolutionsFixEverything) {
    auto inst = knapsack();
    heur::SolutionPool pool;
    auto s = make_solution(inst, {1.0, 0.0, 1.0});
    pool.add(s);
    // Near-duplicates are refused by the pool, so seed a second entry that
    // only differs in a way crossover cannot see.
    heur::SolutionPool twin;
    twin.add(s);
    twin.add({{1.0, 0.0, 1.0 + 1e-8}, s.objective});
    auto d = heur::crossover_delta(inst, twin, 3);
    ASSERT_TRUE(d);
    ASSERT_EQ(d->bound_changes.size(), 3u);
    for (std::size_t j = 0; j < 3; ++j)
        EXPECT_EQ(d->bound_changes[j], (BoundChange{static_cast<int>(j), s.values[j], s.values[j]}));
    EXPECT_FALSE(heur::crossover_delta(inst, pool, 3));
}

TEST(Crossover, FixesOnlyTheAgreement) {
    MilpInstance inst("x", {{"a", 0, 0, 1, true}, {"b", 0, 0, 1, true}, {"c", 0, 0, 1, true}}, {});
    heur::SolutionPool pool;
    pool.add(make_solution(inst, {0.0, 1.0, 1.0}));
    pool.add(make_solution(inst, {1.0, 1.0, 0.0}));
    auto d = heur::crossover_delta(inst, pool, 3);
    ASSERT_TRUE(d);
    ASSERT_EQ(d->bound_changes.size(), 1u);
    EXPECT_EQ(d->bound_changes[0], (BoundChange{1, 1, 1}));
}

TEST(Crossover, SubMipIsSafe) {
    int checked = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        auto inst = testkit::random_milp(s);
        auto o = testkit::brute_force(inst);
        if (!o.feasible)
            continue;
        // Pool from feasible points found by enumeration-free means.
        heur::SolutionPool pool;
        for (std::int64_t e : {5, 50, 500, 5000}) {
            if (auto f = heur::feasibility_jump(inst, std::nullopt, e))
                pool.add(*f);
            if (auto f = heur::feasibility_jump(inst, std::nullopt, e); f)
                pool.add(heur::one_opt(inst, *f));
        }
        pool.add(make_solution(inst, o.values));
        auto d = heur::crossover_delta(inst, pool, 3);
        if (!d)
            continue;
        ++checked;
        // Agreement set by brute comparison over the best three.
        const auto &sols = pool.solutions();
        const std::size_t take = std::min<std::size_t>(3, sols.size());
        std::vector<BoundChange> expected;
        for (std::size_t j = 0; j < inst.num_cols(); ++j) {
            const double v = std::round(sols[0].values[j]);
            bool agree = true;
            for (std::size_t k = 1; k < take; ++k)
                agree = agree && std::round(sols[k].values[j]) == v;
            if (agree)
                expected.push_back({static_cast<int>(j), v, v});
        }
        EXPECT_EQ(d->bound_changes, expected) << inst.name();
        const auto boxes = bnb::apply_delta(inst, *d);
        for (std::size_t j = 0; j < boxes.size(); ++j) {
            EXPECT_GE(boxes[j].lower, inst.col(j).lower);
            EXPECT_LE(boxes[j].upper, inst.col(j).upper);
        }
        auto sub = testkit::brute_force(inst, boxes);
        ASSERT_TRUE(sub.feasible);
        EXPECT_GE(sub.objective, o.objective - 1e-9);
        EXPECT_TRUE(testkit::oracle_feasible(inst, sub.values));
        // Every point of the sub-MIP is a point of the original.
        auto st = presolve::strip_fixed(inst, *d);
        auto red = testkit::brute_force(st.reduced);
        ASSERT_TRUE(red.feasible);
        auto back = presolve::restore_solution(st.restore, make_solution(st.reduced, red.values));
        EXPECT_TRUE(testkit::oracle_feasible(inst, back.values));
    }
    EXPECT_GT(checked, 20);
}
