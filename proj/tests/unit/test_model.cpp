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

#include <algorithm>
#include <random>

#include "n2n/model.hpp"
#include "oracle.hpp"

using namespace n2n;

namespace {

MilpInstance two_var(double rhs) {
    return MilpInstance("t", {{"x", -1, 0, 10, true}, {"y", -2, 0, 10, true}},
                        {{"c1", {{0, 1.0}, {1, 1.0}}, -kInf, rhs}});
}

} // namespace

TEST(Model, ConstructionRejectsBrokenInvariants) {
    EXPECT_THROW(MilpInstance("bad", {{"x", 0, 2, 1, false}}, {}), ModelError);
    EXPECT_THROW(MilpInstance("bad", {{"x", 0, 0, 1, false}}, {{"r", {{1, 1.0}}, 0, 1}}), ModelError);
    EXPECT_THROW(MilpInstance("bad", {{"x", 0, 0, 1, false}}, {{"r", {{0, 1.0}}, 2, 1}}), ModelError);
    EXPECT_THROW(MilpInstance("bad", {{"x", 0, 0, 1, false}}, {{"r", {{0, 1.0}, {0, 2.0}}, 0, 1}}),
                 ModelError);
}

TEST(Model, EntryOrderDoesNotMatter) {
    MilpInstance a("p", {{"x", 1, 0, 1, false}, {"y", 1, 0, 1, false}}, {{"r", {{0, 1.0}, {1, 2.0}}, 0, 3}});
    MilpInstance b("p", {{"x", 1, 0, 1, false}, {"y", 1, 0, 1, false}}, {{"r", {{1, 2.0}, {0, 1.0}}, 0, 3}});
    EXPECT_EQ(a, b);
}

TEST(Model, ZeroSolutionIsFeasibleWhenRowsAdmitZero) {
    auto inst = two_var(4);
    auto rep = check_feasible(inst, std::vector<double>{0.0, 0.0});
    EXPECT_TRUE(rep.feasible);
    EXPECT_EQ(rep.max_row_violation, 0.0);
    EXPECT_EQ(rep.max_bound_violation, 0.0);
    EXPECT_EQ(rep.max_int_violation, 0.0);
}

TEST(Model, RowViolationIsMeasured) {
    auto inst = two_var(3);
    auto rep = check_feasible(inst, std::vector<double>{4.0, 0.0});
    EXPECT_FALSE(rep.feasible);
    EXPECT_DOUBLE_EQ(rep.max_row_violation, 1.0);
}

TEST(Model, LengthMismatchIsAContractViolation) {
    auto inst = two_var(3);
    EXPECT_THROW(check_feasible(inst, std::vector<double>{1.0}), ContractViolation);
}

TEST(Model, OracleOptimaAreFeasible) {
    for (std::uint64_t s = 0; s < 100; ++s) {
        auto inst = testkit::random_milp(s);
        auto o = testkit::brute_force(inst);
        if (o.feasible)
            EXPECT_TRUE(check_feasible(inst, o.values).feasible) << inst.name();
    }
}

TEST(Model, FeasibilityIsMonotoneInTolerances) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.5, 3.5);
    for (std::uint64_t s = 0; s < 50; ++s) {
        auto inst = testkit::random_milp(s);
        std::vector<double> x(inst.num_cols());
        for (auto &v : x)
            v = u(rng);
        for (double t1 : {1e-6, 1e-3, 0.1, 0.5})
            for (double t2 : {1e-6, 1e-3, 0.1, 0.5})
                if (check_feasible(inst, x, t1, t2).feasible) {
                    EXPECT_TRUE(check_feasible(inst, x, 2 * t1, t2).feasible);
                    EXPECT_TRUE(check_feasible(inst, x, t1, 2 * t2).feasible);
                }
    }
}

TEST(Model, ObjectiveIgnoresEntryPermutation) {
    std::mt19937_64 rng(9);
    for (std::uint64_t s = 0; s < 30; ++s) {
        auto inst = testkit::random_milp(s);
        auto rows = inst.rows();
        for (auto &r : rows)
            std::shuffle(r.entries.begin(), r.entries.end(), rng);
        MilpInstance shuffled(inst.name(), inst.cols(), rows, inst.obj_offset());
        EXPECT_EQ(shuffled, inst);
        std::vector<double> x(inst.num_cols(), 1.0);
        EXPECT_EQ(evaluate_objective(shuffled, x), evaluate_objective(inst, x));
        for (std::size_t i = 0; i < inst.num_rows(); ++i)
            EXPECT_EQ(row_activity(shuffled.row(i), x), row_activity(inst.row(i), x));
    }
}

TEST(Model, MakeSolutionIncludesOffset) {
    MilpInstance inst("o", {{"x", 2, 0, 5, false}}, {}, 1.5);
    auto sol = make_solution(inst, {3.0});
    EXPECT_DOUBLE_EQ(sol.objective, 7.5);
    EXPECT_EQ(size_score(inst), 1u);
}
