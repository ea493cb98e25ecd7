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

#include <random>
#include <string>

#include "n2n/model.hpp"

namespace n2n::bench {

/// Binary multi-dimensional knapsack with weights in [10, 60] and each
/// capacity at half the row total.
inline MilpInstance knapsack(std::uint64_t seed, int n, int m) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> weight(10, 60), bonus(0, 20);
    std::vector<Column> cols(static_cast<std::size_t>(n));
    std::vector<Row> rows(static_cast<std::size_t>(m));
    for (auto &r : rows) {
        double total = 0;
        for (int j = 0; j < n; ++j) {
            const int w = weight(rng);
            r.entries.push_back({j, static_cast<double>(w)});
            total += w;
        }
        r.rhs = std::floor(total / 2);
    }
    for (int j = 0; j < n; ++j) {
        double w = 0;
        for (const auto &r : rows)
            w += r.entries[static_cast<std::size_t>(j)].value;
        auto &c = cols[static_cast<std::size_t>(j)];
        c.name = "x" + std::to_string(j);
        c.obj = -std::round(w / m + bonus(rng));
        c.upper = 1;
        c.integral = true;
    }
    for (int i = 0; i < m; ++i)
        rows[static_cast<std::size_t>(i)].name = "r" + std::to_string(i);
    return MilpInstance("bench" + std::to_string(seed), std::move(cols), std::move(rows));
}

} // namespace n2n::bench
