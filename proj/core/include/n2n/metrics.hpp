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

#include <span>

namespace n2n::cli {

inline constexpr double kSgmShift = 10.0;

/// Shifted geometric mean exp(mean(ln(t_i + shift))) - shift. Throws
/// ContractViolation on an empty input, negative times or negative shift.
double sgm(std::span<const double> times, double shift = kSgmShift);

} // namespace n2n::cli
