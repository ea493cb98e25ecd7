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

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace n2n {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline constexpr double kDefaultFeasTol = 1e-6;
inline constexpr double kDefaultIntTol = 1e-6;

/// Slack used whenever a dual bound is compared against a primal bound.
inline constexpr double kPruneSlack = 1e-9;

using TaskId = std::uint64_t;

/// Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// Raised when an instance fails its structural invariants.
class ModelError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Raised when data that must match on both ends of a link does not.
class ConsistencyError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace n2n
