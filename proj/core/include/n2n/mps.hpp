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

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "n2n/model.hpp"

namespace n2n {

class MpsParseError : public std::runtime_error {
  public:
    MpsParseError(std::size_t line, const std::string &what);
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

// Free-format MPS. Conventions (both directions):
//  - sections NAME, OBJSENSE (MIN only), ROWS, COLUMNS, RHS, RANGES, BOUNDS,
//    ENDATA, in that order; each at most once;
//  - the first N row is the objective, further N rows are dropped;
//  - an RHS entry on the objective row stores -offset;
//  - columns without BOUNDS entries get [0, +inf), integral or not;
//  - UP with a negative value on a column whose lower bound was never set
//    makes the lower bound -inf;
//  - magnitudes >= 1e30 and the tokens inf/infinity are infinite.

MilpInstance read_mps(std::string_view text);
MilpInstance read_mps_file(const std::filesystem::path &path);

/// Emits free-format MPS that read_mps maps back to an equal instance.
/// Ranged rows are written as L rows with a positive RANGES entry.
std::string write_mps(const MilpInstance &inst);
void write_mps_file(const MilpInstance &inst, const std::filesystem::path &path);

} // namespace n2n
