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
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "n2n/orchestrate.hpp"

namespace n2n::cli {

enum class Transport : std::uint8_t { Local, Tcp };

std::string_view to_string(Transport t);

/// Contents of a parameter file. Every key is optional; see README for the
/// full key list and defaults.
struct RunParams {
    orch::Mode mode = orch::Mode::Nondeterministic;
    std::size_t workers = 4;
    std::size_t window = 0;
    std::int64_t det_task_nodes = 200;
    std::int64_t nondet_task_nodes = 5000;
    bool racing = true;
    std::int64_t racing_nodes = 2000;
    double gap_limit = 0.0;
    double time_limit = kInf;
    std::uint64_t node_limit = std::numeric_limits<std::uint64_t>::max();
    Transport transport = Transport::Local;
    std::string listen = "127.0.0.1:0";
    std::string connect;
    std::uint64_t memory_per_worker_mib = 0;
    std::uint64_t seed = 0;
    std::int64_t fj_effort = 2000;
    std::vector<presolve::Strategy> presolve = {presolve::Strategy::Off, presolve::Strategy::Light,
                                                presolve::Strategy::Aggressive};
    std::string log_level;

    bool operator==(const RunParams &) const = default;

    orch::RunOptions run_options() const;
};

class ParamError : public std::runtime_error {
  public:
    ParamError(std::size_t line, const std::string &what);
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

/// `key = value` lines, `#` starts a comment. Unknown keys, duplicate keys,
/// malformed values and workers = 0 are errors.
RunParams parse_params(std::string_view text);
RunParams parse_params_file(const std::filesystem::path &path);

} // namespace n2n::cli
