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
#include <functional>
#include <string>
#include <vector>

#include "n2n/model.hpp"
#include "n2n/orchestrate.hpp"
#include "n2n/params.hpp"

namespace n2n::cli {

struct Report {
    std::string instance;
    orch::Verdict verdict = orch::Verdict::Running;
    double objective = kInf;
    double dual_bound = -kInf;
    std::uint64_t nodes = 0;
    std::uint64_t tasks = 0;
    std::uint64_t effort = 0;
    double wall_s = 0.0;
    orch::Mode mode = orch::Mode::Nondeterministic;
    std::size_t workers = 0;
    std::size_t active_workers = 0;
    std::string presolve;
    std::optional<Solution> solution;
};

/// key=value lines in a fixed order. wall_time is omitted when
/// `with_wall_time` is false so reports of repeated runs can be compared.
std::string format_report(const Report &r, bool with_wall_time = true);

/// "# objective = v" followed by one "name = value" line per column.
std::string format_solution(const MilpInstance &inst, const Solution &sol);

/// Solves with the configured transport. For tcp, workers run as threads of
/// this process and connect to the supervisor over loopback.
Report run_solve(const RunParams &params, const MilpInstance &inst, const std::string &instance_name = {});

/// Same as run_solve, reading the instance from disk.
Report run_solve(const RunParams &params, const std::filesystem::path &instance_path);

/// Supervisor role for separately started workers: listens on
/// params.listen and waits for params.workers connections.
Report run_supervisor_role(const RunParams &params, const MilpInstance &inst,
                           const std::string &instance_name = {});

/// Worker role: connects to `endpoint` and serves until Terminate.
void run_worker_role(const std::string &endpoint, std::uint32_t worker_id = 0, int connect_timeout_ms = 30000);

struct BatchEntry {
    std::string label;
    RunParams params;
    std::string instance;
};

/// Manifest CSV: header "label,params,instance", one cell per line. The
/// params path is resolved relative to the manifest; an empty params field
/// means defaults. The first label is the speedup baseline.
std::vector<BatchEntry> read_manifest(const std::filesystem::path &path);

struct BatchCell {
    std::string label;
    std::string instance;
    std::string verdict;
    double objective = kInf;
    double time_s = 0.0;
    std::uint64_t nodes = 0;
    std::uint64_t effort = 0;
    std::string error;
};

struct BatchSummary {
    std::string label;
    std::size_t solved = 0;
    double sgm = 0.0;
    double speedup = 0.0;
};

struct BatchResult {
    std::vector<BatchCell> cells;
    std::vector<BatchSummary> summary;
};

using CellRunner = std::function<BatchCell(const BatchEntry &)>;

/// Runs every cell (failures are recorded and the batch goes on) and
/// summarises per label: cells solved to optimality or infeasibility, SGM of
/// wall times and speedup = SGM(baseline) / SGM(label).
BatchResult batch_run(const std::vector<BatchEntry> &entries, const CellRunner &runner = {},
                      double shift = 10.0);

/// Cell rows, a blank line, then the "solver,# solved,SGM,Speedup" table.
std::string batch_csv(const BatchResult &r);

} // namespace n2n::cli
