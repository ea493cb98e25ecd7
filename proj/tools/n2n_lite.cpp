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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "n2n/log.hpp"
#include "n2n/mps.hpp"
#include "n2n/params.hpp"
#include "n2n/runner.hpp"

namespace fs = std::filesystem;
using namespace n2n;

namespace {

struct Overrides {
    std::optional<std::size_t> workers;
    std::optional<std::string> mode;
    std::optional<std::string> transport;
    std::optional<std::string> listen;
    std::optional<std::size_t> window;
};

void add_overrides(CLI::App *cmd, Overrides &o) {
    cmd->add_option("--workers", o.workers, "Number of workers (overrides the parameter file)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--mode", o.mode, "det or nondet")->check(CLI::IsMember({"det", "nondet", "deterministic", "nondeterministic"}));
    cmd->add_option("--window", o.window, "Deterministic window width")->check(CLI::PositiveNumber);
    cmd->add_option("--listen", o.listen, "Supervisor address host:port");
}

cli::RunParams load_params(const std::string &path, const Overrides &o) {
    auto p = cli::parse_params_file(path);
    if (o.workers)
        p.workers = *o.workers;
    if (o.mode)
        p.mode = orch::mode_from_string(*o.mode);
    if (o.window)
        p.window = *o.window;
    if (o.transport)
        p.transport = *o.transport == "tcp" ? cli::Transport::Tcp : cli::Transport::Local;
    if (o.listen)
        p.listen = *o.listen;
    return p;
}

void write_file(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void emit(const cli::Report &rep, const MilpInstance &inst, const std::string &report_path,
          const std::string &solution_path) {
    const auto text = cli::format_report(rep);
    std::cout << text;
    if (!report_path.empty())
        write_file(report_path, text);
    if (rep.solution && !solution_path.empty())
        write_file(solution_path, cli::format_solution(inst, *rep.solution));
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"n2n-lite: supervisor/worker parallel MILP solver"};
    app.require_subcommand(1);

    Overrides solve_o;
    std::string params_path, instance_path, report_path, solution_path;
    auto *solve = app.add_subcommand("solve", "Solve one instance with local or loopback-tcp workers");
    solve->add_option("params", params_path, "Parameter file (key = value)")->required()->check(CLI::ExistingFile);
    solve->add_option("instance", instance_path, "Instance in MPS format")->required()->check(CLI::ExistingFile);
    add_overrides(solve, solve_o);
    solve->add_option("--transport", solve_o.transport, "local or tcp")->check(CLI::IsMember({"local", "tcp"}));
    solve->add_option("--report", report_path, "Also write the report to this file");
    solve->add_option("--solution", solution_path, "Solution file (default: <instance>.sol)");

    Overrides sup_o;
    std::string sup_params, sup_instance, sup_report, sup_solution;
    auto *sup = app.add_subcommand("supervisor", "Serve one instance to workers started with 'worker'");
    sup->add_option("params", sup_params, "Parameter file")->required()->check(CLI::ExistingFile);
    sup->add_option("instance", sup_instance, "Instance in MPS format")->required()->check(CLI::ExistingFile);
    add_overrides(sup, sup_o);
    sup->add_option("--report", sup_report, "Also write the report to this file");
    sup->add_option("--solution", sup_solution, "Solution file (default: <instance>.sol)");

    std::string connect;
    std::uint32_t worker_id = 0;
    int connect_timeout = 30;
    auto *worker = app.add_subcommand("worker", "Connect to a supervisor and serve tasks");
    worker->add_option("--connect", connect, "Supervisor address host:port")->required();
    worker->add_option("--id", worker_id, "Worker id reported in the handshake");
    worker->add_option("--connect-timeout", connect_timeout, "Seconds to keep retrying the connection");

    std::string manifest, batch_out;
    auto *batch = app.add_subcommand("batch", "Run a manifest of (label, params, instance) cells");
    batch->add_option("manifest", manifest, "CSV with header label,params,instance")->required()->check(CLI::ExistingFile);
    batch->add_option("--output", batch_out, "Write the CSV here as well as to stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) {
            auto params = load_params(params_path, solve_o);
            init_logging(params.log_level);
            const auto inst = read_mps_file(instance_path);
            const auto rep = cli::run_solve(params, inst, fs::path(instance_path).filename().string());
            if (solution_path.empty())
                solution_path = fs::path(instance_path).stem().string() + ".sol";
            emit(rep, inst, report_path, solution_path);
        } else if (*sup) {
            auto params = load_params(sup_params, sup_o);
            init_logging(params.log_level);
            const auto inst = read_mps_file(sup_instance);
            const auto rep = cli::run_supervisor_role(params, inst, fs::path(sup_instance).filename().string());
            if (sup_solution.empty())
                sup_solution = fs::path(sup_instance).stem().string() + ".sol";
            emit(rep, inst, sup_report, sup_solution);
        } else if (*worker) {
            init_logging();
            cli::run_worker_role(connect, worker_id, connect_timeout * 1000);
        } else if (*batch) {
            init_logging();
            const auto entries = cli::read_manifest(manifest);
            const auto csv = cli::batch_csv(cli::batch_run(entries));
            std::cout << csv;
            if (!batch_out.empty())
                write_file(batch_out, csv);
        }
    } catch (const std::exception &e) {
        std::cerr << "n2n-lite: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
