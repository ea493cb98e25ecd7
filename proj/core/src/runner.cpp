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

#include "n2n/runner.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "n2n/metrics.hpp"
#include "n2n/mps.hpp"
#include "n2n/transport.hpp"

namespace n2n::cli {

namespace {

Report make_report(const orch::RunResult &res, const RunParams &params, const std::string &name) {
    Report r;
    r.instance = name;
    r.verdict = res.verdict;
    r.objective = res.primal_bound;
    r.dual_bound = res.dual_bound;
    r.nodes = res.nodes;
    r.tasks = res.tasks;
    r.effort = res.effort;
    r.wall_s = res.wall_s;
    r.mode = params.mode;
    r.workers = params.workers;
    r.active_workers = res.active_workers;
    r.presolve = std::string(presolve::to_string(res.presolve_used));
    r.solution = res.solution;
    return r;
}

std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        auto field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        while (!field.empty() && (field.front() == ' ' || field.front() == '\t'))
            field.remove_prefix(1);
        while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
            field.remove_suffix(1);
        out.emplace_back(field);
        if (comma == std::string_view::npos)
            return out;
        start = comma + 1;
    }
}

bool is_solved(std::string_view verdict) {
    return verdict == "optimal" || verdict == "infeasible" || verdict == "unbounded";
}

} // namespace

std::string format_report(const Report &r, bool with_wall_time) {
    std::string out;
    auto kv = [&](std::string_view k, const auto &v) { fmt::format_to(std::back_inserter(out), "{}={}\n", k, v); };
    kv("instance", r.instance);
    kv("verdict", orch::to_string(r.verdict));
    kv("objective", r.objective);
    kv("dual_bound", r.dual_bound);
    kv("nodes", r.nodes);
    kv("tasks", r.tasks);
    kv("effort", r.effort);
    kv("mode", orch::to_string(r.mode));
    kv("workers", r.workers);
    kv("active_workers", r.active_workers);
    kv("presolve", r.presolve);
    if (with_wall_time)
        kv("wall_time", r.wall_s);
    return out;
}

std::string format_solution(const MilpInstance &inst, const Solution &sol) {
    if (sol.values.size() != inst.num_cols())
        throw ContractViolation("solution does not match the instance");
    std::string out = fmt::format("# objective = {}\n", sol.objective);
    for (std::size_t j = 0; j < inst.num_cols(); ++j)
        fmt::format_to(std::back_inserter(out), "{} = {}\n", inst.col(j).name, sol.values[j]);
    return out;
}

Report run_solve(const RunParams &params, const MilpInstance &inst, const std::string &instance_name) {
    const auto opts = params.run_options();
    const auto name = instance_name.empty() ? inst.name() : instance_name;
    if (params.transport == Transport::Local)
        return make_report(orch::solve_local(inst, opts), params, name);

    proto::TcpListener listener(params.listen);
    const auto endpoint = fmt::format("127.0.0.1:{}", listener.port());
    std::vector<std::thread> workers;
    for (std::size_t i = 0; i < params.workers; ++i)
        workers.emplace_back([endpoint, i] {
            try {
                run_worker_role(endpoint, static_cast<std::uint32_t>(i));
            } catch (const std::exception &e) {
                spdlog::error("tcp worker {} failed: {}", i, e.what());
            }
        });
    std::unique_ptr<proto::SupervisorHub> hub;
    try {
        hub = listener.accept(params.workers);
        auto res = orch::run_supervisor(inst, opts, *hub);
        for (auto &t : workers)
            t.join();
        return make_report(res, params, name);
    } catch (...) {
        if (hub)
            hub->close();
        for (auto &t : workers)
            t.join();
        throw;
    }
}

Report run_solve(const RunParams &params, const std::filesystem::path &instance_path) {
    return run_solve(params, read_mps_file(instance_path), instance_path.filename().string());
}

Report run_supervisor_role(const RunParams &params, const MilpInstance &inst, const std::string &instance_name) {
    proto::TcpListener listener(params.listen);
    spdlog::info("supervisor listening on port {} for {} workers", listener.port(), params.workers);
    auto hub = listener.accept(params.workers, 600000);
    auto res = orch::run_supervisor(inst, params.run_options(), *hub);
    return make_report(res, params, instance_name.empty() ? inst.name() : instance_name);
}

void run_worker_role(const std::string &endpoint, std::uint32_t worker_id, int connect_timeout_ms) {
    auto link = proto::tcp_connect(endpoint, connect_timeout_ms);
    orch::WorkerOptions w;
    w.worker_id = worker_id;
    orch::run_worker(*link, w);
}

std::vector<BatchEntry> read_manifest(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error(fmt::format("cannot open manifest {}", path.string()));
    const auto base = path.parent_path();
    std::vector<BatchEntry> out;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        const auto f = split_csv(line);
        if (!header) {
            if (f.size() != 3 || f[0] != "label" || f[1] != "params" || f[2] != "instance")
                throw std::runtime_error(
                    fmt::format("{}:{}: expected header 'label,params,instance'", path.string(), line_no));
            header = true;
            continue;
        }
        if (f.size() != 3 || f[0].empty() || f[2].empty())
            throw std::runtime_error(fmt::format("{}:{}: expected 3 fields", path.string(), line_no));
        BatchEntry e;
        e.label = f[0];
        if (!f[1].empty())
            e.params = parse_params_file(std::filesystem::path(f[1]).is_absolute() ? std::filesystem::path(f[1]) : base / f[1]);
        e.instance = std::filesystem::path(f[2]).is_absolute() ? f[2] : (base / f[2]).string();
        out.push_back(std::move(e));
    }
    if (!header)
        throw std::runtime_error(fmt::format("{}: empty manifest", path.string()));
    return out;
}

BatchResult batch_run(const std::vector<BatchEntry> &entries, const CellRunner &runner, double shift) {
    CellRunner run = runner;
    if (!run) {
        run = [](const BatchEntry &e) {
            const auto rep = run_solve(e.params, std::filesystem::path(e.instance));
            BatchCell c;
            c.verdict = std::string(orch::to_string(rep.verdict));
            c.objective = rep.objective;
            c.time_s = rep.wall_s;
            c.nodes = rep.nodes;
            c.effort = rep.effort;
            return c;
        };
    }
    BatchResult out;
    std::vector<std::string> labels;
    std::map<std::string, std::vector<double>> times;
    std::map<std::string, std::size_t> solved;
    for (const auto &e : entries) {
        BatchCell c;
        try {
            c = run(e);
        } catch (const std::exception &ex) {
            c = BatchCell{};
            c.verdict = "error";
            c.error = ex.what();
        }
        c.label = e.label;
        c.instance = e.instance;
        if (!times.contains(e.label)) {
            labels.push_back(e.label);
            times[e.label];
            solved[e.label] = 0;
        }
        if (c.verdict != "error")
            times[e.label].push_back(c.time_s);
        if (is_solved(c.verdict))
            ++solved[e.label];
        out.cells.push_back(std::move(c));
    }
    double base = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        BatchSummary s;
        s.label = labels[i];
        s.solved = solved[s.label];
        const auto &t = times[s.label];
        s.sgm = t.empty() ? kInf : sgm(t, shift);
        if (i == 0)
            base = s.sgm;
        s.speedup = base / s.sgm;
        out.summary.push_back(s);
    }
    return out;
}

std::string batch_csv(const BatchResult &r) {
    auto field = [](std::string s) {
        for (auto &c : s)
            if (c == ',' || c == '\n' || c == '\r')
                c = ' ';
        return s;
    };
    std::string out = "label,instance,verdict,objective,time_s,nodes,effort,error\n";
    for (const auto &c : r.cells)
        fmt::format_to(std::back_inserter(out), "{},{},{},{},{},{},{},{}\n", field(c.label), field(c.instance),
                       c.verdict, c.objective, c.time_s, c.nodes, c.effort, field(c.error));
    out += "\nsolver,# solved,SGM,Speedup\n";
    for (const auto &s : r.summary)
        fmt::format_to(std::back_inserter(out), "{},{},{},{}\n", field(s.label), s.solved, s.sgm, s.speedup);
    return out;
}

} // namespace n2n::cli
