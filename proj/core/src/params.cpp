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

#include "n2n/params.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "n2n/metrics.hpp"

namespace n2n::cli {

std::string_view to_string(Transport t) { return t == Transport::Local ? "local" : "tcp"; }

ParamError::ParamError(std::size_t line, const std::string &what)
    : std::runtime_error(fmt::format("parameter line {}: {}", line, what)), line_(line) {}

orch::RunOptions RunParams::run_options() const {
    orch::RunOptions o;
    o.mode = mode;
    o.workers = workers;
    o.window = window;
    o.det_task_nodes = det_task_nodes;
    o.nondet_task_nodes = nondet_task_nodes;
    o.racing = racing;
    o.racing_nodes = racing_nodes;
    o.limits.gap = gap_limit;
    o.limits.time_limit_s = time_limit;
    o.limits.node_limit = node_limit;
    o.memory_budget = memory_per_worker_mib * workers * (std::uint64_t{1} << 20);
    o.seed = seed;
    o.fj_effort = fj_effort;
    o.strategies = presolve;
    return o;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T> T parse_int(std::size_t line, std::string_view key, std::string_view v) {
    T out{};
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ParamError(line, fmt::format("'{}' expects an integer, got '{}'", key, v));
    return out;
}

double parse_double(std::size_t line, std::string_view key, std::string_view v) {
    if (v == "inf" || v == "infinity")
        return kInf;
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size() || std::isnan(out))
        throw ParamError(line, fmt::format("'{}' expects a number, got '{}'", key, v));
    return out;
}

bool parse_bool(std::size_t line, std::string_view key, std::string_view v) {
    if (v == "true" || v == "yes" || v == "on" || v == "1")
        return true;
    if (v == "false" || v == "no" || v == "off" || v == "0")
        return false;
    throw ParamError(line, fmt::format("'{}' expects true or false, got '{}'", key, v));
}

using Setter = std::function<void(RunParams &, std::size_t, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>> &setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"mode",
         [](RunParams &p, std::size_t l, std::string_view k, std::string_view v) {
             try {
                 p.mode = orch::mode_from_string(v);
             } catch (const std::logic_error &) {
                 throw ParamError(l, fmt::format("'{}' expects deterministic or nondeterministic, got '{}'", k, v));
             }
         }},
        {"workers",
         [](RunParams &p, std::size_t l, std::string_view k, std::string_view v) {
             p.workers = parse_int<std::size_t>(l, k, v);
             if (p.workers == 0)
                 throw ParamError(l, "workers must be at least 1");
         }},
        {"window",
         [](RunParams &p, std::size_t l, std::string_view k, std::string_view v) {
             p.window = parse_int<std::size_t>(l, k, v);
         }},
        {"det_task_nodes",
         [](RunParams &p, std::size_t l, std::string_view k, std::string_view v) {
             p.det_task_nodes = parse_int<std::int64_t>(l, k, v);
             if (p.det_task_nodes < 1)
                 throw ParamError(l, "det_task_nodes must be at least 1");
         }},
        {"nondet_task_nodes",
         [](RunParams &p, std::size_t l, std::string_view k, std::string_view v) {
             p.nondet_task_nodes = parse_int<std::int64_t>(l, k, v);
             if (p.nondet_task_nodes < 1)
                 throw ParamError(l, "nondet_task_nodes must be at least 1");
         }},
        {"racing", [](RunParams &p, std::size_t l, std::string_view k,
                      std::string_view v) { p.racing = parse_bool(l, k, v); }},
        {"racing_nodes",
         [](RunParams &p, std::size_t l, std::string_view k, std::string_view v) {
             p.racing_nodes = parse_int<std::int64_t>(l, k, v);
             if (p.racing_nodes < 1)
                 throw ParamError(l, "racing_nodes must be at least 1");
         }},
        {"gap_limit",
         [](RunParams &p, std::size_t l, std::string_view k, std::string_view v) {
             p.gap_limit = parse_double(l, k, v);
             if (p.gap_limit < 0.0)
                 throw ParamError(l, "gap_limit must be non-negative");
         }},
        {"time_limit",
         [](RunParams &p, std::size_t l, std::string_view k, std::string_view v) {
             p.time_limit = parse_double(l, k, v);
             if (!(p.time_limit > 0.0))
                 throw ParamError(l, "time_limit must be positive");
         }},
        {"node_limit",
         [](RunParams &p, std::size_t l, std::string_view k, std::string_view v) {
             p.node_limit = parse_int<std::uint64_t>(l, k, v);
         }},
        {"transport",
         [](RunParams &p, std::size_t l, std::string_view k, std::string_view v) {
             if (v == "local")
                 p.transport = Transport::Local;
             else if (v == "tcp")
                 p.transport = Transport::Tcp;
             else
                 throw ParamError(l, fmt::format("'{}' expects local or tcp, got '{}'", k, v));
         }},
        {"listen", [](RunParams &p, std::size_t, std::string_view, std::string_view v) { p.listen = v; }},
        {"connect", [](RunParams &p, std::size_t, std::string_view, std::string_view v) { p.connect = v; }},
        {"memory_per_worker_mib",
         [](RunParams &p, std::size_t l, std::string_view k, std::string_view v) {
             p.memory_per_worker_mib = parse_int<std::uint64_t>(l, k, v);
         }},
        {"seed", [](RunParams &p, std::size_t l, std::string_view k,
                    std::string_view v) { p.seed = parse_int<std::uint64_t>(l, k, v); }},
        {"fj_effort",
         [](RunParams &p, std::size_t l, std::string_view k, std::string_view v) {
             p.fj_effort = parse_int<std::int64_t>(l, k, v);
         }},
        {"presolve",
         [](RunParams &p, std::size_t l, std::string_view k, std::string_view v) {
             p.presolve.clear();
             std::string_view rest = v;
             while (!rest.empty()) {
                 const auto comma = rest.find(',');
                 const auto item = trim(rest.substr(0, comma));
                 try {
                     p.presolve.push_back(presolve::strategy_from_string(item));
                 } catch (const std::logic_error &) {
                     throw ParamError(l, fmt::format("'{}' has unknown strategy '{}'", k, item));
                 }
                 rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
             }
             if (p.presolve.empty())
                 throw ParamError(l, "presolve needs at least one strategy");
         }},
        {"log_level",
         [](RunParams &p, std::size_t, std::string_view, std::string_view v) { p.log_level = v; }},
    };
    return table;
}

} // namespace

RunParams parse_params(std::string_view text) {
    RunParams p;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParamError(line_no, fmt::format("expected 'key = value', got '{}'", line));
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ParamError(line_no, "missing key");
        if (value.empty())
            throw ParamError(line_no, fmt::format("missing value for '{}'", key));
        const auto it = setters().find(key);
        if (it == setters().end())
            throw ParamError(line_no, fmt::format("unknown key '{}'", key));
        if (!seen.emplace(key).second)
            throw ParamError(line_no, fmt::format("duplicate key '{}'", key));
        it->second(p, line_no, key, value);
    }
    return p;
}

RunParams parse_params_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error(fmt::format("cannot open parameter file {}", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_params(ss.str());
}

double sgm(std::span<const double> times, double shift) {
    if (times.empty())
        throw ContractViolation("sgm of an empty sequence");
    if (!(shift >= 0.0))
        throw ContractViolation("sgm shift must be non-negative");
    // Accumulated in long double.
    long double acc = 0.0L;
    for (double t : times) {
        if (!(t >= 0.0))
            throw ContractViolation(fmt::format("sgm got a negative time {}", t));
        acc += std::log(static_cast<long double>(t) + shift);
    }
    return static_cast<double>(std::exp(acc / static_cast<long double>(times.size())) - shift);
}

} // namespace n2n::cli
