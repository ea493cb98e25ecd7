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
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "n2n/bnb.hpp"
#include "n2n/model.hpp"

namespace n2n::proto {

using Bytes = std::vector<std::uint8_t>;

/// Unit of parallel work handed to a worker.
struct Task {
    TaskId id = 0;
    bnb::NodeDelta delta;
    bnb::SolverConfig cfg;
    double primal_bound = kInf;
    /// Index into the supervisor's solution pool at creation time.
    std::optional<std::uint32_t> incumbent_ref;
    /// Sub-MIP generated by crossover; its open nodes are not merged back.
    bool crossover = false;

    bool operator==(const Task &) const = default;
};

struct Hello {
    std::uint32_t worker_id = 0;
    std::uint64_t memory_budget = 0;
    bool operator==(const Hello &) const = default;
};
struct InstanceFile {
    std::string mps;
    std::uint64_t hash = 0;
    bool operator==(const InstanceFile &) const = default;
};
struct Activate {
    bool active = false;
    bool operator==(const Activate &) const = default;
};
struct TaskAssign {
    Task task;
    bool operator==(const TaskAssign &) const = default;
};
struct TaskResult {
    TaskId task_id = 0;
    bnb::SolveOutcome outcome;
    bool operator==(const TaskResult &) const = default;
};
struct IncumbentUpdate {
    Solution solution;
    bool operator==(const IncumbentUpdate &) const = default;
};
struct BoundUpdate {
    double primal_bound = kInf;
    bool operator==(const BoundUpdate &) const = default;
};
struct Interrupt {
    TaskId task_id = 0;
    bool operator==(const Interrupt &) const = default;
};
struct Terminate {
    bool operator==(const Terminate &) const = default;
};
struct RacingStart {
    bnb::SolverConfig cfg;
    bool operator==(const RacingStart &) const = default;
};
struct RacingReport {
    double dual_bound = -kInf;
    std::uint64_t open_nodes = 0;
    bool solved = false;
    bool operator==(const RacingReport &) const = default;
};
struct RacingStop {
    bool operator==(const RacingStop &) const = default;
};
struct Stats {
    std::uint64_t nodes = 0;
    std::uint64_t effort = 0;
    bool operator==(const Stats &) const = default;
};

using Message = std::variant<Hello, InstanceFile, Activate, TaskAssign, TaskResult, IncumbentUpdate,
                             BoundUpdate, Interrupt, Terminate, RacingStart, RacingReport, RacingStop,
                             Stats>;

/// Wire tag of each alternative; equals variant index + 1.
enum class Tag : std::uint8_t {
    Hello = 1,
    InstanceFile,
    Activate,
    TaskAssign,
    TaskResult,
    IncumbentUpdate,
    BoundUpdate,
    Interrupt,
    Terminate,
    RacingStart,
    RacingReport,
    RacingStop,
    Stats,
};

std::string_view message_name(const Message &m);

class DecodeError : public std::runtime_error {
  public:
    DecodeError(std::size_t offset, const std::string &what);
    std::size_t offset() const { return offset_; }

  private:
    std::size_t offset_;
};

/// Length-prefixed frame: u32 LE length of (tag + payload), u8 tag, payload.
/// The byte layout is documented in docs/wire_format.md.
Bytes encode(const Message &msg);

/// Inverse of encode on exactly one frame. Throws DecodeError for truncated
/// frames, unknown tags, malformed fields and trailing bytes.
Message decode(std::span<const std::uint8_t> frame);

/// Splits a concatenation of frames. Throws DecodeError naming the absolute
/// offset of the first problem.
std::vector<Message> decode_stream(std::span<const std::uint8_t> bytes);

inline constexpr std::size_t kFrameHeader = 4;
inline constexpr std::uint32_t kMaxFrame = 1u << 30;

/// 64-bit FNV-1a, used to check instance files end to end.
std::uint64_t instance_hash(std::string_view bytes);

} // namespace n2n::proto
