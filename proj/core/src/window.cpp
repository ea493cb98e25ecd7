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

#include <algorithm>

#include <fmt/format.h>

#include "n2n/orchestrate.hpp"

namespace n2n::orch {

void NodePool::push(bnb::NodeDelta node) {
    const Key k{node.dual_bound, node.origin.parent_task, node.origin.child_ordinal};
    if (!nodes_.emplace(k, std::move(node)).second)
        throw ContractViolation(
            fmt::format("node ({}, {}) is already in the pool", k.parent, k.ordinal));
}

std::optional<bnb::NodeDelta> NodePool::pop() {
    if (nodes_.empty())
        return std::nullopt;
    auto h = nodes_.extract(nodes_.begin());
    return std::move(h.mapped());
}

std::size_t NodePool::prune(double primal_bound) {
    if (!(primal_bound < kInf))
        return 0;
    auto from = nodes_.lower_bound(Key{primal_bound - kPruneSlack, 0, 0});
    const auto n = static_cast<std::size_t>(std::distance(from, nodes_.end()));
    nodes_.erase(from, nodes_.end());
    return n;
}

double NodePool::best_bound() const { return nodes_.empty() ? kInf : nodes_.begin()->first.bound; }

std::vector<bnb::NodeDelta> NodePool::contents() const {
    std::vector<bnb::NodeDelta> out;
    out.reserve(nodes_.size());
    for (const auto &[k, d] : nodes_)
        out.push_back(d);
    return out;
}

SlidingWindow::SlidingWindow(std::size_t width, std::vector<int> workers)
    : width_(width), idle_(workers.begin(), workers.end()) {
    if (width == 0)
        throw ContractViolation("window width must be at least 1");
    if (idle_.empty())
        throw ContractViolation("the window needs at least one worker");
}

const proto::Task &SlidingWindow::generate(const std::function<proto::Task(TaskId)> &make) {
    if (!has_room())
        throw ContractViolation(fmt::format("window overflow: {} tasks already unmerged", unmerged_.size()));
    const TaskId id = next_id_++;
    auto t = make(id);
    if (t.id != id)
        throw ContractViolation(fmt::format("task generated with id {}, expected {}", t.id, id));
    waiting_.push_back(id);
    auto &ref = unmerged_.emplace(id, std::move(t)).first->second;
    check_invariants();
    return ref;
}

std::vector<std::pair<int, TaskId>> SlidingWindow::assign() {
    std::vector<std::pair<int, TaskId>> out;
    while (!idle_.empty() && !waiting_.empty()) {
        const int w = *idle_.begin();
        idle_.erase(idle_.begin());
        const TaskId id = waiting_.front();
        waiting_.pop_front();
        running_.emplace(w, id);
        out.emplace_back(w, id);
    }
    return out;
}

void SlidingWindow::on_result(int worker, TaskId id, bnb::SolveOutcome outcome) {
    auto it = running_.find(worker);
    if (it == running_.end() || it->second != id)
        throw ContractViolation(fmt::format("unexpected result for task {} from worker {}", id, worker));
    if (!unmerged_.contains(id) || buffer_.contains(id))
        throw ContractViolation(fmt::format("duplicate result for task {}", id));
    running_.erase(it);
    idle_.insert(worker);
    buffer_.emplace(id, std::move(outcome));
}

std::optional<std::pair<TaskId, bnb::SolveOutcome>> SlidingWindow::pop_mergeable() {
    auto it = buffer_.find(next_merge_);
    if (it == buffer_.end())
        return std::nullopt;
    if (buffer_.begin()->first != next_merge_)
        throw ContractViolation(fmt::format("result {} buffered below the merge point {}",
                                            buffer_.begin()->first, next_merge_));
    std::pair<TaskId, bnb::SolveOutcome> out{it->first, std::move(it->second)};
    buffer_.erase(it);
    unmerged_.erase(next_merge_);
    ++next_merge_;
    check_invariants();
    return out;
}

const proto::Task &SlidingWindow::task(TaskId id) const {
    auto it = unmerged_.find(id);
    if (it == unmerged_.end())
        throw ContractViolation(fmt::format("task {} is not in the window", id));
    return it->second;
}

std::vector<TaskId> SlidingWindow::buffered() const {
    std::vector<TaskId> out;
    for (const auto &[id, o] : buffer_)
        out.push_back(id);
    return out;
}

double SlidingWindow::min_unmerged_bound() const {
    double d = kInf;
    for (const auto &[id, t] : unmerged_)
        d = std::min(d, t.delta.dual_bound);
    return d;
}

void SlidingWindow::check_invariants() const {
    if (unmerged_.size() > width_)
        throw ContractViolation(fmt::format("window overflow: {} unmerged tasks, width {}", unmerged_.size(), width_));
    if (!unmerged_.empty() && unmerged_.begin()->first != next_merge_)
        throw ContractViolation(fmt::format("merge order broken: oldest unmerged task {}, next merge {}",
                                            unmerged_.begin()->first, next_merge_));
    if (next_merge_ + unmerged_.size() != next_id_)
        throw ContractViolation("task ids have gaps");
}

} // namespace n2n::orch
