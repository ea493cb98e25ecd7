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

#include "n2n/protocol.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include <fmt/format.h>

namespace n2n::proto {

namespace {

// Kinds of a packed double.
enum : std::uint8_t { kKindInt = 0, kKindRaw = 1, kKindPosInf = 2, kKindNegInf = 3 };

constexpr double kMaxPackedInt = 9007199254740992.0; // 2^53

std::uint64_t zigzag(std::int64_t v) {
    return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}
std::int64_t unzigzag(std::uint64_t u) {
    return static_cast<std::int64_t>(u >> 1) ^ -static_cast<std::int64_t>(u & 1);
}

std::uint8_t kind_of(double v) {
    if (v == kInf)
        return kKindPosInf;
    if (v == -kInf)
        return kKindNegInf;
    const bool negative_zero = v == 0.0 && std::signbit(v);
    if (std::isfinite(v) && v == std::trunc(v) && std::abs(v) <= kMaxPackedInt && !negative_zero)
        return kKindInt;
    return kKindRaw;
}

class Writer {
  public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void varint(std::uint64_t v) {
        while (v >= 0x80) {
            out_.push_back(static_cast<std::uint8_t>(v | 0x80));
            v >>= 7;
        }
        out_.push_back(static_cast<std::uint8_t>(v));
    }
    void f64(double v) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i)
            out_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i)
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    // Payload of a double whose kind was written elsewhere.
    void value(std::uint8_t kind, double v) {
        if (kind == kKindInt)
            varint(zigzag(static_cast<std::int64_t>(v)));
        else if (kind == kKindRaw)
            f64(v);
    }
    // Self-describing double: kind in the low two bits of one varint.
    void pnum(double v) {
        const auto k = kind_of(v);
        if (k == kKindInt)
            varint(zigzag(static_cast<std::int64_t>(v)) << 2);
        else
            varint(k);
        if (k == kKindRaw)
            f64(v);
    }
    void bytes(std::string_view s) {
        varint(s.size());
        out_.insert(out_.end(), s.begin(), s.end());
    }
    Bytes take() { return std::move(out_); }

  private:
    Bytes out_;
};

class Reader {
  public:
    Reader(std::span<const std::uint8_t> data, std::size_t base) : data_(data), base_(base) {}

    [[noreturn]] void fail(const std::string &what) const { throw DecodeError(base_ + pos_, what); }
    [[noreturn]] void fail_at(std::size_t pos, const std::string &what) const {
        throw DecodeError(base_ + pos, what);
    }

    bool done() const { return pos_ == data_.size(); }
    std::size_t pos() const { return pos_; }

    std::uint8_t u8() {
        if (pos_ >= data_.size())
            fail("truncated frame");
        return data_[pos_++];
    }
    bool boolean() {
        const auto at = pos_;
        const auto b = u8();
        if (b > 1)
            fail_at(at, fmt::format("invalid boolean byte {}", b));
        return b == 1;
    }
    std::uint64_t varint() {
        const auto at = pos_;
        std::uint64_t v = 0;
        for (int shift = 0; shift < 64; shift += 7) {
            const auto b = u8();
            if (shift == 63 && (b & 0x7e) != 0)
                fail_at(at, "varint overflows 64 bits");
            v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
            if ((b & 0x80) == 0)
                return v;
        }
        fail_at(at, "varint longer than 10 bytes");
    }
    std::uint32_t varint32() {
        const auto at = pos_;
        const auto v = varint();
        if (v > 0xffffffffu)
            fail_at(at, "value exceeds 32 bits");
        return static_cast<std::uint32_t>(v);
    }
    std::size_t count() {
        const auto at = pos_;
        const auto v = varint();
        if (v > data_.size() - pos_)
            fail_at(at, fmt::format("count {} exceeds remaining frame bytes", v));
        return static_cast<std::size_t>(v);
    }
    std::int32_t column() {
        const auto at = pos_;
        const auto v = varint();
        if (v > 0x7fffffffu)
            fail_at(at, "column index out of range");
        return static_cast<std::int32_t>(v);
    }
    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(u8()) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    double value(std::uint8_t kind) {
        switch (kind) {
        case kKindInt:
            return integral();
        case kKindRaw:
            return raw_finite();
        case kKindPosInf:
            return kInf;
        default:
            return -kInf;
        }
    }
    double pnum() {
        const auto at = pos_;
        const auto h = varint();
        const auto k = static_cast<std::uint8_t>(h & 3);
        if (k == kKindInt) {
            const auto v = unzigzag(h >> 2);
            if (std::abs(static_cast<double>(v)) > kMaxPackedInt)
                fail_at(at, "packed integer out of range");
            return static_cast<double>(v);
        }
        if (h >> 2)
            fail_at(at, "stray bits in packed number header");
        return value(k);
    }
    std::string bytes() {
        const auto n = count();
        std::string s(reinterpret_cast<const char *>(data_.data() + pos_), n);
        pos_ += n;
        return s;
    }

  private:
    double integral() {
        const auto at = pos_;
        const auto v = unzigzag(varint());
        if (std::abs(static_cast<double>(v)) > kMaxPackedInt)
            fail_at(at, "packed integer out of range");
        return static_cast<double>(v);
    }
    double raw_finite() {
        const auto at = pos_;
        const double v = f64();
        if (std::isnan(v))
            fail_at(at, "NaN on the wire");
        return v;
    }

    std::span<const std::uint8_t> data_;
    std::size_t base_;
    std::size_t pos_ = 0;
};

// --- shared pieces --------------------------------------------------------

void put_solution(Writer &w, const Solution &s) {
    w.varint(s.values.size());
    for (double v : s.values)
        w.pnum(v);
    w.pnum(s.objective);
}
Solution get_solution(Reader &r) {
    Solution s;
    const auto n = r.count();
    s.values.resize(n);
    for (auto &v : s.values)
        v = r.pnum();
    s.objective = r.pnum();
    return s;
}

// Header varint: col << 5 | fixed << 4 | upper kind << 2 | lower kind.
void put_change(Writer &w, const BoundChange &c) {
    const bool fixed = c.lower == c.upper && std::bit_cast<std::uint64_t>(c.lower) ==
                                                 std::bit_cast<std::uint64_t>(c.upper);
    const auto lk = kind_of(c.lower);
    const auto uk = fixed ? std::uint8_t{0} : kind_of(c.upper);
    w.varint((static_cast<std::uint64_t>(c.col) << 5) | (static_cast<std::uint64_t>(fixed) << 4) |
             (static_cast<std::uint64_t>(uk) << 2) | lk);
    w.value(lk, c.lower);
    if (!fixed)
        w.value(uk, c.upper);
}
BoundChange get_change(Reader &r) {
    const auto at = r.pos();
    const auto h = r.varint();
    if ((h >> 5) > 0x7fffffffu)
        r.fail_at(at, "column index out of range");
    BoundChange c;
    c.col = static_cast<int>(h >> 5);
    const bool fixed = (h >> 4) & 1;
    const auto uk = static_cast<std::uint8_t>((h >> 2) & 3);
    if (fixed && uk != 0)
        r.fail_at(at, "fixed bound change carries an upper kind");
    c.lower = r.value(static_cast<std::uint8_t>(h & 3));
    c.upper = fixed ? c.lower : r.value(uk);
    return c;
}

void put_cut(Writer &w, const Cut &c) {
    w.varint(c.entries.size());
    for (const auto &e : c.entries) {
        w.varint(static_cast<std::uint64_t>(e.col));
        w.pnum(e.value);
    }
    w.pnum(c.lhs);
    w.pnum(c.rhs);
}
Cut get_cut(Reader &r) {
    Cut c;
    const auto n = r.count();
    c.entries.resize(n);
    for (auto &e : c.entries) {
        e.col = r.column();
        e.value = r.pnum();
    }
    c.lhs = r.pnum();
    c.rhs = r.pnum();
    return c;
}

// Flags byte: bits 0-1 dual bound kind, bit 2 has cuts.
void put_delta(Writer &w, const bnb::NodeDelta &d) {
    const auto dk = kind_of(d.dual_bound);
    const bool cuts = !d.cuts.empty();
    w.u8(static_cast<std::uint8_t>(dk | (cuts << 2)));
    w.value(dk, d.dual_bound);
    w.varint(d.origin.parent_task);
    w.varint(d.origin.child_ordinal);
    w.varint(d.bound_changes.size());
    for (const auto &c : d.bound_changes)
        put_change(w, c);
    if (cuts) {
        w.varint(d.cuts.size());
        for (const auto &c : d.cuts)
            put_cut(w, c);
    }
}
bnb::NodeDelta get_delta(Reader &r) {
    const auto at = r.pos();
    const auto flags = r.u8();
    if (flags & ~0x07u)
        r.fail_at(at, fmt::format("unknown delta flags 0x{:02x}", flags));
    bnb::NodeDelta d;
    d.dual_bound = r.value(flags & 3);
    d.origin.parent_task = r.varint();
    d.origin.child_ordinal = r.varint32();
    const auto k = r.count();
    d.bound_changes.reserve(k);
    for (std::size_t i = 0; i < k; ++i)
        d.bound_changes.push_back(get_change(r));
    if (flags & 4) {
        const auto at_cuts = r.pos();
        const auto n = r.count();
        if (n == 0)
            r.fail_at(at_cuts, "empty cut list behind a has-cuts flag");
        d.cuts.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            d.cuts.push_back(get_cut(r));
    }
    return d;
}

// Presence mask of fields that differ from SolverConfig{}.
enum : std::uint8_t {
    kCfgNodeLimit = 1,
    kCfgGap = 2,
    kCfgStrategy = 4,
    kCfgSeed = 8,
    kCfgFeasTol = 16,
    kCfgIntTol = 32,
};

void put_config(Writer &w, const bnb::SolverConfig &c) {
    const bnb::SolverConfig d;
    const std::uint8_t strategy = static_cast<std::uint8_t>(
        static_cast<unsigned>(c.node_selection) | (static_cast<unsigned>(c.branch_tie) << 1) |
        (static_cast<unsigned>(c.cp_emphasis) << 2) | (static_cast<unsigned>(c.branching) << 4));
    std::uint8_t mask = 0;
    if (c.node_limit != d.node_limit)
        mask |= kCfgNodeLimit;
    if (std::bit_cast<std::uint64_t>(c.gap_limit) != std::bit_cast<std::uint64_t>(d.gap_limit))
        mask |= kCfgGap;
    if (strategy != 0)
        mask |= kCfgStrategy;
    if (c.rng_seed != d.rng_seed)
        mask |= kCfgSeed;
    if (std::bit_cast<std::uint64_t>(c.feas_tol) != std::bit_cast<std::uint64_t>(d.feas_tol))
        mask |= kCfgFeasTol;
    if (std::bit_cast<std::uint64_t>(c.int_tol) != std::bit_cast<std::uint64_t>(d.int_tol))
        mask |= kCfgIntTol;
    w.u8(mask);
    if (mask & kCfgNodeLimit)
        w.varint(zigzag(c.node_limit));
    if (mask & kCfgGap)
        w.f64(c.gap_limit);
    if (mask & kCfgStrategy)
        w.u8(strategy);
    if (mask & kCfgSeed)
        w.varint(c.rng_seed);
    if (mask & kCfgFeasTol)
        w.f64(c.feas_tol);
    if (mask & kCfgIntTol)
        w.f64(c.int_tol);
}
bnb::SolverConfig get_config(Reader &r) {
    const auto at = r.pos();
    const auto mask = r.u8();
    if (mask & ~0x3fu)
        r.fail_at(at, fmt::format("unknown config mask bits 0x{:02x}", mask));
    bnb::SolverConfig c;
    if (mask & kCfgNodeLimit)
        c.node_limit = unzigzag(r.varint());
    if (mask & kCfgGap)
        c.gap_limit = r.f64();
    if (mask & kCfgStrategy) {
        const auto sat = r.pos();
        const auto s = r.u8();
        if ((s & 0x08) || (s >> 4) != 0)
            r.fail_at(sat, fmt::format("unknown strategy byte 0x{:02x}", s));
        c.node_selection = static_cast<bnb::NodeSelection>(s & 1);
        c.branch_tie = static_cast<bnb::BranchTie>((s >> 1) & 1);
        c.cp_emphasis = (s >> 2) & 1;
        c.branching = bnb::Branching::MostFractional;
    }
    if (mask & kCfgSeed)
        c.rng_seed = r.varint();
    if (mask & kCfgFeasTol)
        c.feas_tol = r.f64();
    if (mask & kCfgIntTol)
        c.int_tol = r.f64();
    return c;
}

// TaskAssign flags: bits 0-1 primal kind, bit 2 custom config,
// bit 3 incumbent ref, bit 4 crossover.
void put_task(Writer &w, const Task &t) {
    const auto pk = kind_of(t.primal_bound);
    const bool custom = !(t.cfg == bnb::SolverConfig{});
    w.varint(t.id);
    w.u8(static_cast<std::uint8_t>(pk | (custom << 2) | (t.incumbent_ref.has_value() << 3) |
                                   (t.crossover << 4)));
    w.value(pk, t.primal_bound);
    put_delta(w, t.delta);
    if (custom)
        put_config(w, t.cfg);
    if (t.incumbent_ref)
        w.varint(*t.incumbent_ref);
}
Task get_task(Reader &r) {
    Task t;
    t.id = r.varint();
    const auto at = r.pos();
    const auto flags = r.u8();
    if (flags & ~0x1fu)
        r.fail_at(at, fmt::format("unknown task flags 0x{:02x}", flags));
    t.primal_bound = r.value(flags & 3);
    t.delta = get_delta(r);
    if (flags & 4)
        t.cfg = get_config(r);
    if (flags & 8)
        t.incumbent_ref = r.varint32();
    t.crossover = (flags & 16) != 0;
    return t;
}

// Status byte: status in the low nibble, has-solution in bit 4.
void put_outcome(Writer &w, const bnb::SolveOutcome &o) {
    w.u8(static_cast<std::uint8_t>(static_cast<unsigned>(o.status) |
                                   (o.best_solution.has_value() << 4)));
    w.pnum(o.dual_bound);
    w.varint(o.nodes_processed);
    w.varint(o.effort);
    if (o.best_solution)
        put_solution(w, *o.best_solution);
    w.varint(o.open_deltas.size());
    for (const auto &d : o.open_deltas)
        put_delta(w, d);
}
bnb::SolveOutcome get_outcome(Reader &r) {
    const auto at = r.pos();
    const auto b = r.u8();
    if ((b & 0x0f) > static_cast<unsigned>(bnb::SolveStatus::Unbounded) || (b >> 5) != 0)
        r.fail_at(at, fmt::format("invalid status byte 0x{:02x}", b));
    bnb::SolveOutcome o;
    o.status = static_cast<bnb::SolveStatus>(b & 0x0f);
    o.dual_bound = r.pnum();
    o.nodes_processed = r.varint();
    o.effort = r.varint();
    if (b & 0x10)
        o.best_solution = get_solution(r);
    const auto n = r.count();
    o.open_deltas.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        o.open_deltas.push_back(get_delta(r));
    return o;
}

// --- per-message payloads -------------------------------------------------

void put(Writer &w, const Hello &m) {
    w.varint(m.worker_id);
    w.varint(m.memory_budget);
}
void put(Writer &w, const InstanceFile &m) {
    w.u64(m.hash);
    w.bytes(m.mps);
}
void put(Writer &w, const Activate &m) { w.u8(m.active ? 1 : 0); }
void put(Writer &w, const TaskAssign &m) { put_task(w, m.task); }
void put(Writer &w, const TaskResult &m) {
    w.varint(m.task_id);
    put_outcome(w, m.outcome);
}
void put(Writer &w, const IncumbentUpdate &m) { put_solution(w, m.solution); }
void put(Writer &w, const BoundUpdate &m) { w.pnum(m.primal_bound); }
void put(Writer &w, const Interrupt &m) { w.varint(m.task_id); }
void put(Writer &, const Terminate &) {}
void put(Writer &w, const RacingStart &m) { put_config(w, m.cfg); }
void put(Writer &w, const RacingReport &m) {
    w.pnum(m.dual_bound);
    w.varint(m.open_nodes);
    w.u8(m.solved ? 1 : 0);
}
void put(Writer &, const RacingStop &) {}
void put(Writer &w, const Stats &m) {
    w.varint(m.nodes);
    w.varint(m.effort);
}

Message get(Reader &r, Tag tag) {
    switch (tag) {
    case Tag::Hello: {
        Hello m;
        m.worker_id = r.varint32();
        m.memory_budget = r.varint();
        return m;
    }
    case Tag::InstanceFile: {
        InstanceFile m;
        m.hash = r.u64();
        m.mps = r.bytes();
        return m;
    }
    case Tag::Activate:
        return Activate{r.boolean()};
    case Tag::TaskAssign:
        return TaskAssign{get_task(r)};
    case Tag::TaskResult: {
        TaskResult m;
        m.task_id = r.varint();
        m.outcome = get_outcome(r);
        return m;
    }
    case Tag::IncumbentUpdate:
        return IncumbentUpdate{get_solution(r)};
    case Tag::BoundUpdate:
        return BoundUpdate{r.pnum()};
    case Tag::Interrupt:
        return Interrupt{r.varint()};
    case Tag::Terminate:
        return Terminate{};
    case Tag::RacingStart:
        return RacingStart{get_config(r)};
    case Tag::RacingReport: {
        RacingReport m;
        m.dual_bound = r.pnum();
        m.open_nodes = r.varint();
        m.solved = r.boolean();
        return m;
    }
    case Tag::RacingStop:
        return RacingStop{};
    case Tag::Stats: {
        Stats m;
        m.nodes = r.varint();
        m.effort = r.varint();
        return m;
    }
    }
    r.fail("unreachable tag");
}

std::uint32_t read_length(std::span<const std::uint8_t> b) {
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

// Decodes the frame body (tag + payload) that starts at absolute offset `base`.
Message decode_body(std::span<const std::uint8_t> body, std::size_t base) {
    Reader r(body, base);
    const auto tag = r.u8();
    if (tag < static_cast<std::uint8_t>(Tag::Hello) || tag > static_cast<std::uint8_t>(Tag::Stats))
        r.fail_at(0, fmt::format("unknown message tag {}", tag));
    auto msg = get(r, static_cast<Tag>(tag));
    if (!r.done())
        r.fail(fmt::format("{} trailing bytes after {}", body.size() - r.pos(), message_name(msg)));
    return msg;
}

} // namespace

DecodeError::DecodeError(std::size_t offset, const std::string &what)
    : std::runtime_error(fmt::format("decode error at byte {}: {}", offset, what)), offset_(offset) {}

std::string_view message_name(const Message &m) {
    static constexpr std::string_view names[] = {
        "Hello",       "InstanceFile", "Activate",   "TaskAssign", "TaskResult",
        "IncumbentUpdate", "BoundUpdate", "Interrupt", "Terminate", "RacingStart",
        "RacingReport", "RacingStop",  "Stats",
    };
    return names[m.index()];
}

Bytes encode(const Message &msg) {
    Writer w;
    for (int i = 0; i < 4; ++i)
        w.u8(0);
    w.u8(static_cast<std::uint8_t>(msg.index() + 1));
    std::visit([&](const auto &m) { put(w, m); }, msg);
    auto out = w.take();
    const auto len = out.size() - kFrameHeader;
    if (len > kMaxFrame)
        throw ContractViolation(fmt::format("frame of {} bytes exceeds the limit", len));
    for (int i = 0; i < 4; ++i)
        out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(len >> (8 * i));
    return out;
}

Message decode(std::span<const std::uint8_t> frame) {
    if (frame.size() < kFrameHeader)
        throw DecodeError(frame.size(), "truncated length prefix");
    const auto len = read_length(frame);
    if (len == 0 || len > kMaxFrame)
        throw DecodeError(0, fmt::format("invalid frame length {}", len));
    if (len != frame.size() - kFrameHeader)
        throw DecodeError(0, fmt::format("length prefix says {} bytes but frame holds {}", len,
                                         frame.size() - kFrameHeader));
    return decode_body(frame.subspan(kFrameHeader), kFrameHeader);
}

std::vector<Message> decode_stream(std::span<const std::uint8_t> bytes) {
    std::vector<Message> out;
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        if (bytes.size() - pos < kFrameHeader)
            throw DecodeError(pos, "truncated length prefix");
        const auto len = read_length(bytes.subspan(pos));
        if (len == 0 || len > kMaxFrame)
            throw DecodeError(pos, fmt::format("invalid frame length {}", len));
        if (len > bytes.size() - pos - kFrameHeader)
            throw DecodeError(pos, fmt::format("frame of {} bytes runs past the end of the stream", len));
        out.push_back(decode_body(bytes.subspan(pos + kFrameHeader, len), pos + kFrameHeader));
        pos += kFrameHeader + len;
    }
    return out;
}

std::uint64_t instance_hash(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace n2n::proto
