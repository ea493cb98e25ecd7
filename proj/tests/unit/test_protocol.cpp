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

#include <gtest/gtest.h>

#include <cstring>
#include <random>

#include "messages.hpp"
#include "n2n/protocol.hpp"

using namespace n2n;
using namespace n2n::proto;

namespace {

Bytes concat(const std::vector<Message> &msgs) {
    Bytes out;
    for (const auto &m : msgs) {
        auto f = encode(m);
        out.insert(out.end(), f.begin(), f.end());
    }
    return out;
}

std::uint32_t frame_length(const Bytes &b) {
    std::uint32_t n;
    std::memcpy(&n, b.data(), 4);
    return n;
}

Task small_task(std::size_t k, TaskId id) {
    Task t;
    t.id = id;
    t.primal_bound = -1234;
    t.delta.dual_bound = -1300;
    t.delta.origin = {id - 1, 7};
    for (std::size_t i = 0; i < k; ++i)
        t.delta.bound_changes.push_back({static_cast<int>(511 - i), -8191.0 + static_cast<double>(i), 8191.0});
    return t;
}

} // namespace

TEST(Codec, TerminateIsFiveBytes) {
    const auto b = encode(Terminate{});
    EXPECT_EQ(b, (Bytes{1, 0, 0, 0, static_cast<std::uint8_t>(Tag::Terminate)}));
    EXPECT_EQ(decode(b), Message{Terminate{}});
}

TEST(Codec, LengthPrefixCoversTagAndPayload) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 200; ++i) {
        auto b = encode(testkit::random_message(rng));
        EXPECT_EQ(frame_length(b) + kFrameHeader, b.size());
    }
}

TEST(Codec, TagsFollowVariantOrder) {
    std::mt19937_64 rng(2);
    for (std::size_t k = 0; k < std::variant_size_v<Message>; ++k) {
        auto b = encode(testkit::random_message(rng, k));
        EXPECT_EQ(b[4], k + 1);
    }
}

TEST(Codec, EncodingIsDeterministic) {
    std::mt19937_64 a(5), b(5);
    for (int i = 0; i < 100; ++i) {
        TaskAssign m1{std::get<TaskAssign>(testkit::random_message(a, 3)).task};
        TaskAssign m2{std::get<TaskAssign>(testkit::random_message(b, 3)).task};
        EXPECT_EQ(encode(m1), encode(m2));
    }
}

TEST(Codec, FuzzRoundTrip) {
    std::mt19937_64 rng(20260101);
    for (int i = 0; i < 10000; ++i) {
        const auto m = testkit::random_message(rng);
        const auto b = encode(m);
        const auto back = decode(b);
        ASSERT_EQ(back, m) << "message " << i << " " << message_name(m);
        // Bit-exact, including signed zeros.
        ASSERT_EQ(encode(back), b) << "message " << i;
    }
}

TEST(Codec, NegativeZeroSurvives) {
    auto b = encode(BoundUpdate{-0.0});
    auto m = std::get<BoundUpdate>(decode(b));
    EXPECT_TRUE(std::signbit(m.primal_bound));
}

TEST(Codec, StreamSplitsFrames) {
    std::mt19937_64 rng(3);
    std::vector<Message> msgs;
    for (int i = 0; i < 50; ++i)
        msgs.push_back(testkit::random_message(rng));
    EXPECT_EQ(decode_stream(concat(msgs)), msgs);
}

TEST(Codec, TruncationUnknownTagAndTrailingBytes) {
    auto b = encode(Hello{3, 77});
    for (std::size_t n = 0; n < b.size(); ++n)
        EXPECT_THROW(decode(std::span(b.data(), n)), DecodeError) << n;

    Bytes unknown{1, 0, 0, 0, 0xEE};
    try {
        decode(unknown);
        FAIL();
    } catch (const DecodeError &e) {
        EXPECT_EQ(e.offset(), 4u);
    }

    auto t = encode(Hello{3, 77});
    t.push_back(0);
    t[0] += 1;
    try {
        decode(t);
        FAIL();
    } catch (const DecodeError &e) {
        EXPECT_EQ(e.offset(), t.size() - 1);
    }
    auto extra = encode(Terminate{});
    extra.push_back(9);
    EXPECT_THROW(decode(extra), DecodeError);
}

TEST(Codec, ErrorOffsetsAreAbsoluteInStreams) {
    Bytes s = concat({Terminate{}, Terminate{}});
    s.push_back(1);
    s.push_back(0);
    s.push_back(0);
    s.push_back(0);
    s.push_back(0xEE);
    try {
        decode_stream(s);
        FAIL();
    } catch (const DecodeError &e) {
        EXPECT_EQ(e.offset(), 14u);
    }
}

TEST(Codec, NanIsRejected) {
    auto b = encode(BoundUpdate{1.5});
    // BoundUpdate carries one raw-kind number; overwrite it with a NaN.
    const double nan = std::numeric_limits<double>::quiet_NaN();
    ASSERT_EQ(b.size(), 5u + 1 + 8);
    std::memcpy(b.data() + 6, &nan, 8);
    EXPECT_THROW(decode(b), DecodeError);
}

TEST(Codec, LengthCorruptionIsAlwaysDetected) {
    std::mt19937_64 rng(4);
    std::vector<Message> msgs;
    for (int i = 0; i < 30; ++i)
        msgs.push_back(testkit::random_message(rng));
    const auto clean = concat(msgs);
    std::size_t frame_start = 0;
    int corruptions = 0;
    for (const auto &m : msgs) {
        const auto len = encode(m).size();
        for (std::size_t byte = 0; byte < 4; ++byte) {
            for (int bit = 0; bit < 8; ++bit) {
                auto c = clean;
                c[frame_start + byte] ^= static_cast<std::uint8_t>(1u << bit);
                ++corruptions;
                EXPECT_THROW(decode_stream(c), DecodeError) << "frame at " << frame_start << " byte " << byte;
            }
            auto c = clean;
            c[frame_start + byte] = static_cast<std::uint8_t>(c[frame_start + byte] + 1 + rng() % 255);
            EXPECT_THROW(decode_stream(c), DecodeError);
        }
        frame_start += len;
    }
    EXPECT_EQ(corruptions, 30 * 32);
}

TEST(Codec, TaskAssignSizeBound) {
    // Integral bounds within +-8191, columns below 512, ids below 16384,
    // default config and no cuts.
    for (std::size_t k : {0u, 1u, 2u, 5u, 17u, 100u}) {
        const auto b = encode(TaskAssign{small_task(k, 16383)});
        EXPECT_LE(b.size() - kFrameHeader, 16 + 18 * k) << k;
    }
    // Arbitrary doubles cost a full eight bytes each.
    std::mt19937_64 rng(6);
    for (std::size_t k : {1u, 4u, 60u}) {
        auto t = small_task(k, 9000);
        t.primal_bound = 0.1;
        t.delta.dual_bound = 0.2;
        for (auto &bc : t.delta.bound_changes) {
            bc.lower = -1.0 / 3 - static_cast<double>(rng() % 100);
            bc.upper = 1.0 / 7 + static_cast<double>(rng() % 100);
        }
        const auto b = encode(TaskAssign{t});
        EXPECT_LE(b.size() - kFrameHeader, 32 + 18 * k) << k;
    }
}

TEST(Codec, ResultStatusSharesAByteWithTheSolutionFlag) {
    TaskResult r;
    r.task_id = 1;
    r.outcome.status = bnb::SolveStatus::NodeLimit;
    r.outcome.best_solution = Solution{{1.0}, 2.0};
    auto b = encode(r);
    // frame header, tag, id varint, then the status byte.
    EXPECT_EQ(b[6] & 0x0F, static_cast<int>(bnb::SolveStatus::NodeLimit));
    EXPECT_EQ(b[6] & 0xF0, 0x10);
}

TEST(Codec, InstanceHash) {
    EXPECT_EQ(instance_hash(""), 0xcbf29ce484222325ull);
    EXPECT_EQ(instance_hash("a"), 0xaf63dc4c8601ec8cull);
    EXPECT_NE(instance_hash("abc"), instance_hash("abd"));
}
