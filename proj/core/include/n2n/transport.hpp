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

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "n2n/protocol.hpp"

namespace n2n::proto {

class TransportError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class RecvStatus : std::uint8_t { Ok, Empty, Closed };

struct Received {
    RecvStatus status = RecvStatus::Closed;
    Message msg;
    /// Sending worker on the supervisor side, -1 otherwise.
    int from = -1;

    bool ok() const { return status == RecvStatus::Ok; }
};

/// Worker end of one link. Used from a single thread.
class WorkerLink {
  public:
    virtual ~WorkerLink() = default;
    /// False once the link is closed.
    virtual bool send(const Message &msg) = 0;
    /// Blocks until a message arrives or the link closes.
    virtual Received recv() = 0;
    virtual Received try_recv() = 0;
    virtual void close() = 0;
};

/// Supervisor end: one link per worker, a single merged inbox.
class SupervisorHub {
  public:
    virtual ~SupervisorHub() = default;
    virtual std::size_t num_workers() const = 0;
    virtual bool send(int worker, const Message &msg) = 0;
    /// Next message from any worker. A Closed result with from >= 0 reports
    /// that one worker's link went away; from == -1 means no worker is left.
    /// A negative timeout blocks; otherwise Empty is returned on timeout.
    virtual Received recv_any(int timeout_ms = -1) = 0;
    virtual void close() = 0;

    void broadcast(std::span<const int> workers, const Message &msg) {
        for (int w : workers)
            send(w, msg);
    }
};

namespace detail {

struct Envelope {
    int from = -1;
    Bytes bytes;
    bool closed = false;
};

/// Unbounded MPSC queue of encoded frames.
class FrameQueue {
  public:
    bool push(Envelope e);
    /// Envelope with closed set and from == -1 once closed and drained, or
    /// on timeout (then `timed_out` is set).
    Envelope pop(int timeout_ms = -1, bool *timed_out = nullptr);
    bool try_pop(Envelope &out);
    void close();
    bool closed() const;

  private:
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<Envelope> q_;
    bool closed_ = false;
};

} // namespace detail

/// In-process transport. Every message is encoded on send and decoded on
/// receipt, so local runs exercise the codec exactly like TCP runs.
class LocalNetwork {
  public:
    explicit LocalNetwork(std::size_t workers);
    ~LocalNetwork();

    SupervisorHub &hub();
    WorkerLink &worker(std::size_t i);
    std::size_t num_workers() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Synchronous worker behaviour plugged into ScriptedHub.
class MessageHandler {
  public:
    virtual ~MessageHandler() = default;
    virtual void start(WorkerLink &) {}
    virtual void handle(const Message &msg, WorkerLink &reply) = 0;
};

/// Single-threaded transport for reproducibility tests. send() runs the
/// target worker's handler to completion; replies are parked, and
/// recv_any() releases them in an order chosen by the script (explicit
/// picks first, then a seeded RNG). recv_any returns Closed with
/// from == -1 when nothing is pending. Handlers are started (Hello) on
/// construction.
class ScriptedHub : public SupervisorHub {
  public:
    ScriptedHub(std::vector<MessageHandler *> handlers, std::vector<std::size_t> script,
                std::uint64_t seed);

    std::size_t num_workers() const override { return handlers_.size(); }
    bool send(int worker, const Message &msg) override;
    Received recv_any(int timeout_ms = -1) override;
    void close() override { closed_ = true; }

    /// (worker, message name) in delivery order.
    const std::vector<std::pair<int, std::string>> &delivery_log() const { return log_; }

  private:
    class ReplyLink;

    std::vector<MessageHandler *> handlers_;
    std::vector<std::size_t> script_;
    std::size_t next_pick_ = 0;
    std::mt19937_64 rng_;
    std::vector<detail::Envelope> pending_;
    std::vector<std::pair<int, std::string>> log_;
    bool closed_ = false;
};

/// Splits "host:port"; throws TransportError on malformed input.
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string &endpoint);

/// Listening socket for the supervisor. Port 0 picks an ephemeral port.
class TcpListener {
  public:
    explicit TcpListener(const std::string &endpoint);
    ~TcpListener();
    TcpListener(const TcpListener &) = delete;
    TcpListener &operator=(const TcpListener &) = delete;

    std::uint16_t port() const { return port_; }

    /// Accepts `workers` connections (in accept order) and starts one reader
    /// thread per connection. Throws TransportError on timeout.
    std::unique_ptr<SupervisorHub> accept(std::size_t workers, int timeout_ms = 60000);

  private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

/// Connects with retries until `timeout_ms` elapses.
std::unique_ptr<WorkerLink> tcp_connect(const std::string &endpoint, int timeout_ms = 30000);

} // namespace n2n::proto
