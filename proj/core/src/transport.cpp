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

#include "n2n/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstring>

#include <fmt/format.h>

namespace n2n::proto {

namespace detail {

bool FrameQueue::push(Envelope e) {
    {
        std::lock_guard lk(mu_);
        if (closed_)
            return false;
        q_.push_back(std::move(e));
    }
    cv_.notify_one();
    return true;
}

Envelope FrameQueue::pop(int timeout_ms, bool *timed_out) {
    std::unique_lock lk(mu_);
    const auto ready = [&] { return !q_.empty() || closed_; };
    if (timed_out)
        *timed_out = false;
    if (timeout_ms < 0) {
        cv_.wait(lk, ready);
    } else if (!cv_.wait_for(lk, std::chrono::milliseconds(timeout_ms), ready)) {
        if (timed_out)
            *timed_out = true;
        return Envelope{-1, {}, true};
    }
    if (q_.empty())
        return Envelope{-1, {}, true};
    auto e = std::move(q_.front());
    q_.pop_front();
    return e;
}

bool FrameQueue::try_pop(Envelope &out) {
    std::lock_guard lk(mu_);
    if (q_.empty())
        return false;
    out = std::move(q_.front());
    q_.pop_front();
    return true;
}

void FrameQueue::close() {
    {
        std::lock_guard lk(mu_);
        closed_ = true;
    }
    cv_.notify_all();
}

bool FrameQueue::closed() const {
    std::lock_guard lk(mu_);
    return closed_;
}

} // namespace detail

namespace {

Received received(const detail::Envelope &e) {
    if (e.closed)
        return Received{RecvStatus::Closed, Terminate{}, e.from};
    return Received{RecvStatus::Ok, decode(e.bytes), e.from};
}

} // namespace

// --- in-process -----------------------------------------------------------

struct LocalNetwork::Impl {
    class Link : public WorkerLink {
      public:
        Link(Impl &net, int id) : net_(net), id_(id) {}

        bool send(const Message &msg) override {
            if (closed_)
                return false;
            return net_.sup_inbox.push({id_, encode(msg), false});
        }
        Received recv() override {
            if (closed_)
                return {};
            return received(inbox.pop());
        }
        Received try_recv() override {
            if (closed_)
                return {};
            detail::Envelope e;
            if (!inbox.try_pop(e))
                return inbox.closed() ? Received{} : Received{RecvStatus::Empty, Terminate{}, -1};
            return received(e);
        }
        void close() override {
            if (closed_)
                return;
            closed_ = true;
            net_.sup_inbox.push({id_, {}, true});
        }

        detail::FrameQueue inbox;

      private:
        Impl &net_;
        int id_;
        bool closed_ = false;
    };

    class Hub : public SupervisorHub {
      public:
        explicit Hub(Impl &net) : net_(net) {}

        std::size_t num_workers() const override { return net_.links.size(); }
        bool send(int worker, const Message &msg) override {
            if (worker < 0 || static_cast<std::size_t>(worker) >= net_.links.size())
                throw ContractViolation(fmt::format("no worker {}", worker));
            return net_.links[static_cast<std::size_t>(worker)]->inbox.push({-1, encode(msg), false});
        }
        Received recv_any(int timeout_ms) override {
            if (gone_ == net_.links.size())
                return {};
            bool timed_out = false;
            auto e = net_.sup_inbox.pop(timeout_ms, &timed_out);
            if (timed_out)
                return {RecvStatus::Empty, Terminate{}, -1};
            if (e.closed && e.from >= 0)
                ++gone_;
            return received(e);
        }
        void close() override {
            for (auto &l : net_.links)
                l->inbox.close();
        }

      private:
        Impl &net_;
        std::size_t gone_ = 0;
    };

    explicit Impl(std::size_t workers) : hub(*this) {
        for (std::size_t i = 0; i < workers; ++i)
            links.push_back(std::make_unique<Link>(*this, static_cast<int>(i)));
    }

    detail::FrameQueue sup_inbox;
    std::vector<std::unique_ptr<Link>> links;
    Hub hub;
};

LocalNetwork::LocalNetwork(std::size_t workers) : impl_(std::make_unique<Impl>(workers)) {
    if (workers == 0)
        throw ContractViolation("LocalNetwork needs at least one worker");
}
LocalNetwork::~LocalNetwork() = default;
SupervisorHub &LocalNetwork::hub() { return impl_->hub; }
WorkerLink &LocalNetwork::worker(std::size_t i) { return *impl_->links.at(i); }
std::size_t LocalNetwork::num_workers() const { return impl_->links.size(); }

// --- scripted -------------------------------------------------------------

class ScriptedHub::ReplyLink : public WorkerLink {
  public:
    ReplyLink(ScriptedHub &hub, int id) : hub_(hub), id_(id) {}
    bool send(const Message &msg) override {
        hub_.pending_.push_back({id_, encode(msg), false});
        return true;
    }
    Received recv() override { return {}; }
    Received try_recv() override { return {RecvStatus::Empty, Terminate{}, -1}; }
    void close() override {}

  private:
    ScriptedHub &hub_;
    int id_;
};

ScriptedHub::ScriptedHub(std::vector<MessageHandler *> handlers, std::vector<std::size_t> script,
                         std::uint64_t seed)
    : handlers_(std::move(handlers)), script_(std::move(script)), rng_(seed) {
    if (handlers_.empty())
        throw ContractViolation("ScriptedHub needs at least one worker");
    for (std::size_t i = 0; i < handlers_.size(); ++i) {
        ReplyLink reply(*this, static_cast<int>(i));
        handlers_[i]->start(reply);
    }
}

bool ScriptedHub::send(int worker, const Message &msg) {
    if (worker < 0 || static_cast<std::size_t>(worker) >= handlers_.size())
        throw ContractViolation(fmt::format("no worker {}", worker));
    if (closed_)
        return false;
    const auto decoded = decode(encode(msg));
    ReplyLink reply(*this, worker);
    handlers_[static_cast<std::size_t>(worker)]->handle(decoded, reply);
    return true;
}

Received ScriptedHub::recv_any(int) {
    if (pending_.empty())
        return {};
    std::size_t pick;
    if (next_pick_ < script_.size())
        pick = script_[next_pick_++] % pending_.size();
    else
        pick = std::uniform_int_distribution<std::size_t>(0, pending_.size() - 1)(rng_);
    auto e = std::move(pending_[pick]);
    pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(pick));
    auto r = received(e);
    log_.emplace_back(e.from, std::string(message_name(r.msg)));
    return r;
}

// --- TCP ------------------------------------------------------------------

namespace {

[[noreturn]] void sys_fail(const std::string &what) {
    throw TransportError(fmt::format("{}: {}", what, std::strerror(errno)));
}

bool write_all(int fd, const Bytes &b) {
    std::size_t off = 0;
    while (off < b.size()) {
        const auto n = ::send(fd, b.data() + off, b.size() - off, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            return false;
        }
        off += static_cast<std::size_t>(n);
    }
    return true;
}

// False on EOF or error.
bool read_exact(int fd, std::uint8_t *dst, std::size_t n) {
    std::size_t off = 0;
    while (off < n) {
        const auto r = ::recv(fd, dst + off, n - off, 0);
        if (r == 0)
            return false;
        if (r < 0) {
            if (errno == EINTR)
                continue;
            return false;
        }
        off += static_cast<std::size_t>(r);
    }
    return true;
}

// Reads one whole frame. Returns false on EOF; throws DecodeError on an
// oversized length prefix.
bool read_frame(int fd, Bytes &out) {
    out.assign(kFrameHeader, 0);
    if (!read_exact(fd, out.data(), kFrameHeader))
        return false;
    const std::uint32_t len = static_cast<std::uint32_t>(out[0]) | (static_cast<std::uint32_t>(out[1]) << 8) |
                              (static_cast<std::uint32_t>(out[2]) << 16) |
                              (static_cast<std::uint32_t>(out[3]) << 24);
    if (len == 0 || len > kMaxFrame)
        throw DecodeError(0, fmt::format("invalid frame length {}", len));
    out.resize(kFrameHeader + len);
    return read_exact(fd, out.data() + kFrameHeader, len);
}

void set_nodelay(int fd) {
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

class TcpHub : public SupervisorHub {
  public:
    explicit TcpHub(std::vector<int> fds) : fds_(std::move(fds)) {
        for (std::size_t i = 0; i < fds_.size(); ++i)
            readers_.emplace_back([this, i] { read_loop(i); });
    }
    ~TcpHub() override {
        close();
        for (auto &t : readers_)
            t.join();
        for (int fd : fds_)
            ::close(fd);
    }

    std::size_t num_workers() const override { return fds_.size(); }
    bool send(int worker, const Message &msg) override {
        if (worker < 0 || static_cast<std::size_t>(worker) >= fds_.size())
            throw ContractViolation(fmt::format("no worker {}", worker));
        return write_all(fds_[static_cast<std::size_t>(worker)], encode(msg));
    }
    Received recv_any(int timeout_ms) override {
        if (gone_ == fds_.size())
            return {};
        bool timed_out = false;
        auto e = inbox_.pop(timeout_ms, &timed_out);
        if (timed_out)
            return {RecvStatus::Empty, Terminate{}, -1};
        if (e.closed && e.from >= 0)
            ++gone_;
        return received(e);
    }
    void close() override {
        if (shut_.exchange(true))
            return;
        for (int fd : fds_)
            ::shutdown(fd, SHUT_RDWR);
    }

  private:
    void read_loop(std::size_t i) {
        Bytes frame;
        try {
            while (read_frame(fds_[i], frame))
                inbox_.push({static_cast<int>(i), frame, false});
        } catch (const DecodeError &) {
        }
        inbox_.push({static_cast<int>(i), {}, true});
    }

    std::vector<int> fds_;
    std::vector<std::thread> readers_;
    detail::FrameQueue inbox_;
    std::size_t gone_ = 0;
    std::atomic<bool> shut_{false};
};

class TcpLink : public WorkerLink {
  public:
    explicit TcpLink(int fd) : fd_(fd) {}
    ~TcpLink() override { close(); }

    bool send(const Message &msg) override { return fd_ >= 0 && write_all(fd_, encode(msg)); }
    Received recv() override {
        if (fd_ < 0)
            return {};
        Bytes frame;
        if (!read_frame(fd_, frame))
            return {};
        return {RecvStatus::Ok, decode(frame), -1};
    }
    Received try_recv() override {
        if (fd_ < 0)
            return {};
        pollfd p{fd_, POLLIN, 0};
        const int r = ::poll(&p, 1, 0);
        if (r == 0)
            return {RecvStatus::Empty, Terminate{}, -1};
        return recv();
    }
    void close() override {
        if (fd_ >= 0) {
            ::shutdown(fd_, SHUT_RDWR);
            ::close(fd_);
            fd_ = -1;
        }
    }

  private:
    int fd_;
};

addrinfo *resolve(const std::string &host, std::uint16_t port, bool passive) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    if (passive)
        hints.ai_flags = AI_PASSIVE;
    addrinfo *res = nullptr;
    const auto service = std::to_string(port);
    const int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(), service.c_str(), &hints, &res);
    if (rc != 0)
        throw TransportError(fmt::format("cannot resolve {}: {}", host, ::gai_strerror(rc)));
    return res;
}

} // namespace

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string &endpoint) {
    const auto colon = endpoint.rfind(':');
    if (colon == std::string::npos)
        throw TransportError(fmt::format("endpoint '{}' is not host:port", endpoint));
    const auto port_str = endpoint.substr(colon + 1);
    if (port_str.empty() || port_str.size() > 5 ||
        port_str.find_first_not_of("0123456789") != std::string::npos)
        throw TransportError(fmt::format("endpoint '{}' has an invalid port", endpoint));
    const auto port = std::stoul(port_str);
    if (port > 65535)
        throw TransportError(fmt::format("endpoint '{}' has an invalid port", endpoint));
    return {endpoint.substr(0, colon), static_cast<std::uint16_t>(port)};
}

TcpListener::TcpListener(const std::string &endpoint) {
    const auto [host, port] = parse_endpoint(endpoint);
    addrinfo *res = resolve(host, port, true);
    fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    if (fd_ < 0) {
        ::freeaddrinfo(res);
        sys_fail("socket");
    }
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(fd_, res->ai_addr, res->ai_addrlen) < 0) {
        ::freeaddrinfo(res);
        ::close(fd_);
        sys_fail(fmt::format("bind {}", endpoint));
    }
    ::freeaddrinfo(res);
    if (::listen(fd_, 64) < 0) {
        ::close(fd_);
        sys_fail("listen");
    }
    sockaddr_in addr{};
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr *>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
    if (fd_ >= 0)
        ::close(fd_);
}

std::unique_ptr<SupervisorHub> TcpListener::accept(std::size_t workers, int timeout_ms) {
    std::vector<int> fds;
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    while (fds.size() < workers) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                              deadline - std::chrono::steady_clock::now())
                              .count();
        pollfd p{fd_, POLLIN, 0};
        if (left <= 0 || ::poll(&p, 1, static_cast<int>(left)) <= 0) {
            for (int fd : fds)
                ::close(fd);
            throw TransportError(
                fmt::format("only {} of {} workers connected before the timeout", fds.size(), workers));
        }
        const int fd = ::accept(fd_, nullptr, nullptr);
        if (fd < 0) {
            if (errno == EINTR)
                continue;
            for (int f : fds)
                ::close(f);
            sys_fail("accept");
        }
        set_nodelay(fd);
        fds.push_back(fd);
    }
    return std::make_unique<TcpHub>(std::move(fds));
}

std::unique_ptr<WorkerLink> tcp_connect(const std::string &endpoint, int timeout_ms) {
    const auto [host, port] = parse_endpoint(endpoint);
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    for (;;) {
        addrinfo *res = resolve(host.empty() ? "127.0.0.1" : host, port, false);
        const int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
        if (fd < 0) {
            ::freeaddrinfo(res);
            sys_fail("socket");
        }
        const int rc = ::connect(fd, res->ai_addr, res->ai_addrlen);
        ::freeaddrinfo(res);
        if (rc == 0) {
            set_nodelay(fd);
            return std::make_unique<TcpLink>(fd);
        }
        const int err = errno;
        ::close(fd);
        if (std::chrono::steady_clock::now() >= deadline) {
            errno = err;
            sys_fail(fmt::format("connect {}", endpoint));
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
}

} // namespace n2n::proto
