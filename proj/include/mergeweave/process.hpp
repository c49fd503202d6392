#pragma once

// POSIX child processes and line-oriented byte channels.

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

extern char** environ;

namespace mergeweave {

class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TimeoutError : public TransportError {
public:
    using TransportError::TransportError;
};

/// Owning file descriptor.
class Fd {
public:
    Fd() = default;
    explicit Fd(int fd) : fd_(fd) {}
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    Fd(Fd&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
    Fd& operator=(Fd&& other) noexcept {
        if (this != &other) {
            reset();
            fd_ = std::exchange(other.fd_, -1);
        }
        return *this;
    }
    ~Fd() { reset(); }

    int get() const { return fd_; }
    explicit operator bool() const { return fd_ >= 0; }
    void reset() {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }

private:
    int fd_ = -1;
};

namespace detail {

inline std::pair<Fd, Fd> make_pipe() {
    int fds[2];
    if (::pipe2(fds, O_CLOEXEC) != 0) throw std::system_error(errno, std::generic_category(), "pipe");
    return {Fd(fds[0]), Fd(fds[1])};
}

inline void set_nonblocking(int fd) {
    int flags = ::fcntl(fd, F_GETFL, 0);
    ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

}  // namespace detail

struct ProcessResult {
    int exit_code = -1;    // -1 when killed by a signal
    int term_signal = 0;
    std::string out;
    std::string err;

    bool ok() const { return exit_code == 0; }
};

/// A spawned child with pipes on stdin/stdout (stderr optionally captured).
class ChildProcess {
public:
    ChildProcess() = default;

    explicit ChildProcess(const std::vector<std::string>& argv, bool capture_stderr = false) {
        if (argv.empty()) throw std::invalid_argument("empty argv");
        auto [in_r, in_w] = detail::make_pipe();
        auto [out_r, out_w] = detail::make_pipe();
        Fd err_r, err_w;
        if (capture_stderr) std::tie(err_r, err_w) = detail::make_pipe();

        posix_spawn_file_actions_t actions;
        posix_spawn_file_actions_init(&actions);
        posix_spawn_file_actions_adddup2(&actions, in_r.get(), 0);
        posix_spawn_file_actions_adddup2(&actions, out_w.get(), 1);
        if (capture_stderr) posix_spawn_file_actions_adddup2(&actions, err_w.get(), 2);

        std::vector<char*> args;
        for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        int rc = ::posix_spawnp(&pid_, args[0], &actions, nullptr, args.data(), environ);
        posix_spawn_file_actions_destroy(&actions);
        if (rc != 0) throw std::system_error(rc, std::generic_category(), "spawn " + argv[0]);

        stdin_ = std::move(in_w);
        stdout_ = std::move(out_r);
        stderr_ = std::move(err_r);
    }

    ChildProcess(const ChildProcess&) = delete;
    ChildProcess& operator=(const ChildProcess&) = delete;
    ChildProcess(ChildProcess&& o) noexcept
        : pid_(std::exchange(o.pid_, -1)),
          stdin_(std::move(o.stdin_)),
          stdout_(std::move(o.stdout_)),
          stderr_(std::move(o.stderr_)) {}
    ChildProcess& operator=(ChildProcess&& o) noexcept {
        if (this != &o) {
            terminate();
            pid_ = std::exchange(o.pid_, -1);
            stdin_ = std::move(o.stdin_);
            stdout_ = std::move(o.stdout_);
            stderr_ = std::move(o.stderr_);
        }
        return *this;
    }
    ~ChildProcess() { terminate(); }

    int stdin_fd() const { return stdin_.get(); }
    int stdout_fd() const { return stdout_.get(); }
    int stderr_fd() const { return stderr_.get(); }
    void close_stdin() { stdin_.reset(); }
    pid_t pid() const { return pid_; }

    /// Waits for exit; returns (exit code or -1, signal).
    std::pair<int, int> wait() {
        if (pid_ < 0) return {-1, 0};
        int status = 0;
        while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
        }
        pid_ = -1;
        if (WIFEXITED(status)) return {WEXITSTATUS(status), 0};
        if (WIFSIGNALED(status)) return {-1, WTERMSIG(status)};
        return {-1, 0};
    }

    void terminate() {
        if (pid_ < 0) return;
        stdin_.reset();
        ::kill(pid_, SIGTERM);
        wait();
    }

private:
    pid_t pid_ = -1;
    Fd stdin_, stdout_, stderr_;
};

/// Runs a command to completion, feeding `input` on stdin and collecting
/// stdout and stderr.
inline ProcessResult run_process(const std::vector<std::string>& argv, std::string_view input = {}) {
    ChildProcess child(argv, true);
    ProcessResult result;
    detail::set_nonblocking(child.stdin_fd());
    std::size_t written = 0;
    if (input.empty()) child.close_stdin();
    bool out_open = true, err_open = true;
    char buf[65536];
    while (out_open || err_open || child.stdin_fd() >= 0) {
        pollfd fds[3];
        nfds_t n = 0;
        int in_slot = -1, out_slot = -1, err_slot = -1;
        if (child.stdin_fd() >= 0) {
            in_slot = static_cast<int>(n);
            fds[n++] = {child.stdin_fd(), POLLOUT, 0};
        }
        if (out_open) {
            out_slot = static_cast<int>(n);
            fds[n++] = {child.stdout_fd(), POLLIN, 0};
        }
        if (err_open) {
            err_slot = static_cast<int>(n);
            fds[n++] = {child.stderr_fd(), POLLIN, 0};
        }
        if (::poll(fds, n, -1) < 0) {
            if (errno == EINTR) continue;
            throw std::system_error(errno, std::generic_category(), "poll");
        }
        if (in_slot >= 0 && (fds[in_slot].revents & (POLLOUT | POLLERR | POLLHUP))) {
            auto w = ::write(child.stdin_fd(), input.data() + written, input.size() - written);
            if (w > 0) written += static_cast<std::size_t>(w);
            if (w < 0 && errno != EAGAIN && errno != EINTR) written = input.size();  // reader went away
            if (written >= input.size()) child.close_stdin();
        }
        auto drain = [&](int slot, int fd, std::string& sink, bool& open) {
            if (slot < 0 || !(fds[slot].revents & (POLLIN | POLLHUP | POLLERR))) return;
            auto r = ::read(fd, buf, sizeof buf);
            if (r > 0)
                sink.append(buf, static_cast<std::size_t>(r));
            else if (r == 0 || (errno != EAGAIN && errno != EINTR))
                open = false;
        };
        drain(out_slot, child.stdout_fd(), result.out, out_open);
        drain(err_slot, child.stderr_fd(), result.err, err_open);
    }
    auto [code, sig] = child.wait();
    result.exit_code = code;
    result.term_signal = sig;
    return result;
}

/// Newline-delimited messages over a pair of descriptors (pipes or one socket).
/// Not thread-safe; callers serialize access.
class LineChannel {
public:
    LineChannel(int read_fd, int write_fd) : read_fd_(read_fd), write_fd_(write_fd) {}

    /// Queues a line (a '\n' is appended).
    void queue(std::string_view line) {
        outbox_.append(line);
        outbox_.push_back('\n');
    }

    bool has_pending_output() const { return sent_ < outbox_.size(); }

    /// Flushes queued output and reads until one complete line is available
    /// or `timeout` passes without any progress. Returns nullopt on EOF.
    std::optional<std::string> pump_until_line(std::chrono::milliseconds timeout) {
        auto deadline = std::chrono::steady_clock::now() + timeout;
        for (;;) {
            if (auto line = take_line()) return line;
            if (eof_) return std::nullopt;
            auto now = std::chrono::steady_clock::now();
            if (now >= deadline) throw TimeoutError("no reply within timeout");
            pollfd fds[2];
            nfds_t n = 0;
            fds[n++] = {read_fd_, POLLIN, 0};
            bool want_write = has_pending_output();
            if (want_write) fds[n++] = {write_fd_, POLLOUT, 0};
            auto wait_ms = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
            int rc = ::poll(fds, n, static_cast<int>(wait_ms));
            if (rc < 0) {
                if (errno == EINTR) continue;
                throw TransportError(std::string("poll: ") + std::strerror(errno));
            }
            bool progressed = false;
            if (want_write && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
                auto w = send_or_write(write_fd_, outbox_.data() + sent_, outbox_.size() - sent_);
                if (w < 0 && errno != EAGAIN && errno != EINTR)
                    throw TransportError(std::string("write: ") + std::strerror(errno));
                if (w > 0) {
                    sent_ += static_cast<std::size_t>(w);
                    progressed = true;
                    if (sent_ == outbox_.size()) {
                        outbox_.clear();
                        sent_ = 0;
                    }
                }
            }
            if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
                char buf[65536];
                auto r = ::read(read_fd_, buf, sizeof buf);
                if (r > 0) {
                    inbox_.append(buf, static_cast<std::size_t>(r));
                    progressed = true;
                } else if (r == 0) {
                    eof_ = true;
                } else if (errno != EAGAIN && errno != EINTR) {
                    throw TransportError(std::string("read: ") + std::strerror(errno));
                }
            }
            if (progressed) deadline = std::chrono::steady_clock::now() + timeout;
        }
    }

private:
    static ssize_t send_or_write(int fd, const char* data, std::size_t len) {
        ssize_t w = ::send(fd, data, len, MSG_NOSIGNAL);
        if (w < 0 && errno == ENOTSOCK) {
            // pipes: SIGPIPE is ignored process-wide by the client
            w = ::write(fd, data, len);
        }
        return w;
    }

    std::optional<std::string> take_line() {
        auto nl = inbox_.find('\n', scan_from_);
        if (nl == std::string::npos) {
            scan_from_ = inbox_.size();
            return std::nullopt;
        }
        std::string line = inbox_.substr(0, nl);
        inbox_.erase(0, nl + 1);
        scan_from_ = 0;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    }

    int read_fd_;
    int write_fd_;
    std::string outbox_;
    std::size_t sent_ = 0;
    std::string inbox_;
    std::size_t scan_from_ = 0;
    bool eof_ = false;
};

/// Connects a TCP stream socket to host:port.
inline Fd tcp_connect(const std::string& host, const std::string& port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &res); rc != 0)
        throw TransportError("resolve " + host + ": " + ::gai_strerror(rc));
    Fd fd;
    for (auto* p = res; p; p = p->ai_next) {
        Fd s(::socket(p->ai_family, p->ai_socktype | SOCK_CLOEXEC, p->ai_protocol));
        if (!s) continue;
        if (::connect(s.get(), p->ai_addr, p->ai_addrlen) == 0) {
            fd = std::move(s);
            break;
        }
    }
    ::freeaddrinfo(res);
    if (!fd) throw TransportError("connect " + host + ":" + port + " failed");
    return fd;
}

/// Ignores SIGPIPE so a dead peer surfaces as EPIPE instead of killing us.
inline void ignore_sigpipe() { ::signal(SIGPIPE, SIG_IGN); }

}  // namespace mergeweave
