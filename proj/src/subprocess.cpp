#include "byline/subprocess.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <system_error>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace byline {

namespace {

int ms_until(Subprocess::Clock::time_point deadline) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Subprocess::Clock::now());
    if (left.count() <= 0) return 0;
    return static_cast<int>(std::min<long long>(left.count(), 1'000'000));
}

void close_fd(int& fd) {
    if (fd >= 0) ::close(fd);
    fd = -1;
}

}  // namespace

Subprocess Subprocess::spawn(const std::vector<std::string>& argv, bool discard_stderr) {
    if (argv.empty()) throw std::invalid_argument("Subprocess::spawn: empty command");
    int in_pair[2];
    int out_pair[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, in_pair) != 0)
        throw std::system_error(errno, std::generic_category(), "socketpair");
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, out_pair) != 0) {
        const int err = errno;
        ::close(in_pair[0]);
        ::close(in_pair[1]);
        throw std::system_error(err, std::generic_category(), "socketpair");
    }

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_pair[1], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out_pair[1], STDOUT_FILENO);
    if (discard_stderr) posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, "/dev/null", O_WRONLY, 0);

    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);

    pid_t pid = -1;
    const int rc = ::posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(in_pair[1]);
    ::close(out_pair[1]);
    if (rc != 0) {
        ::close(in_pair[0]);
        ::close(out_pair[0]);
        throw std::system_error(rc, std::generic_category(), "cannot start \"" + argv[0] + "\"");
    }
    Subprocess p;
    p.pid_ = pid;
    p.in_fd_ = in_pair[0];
    p.out_fd_ = out_pair[0];
    return p;
}

Subprocess::Subprocess(Subprocess&& other) noexcept { *this = std::move(other); }

Subprocess& Subprocess::operator=(Subprocess&& other) noexcept {
    if (this != &other) {
        release();
        pid_ = std::exchange(other.pid_, -1);
        in_fd_ = std::exchange(other.in_fd_, -1);
        out_fd_ = std::exchange(other.out_fd_, -1);
        buffer_ = std::move(other.buffer_);
        eof_ = other.eof_;
        reaped_ = std::exchange(other.reaped_, true);
    }
    return *this;
}

Subprocess::~Subprocess() { release(); }

void Subprocess::release() {
    if (pid_ > 0 && !reaped_) finish(std::chrono::milliseconds(500));
    close_fd(in_fd_);
    close_fd(out_fd_);
    pid_ = -1;
}

bool Subprocess::fill(int timeout_ms) {
    if (eof_ || out_fd_ < 0) return false;
    pollfd pfd{out_fd_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, timeout_ms);
    if (rc < 0) return errno == EINTR;
    if (rc == 0) return false;
    char buf[65536];
    const ssize_t n = ::recv(out_fd_, buf, sizeof buf, 0);
    if (n > 0) {
        buffer_.append(buf, static_cast<std::size_t>(n));
        return true;
    }
    if (n < 0 && (errno == EINTR || errno == EAGAIN)) return true;
    eof_ = true;
    return false;
}

bool Subprocess::write(std::string_view data, Clock::time_point deadline) {
    if (in_fd_ < 0) return false;
    while (!data.empty()) {
        pollfd fds[2] = {{in_fd_, POLLOUT, 0}, {out_fd_, POLLIN, 0}};
        const nfds_t nfds = eof_ ? 1 : 2;
        const int rc = ::poll(fds, nfds, ms_until(deadline));
        if (rc < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        if (rc == 0) return false;
        if (nfds == 2 && (fds[1].revents & (POLLIN | POLLHUP))) fill(0);
        if (fds[0].revents & (POLLERR | POLLHUP)) return false;
        if (fds[0].revents & POLLOUT) {
            const ssize_t n = ::send(in_fd_, data.data(), data.size(), MSG_NOSIGNAL | MSG_DONTWAIT);
            if (n < 0) {
                if (errno == EAGAIN || errno == EINTR) continue;
                return false;
            }
            data.remove_prefix(static_cast<std::size_t>(n));
        }
    }
    return true;
}

Subprocess::ReadStatus Subprocess::read_line(std::string& line, Clock::time_point deadline) {
    while (true) {
        if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
            line.assign(buffer_, 0, nl);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            buffer_.erase(0, nl + 1);
            return ReadStatus::line;
        }
        if (eof_) {
            if (!buffer_.empty()) {
                line = std::move(buffer_);
                buffer_.clear();
                return ReadStatus::line;
            }
            return ReadStatus::eof;
        }
        const int wait = ms_until(deadline);
        if (!fill(wait) && !eof_ && Clock::now() >= deadline) return ReadStatus::timeout;
    }
}

void Subprocess::close_stdin() {
    if (in_fd_ >= 0) ::shutdown(in_fd_, SHUT_WR);
    close_fd(in_fd_);
}

std::optional<int> Subprocess::finish(std::chrono::milliseconds grace) {
    if (pid_ <= 0 || reaped_) return std::nullopt;
    close_stdin();
    int status = 0;
    const auto deadline = Clock::now() + grace;
    while (true) {
        const pid_t r = ::waitpid(pid_, &status, WNOHANG);
        if (r == pid_) break;
        if (r < 0 && errno != EINTR) {
            reaped_ = true;
            return std::nullopt;
        }
        if (Clock::now() >= deadline) {
            ::kill(pid_, SIGTERM);
            const auto hard = Clock::now() + std::chrono::milliseconds(500);
            while (::waitpid(pid_, &status, WNOHANG) == 0) {
                if (Clock::now() >= hard) {
                    ::kill(pid_, SIGKILL);
                    ::waitpid(pid_, &status, 0);
                    break;
                }
                std::this_thread::sleep_for(std::chrono::milliseconds(5));
            }
            break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    reaped_ = true;
    return status;
}

std::string describe_exit(int status) {
    if (WIFEXITED(status)) return "exit status " + std::to_string(WEXITSTATUS(status));
    if (WIFSIGNALED(status)) return std::string("killed by signal ") + ::strsignal(WTERMSIG(status));
    return "unknown status";
}

}  // namespace byline
