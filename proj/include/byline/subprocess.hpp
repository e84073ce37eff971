#pragma once

// Child process with line-oriented stdin/stdout. The child's stdin and
// stdout are UNIX stream sockets, so writes to a dead child fail with
// EPIPE instead of raising SIGPIPE in the parent.

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <sys/types.h>

namespace byline {

class Subprocess {
public:
    using Clock = std::chrono::steady_clock;

    enum class ReadStatus { line, timeout, eof };

    // Throws std::system_error when the program cannot be started.
    static Subprocess spawn(const std::vector<std::string>& argv, bool discard_stderr = false);

    Subprocess(Subprocess&& other) noexcept;
    Subprocess& operator=(Subprocess&& other) noexcept;
    Subprocess(const Subprocess&) = delete;
    Subprocess& operator=(const Subprocess&) = delete;
    ~Subprocess();

    pid_t pid() const { return pid_; }

    // Writes all of `data`, draining the child's stdout into the read
    // buffer meanwhile. False when the child stopped reading or the
    // deadline passed.
    bool write(std::string_view data, Clock::time_point deadline);

    // One line without the trailing newline.
    ReadStatus read_line(std::string& line, Clock::time_point deadline);

    void close_stdin();

    // Closes stdin, waits up to `grace` for exit, then terminates. Returns
    // the wait status, or nullopt if it was already collected.
    std::optional<int> finish(std::chrono::milliseconds grace = std::chrono::milliseconds(2000));

private:
    Subprocess() = default;
    bool fill(int timeout_ms);
    void release();

    pid_t pid_ = -1;
    int in_fd_ = -1;   // our end of the child's stdin
    int out_fd_ = -1;  // our end of the child's stdout
    std::string buffer_;
    bool eof_ = false;
    bool reaped_ = false;
};

// Human-readable description of a wait status.
std::string describe_exit(int status);

}  // namespace byline
