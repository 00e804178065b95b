#pragma once

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "piecevec/errors.hpp"

namespace piecevec::engine {

namespace detail {

// A dead engine must surface as a ProcessError from write_line, not as a
// process-killing SIGPIPE.
inline void ignore_sigpipe() {
    static std::once_flag once;
    std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

}  // namespace detail

// Child process with line-oriented stdin/stdout pipes. Reads support
// deadlines via poll so a stuck engine raises EngineTimeout upstream
// instead of hanging the pipeline.
class ChildProcess {
  public:
    ChildProcess(const std::string& path, const std::vector<std::string>& args = {}) {
        detail::ignore_sigpipe();
        int to_child[2], from_child[2];
        if (::pipe(to_child) != 0) throw ProcessError("pipe: " + std::string(strerror(errno)));
        if (::pipe(from_child) != 0) {
            ::close(to_child[0]);
            ::close(to_child[1]);
            throw ProcessError("pipe: " + std::string(strerror(errno)));
        }

        pid_ = ::fork();
        if (pid_ < 0) throw ProcessError("fork: " + std::string(strerror(errno)));
        if (pid_ == 0) {
            ::dup2(to_child[0], STDIN_FILENO);
            ::dup2(from_child[1], STDOUT_FILENO);
            ::close(to_child[0]);
            ::close(to_child[1]);
            ::close(from_child[0]);
            ::close(from_child[1]);
            std::vector<char*> argv;
            argv.push_back(const_cast<char*>(path.c_str()));
            for (const std::string& a : args) argv.push_back(const_cast<char*>(a.c_str()));
            argv.push_back(nullptr);
            ::execvp(path.c_str(), argv.data());
            ::_exit(127);  // exec failed; the parent sees EOF on the pipe
        }

        ::close(to_child[0]);
        ::close(from_child[1]);
        in_fd_ = to_child[1];
        out_fd_ = from_child[0];
    }

    ChildProcess(const ChildProcess&) = delete;
    ChildProcess& operator=(const ChildProcess&) = delete;

    ~ChildProcess() { close(); }

    void write_line(const std::string& line) {
        std::string data = line + "\n";
        std::size_t off = 0;
        while (off < data.size()) {
            const ssize_t n = ::write(in_fd_, data.data() + off, data.size() - off);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw ProcessError("write to engine failed: " + std::string(strerror(errno)));
            }
            off += static_cast<std::size_t>(n);
        }
    }

    // Next full line (without the newline), or nullopt when the deadline
    // passes first. Throws ProcessError once the child closes its output.
    std::optional<std::string> read_line(int timeout_ms) {
        const auto deadline =
            std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
        for (;;) {
            const auto nl = buf_.find('\n');
            if (nl != std::string::npos) {
                std::string line = buf_.substr(0, nl);
                buf_.erase(0, nl + 1);
                if (!line.empty() && line.back() == '\r') line.pop_back();
                return line;
            }
            if (eof_) {
                if (!buf_.empty()) {  // final unterminated line
                    std::string line = std::move(buf_);
                    buf_.clear();
                    return line;
                }
                throw ProcessError("engine closed its output");
            }

            const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
                                       deadline - std::chrono::steady_clock::now())
                                       .count();
            if (remaining <= 0) return std::nullopt;
            struct pollfd pfd {
                out_fd_, POLLIN, 0
            };
            const int pr = ::poll(&pfd, 1, static_cast<int>(remaining));
            if (pr < 0) {
                if (errno == EINTR) continue;
                throw ProcessError("poll: " + std::string(strerror(errno)));
            }
            if (pr == 0) return std::nullopt;

            char chunk[4096];
            const ssize_t n = ::read(out_fd_, chunk, sizeof chunk);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw ProcessError("read from engine failed: " + std::string(strerror(errno)));
            }
            if (n == 0)
                eof_ = true;
            else
                buf_.append(chunk, static_cast<std::size_t>(n));
        }
    }

    // Closes stdin (a well-behaved engine exits on EOF), then escalates
    // through SIGTERM to SIGKILL.
    void close() {
        if (pid_ < 0) return;
        if (in_fd_ >= 0) {
            ::close(in_fd_);
            in_fd_ = -1;
        }
        if (out_fd_ >= 0) {
            ::close(out_fd_);
            out_fd_ = -1;
        }
        if (!wait_exit(200)) {
            ::kill(pid_, SIGTERM);
            if (!wait_exit(200)) {
                ::kill(pid_, SIGKILL);
                ::waitpid(pid_, nullptr, 0);
            }
        }
        pid_ = -1;
    }

  private:
    bool wait_exit(int grace_ms) {
        for (int waited = 0; waited <= grace_ms; waited += 10) {
            if (::waitpid(pid_, nullptr, WNOHANG) != 0) return true;
            ::usleep(10 * 1000);
        }
        return false;
    }

    pid_t pid_ = -1;
    int in_fd_ = -1;
    int out_fd_ = -1;
    std::string buf_;
    bool eof_ = false;
};

}  // namespace piecevec::engine
