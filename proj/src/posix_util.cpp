#include "posix_util.hpp"

#include "extchan/errors.hpp"

#include <cerrno>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <unistd.h>

namespace extchan::detail {

bool write_all(int fd, std::string_view data) {
    size_t off = 0;
    while (off < data.size()) {
        ssize_t n = ::write(fd, data.data() + off, data.size() - off);
        if (n < 0) {
            if (errno == EINTR) continue;
            if (errno == EPIPE || errno == EBADF) return false;
            throw ChannelError(std::string("write failed: ") + std::strerror(errno));
        }
        off += static_cast<size_t>(n);
    }
    return true;
}

bool wait_readable(int fd, std::optional<std::chrono::milliseconds> timeout) {
    auto deadline = timeout ? std::optional(std::chrono::steady_clock::now() + *timeout)
                            : std::nullopt;
    for (;;) {
        int wait_ms = -1;
        if (deadline) {
            auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                *deadline - std::chrono::steady_clock::now());
            if (left.count() < 0) return false;
            wait_ms = static_cast<int>(left.count());
        }
        struct pollfd pfd{fd, POLLIN, 0};
        int r = ::poll(&pfd, 1, wait_ms);
        if (r < 0) {
            if (errno == EINTR) continue;
            throw ChannelError(std::string("poll failed: ") + std::strerror(errno));
        }
        if (r == 0) return false;
        return true;
    }
}

std::optional<std::string> read_line(int fd, std::chrono::milliseconds timeout,
                                     size_t max_len) {
    std::string line;
    auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (left.count() < 0 || !wait_readable(fd, left))
            throw ReadTimeout("timed out reading a line");
        char c;
        ssize_t n = ::read(fd, &c, 1);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw ChannelError(std::string("read failed: ") + std::strerror(errno));
        }
        if (n == 0) {
            if (line.empty()) return std::nullopt;
            return line; // EOF terminates a final unterminated line
        }
        line.push_back(c);
        if (c == '\n') return line;
        if (line.size() >= max_len)
            throw ChannelError("line exceeds " + std::to_string(max_len) + " bytes");
    }
}

void set_cloexec(int fd, bool on) {
    int flags = ::fcntl(fd, F_GETFD);
    if (flags < 0) return;
    if (on)
        flags |= FD_CLOEXEC;
    else
        flags &= ~FD_CLOEXEC;
    ::fcntl(fd, F_SETFD, flags);
}

void close_quiet(int fd) {
    if (fd >= 0) ::close(fd);
}

} // namespace extchan::detail
