#pragma once

// Small shared POSIX helpers for the channel and embedding code.

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace extchan::detail {

// Writes the whole buffer, retrying on EINTR. Returns false on EPIPE/EBADF,
// throws on other errors.
bool write_all(int fd, std::string_view data);

// Waits until fd is readable. Returns false on timeout; nullopt blocks.
bool wait_readable(int fd, std::optional<std::chrono::milliseconds> timeout);

// Reads one newline-terminated line (at most max_len bytes including the
// newline). Returns nullopt on EOF before any byte; throws ReadTimeout when
// the deadline expires and ChannelError when the line overflows max_len.
std::optional<std::string> read_line(int fd, std::chrono::milliseconds timeout,
                                     size_t max_len);

void set_cloexec(int fd, bool on);

void close_quiet(int fd);

} // namespace extchan::detail
