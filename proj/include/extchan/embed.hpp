#pragma once

#include "extchan/registry.hpp"

#include <chrono>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <sys/types.h>

namespace extchan {

// Pre-opened channel descriptors parsed from a "-pipe" option argument.
struct PreopenedSpec {
    std::vector<std::pair<int, int>> pairs; // (read_fd, write_fd), left to right
};

// Parses "r1,w1[,r2,w2...]" in ASCII decimal. Throws ParseError on an odd
// count, non-numeric tokens, duplicates, or descriptors below 3.
PreopenedSpec parse_pipe_option(std::string_view arg);

struct HandshakeResult {
    int channel_id;
    pid_t child_pid;  // our own pid, as echoed in the reply
    pid_t parent_pid; // second integer of the reply; recorded, not verified
};

// Child side of the pre-opened protocol. For each pair, left to right: sends
// "<own-pid>\n" on the write fd, waits for "<pid>,<parentpid>\n" on the read
// fd, and registers the pair as a pre-opened channel. Any failure aborts the
// whole activation (HandshakeTimeout / HandshakeRejected).
std::vector<HandshakeResult> activate_preopened(
    ChannelRegistry& registry, const PreopenedSpec& spec,
    std::chrono::milliseconds timeout = std::chrono::seconds(30));

// Parent-side handle for a child spawned with pre-opened channels.
class EmbeddedChild {
public:
    EmbeddedChild(EmbeddedChild&&) noexcept;
    EmbeddedChild& operator=(EmbeddedChild&&) noexcept;
    EmbeddedChild(const EmbeddedChild&) = delete;
    EmbeddedChild& operator=(const EmbeddedChild&) = delete;
    ~EmbeddedChild();

    pid_t pid() const { return pid_; }
    size_t channel_count() const { return channels_.size(); }

    void write_to(size_t channel, std::string_view bytes);

    // Prompt-framed read on one channel, same framing rules as the registry.
    std::string read_until_prompt(size_t channel, std::string_view prompt,
                                  std::chrono::milliseconds timeout);

    // Closes our ends of every channel (the child sees end-of-stream).
    void close_channels();

    // Waits for the child; returns its wait status.
    int wait();

private:
    friend EmbeddedChild spawn_embedded(const std::vector<std::string>&, int,
                                        std::chrono::milliseconds);
    EmbeddedChild() = default;

    struct Duplex {
        int read_fd = -1;
        int write_fd = -1;
        std::string buffer;
    };
    pid_t pid_ = -1;
    bool waited_ = false;
    std::vector<Duplex> channels_;
};

// Spawns `argv` with n_channels pre-opened duplex channels, appending the
// "-pipe" option, and completes the PID handshake on each channel.
EmbeddedChild spawn_embedded(const std::vector<std::string>& argv, int n_channels,
                             std::chrono::milliseconds timeout = std::chrono::seconds(30));

} // namespace extchan
