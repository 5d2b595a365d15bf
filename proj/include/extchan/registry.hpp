#pragma once

#include "extchan/attributes.hpp"
#include "extchan/channel.hpp"
#include "extchan/errors.hpp"

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace extchan {

// Numbered table of external channels with a "current" cursor. Confined to
// one control flow; reads and writes block the caller.
class ChannelRegistry {
public:
    ChannelRegistry();
    ~ChannelRegistry();

    ChannelRegistry(const ChannelRegistry&) = delete;
    ChannelRegistry& operator=(const ChannelRegistry&) = delete;

    // Spawns `command` per the current default attributes, registers the new
    // channel, makes it current and returns its descriptor.
    int open_channel(const std::string& command);

    // Writes exactly `payload` to the current channel, no trailing newline.
    void send(std::string_view payload);

    // Reads whole lines from the current channel until a line equal to the
    // channel's prompt; returns the prior lines joined with newlines. With
    // maxlength only that many bytes are returned, but input is still
    // consumed through the prompt line.
    std::string read_until_prompt(std::optional<size_t> maxlength = std::nullopt);

    // Sets the default prompt and, when a current channel exists, its prompt.
    void set_prompt(std::string_view newprompt);

    // Makes channel n the current one. n must be registered and running.
    void set_current(int n);

    // Terminates a channel: current when n is absent, all when n == 0.
    void remove_channel(std::optional<int> n = std::nullopt);

    // Parses an "attr=value,..." list into the default attributes. Running
    // channels are unaffected.
    void set_default_attrs(std::string_view spec);

    // Best-effort termination of every running channel. Also runs from the
    // destructor.
    void shutdown_all() noexcept;

    // Registers an already-open duplex pair as a pre-opened channel and
    // returns its descriptor. Does not change the current channel.
    int register_preopened(int read_fd, int write_fd);

    const ExternalChannel* find(int id) const;
    std::optional<int> current() const { return current_; }
    const ChannelAttributes& default_attrs() const { return default_attrs_; }
    ChannelAttributes& default_attrs() { return default_attrs_; }
    const std::string& default_prompt() const { return default_prompt_; }
    std::vector<int> running_ids() const;

    // Optional deadline applied to each blocking read; nullopt blocks forever.
    void set_read_deadline(std::optional<std::chrono::milliseconds> d) { read_deadline_ = d; }
    std::optional<std::chrono::milliseconds> read_deadline() const { return read_deadline_; }

private:
    ExternalChannel& current_channel();
    void terminate(ExternalChannel& ch);
    void mark_broken(ExternalChannel& ch);

    std::map<int, ExternalChannel> channels_;
    std::optional<int> current_;
    ChannelAttributes default_attrs_;
    std::string default_prompt_;
    int next_id_ = 1;
    std::optional<std::chrono::milliseconds> read_deadline_;
};

// Resolves an executable name the way a shell would: used for noshell spawns.
// Names containing '/' are returned as-is; otherwise PATH is searched, with
// the fallback ":/bin:/usr/bin" when PATH is unset. An empty path component
// means the current directory. Throws SpawnFailure when nothing matches.
std::string resolve_executable(const std::string& name);

} // namespace extchan
