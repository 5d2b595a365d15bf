#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace extchan {

// Spawn-time policy for an external channel. A channel takes a snapshot of
// these at open time; later edits only affect newly started commands.
struct ChannelAttributes {
    // Signal sent on removal/shutdown. 0 = send nothing. Range 0..64.
    int kill_signal = 9;
    // Signal the whole process group instead of only the initial process.
    bool killall = true;
    // Detach the child into a new session/process group, reparented to init.
    bool daemon = true;
    // Command prefix used to start the command ("/bin/sh -c"), or nullopt to
    // exec the command directly (noshell).
    std::optional<std::string> shell = std::string("/bin/sh -c");
    // File the child's standard error is redirected to (opened for append).
    std::string stderr_target = "/dev/null";

    bool operator==(const ChannelAttributes&) const = default;

    // The fixed attribute set carried by pre-opened channels.
    static ChannelAttributes preopened();

    // Applies a comma-separated "attr=value" list. Attributes not named in
    // the spec keep their current value. Throws ParseError on unknown names,
    // malformed values or kill out of [0,64].
    void merge_spec(std::string_view spec);

    // Canonical "kill=..,killall=..,daemon=..,shell=..,stderr=.." text.
    std::string describe() const;
};

} // namespace extchan
