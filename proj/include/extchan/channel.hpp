#pragma once

#include "extchan/attributes.hpp"

#include <string>

#include <sys/types.h>

namespace extchan {

enum class ChannelState { Running, Terminated };

// One live external command: a duplex byte channel plus the bookkeeping
// needed to address and terminate it. Owned by a ChannelRegistry.
struct ExternalChannel {
    int id = 0;
    std::string command;
    pid_t child_pid = -1;  // directly spawned process; -1 for pre-opened channels
    pid_t group_id = -1;   // process group targeted by group kills
    int to_child = -1;     // fd connected to the child's standard input
    int from_child = -1;   // fd connected to the child's standard output
    std::string prompt;
    ChannelAttributes attrs;
    ChannelState state = ChannelState::Running;
    bool preopened = false;

    // Bytes read from from_child but not yet consumed by framing.
    std::string read_buffer;
};

} // namespace extchan
