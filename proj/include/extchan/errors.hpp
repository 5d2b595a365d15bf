#pragma once

#include <stdexcept>
#include <string>

namespace extchan {

// Base class for everything thrown by the channel layer.
class ChannelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SpawnFailure : public ChannelError {
public:
    using ChannelError::ChannelError;
};

class NoCurrentChannel : public ChannelError {
public:
    NoCurrentChannel() : ChannelError("no current external channel") {}
};

class BrokenChannel : public ChannelError {
public:
    using ChannelError::ChannelError;
};

class UnknownDescriptor : public ChannelError {
public:
    explicit UnknownDescriptor(int id)
        : ChannelError("descriptor " + std::to_string(id) +
                       " is not a running external channel") {}
};

// The child closed its output (or exited) before emitting the prompt line.
// Carries whatever text was read up to that point.
class EndOfStreamBeforePrompt : public ChannelError {
public:
    EndOfStreamBeforePrompt(const std::string& msg, std::string partial_text)
        : ChannelError(msg), partial(std::move(partial_text)) {}

    std::string partial;
};

class ReadTimeout : public ChannelError {
public:
    using ChannelError::ChannelError;
};

class ParseError : public ChannelError {
public:
    using ChannelError::ChannelError;
};

class HandshakeTimeout : public ChannelError {
public:
    using ChannelError::ChannelError;
};

class HandshakeRejected : public ChannelError {
public:
    using ChannelError::ChannelError;
};

class PidMismatch : public ChannelError {
public:
    using ChannelError::ChannelError;
};

} // namespace extchan
