#include "extchan/embed.hpp"

#include "posix_util.hpp"

#include <cerrno>
#include <charconv>
#include <csignal>
#include <cstring>
#include <set>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

namespace extchan {

namespace {

using detail::close_quiet;
using detail::write_all;

constexpr size_t kHandshakeLineCap = 128;

long parse_decimal(std::string_view tok) {
    long value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty())
        throw ParseError("not a decimal integer: '" + std::string(tok) + "'");
    return value;
}

// "<a>,<b>\n" -> (a, b); anything else is a protocol violation.
std::pair<long, long> parse_reply(std::string_view line) {
    if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
    size_t comma = line.find(',');
    if (comma == std::string_view::npos)
        throw HandshakeRejected("handshake reply is not a pair of integers: '" +
                                std::string(line) + "'");
    long a, b;
    try {
        a = parse_decimal(line.substr(0, comma));
        b = parse_decimal(line.substr(comma + 1));
    } catch (const ParseError&) {
        throw HandshakeRejected("handshake reply is not a pair of integers: '" +
                                std::string(line) + "'");
    }
    return {a, b};
}

} // namespace

PreopenedSpec parse_pipe_option(std::string_view arg) {
    std::vector<int> fds;
    size_t pos = 0;
    while (pos <= arg.size()) {
        size_t comma = arg.find(',', pos);
        std::string_view tok = arg.substr(
            pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        pos = comma == std::string_view::npos ? arg.size() + 1 : comma + 1;
        long v = parse_decimal(tok);
        if (v < 3)
            throw ParseError("descriptor " + std::to_string(v) + " below 3 in -pipe option");
        fds.push_back(static_cast<int>(v));
    }
    if (fds.empty() || fds.size() % 2 != 0)
        throw ParseError("-pipe option wants an even, non-empty descriptor list");
    std::set<int> seen(fds.begin(), fds.end());
    if (seen.size() != fds.size())
        throw ParseError("duplicate descriptor in -pipe option");

    PreopenedSpec spec;
    for (size_t i = 0; i < fds.size(); i += 2)
        spec.pairs.emplace_back(fds[i], fds[i + 1]);
    return spec;
}

std::vector<HandshakeResult> activate_preopened(ChannelRegistry& registry,
                                                const PreopenedSpec& spec,
                                                std::chrono::milliseconds timeout) {
    std::vector<HandshakeResult> results;
    pid_t own = ::getpid();
    for (auto [read_fd, write_fd] : spec.pairs) {
        if (!write_all(write_fd, std::to_string(own) + "\n"))
            throw HandshakeRejected("parent closed descriptor " + std::to_string(write_fd));
        std::optional<std::string> line;
        try {
            line = detail::read_line(read_fd, timeout, kHandshakeLineCap);
        } catch (const ReadTimeout&) {
            throw HandshakeTimeout("no handshake reply on descriptor " +
                                   std::to_string(read_fd));
        } catch (const ChannelError& e) {
            throw HandshakeRejected(e.what());
        }
        if (!line)
            throw HandshakeRejected("parent closed descriptor " + std::to_string(read_fd));
        auto [echoed, parent] = parse_reply(*line);
        if (echoed != own)
            throw HandshakeRejected("handshake echoed pid " + std::to_string(echoed) +
                                    ", expected " + std::to_string(own));
        int id = registry.register_preopened(read_fd, write_fd);
        results.push_back({id, own, static_cast<pid_t>(parent)});
    }
    return results;
}

EmbeddedChild spawn_embedded(const std::vector<std::string>& argv, int n_channels,
                             std::chrono::milliseconds timeout) {
    if (argv.empty()) throw SpawnFailure("empty argv");
    if (n_channels < 1) throw SpawnFailure("n_channels must be at least 1");

    struct PipePair {
        int to_child[2];   // parent writes [1], child reads [0]
        int from_child[2]; // child writes [1], parent reads [0]
    };
    std::vector<PipePair> pipes(static_cast<size_t>(n_channels));
    std::string option;
    for (auto& p : pipes) {
        if (::pipe(p.to_child) < 0 || ::pipe(p.from_child) < 0)
            throw SpawnFailure(std::string("pipe creation failed: ") + std::strerror(errno));
        // Parent-side ends must not leak into the child.
        detail::set_cloexec(p.to_child[1], true);
        detail::set_cloexec(p.from_child[0], true);
        if (!option.empty()) option += ",";
        option += std::to_string(p.to_child[0]) + "," + std::to_string(p.from_child[1]);
    }

    int err_pipe[2];
    if (::pipe2(err_pipe, O_CLOEXEC) < 0)
        throw SpawnFailure(std::string("pipe creation failed: ") + std::strerror(errno));

    pid_t pid = ::fork();
    if (pid < 0)
        throw SpawnFailure(std::string("fork failed: ") + std::strerror(errno));
    if (pid == 0) {
        std::vector<std::string> full = argv;
        full.push_back("-pipe");
        full.push_back(option);
        std::vector<char*> cargv;
        for (auto& a : full) cargv.push_back(const_cast<char*>(a.c_str()));
        cargv.push_back(nullptr);
        ::execvp(cargv[0], cargv.data());
        write_all(err_pipe[1], std::string("exec ") + argv[0] + ": " + std::strerror(errno));
        ::_exit(127);
    }

    close_quiet(err_pipe[1]);
    for (auto& p : pipes) {
        close_quiet(p.to_child[0]);
        close_quiet(p.from_child[1]);
    }

    std::string err_text;
    char buf[256];
    for (;;) {
        ssize_t n = ::read(err_pipe[0], buf, sizeof buf);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) break;
        err_text.append(buf, static_cast<size_t>(n));
    }
    close_quiet(err_pipe[0]);

    EmbeddedChild child;
    child.pid_ = pid;
    for (auto& p : pipes)
        child.channels_.push_back({p.from_child[0], p.to_child[1], {}});

    if (!err_text.empty()) {
        child.close_channels();
        child.wait();
        throw SpawnFailure(err_text);
    }

    pid_t own = ::getpid();
    for (auto& ch : child.channels_) {
        std::optional<std::string> line;
        try {
            line = detail::read_line(ch.read_fd, timeout, kHandshakeLineCap);
        } catch (const ReadTimeout&) {
            throw HandshakeTimeout("child sent no pid line");
        }
        if (!line) throw HandshakeTimeout("child closed the channel before the handshake");
        std::string text = *line;
        if (!text.empty() && text.back() == '\n') text.pop_back();
        long announced;
        try {
            announced = parse_decimal(text);
        } catch (const ParseError&) {
            throw PidMismatch("child announced '" + text + "' instead of a pid");
        }
        if (announced != pid)
            throw PidMismatch("child announced pid " + std::to_string(announced) +
                              ", spawned pid is " + std::to_string(pid));
        if (!write_all(ch.write_fd,
                       std::to_string(pid) + "," + std::to_string(own) + "\n"))
            throw BrokenChannel("child closed its handshake input");
    }
    return child;
}

EmbeddedChild::EmbeddedChild(EmbeddedChild&& other) noexcept
    : pid_(other.pid_), waited_(other.waited_), channels_(std::move(other.channels_)) {
    other.pid_ = -1;
    other.waited_ = true;
    other.channels_.clear();
}

EmbeddedChild& EmbeddedChild::operator=(EmbeddedChild&& other) noexcept {
    if (this != &other) {
        close_channels();
        if (!waited_ && pid_ > 0) {
            ::kill(pid_, SIGKILL);
            int st = 0;
            ::waitpid(pid_, &st, 0);
        }
        pid_ = other.pid_;
        waited_ = other.waited_;
        channels_ = std::move(other.channels_);
        other.pid_ = -1;
        other.waited_ = true;
        other.channels_.clear();
    }
    return *this;
}

EmbeddedChild::~EmbeddedChild() {
    close_channels();
    if (!waited_ && pid_ > 0) {
        int st = 0;
        if (::waitpid(pid_, &st, WNOHANG) == 0) {
            ::kill(pid_, SIGKILL);
            ::waitpid(pid_, &st, 0);
        }
    }
}

void EmbeddedChild::write_to(size_t channel, std::string_view bytes) {
    if (channel >= channels_.size()) throw ChannelError("no such embedded channel");
    if (!write_all(channels_[channel].write_fd, bytes))
        throw BrokenChannel("embedded child closed its input");
}

std::string EmbeddedChild::read_until_prompt(size_t channel, std::string_view prompt,
                                             std::chrono::milliseconds timeout) {
    if (channel >= channels_.size()) throw ChannelError("no such embedded channel");
    Duplex& ch = channels_[channel];
    std::string acc;
    auto deadline = std::chrono::steady_clock::now() + timeout;

    auto matches_prompt = [&](std::string_view line) {
        if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        return line == prompt;
    };

    for (;;) {
        size_t nl;
        while ((nl = ch.buffer.find('\n')) != std::string::npos) {
            std::string line = ch.buffer.substr(0, nl + 1);
            ch.buffer.erase(0, nl + 1);
            if (matches_prompt(line)) {
                if (!acc.empty() && acc.back() == '\n') acc.pop_back();
                return acc;
            }
            acc += line;
        }
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (left.count() < 0 || !detail::wait_readable(ch.read_fd, left))
            throw ReadTimeout("embedded channel: no prompt within the timeout");
        char buf[4096];
        ssize_t n = ::read(ch.read_fd, buf, sizeof buf);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw ChannelError(std::string("read failed: ") + std::strerror(errno));
        }
        if (n == 0)
            throw EndOfStreamBeforePrompt("embedded channel: end of stream before prompt",
                                          acc + ch.buffer);
        ch.buffer.append(buf, static_cast<size_t>(n));
    }
}

void EmbeddedChild::close_channels() {
    for (auto& ch : channels_) {
        close_quiet(ch.read_fd);
        close_quiet(ch.write_fd);
        ch.read_fd = ch.write_fd = -1;
    }
}

int EmbeddedChild::wait() {
    if (waited_) return 0;
    int st = 0;
    while (::waitpid(pid_, &st, 0) < 0 && errno == EINTR) {}
    waited_ = true;
    return st;
}

} // namespace extchan
