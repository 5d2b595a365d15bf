#include "extchan/registry.hpp"

#include "posix_util.hpp"

#include <cerrno>
#include <csignal>
#include <cstdlib>
#include <cstring>

#include <fcntl.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

namespace extchan {

namespace {

using detail::close_quiet;
using detail::write_all;

std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> words;
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
        size_t start = i;
        while (i < text.size() && text[i] != ' ' && text[i] != '\t') ++i;
        if (i > start) words.emplace_back(text.substr(start, i - start));
    }
    return words;
}

bool is_executable_file(const std::string& path) {
    struct stat st{};
    return ::stat(path.c_str(), &st) == 0 && S_ISREG(st.st_mode) &&
           ::access(path.c_str(), X_OK) == 0;
}

struct SpawnResult {
    pid_t child_pid;
    pid_t group_id;
    int to_child;
    int from_child;
};

[[noreturn]] void child_fail(int err_fd, const std::string& msg) {
    write_all(err_fd, msg);
    ::_exit(127);
}

// Everything between fork and exec. Runs in the (grand)child.
[[noreturn]] void exec_child(int stdin_fd, int stdout_fd,
                             const ChannelAttributes& attrs,
                             const std::vector<std::string>& argv,
                             const std::string& exe_path, int err_fd) {
    if (::dup2(stdin_fd, 0) < 0 || ::dup2(stdout_fd, 1) < 0)
        child_fail(err_fd, "dup2 failed");
    int efd = ::open(attrs.stderr_target.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0666);
    if (efd < 0)
        child_fail(err_fd, "cannot open " + attrs.stderr_target + ": " + std::strerror(errno));
    if (efd != 2) {
        ::dup2(efd, 2);
        ::close(efd);
    }
    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    ::execv(exe_path.c_str(), cargv.data());
    child_fail(err_fd, "exec " + exe_path + ": " + std::strerror(errno));
}

SpawnResult spawn_command(const std::string& command, const ChannelAttributes& attrs) {
    std::vector<std::string> argv;
    std::string exe_path;
    if (attrs.shell) {
        argv = split_words(*attrs.shell);
        if (argv.empty()) throw SpawnFailure("empty shell prefix");
        argv.push_back(command);
        exe_path = argv[0].find('/') != std::string::npos ? argv[0]
                                                          : resolve_executable(argv[0]);
    } else {
        argv = split_words(command);
        if (argv.empty()) throw SpawnFailure("empty command");
        exe_path = resolve_executable(argv[0]);
    }

    int in_pipe[2], out_pipe[2], err_pipe[2];
    int status_pipe[2] = {-1, -1};
    if (::pipe2(in_pipe, O_CLOEXEC) < 0 || ::pipe2(out_pipe, O_CLOEXEC) < 0 ||
        ::pipe2(err_pipe, O_CLOEXEC) < 0)
        throw SpawnFailure(std::string("pipe creation failed: ") + std::strerror(errno));
    if (attrs.daemon && ::pipe2(status_pipe, O_CLOEXEC) < 0)
        throw SpawnFailure(std::string("pipe creation failed: ") + std::strerror(errno));

    pid_t pid = ::fork();
    if (pid < 0)
        throw SpawnFailure(std::string("fork failed: ") + std::strerror(errno));

    if (pid == 0) {
        if (attrs.daemon) {
            ::setsid(); // new session, no controlling terminal
            pid_t inner = ::fork();
            if (inner < 0)
                child_fail(err_pipe[1], std::string("fork failed: ") + std::strerror(errno));
            if (inner > 0) {
                // Intermediate: report the grandchild pid and vanish so the
                // grandchild is reparented to init.
                write_all(status_pipe[1], std::to_string(inner) + "\n");
                ::_exit(0);
            }
            ::setpgid(0, 0); // grandchild leads its own group in the new session
        } else if (!attrs.shell) {
            ::setpgid(0, 0);
        }
        exec_child(in_pipe[0], out_pipe[1], attrs, argv, exe_path, err_pipe[1]);
    }

    close_quiet(in_pipe[0]);
    close_quiet(out_pipe[1]);
    close_quiet(err_pipe[1]);

    SpawnResult res{};
    res.to_child = in_pipe[1];
    res.from_child = out_pipe[0];

    if (attrs.daemon) {
        close_quiet(status_pipe[1]);
        int wstatus = 0;
        while (::waitpid(pid, &wstatus, 0) < 0 && errno == EINTR) {}
        std::string pid_text;
        char buf[64];
        for (;;) {
            ssize_t n = ::read(status_pipe[0], buf, sizeof buf);
            if (n < 0 && errno == EINTR) continue;
            if (n <= 0) break;
            pid_text.append(buf, static_cast<size_t>(n));
        }
        close_quiet(status_pipe[0]);
        res.child_pid = pid_text.empty() ? -1 : static_cast<pid_t>(std::atol(pid_text.c_str()));
        res.group_id = res.child_pid;
    } else {
        res.child_pid = pid;
        res.group_id = attrs.shell ? ::getpgid(0) : pid;
    }

    // Blocks until the (grand)child execs or reports a failure.
    std::string err_text;
    char buf[256];
    for (;;) {
        ssize_t n = ::read(err_pipe[0], buf, sizeof buf);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) break;
        err_text.append(buf, static_cast<size_t>(n));
    }
    close_quiet(err_pipe[0]);

    if (!err_text.empty() || res.child_pid < 0) {
        close_quiet(res.to_child);
        close_quiet(res.from_child);
        if (!attrs.daemon) {
            int st = 0;
            while (::waitpid(pid, &st, 0) < 0 && errno == EINTR) {}
        }
        throw SpawnFailure(err_text.empty() ? "daemon spawn failed" : err_text);
    }
    return res;
}

} // namespace

std::string resolve_executable(const std::string& name) {
    if (name.find('/') != std::string::npos) {
        if (!is_executable_file(name))
            throw SpawnFailure("not an executable file: " + name);
        return name;
    }
    const char* env_path = std::getenv("PATH");
    std::string path = env_path ? env_path : ":/bin:/usr/bin";
    size_t pos = 0;
    while (pos <= path.size()) {
        size_t colon = path.find(':', pos);
        std::string dir = path.substr(
            pos, colon == std::string::npos ? std::string::npos : colon - pos);
        pos = colon == std::string::npos ? path.size() + 1 : colon + 1;
        if (dir.empty()) dir = "."; // empty component = current directory
        std::string candidate = dir + "/" + name;
        if (is_executable_file(candidate)) return candidate;
    }
    throw SpawnFailure("executable not found: " + name);
}

ChannelRegistry::ChannelRegistry() {
    ::signal(SIGPIPE, SIG_IGN); // broken pipes surface as write errors
}

ChannelRegistry::~ChannelRegistry() {
    shutdown_all();
}

int ChannelRegistry::open_channel(const std::string& command) {
    if (command.empty()) throw SpawnFailure("empty command");
    SpawnResult sp = spawn_command(command, default_attrs_);
    int id = next_id_++;
    ExternalChannel ch;
    ch.id = id;
    ch.command = command;
    ch.child_pid = sp.child_pid;
    ch.group_id = sp.group_id;
    ch.to_child = sp.to_child;
    ch.from_child = sp.from_child;
    ch.prompt = default_prompt_;
    ch.attrs = default_attrs_;
    channels_.emplace(id, std::move(ch));
    current_ = id;
    return id;
}

int ChannelRegistry::register_preopened(int read_fd, int write_fd) {
    detail::set_cloexec(read_fd, true);
    detail::set_cloexec(write_fd, true);
    int id = next_id_++;
    ExternalChannel ch;
    ch.id = id;
    ch.command = "<preopened>";
    ch.to_child = write_fd;
    ch.from_child = read_fd;
    ch.prompt = default_prompt_;
    ch.attrs = ChannelAttributes::preopened();
    ch.preopened = true;
    channels_.emplace(id, std::move(ch));
    return id;
}

ExternalChannel& ChannelRegistry::current_channel() {
    if (!current_) throw NoCurrentChannel();
    auto it = channels_.find(*current_);
    if (it == channels_.end() || it->second.state != ChannelState::Running)
        throw NoCurrentChannel();
    return it->second;
}

void ChannelRegistry::mark_broken(ExternalChannel& ch) {
    close_quiet(ch.to_child);
    close_quiet(ch.from_child);
    ch.to_child = ch.from_child = -1;
    if (!ch.preopened && ch.child_pid > 0) {
        int st = 0;
        ::waitpid(ch.child_pid, &st, WNOHANG);
    }
    ch.state = ChannelState::Terminated;
    if (current_ == ch.id) current_.reset();
}

void ChannelRegistry::send(std::string_view payload) {
    ExternalChannel& ch = current_channel();
    if (!write_all(ch.to_child, payload)) {
        int id = ch.id;
        mark_broken(ch);
        throw BrokenChannel("channel " + std::to_string(id) + ": child closed its input");
    }
}

std::string ChannelRegistry::read_until_prompt(std::optional<size_t> maxlength) {
    ExternalChannel& ch = current_channel();
    std::string acc;

    auto matches_prompt = [&](std::string_view line) {
        if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        return line == ch.prompt;
    };
    auto finish = [&]() {
        if (!acc.empty() && acc.back() == '\n') acc.pop_back();
        if (maxlength && acc.size() > *maxlength) acc.resize(*maxlength);
        return acc;
    };

    for (;;) {
        size_t nl;
        while ((nl = ch.read_buffer.find('\n')) != std::string::npos) {
            std::string line = ch.read_buffer.substr(0, nl + 1);
            ch.read_buffer.erase(0, nl + 1);
            if (matches_prompt(line)) return finish();
            acc += line;
        }
        if (!detail::wait_readable(ch.from_child, read_deadline_))
            throw ReadTimeout("channel " + std::to_string(ch.id) +
                              ": no prompt within the read deadline");
        char buf[4096];
        ssize_t n = ::read(ch.from_child, buf, sizeof buf);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw ChannelError(std::string("read failed: ") + std::strerror(errno));
        }
        if (n == 0) {
            std::string partial = acc + ch.read_buffer;
            int id = ch.id;
            mark_broken(ch);
            throw EndOfStreamBeforePrompt(
                "channel " + std::to_string(id) + ": end of stream before prompt",
                std::move(partial));
        }
        ch.read_buffer.append(buf, static_cast<size_t>(n));
    }
}

void ChannelRegistry::set_prompt(std::string_view newprompt) {
    default_prompt_.assign(newprompt);
    if (current_) {
        auto it = channels_.find(*current_);
        if (it != channels_.end()) it->second.prompt.assign(newprompt);
    }
}

void ChannelRegistry::set_current(int n) {
    auto it = channels_.find(n);
    if (it == channels_.end() || it->second.state != ChannelState::Running)
        throw UnknownDescriptor(n);
    current_ = n;
}

void ChannelRegistry::terminate(ExternalChannel& ch) {
    // Signal before closing the pipes: a child blocked on its input would
    // otherwise race its end-of-stream exit against the delivery.
    if (!ch.preopened && ch.child_pid > 0 && ch.attrs.kill_signal != 0) {
        pid_t target = ch.attrs.killall ? -ch.group_id : ch.child_pid;
        ::kill(target, ch.attrs.kill_signal);
    }

    close_quiet(ch.to_child);
    close_quiet(ch.from_child);
    ch.to_child = ch.from_child = -1;

    if (!ch.preopened && ch.child_pid > 0) {
        if (ch.attrs.kill_signal != 0) {
            if (!ch.attrs.daemon) {
                // The direct child is ours to reap.
                int st = 0;
                while (::waitpid(ch.child_pid, &st, 0) < 0 && errno == EINTR) {}
            } else {
                // Reparented to init; nothing to await.
                int st = 0;
                ::waitpid(ch.child_pid, &st, WNOHANG);
            }
        } else {
            // No signal: the child may legitimately stay alive, so only a
            // non-blocking reap is possible here.
            int st = 0;
            ::waitpid(ch.child_pid, &st, WNOHANG);
        }
    }
    ch.state = ChannelState::Terminated;
    if (current_ == ch.id) current_.reset();
}

void ChannelRegistry::remove_channel(std::optional<int> n) {
    if (!n) {
        terminate(current_channel());
        return;
    }
    if (*n == 0) {
        for (auto& [id, ch] : channels_)
            if (ch.state == ChannelState::Running) terminate(ch);
        return;
    }
    auto it = channels_.find(*n);
    if (it == channels_.end() || it->second.state != ChannelState::Running)
        throw UnknownDescriptor(*n);
    terminate(it->second);
}

void ChannelRegistry::shutdown_all() noexcept {
    for (auto& [id, ch] : channels_) {
        if (ch.state != ChannelState::Running) continue;
        try {
            terminate(ch);
        } catch (...) {
            // best effort
        }
    }
}

void ChannelRegistry::set_default_attrs(std::string_view spec) {
    default_attrs_.merge_spec(spec);
}

const ExternalChannel* ChannelRegistry::find(int id) const {
    auto it = channels_.find(id);
    return it == channels_.end() ? nullptr : &it->second;
}

std::vector<int> ChannelRegistry::running_ids() const {
    std::vector<int> ids;
    for (const auto& [id, ch] : channels_)
        if (ch.state == ChannelState::Running) ids.push_back(id);
    return ids;
}

} // namespace extchan
