#include "extchan/attributes.hpp"

#include "extchan/errors.hpp"

#include <charconv>
#include <vector>

namespace extchan {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

bool parse_bool(std::string_view v, std::string_view attr) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ParseError("attribute '" + std::string(attr) +
                     "' wants true or false, got '" + std::string(v) + "'");
}

} // namespace

ChannelAttributes ChannelAttributes::preopened() {
    ChannelAttributes a;
    a.kill_signal = 0;
    a.killall = false;
    a.daemon = false;
    a.shell = std::nullopt;
    a.stderr_target = "/dev/tty";
    return a;
}

void ChannelAttributes::merge_spec(std::string_view spec) {
    // Parse into a scratch copy first so a late error leaves *this untouched.
    ChannelAttributes next = *this;
    size_t pos = 0;
    while (pos <= spec.size()) {
        size_t comma = spec.find(',', pos);
        std::string_view item = trim(spec.substr(
            pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        pos = comma == std::string_view::npos ? spec.size() + 1 : comma + 1;
        if (item.empty()) continue;

        size_t eq = item.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("expected attr=value, got '" + std::string(item) + "'");
        std::string_view name = trim(item.substr(0, eq));
        std::string_view value = trim(item.substr(eq + 1));

        if (name == "kill") {
            int sig = -1;
            auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), sig);
            if (ec != std::errc() || ptr != value.data() + value.size())
                throw ParseError("kill wants an integer, got '" + std::string(value) + "'");
            if (sig < 0 || sig > 64)
                throw ParseError("kill signal " + std::to_string(sig) + " out of range 0..64");
            next.kill_signal = sig;
        } else if (name == "killall") {
            next.killall = parse_bool(value, name);
        } else if (name == "daemon") {
            next.daemon = parse_bool(value, name);
        } else if (name == "shell") {
            if (value == "noshell")
                next.shell = std::nullopt;
            else
                next.shell = std::string(value);
        } else if (name == "stderr") {
            if (value.empty())
                throw ParseError("stderr wants a file name");
            next.stderr_target = std::string(value);
        } else {
            throw ParseError("unknown attribute '" + std::string(name) + "'");
        }
    }
    *this = next;
}

std::string ChannelAttributes::describe() const {
    std::string s = "kill=" + std::to_string(kill_signal);
    s += ",killall=";
    s += killall ? "true" : "false";
    s += ",daemon=";
    s += daemon ? "true" : "false";
    s += ",shell=";
    s += shell ? *shell : std::string("noshell");
    s += ",stderr=" + stderr_target;
    return s;
}

} // namespace extchan
