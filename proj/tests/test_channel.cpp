#include <doctest.h>

#include "extchan/attributes.hpp"
#include "extchan/registry.hpp"
#include "test_util.hpp"

#include <chrono>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

using namespace extchan;
using namespace std::chrono_literals;

TEST_CASE("attribute defaults match the documented spawn policy") {
    ChannelAttributes a;
    CHECK(a.kill_signal == 9);
    CHECK(a.killall == true);
    CHECK(a.daemon == true);
    REQUIRE(a.shell.has_value());
    CHECK(*a.shell == "/bin/sh -c");
    CHECK(a.stderr_target == "/dev/null");
}

TEST_CASE("pre-opened channels carry the fixed attribute set") {
    ChannelAttributes a = ChannelAttributes::preopened();
    CHECK(a.kill_signal == 0);
    CHECK(a.killall == false);
    CHECK(a.daemon == false);
    CHECK_FALSE(a.shell.has_value());
    CHECK(a.stderr_target == "/dev/tty");
}

TEST_CASE("merge_spec changes only the attributes named") {
    ChannelAttributes a;
    a.merge_spec("kill=15");
    CHECK(a.kill_signal == 15);
    CHECK(a.killall == true);
    CHECK(a.daemon == true);

    a.merge_spec("daemon=false,killall=false");
    CHECK(a.kill_signal == 15);
    CHECK(a.killall == false);
    CHECK(a.daemon == false);

    a.merge_spec("shell=noshell");
    CHECK_FALSE(a.shell.has_value());
    a.merge_spec("shell=/bin/bash -c");
    CHECK(*a.shell == "/bin/bash -c");
    a.merge_spec("stderr=/tmp/errs");
    CHECK(a.stderr_target == "/tmp/errs");
}

TEST_CASE("merge_spec rejects bad input without changing anything") {
    ChannelAttributes a;
    ChannelAttributes before = a;
    CHECK_THROWS_AS(a.merge_spec("kill=banana"), ParseError);
    CHECK(a == before);
    CHECK_THROWS_AS(a.merge_spec("kill=65"), ParseError);
    CHECK(a == before);
    CHECK_THROWS_AS(a.merge_spec("kill=-1"), ParseError);
    CHECK(a == before);
    CHECK_THROWS_AS(a.merge_spec("colour=red"), ParseError);
    CHECK(a == before);
    CHECK_THROWS_AS(a.merge_spec("daemon=perhaps"), ParseError);
    CHECK(a == before);
    // one bad entry poisons the whole list
    CHECK_THROWS_AS(a.merge_spec("kill=15,bogus=1"), ParseError);
    CHECK(a == before);
}

TEST_CASE("attribute merge property: random subsets land exactly where named") {
    std::mt19937 rng(20240817);
    for (int iter = 0; iter < 200; ++iter) {
        ChannelAttributes a;
        ChannelAttributes expect = a;
        std::string spec;
        auto append = [&](const std::string& s) {
            if (!spec.empty()) spec += ',';
            spec += s;
        };
        if (rng() % 2) {
            int k = static_cast<int>(rng() % 65);
            append("kill=" + std::to_string(k));
            expect.kill_signal = k;
        }
        if (rng() % 2) {
            bool v = rng() % 2;
            append(std::string("killall=") + (v ? "true" : "false"));
            expect.killall = v;
        }
        if (rng() % 2) {
            bool v = rng() % 2;
            append(std::string("daemon=") + (v ? "true" : "false"));
            expect.daemon = v;
        }
        if (rng() % 2) {
            if (rng() % 2) {
                append("shell=noshell");
                expect.shell.reset();
            } else {
                append("shell=/bin/sh -c");
                expect.shell = "/bin/sh -c";
            }
        }
        if (rng() % 2) {
            std::string f = "/tmp/e" + std::to_string(rng() % 1000);
            append("stderr=" + f);
            expect.stderr_target = f;
        }
        if (spec.empty()) continue;
        a.merge_spec(spec);
        CHECK(a == expect);
    }
}

TEST_CASE("resolve_executable searches PATH with the documented fallback") {
    const char* saved = std::getenv("PATH");
    std::string saved_copy = saved ? saved : "";

    ::unsetenv("PATH");
    CHECK(resolve_executable("cat") == "/bin/cat");
    CHECK_THROWS_AS(resolve_executable("no-such-binary-xyz"), SpawnFailure);

    ::setenv("PATH", "/nonexistent-dir", 1);
    CHECK_THROWS_AS(resolve_executable("cat"), SpawnFailure);

    // names with a slash bypass the search entirely
    CHECK(resolve_executable("/bin/cat") == "/bin/cat");

    if (saved)
        ::setenv("PATH", saved_copy.c_str(), 1);
    else
        ::unsetenv("PATH");
}

// Every test read gets a deadline so a framing bug fails fast instead of
// hanging the suite.
#define MAKE_REGISTRY(reg)    \
    ChannelRegistry reg;      \
    reg.set_read_deadline(5s)

TEST_CASE("echo round trip through cat with the default empty prompt") {
    MAKE_REGISTRY(reg);
    reg.open_channel("cat");
    reg.send("hello world\n\n");
    CHECK(reg.read_until_prompt() == "hello world");

    reg.send("two\nlines\n\n");
    CHECK(reg.read_until_prompt() == "two\nlines");
}

TEST_CASE("named prompt frames the reply and is never returned") {
    MAKE_REGISTRY(reg);
    reg.open_channel("cat");
    reg.set_prompt("READY");
    reg.send("payload\nREADY\n");
    CHECK(reg.read_until_prompt() == "payload");
}

TEST_CASE("a carriage return before the newline does not hide the prompt") {
    MAKE_REGISTRY(reg);
    reg.open_channel("cat");
    reg.set_prompt("P");
    reg.send("crlf line\nP\r\n");
    CHECK(reg.read_until_prompt() == "crlf line");
}

TEST_CASE("the prompt must occupy a whole line") {
    MAKE_REGISTRY(reg);
    reg.open_channel("cat");
    reg.set_prompt("P");
    reg.send("aPb\nP\n");
    CHECK(reg.read_until_prompt() == "aPb");
}

TEST_CASE("two frames queued ahead are read one at a time") {
    MAKE_REGISTRY(reg);
    reg.open_channel("cat");
    reg.send("one\n\ntwo\n\n");
    CHECK(reg.read_until_prompt() == "one");
    CHECK(reg.read_until_prompt() == "two");
}

TEST_CASE("maxlength truncates the result but consumes through the prompt") {
    MAKE_REGISTRY(reg);
    reg.open_channel("cat");
    reg.send("abcdefgh\n\n");
    CHECK(reg.read_until_prompt(3) == "abc");
    // the rest of the frame is gone; the channel is aligned for the next one
    reg.send("next\n\n");
    CHECK(reg.read_until_prompt() == "next");
}

TEST_CASE("empty send is a no-op") {
    MAKE_REGISTRY(reg);
    reg.open_channel("cat");
    reg.send("");
    reg.send("still alive\n\n");
    CHECK(reg.read_until_prompt() == "still alive");
}

TEST_CASE("payload bytes arrive exactly once and unmodified") {
    MAKE_REGISTRY(reg);
    reg.open_channel(testutil::tool("countbytes"));
    reg.send("hello\nworld\n");
    reg.send("COUNT\n");
    CHECK(reg.read_until_prompt() == "12"); // "hello\n" + "world\n"
    reg.send("COUNT\n");
    CHECK(reg.read_until_prompt() == "0");
}

TEST_CASE("set_current addresses channels by descriptor") {
    MAKE_REGISTRY(reg);
    int c1 = reg.open_channel("cat");
    int c2 = reg.open_channel("cat");
    CHECK(reg.current() == c2);

    reg.set_current(c1);
    reg.send("to one\n\n");
    CHECK(reg.read_until_prompt() == "to one");

    reg.set_current(c2);
    reg.send("to two\n\n");
    CHECK(reg.read_until_prompt() == "to two");

    CHECK_THROWS_AS(reg.set_current(99), UnknownDescriptor);
}

TEST_CASE("removed channels cannot become current") {
    MAKE_REGISTRY(reg);
    int c1 = reg.open_channel("cat");
    reg.open_channel("cat");
    reg.remove_channel(c1);
    CHECK_THROWS_AS(reg.set_current(c1), UnknownDescriptor);
}

TEST_CASE("remove_channel(0) terminates everything") {
    MAKE_REGISTRY(reg);
    reg.open_channel("cat");
    reg.open_channel("cat");
    CHECK(reg.running_ids().size() == 2);
    reg.remove_channel(0);
    CHECK(reg.running_ids().empty());
    CHECK_THROWS_AS(reg.send("x"), NoCurrentChannel);
}

TEST_CASE("prompt can be set before any channel exists") {
    MAKE_REGISTRY(reg);
    reg.set_prompt("LATER");
    CHECK(reg.default_prompt() == "LATER");
    reg.open_channel("cat");
    reg.send("text\nLATER\n");
    CHECK(reg.read_until_prompt() == "text");
}

TEST_CASE("spawn failure for an unresolvable noshell command") {
    MAKE_REGISTRY(reg);
    reg.set_default_attrs("shell=noshell");
    CHECK_THROWS_AS(reg.open_channel("no-such-binary-xyz"), SpawnFailure);
    CHECK_THROWS_AS(reg.open_channel("/no/such/path/anywhere"), SpawnFailure);
    CHECK(reg.running_ids().empty());
}

TEST_CASE("child exiting before the prompt reports the partial text") {
    MAKE_REGISTRY(reg);
    reg.set_default_attrs("daemon=false");
    reg.open_channel("echo abc");
    reg.set_prompt("NEVER");
    try {
        reg.read_until_prompt();
        FAIL("expected EndOfStreamBeforePrompt");
    } catch (const EndOfStreamBeforePrompt& e) {
        CHECK(e.partial == "abc\n");
    }
}

TEST_CASE("daemon children live in their own session and group") {
    MAKE_REGISTRY(reg);
    int id = reg.open_channel("cat");
    const ExternalChannel* ch = reg.find(id);
    REQUIRE(ch != nullptr);
    CHECK(ch->group_id == ch->child_pid);
    CHECK(::getsid(ch->child_pid) != ::getsid(0));
    CHECK(::getpgid(ch->child_pid) == ch->child_pid);
}

TEST_CASE("non-daemon noshell children get their own group in our session") {
    MAKE_REGISTRY(reg);
    reg.set_default_attrs("daemon=false,shell=noshell");
    int id = reg.open_channel("cat");
    const ExternalChannel* ch = reg.find(id);
    REQUIRE(ch != nullptr);
    CHECK(::getsid(ch->child_pid) == ::getsid(0));
    CHECK(::getpgid(ch->child_pid) == ch->child_pid);
    CHECK(ch->group_id == ch->child_pid);
}

TEST_CASE("framing round trip over random payload lines") {
    MAKE_REGISTRY(reg);
    reg.open_channel("cat");
    reg.set_prompt("ZZ##");

    std::mt19937 rng(987654);
    const std::string alphabet = "abcdefghijklmnopqrstuvwxyz0123456789 +-*/^()";
    for (int iter = 0; iter < 200; ++iter) {
        size_t nlines = 1 + rng() % 5;
        std::vector<std::string> lines;
        std::string wire;
        for (size_t i = 0; i < nlines; ++i) {
            size_t len = rng() % 40;
            std::string line;
            for (size_t j = 0; j < len; ++j) line += alphabet[rng() % alphabet.size()];
            lines.push_back(line);
            wire += line;
            wire += '\n';
        }
        wire += "ZZ##\n";
        reg.send(wire);

        std::string expected;
        for (size_t i = 0; i < lines.size(); ++i) {
            if (i) expected += '\n';
            expected += lines[i];
        }
        CHECK(reg.read_until_prompt() == expected);
    }
}
