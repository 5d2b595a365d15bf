// extsh — runs line-oriented channel scripts; optionally activates
// pre-opened channels handed down by a parent process via -pipe.

#include "extchan/embed.hpp"
#include "extchan/registry.hpp"
#include "extchan/script.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

int usage(const char* argv0) {
    std::cerr << "usage: " << argv0
              << " [-pipe r,w,...] [--read-timeout SECONDS] [--echo] script.ext\n";
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    std::string pipe_arg;
    std::string script_path;
    bool echo = false;
    std::optional<long> read_timeout_s;

    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "-pipe") {
            if (++i >= argc) return usage(argv[0]);
            pipe_arg = argv[i];
        } else if (arg == "--read-timeout") {
            if (++i >= argc) return usage(argv[0]);
            try {
                read_timeout_s = std::stol(argv[i]);
            } catch (...) {
                return usage(argv[0]);
            }
        } else if (arg == "--echo") {
            echo = true;
        } else if (!arg.empty() && arg[0] == '-') {
            return usage(argv[0]);
        } else if (script_path.empty()) {
            script_path = arg;
        } else {
            return usage(argv[0]);
        }
    }
    if (script_path.empty()) return usage(argv[0]);

    std::ifstream f(script_path, std::ios::binary);
    if (!f) {
        std::cerr << "extsh: cannot read " << script_path << "\n";
        return 2;
    }
    std::stringstream source;
    source << f.rdbuf();

    extchan::ChannelRegistry registry;
    if (read_timeout_s)
        registry.set_read_deadline(std::chrono::seconds(*read_timeout_s));

    extchan::Interpreter interp(registry, std::cout, std::cerr);
    interp.set_echo(echo);

    if (!pipe_arg.empty()) {
        try {
            auto spec = extchan::parse_pipe_option(pipe_arg);
            auto results = extchan::activate_preopened(registry, spec);
            interp.define("PIPES_", std::to_string(results.size()));
            for (size_t k = 0; k < results.size(); ++k)
                interp.define("PIPE" + std::to_string(k + 1) + "_",
                              std::to_string(results[k].channel_id));
        } catch (const extchan::ParseError& e) {
            std::cerr << "extsh: bad -pipe option: " << e.what() << "\n";
            return 2;
        } catch (const extchan::ChannelError& e) {
            std::cerr << "extsh: pre-opened channel activation failed: " << e.what()
                      << "\n";
            return 1;
        }
    }

    return interp.run_source(source.str());
}
