#include "extchan/bench.hpp"

#include "extchan/registry.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace extchan {

namespace {

const char* kExpression = "(2*d^4+3*d^3-22*d^2-13*d+30)/(d^3-11*d+10)";
const char* kExpected = "3+2*d";

std::string first_nonempty_line(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) return line;
    return {};
}

std::string run_and_capture(const std::string& cmd) {
    FILE* p = ::popen(cmd.c_str(), "r");
    if (!p) throw ChildFailure("cannot start: " + cmd);
    std::string text;
    char buf[4096];
    size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) text.append(buf, n);
    int rc = ::pclose(p);
    if (rc != 0) throw ChildFailure(cmd + " exited with status " + std::to_string(rc));
    return text;
}

void check_answer(const std::string& answer, int iteration) {
    if (answer != kExpected)
        throw ChildFailure("iteration " + std::to_string(iteration) + ": got '" + answer +
                           "', expected '" + kExpected + "'");
}

} // namespace

BenchMode bench_mode_from_name(const std::string& name) {
    if (name == "system") return BenchMode::System;
    if (name == "pipe") return BenchMode::Pipe;
    if (name == "external") return BenchMode::External;
    throw ChildFailure("unknown benchmark mode: " + name);
}

std::string bench_mode_name(BenchMode mode) {
    switch (mode) {
        case BenchMode::System: return "system";
        case BenchMode::Pipe: return "pipe";
        case BenchMode::External: return "external";
    }
    return "?";
}

BenchReport run_benchmark(BenchMode mode, int iterations,
                          std::chrono::milliseconds startup_delay,
                          const std::string& mockcas_path) {
    namespace fs = std::filesystem;
    using clock = std::chrono::steady_clock;

    BenchReport report;
    report.mode = mode;
    report.iterations = iterations;

    std::string cas_cmd =
        mockcas_path + " --startup-delay " + std::to_string(startup_delay.count());

    fs::path workdir;
    ChannelRegistry registry;
    if (mode == BenchMode::System) {
        workdir = fs::temp_directory_path() /
                  ("extbench." + std::to_string(::getpid()));
        fs::create_directories(workdir);
    } else if (mode == BenchMode::External) {
        registry.open_channel(cas_cmd); // one child for the whole run
    }

    auto run_start = clock::now();
    for (int i = 0; i < iterations; ++i) {
        auto t0 = clock::now();
        std::string answer;
        switch (mode) {
            case BenchMode::System: {
                fs::path finput = workdir / "finput";
                fs::path foutput = workdir / "foutput";
                {
                    // append, as #write does; the file is removed every pass
                    std::ofstream f(finput, std::ios::app | std::ios::binary);
                    f << kExpression << "\n";
                }
                std::string cmd = "cat " + finput.string() + " | " + cas_cmd + " > " +
                                  foutput.string();
                int rc = std::system(cmd.c_str());
                if (rc != 0) throw ChildFailure("system command failed: " + cmd);
                std::ifstream f(foutput, std::ios::binary);
                std::stringstream ss;
                ss << f.rdbuf();
                answer = first_nonempty_line(ss.str());
                fs::remove(finput);
                break;
            }
            case BenchMode::Pipe: {
                std::string cmd =
                    std::string("echo '") + kExpression + "' | " + cas_cmd;
                answer = first_nonempty_line(run_and_capture(cmd));
                break;
            }
            case BenchMode::External: {
                registry.send(std::string(kExpression) + "\n");
                answer = registry.read_until_prompt();
                break;
            }
        }
        check_answer(answer, i);
        auto t1 = clock::now();
        report.per_iteration_ms.push_back(
            std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    report.total_ms =
        std::chrono::duration<double, std::milli>(clock::now() - run_start).count();

    if (!report.per_iteration_ms.empty()) {
        std::vector<double> sorted = report.per_iteration_ms;
        std::sort(sorted.begin(), sorted.end());
        report.min_ms = sorted.front();
        report.median_ms = sorted[sorted.size() / 2];
    }
    if (!workdir.empty()) {
        std::error_code ec;
        fs::remove_all(workdir, ec);
    }
    return report;
}

} // namespace extchan
