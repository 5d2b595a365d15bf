// extbench — compares the three ways of talking to an external solver:
// fresh process + files per pass, fresh process + pipe per pass, and one
// long-lived duplex channel.

#include "extchan/bench.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>

#include <unistd.h>

namespace {

// mockcas normally sits next to this binary.
std::string default_mockcas_path() {
    std::error_code ec;
    auto self = std::filesystem::read_symlink("/proc/self/exe", ec);
    if (ec) return "mockcas";
    return (self.parent_path() / "mockcas").string();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"benchmark of system/pipe/external interaction modes"};
    std::string mode_name;
    int iterations = 200;
    long startup_delay_ms = 0;
    bool json_output = false;
    std::string mockcas_path = default_mockcas_path();
    app.add_option("--mode", mode_name, "system | pipe | external")->required();
    app.add_option("--iterations", iterations, "number of exchanges")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--startup-delay", startup_delay_ms,
                   "mock CAS startup delay in milliseconds");
    app.add_flag("--json", json_output, "print a JSON report");
    app.add_option("--mockcas", mockcas_path, "path to the mockcas executable");
    CLI11_PARSE(app, argc, argv);

    try {
        extchan::BenchReport report = extchan::run_benchmark(
            extchan::bench_mode_from_name(mode_name), iterations,
            std::chrono::milliseconds(startup_delay_ms), mockcas_path);
        if (json_output) {
            nlohmann::json j{{"mode", extchan::bench_mode_name(report.mode)},
                             {"iterations", report.iterations},
                             {"total_ms", report.total_ms},
                             {"min_ms", report.min_ms},
                             {"median_ms", report.median_ms}};
            std::cout << j.dump() << "\n";
        } else {
            std::cout << "mode:       " << extchan::bench_mode_name(report.mode) << "\n"
                      << "iterations: " << report.iterations << "\n"
                      << "total:      " << report.total_ms << " ms\n"
                      << "min:        " << report.min_ms << " ms\n"
                      << "median:     " << report.median_ms << " ms\n";
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "extbench: " << e.what() << "\n";
        return 1;
    }
}
