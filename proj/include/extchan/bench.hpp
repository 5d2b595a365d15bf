#pragma once

#include <chrono>
#include <stdexcept>
#include <string>
#include <vector>

namespace extchan {

class ChildFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class BenchMode { System, Pipe, External };

BenchMode bench_mode_from_name(const std::string& name); // "system"|"pipe"|"external"
std::string bench_mode_name(BenchMode mode);

struct BenchReport {
    BenchMode mode{};
    int iterations = 0;
    double total_ms = 0;
    double min_ms = 0;
    double median_ms = 0;
    std::vector<double> per_iteration_ms;
};

// Runs the GCD-contraction exchange against the mock CAS `iterations` times
// in the given interaction mode and reports wall-clock timings.
//   system:   temp input file -> fresh child -> temp output file, every pass
//   pipe:     fresh child per pass, expression passed on the command line
//   external: one long-lived channel, framed request/reply per pass
// `mockcas_path` names the mock CAS executable; the startup delay option is
// appended by the harness.
BenchReport run_benchmark(BenchMode mode, int iterations,
                          std::chrono::milliseconds startup_delay,
                          const std::string& mockcas_path);

} // namespace extchan
