#pragma once

#include "hetero/io.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace hetero::cli {

enum class Command { Simulate, CompareMap, Atlas, Regions, FixedPoints, Freqlock, Pendulum, Curve, Manifolds, Lyapunov };

const char* command_name(Command c);
Command command_from_name(const std::string& name);  // throws ConfigError

enum ExitCode { Ok = 0, ConfigFailure = 2, NumericalFailure = 3 };

struct RunConfig {
    Command command = Command::Simulate;
    Config values;
    std::string out_dir = ".";
    int threads = 1;
    std::uint64_t seed = 1;
};

// Runs one command; returns the paths written, in order. Throws on failure.
std::vector<std::string> execute(const RunConfig& rc, std::ostream& log);

// Maps exceptions from execute onto exit codes and reports them on err.
int execute_guarded(const RunConfig& rc, std::ostream& log, std::ostream& err);

// Full command line: <command> [--config PATH] [--out DIR] [--threads N] [--seed N] [--set key=value ...]
int main_entry(int argc, const char* const* argv, std::ostream& log, std::ostream& err);

} // namespace hetero::cli
