#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

#include "synth.hpp"

namespace gfpcli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitConfig = 2,
    kExitIo = 3,
    kExitData = 4,
    kExitInternal = 5,
};

struct CliError : std::runtime_error {
    CliError(int code, const std::string& message) : std::runtime_error(message), code(code) {}
    int code;
};

struct FitOptions {
    std::string input;
    std::string config;  // empty: defaults
    std::string state;
    std::optional<unsigned> threads;
    bool iso_timestamps = false;
};

struct StreamOptions {
    std::string input;
    std::string state;   // engine to resume; empty starts from `config`
    std::string config;  // used only without `state`
    std::string output;  // "-" for stdout, empty to discard
    std::string report;  // manifest path, empty for none
    std::string save_state;
    std::uint64_t batch_size = 2048;
    std::optional<unsigned> threads;
    bool iso_timestamps = false;
};

struct GenOptions {
    SynthOptions synth;
    std::string output = "-";
    std::string truth;
};

int cmd_fit(const FitOptions& options);
int cmd_transform(const StreamOptions& options);
int cmd_bench(const StreamOptions& options);
int cmd_gen(const GenOptions& options);

/// Runs `body`, converting failures into a message on `err` and an exit code.
int run_guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace gfpcli
