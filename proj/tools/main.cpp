#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"
#include "gfp/gfp.h"

using namespace gfpcli;

namespace {

void add_stream_options(CLI::App* cmd, StreamOptions& o, bool default_stdout) {
    cmd->add_option("--input,-i", o.input, "Transaction CSV ('-' for stdin)")->required();
    cmd->add_option("--state,-s", o.state, "Engine snapshot to resume from");
    cmd->add_option("--config,-c", o.config, "Engine config JSON, used when no --state is given")
        ->envname("GFP_CONFIG");
    cmd->add_option("--batch-size,-b", o.batch_size, "Rows per transform call")
        ->check(CLI::Range(std::uint64_t{1}, std::numeric_limits<std::uint64_t>::max()));
    cmd->add_option("--threads,-t", o.threads, "Worker threads")->envname("GFP_THREADS")->check(CLI::PositiveNumber);
    if (default_stdout) o.output = "-";
    cmd->add_option("--output,-o", o.output, default_stdout ? "Feature CSV ('-' for stdout)" : "Optional feature CSV");
    cmd->add_option("--save-state", o.save_state, "Write the engine snapshot after the run");
    cmd->add_flag("--iso-timestamps", o.iso_timestamps, "Parse timestamps as ISO-8601 instead of epoch seconds");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming graph feature preprocessor"};
    app.set_version_flag("--version", std::string(gfp_version()));
    app.require_subcommand(1);

    FitOptions fit;
    auto* fit_cmd = app.add_subcommand("fit", "Build engine state from a history CSV");
    fit_cmd->add_option("--input,-i", fit.input, "History CSV ('-' for stdin)")->required();
    fit_cmd->add_option("--config,-c", fit.config, "Engine config JSON")->envname("GFP_CONFIG");
    fit_cmd->add_option("--state,-s", fit.state, "Snapshot output path")->required();
    fit_cmd->add_option("--threads,-t", fit.threads, "Worker threads")->envname("GFP_THREADS")->check(CLI::PositiveNumber);
    fit_cmd->add_flag("--iso-timestamps", fit.iso_timestamps, "Parse timestamps as ISO-8601");

    StreamOptions transform;
    auto* transform_cmd = app.add_subcommand("transform", "Stream a CSV through the engine in batches");
    add_stream_options(transform_cmd, transform, true);
    transform_cmd->add_option("--report", transform.report, "Run manifest JSON path ('-' for stdout)");

    StreamOptions bench;
    auto* bench_cmd = app.add_subcommand("bench", "Measure batch latency and throughput");
    add_stream_options(bench_cmd, bench, false);
    bench_cmd->add_option("--report", bench.report, "Run manifest JSON path ('-' for stdout)")->required();

    GenOptions gen;
    std::string pattern = "mixed";
    auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic stream with planted motifs");
    gen_cmd->add_option("--pattern,-p", pattern, "cycles, smurfing or mixed");
    gen_cmd->add_option("--edges,-n", gen.synth.edges, "Number of edges");
    gen_cmd->add_option("--seed", gen.synth.seed, "Random seed");
    gen_cmd->add_option("--motif-rate", gen.synth.motif_rate, "Chance of starting a motif at each step")
        ->check(CLI::Range(0.0, 1.0));
    gen_cmd->add_option("--accounts", gen.synth.background_accounts, "Background account pool size")
        ->check(CLI::Range(3u, 100000000u));
    gen_cmd->add_option("--start-time", gen.synth.start_time, "First timestamp (epoch seconds)");
    gen_cmd->add_option("--output,-o", gen.output, "CSV output ('-' for stdout)");
    gen_cmd->add_option("--truth", gen.truth, "Ground-truth JSON sidecar path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    return run_guarded(
        [&]() -> int {
            if (*fit_cmd) return cmd_fit(fit);
            if (*transform_cmd) return cmd_transform(transform);
            if (*bench_cmd) return cmd_bench(bench);
            auto parsed = synth_pattern_from_string(pattern);
            if (!parsed) throw CliError(kExitUsage, "unknown pattern '" + pattern + "'");
            gen.synth.pattern = *parsed;
            return cmd_gen(gen);
        },
        std::cerr);
}
