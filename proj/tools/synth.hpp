#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace gfpcli {

enum class SynthPattern { cycles, smurfing, mixed };

std::optional<SynthPattern> synth_pattern_from_string(std::string_view name);

struct SynthOptions {
    SynthPattern pattern = SynthPattern::mixed;
    std::uint64_t edges = 10000;
    std::uint64_t seed = 1;
    double motif_rate = 0.1;            // chance that the next unit is a motif rather than one background edge
    std::uint32_t background_accounts = 3000;
    std::int64_t start_time = 1600000000;
};

/// Ground truth for a generated stream. Motif edges use ids starting with
/// "m" and touch only accounts private to their motif; background edges form
/// a three-layer DAG and use ids starting with "b".
struct SynthTruth {
    std::map<int, std::uint64_t> planted_cycles;          // by length
    std::map<int, std::uint64_t> planted_scatter_gather;  // by number of intermediates
    std::uint64_t background_edges = 0;
    std::uint64_t motif_edges = 0;
    std::int64_t first_timestamp = 0;
    std::int64_t last_timestamp = 0;

    /// Per-length totals the encoder should report on motif rows when every
    /// window covers the stream: each cycle is closed by exactly one edge and
    /// a scatter-gather motif with k intermediates completes at k - 1 gather
    /// edges, yielding one hit of each size 2..k.
    std::map<int, std::uint64_t> expected_cycle_lengths() const;
    std::map<int, std::uint64_t> expected_scatter_gather_sizes() const;

    std::string to_json(const SynthOptions& options) const;
};

/// Writes the CSV stream (header plus `options.edges` rows, strictly
/// increasing timestamps) and returns the planted counts.
SynthTruth generate_stream(const SynthOptions& options, std::ostream& csv);

}  // namespace gfpcli
