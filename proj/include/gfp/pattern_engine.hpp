#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gfp/config.hpp"
#include "gfp/graph_store.hpp"
#include "gfp/types.hpp"

namespace gfp {

/// Multiset of pattern sizes stored as counts indexed by size.
class SizeHistogram {
public:
    void add(std::size_t size, std::uint64_t count = 1);
    void merge(const SizeHistogram& other);

    std::uint64_t count(std::size_t size) const { return size < counts_.size() ? counts_[size] : 0; }
    std::uint64_t total() const;
    std::size_t max_size() const { return counts_.empty() ? 0 : counts_.size() - 1; }
    bool empty() const { return total() == 0; }

    bool operator==(const SizeHistogram& other) const;

private:
    std::vector<std::uint64_t> counts_;
};

/// A batch edge whose patterns are enumerated. Endpoints may be kNoVertex for
/// rows that never entered the graph.
struct Trigger {
    VertexId source = kNoVertex;
    VertexId target = kNoVertex;
    Timestamp timestamp = 0;
};

struct ScatterGatherHit {
    VertexId source = kNoVertex;
    std::vector<VertexId> intermediates;  // ascending
    VertexId sink = kNoVertex;

    auto operator<=>(const ScatterGatherHit&) const = default;
};

struct PatternReport {
    SizeHistogram simple_cycle_lengths;
    SizeHistogram temporal_cycle_lengths;
    SizeHistogram sg_intermediate_sizes;
    std::size_t src_fan_in = 0;
    std::size_t src_fan_out = 0;
    std::size_t dst_fan_in = 0;
    std::size_t dst_fan_out = 0;
    bool gather_scatter_src = false;
    bool gather_scatter_dst = false;

    bool operator==(const PatternReport&) const = default;
};

/// Every scatter-gather pattern {source, I, sink} (|I| >= 2) containing the
/// trigger edge, with all pattern edges inside [t - delta_sg, t]. The first
/// phase finds patterns with the trigger's target as an intermediate, the
/// second those with the trigger's source as an intermediate. Sorted.
std::vector<ScatterGatherHit> scatter_gather_hits(const GraphStore& graph, const Trigger& trigger, Duration delta_sg);

/// Per-trigger hits for a whole batch; `workers` threads (1 = inline).
std::vector<std::vector<ScatterGatherHit>> scatter_gather_stream(const GraphStore& graph,
                                                                 std::span<const Trigger> batch,
                                                                 Duration delta_sg, unsigned workers = 1);

/// Lengths of all simple cycles through the trigger edge (2 <= L <= max_length,
/// every edge in [t - window, t]). Parallel edges multiply: each distinct edge
/// sequence is a cycle.
SizeHistogram simple_cycle_lengths(const GraphStore& graph, const Trigger& trigger, Duration window, int max_length);

/// Lengths of simple cycles that end with the trigger edge and whose edge
/// timestamps strictly increase along the cycle, all in [t - window, t].
SizeHistogram temporal_cycle_lengths(const GraphStore& graph, const Trigger& trigger, Duration window,
                                     std::optional<int> max_length = std::nullopt);

/// fan_in >= 2 and fan_out >= 2.
bool gather_scatter_flag(const GraphStore& graph, VertexId v, std::optional<TimeWindow> window = std::nullopt);

struct MiningRow {
    Trigger trigger;
    bool mine_patterns = true;  // false: fans only (stale or rejected rows)
};

struct MiningConfig {
    PatternWindows windows;
    CycleConstraint cycles;
    PatternToggles patterns;

    static MiningConfig from(const EngineConfig& config) {
        return {config.pattern_windows, config.cycle_constraint, config.patterns};
    }
};

/// Runs every enabled pattern family for a batch. Work is split per row and,
/// for cycle searches, per first hop out of the trigger's target so that a
/// single heavy edge still spreads over all workers. Output is ordered by row
/// and independent of the worker count.
class PatternEngine {
public:
    explicit PatternEngine(MiningConfig config, unsigned workers = 1);

    void set_workers(unsigned workers);
    unsigned workers() const { return workers_; }
    const MiningConfig& config() const { return config_; }

    std::vector<PatternReport> mine_batch(const GraphStore& graph, std::span<const MiningRow> rows) const;

private:
    MiningConfig config_;
    unsigned workers_;
};

}  // namespace gfp
