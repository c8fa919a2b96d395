#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gfp/config.hpp"
#include "gfp/graph_store.hpp"
#include "gfp/types.hpp"

namespace gfp {

/// Running count, mean and central moment sums M2..M4 (sum of (x - mean)^k).
struct MomentAccumulator {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;

    void add(double x);
    /// Inverse of add(x). Requires n >= 1 and that x was previously added.
    void remove(double x);
    void reset() { *this = MomentAccumulator{}; }

    double sum() const { return static_cast<double>(n) * mean; }
    /// Population variance.
    double variance() const;
    /// Fisher-Pearson skew; 0 for zero-spread samples.
    double skew() const;
    /// Raw (non-excess) kurtosis; 0 for zero-spread samples.
    double kurtosis() const;
    bool zero_spread() const;

    bool operator==(const MomentAccumulator&) const = default;
};

/// Visits every live observation of one (vertex, direction); each call
/// receives the projected stat-attribute values of one edge.
using ObservationScan = std::function<void(const std::function<void(std::span<const double>)>&)>;

struct OrderStats {
    double min = 0.0;
    double max = 0.0;
    double median = 0.0;
};

/// Sorts a copy; the median of an even count is the mean of the two middle values.
std::optional<OrderStats> order_stats(std::vector<double> values);

/// Per-vertex, per-direction, per-attribute moment accumulators with O(1)
/// insert/remove. Removal is followed by a health check that rebuilds the
/// accumulators from the live edges when floating-point drift is possible:
/// every 2^16 removals, on negative M2, when the count or M2 shrank well
/// below its level at the last rebuild, and always for small counts.
class VertexStats {
public:
    static constexpr std::uint64_t kAuditInterval = 1u << 16;
    static constexpr std::uint64_t kExactRebuildCount = 8;

    explicit VertexStats(std::size_t attribute_count);

    std::size_t attribute_count() const { return attribute_count_; }

    /// Returns false (and leaves accumulators untouched) on non-finite values.
    bool on_insert(VertexId v, Direction d, std::span<const double> values);

    /// `scan` must reflect the live observations after this removal.
    /// Throws StateError when the accumulator is empty.
    void on_remove(VertexId v, Direction d, std::span<const double> values, const ObservationScan& scan);

    void rebuild(VertexId v, Direction d, const ObservationScan& scan);

    /// nullopt when (v, d) has no observations. Order statistics consume `scan`;
    /// moment statistics never do.
    std::optional<double> query_stat(VertexId v, Direction d, std::size_t attr, Stat stat,
                                     const ObservationScan& scan) const;

    const MomentAccumulator& accumulator(VertexId v, Direction d, std::size_t attr) const;
    std::uint64_t rebuild_count() const { return rebuilds_; }

private:
    friend class SnapshotCodec;

    struct DirectionState {
        std::vector<MomentAccumulator> acc;
        std::uint64_t removals_since_rebuild = 0;
        std::uint64_t peak_n = 0;
        std::vector<double> peak_m2;
    };

    DirectionState& state(VertexId v, Direction d);
    const DirectionState* find_state(VertexId v, Direction d) const;
    bool needs_rebuild(const DirectionState& s) const;

    std::size_t attribute_count_;
    std::vector<DirectionState> states_;  // index 2 * v + direction
    std::uint64_t rebuilds_ = 0;
};

/// Keeps VertexStats in step with a GraphStore: projects each edge's input
/// attributes (and optionally its timestamp) onto the stat attributes and
/// updates both endpoints.
class StatsMaintainer : public EdgeObserver {
public:
    /// `projection[k]` is the input attribute index feeding stat attribute k,
    /// or kTimestampSource for the edge timestamp.
    static constexpr int kTimestampSource = -1;

    StatsMaintainer(const GraphStore& graph, VertexStats& stats, std::vector<int> projection);

    static std::vector<int> projection_for(const EngineConfig& config);

    void edge_inserted(const EdgeView& edge) override;
    void edge_removed(const EdgeView& edge) override;

    ObservationScan scan(VertexId v, Direction d) const;
    void project(const EdgeView& edge, std::span<double> out) const;

private:
    const GraphStore& graph_;
    VertexStats& stats_;
    std::vector<int> projection_;
};

}  // namespace gfp
