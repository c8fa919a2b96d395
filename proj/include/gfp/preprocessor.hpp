#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "gfp/config.hpp"
#include "gfp/feature_encoder.hpp"
#include "gfp/graph_store.hpp"
#include "gfp/pattern_engine.hpp"
#include "gfp/types.hpp"
#include "gfp/vertex_stats.hpp"

namespace gfp {

/// Row accounting for one fit / partial_fit / transform call.
struct BatchSummary {
    std::size_t rows = 0;
    std::size_t inserted = 0;
    std::size_t stale = 0;
    std::size_t rejected = 0;  // duplicate id, negative timestamp, non-finite attribute, malformed
    std::size_t evicted = 0;
    bool out_of_order = false;  // batch reached back before the previous t_now
};

/// Streaming graph feature preprocessor with the fit / partial_fit / transform
/// lifecycle.
///
/// transform() sorts the batch by timestamp (stable), inserts fresh rows,
/// evicts outdated edges, mines patterns for every row against the updated
/// graph and returns one feature row per input row in the caller's order.
/// Rows older than the retention window are scored against the current graph
/// without being inserted and carry RowStatus::stale.
///
/// One call at a time per instance; internal parallelism follows worker_count.
class Preprocessor {
public:
    explicit Preprocessor(EngineConfig config = {});
    ~Preprocessor();

    Preprocessor(Preprocessor&&) noexcept;
    Preprocessor& operator=(Preprocessor&&) noexcept;

    const EngineConfig& get_params() const { return config_; }

    /// Permitted before fit or after reset. Throws ConfigError or StateError.
    void set_params(const EngineConfig& config);

    /// Worker count only affects scheduling, so it may change at any time.
    void set_worker_count(unsigned workers);

    /// Clears graph, statistics and the account dictionary.
    void reset();

    /// Reset, then build the initial graph from `history`. Produces no features.
    BatchSummary fit(std::span<const Transaction> history);

    /// Update the graph without computing features. Requires a prior fit.
    BatchSummary partial_fit(std::span<const Transaction> batch);

    /// `preflags`, when non-empty, marks rows the ingest layer already rejected
    /// (anything other than RowStatus::ok); those rows are passed through with
    /// zeroed features.
    FeatureTable transform(std::span<const Transaction> batch, std::span<const RowStatus> preflags = {});

    const FeatureSchema& schema() const;
    bool fitted() const { return fitted_; }

    const GraphStore& graph() const;
    const VertexStats& stats() const;
    StatsContext stats_context() const;

    const BatchSummary& last_batch() const { return last_batch_; }
    std::uint64_t out_of_order_batches() const { return out_of_order_batches_; }

private:
    friend class SnapshotCodec;
    struct State;

    struct Ingested {
        std::vector<RowStatus> status;
        std::vector<VertexId> source;
        std::vector<VertexId> target;
    };

    Ingested ingest(std::span<const Transaction> batch, std::span<const RowStatus> preflags);

    EngineConfig config_;
    std::unique_ptr<State> state_;
    bool fitted_ = false;
    BatchSummary last_batch_;
    std::uint64_t out_of_order_batches_ = 0;
};

/// Versioned binary snapshot of an engine: config, account dictionary, seen
/// edge ids, live edges in log order and the raw moment accumulators.
void save_snapshot(const Preprocessor& engine, std::ostream& out);
Preprocessor load_snapshot(std::istream& in);

}  // namespace gfp
