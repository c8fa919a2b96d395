#include "gfp/preprocessor.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "parallel.hpp"
#include "preprocessor_state.hpp"

namespace gfp {

Preprocessor::Preprocessor(EngineConfig config) : config_(std::move(config)) {
    config_.validate();
    state_ = std::make_unique<State>(config_);
}

Preprocessor::~Preprocessor() = default;
Preprocessor::Preprocessor(Preprocessor&&) noexcept = default;
Preprocessor& Preprocessor::operator=(Preprocessor&&) noexcept = default;

void Preprocessor::set_params(const EngineConfig& config) {
    if (fitted_) throw StateError("set_params is only permitted before fit or after reset");
    config.validate();
    auto fresh = std::make_unique<State>(config);
    config_ = config;
    state_ = std::move(fresh);
}

void Preprocessor::set_worker_count(unsigned workers) {
    if (workers < 1) throw ConfigError("worker_count must be >= 1");
    config_.worker_count = workers;
    state_->engine.set_workers(workers);
}

void Preprocessor::reset() {
    state_ = std::make_unique<State>(config_);
    fitted_ = false;
    last_batch_ = {};
    out_of_order_batches_ = 0;
}

const FeatureSchema& Preprocessor::schema() const { return state_->encoder.schema(); }
const GraphStore& Preprocessor::graph() const { return state_->graph; }
const VertexStats& Preprocessor::stats() const { return state_->stats; }
StatsContext Preprocessor::stats_context() const { return {&state_->stats, &state_->maintainer}; }

Preprocessor::Ingested Preprocessor::ingest(std::span<const Transaction> batch, std::span<const RowStatus> preflags) {
    if (!preflags.empty() && preflags.size() != batch.size()) {
        throw SchemaError("row flag count does not match batch size");
    }
    const std::size_t n = batch.size();
    const std::size_t attrs = config_.input_schema.attributes.size();
    for (const auto& txn : batch) {
        if (txn.attributes.size() != attrs) {
            throw SchemaError("row '" + txn.edge_id + "' has " + std::to_string(txn.attributes.size()) +
                              " attributes, schema declares " + std::to_string(attrs));
        }
    }

    Ingested out;
    out.status.assign(n, RowStatus::ok);
    out.source.assign(n, kNoVertex);
    out.target.assign(n, kNoVertex);
    if (!preflags.empty()) std::copy(preflags.begin(), preflags.end(), out.status.begin());

    // Duplicates resolve in caller order: the first occurrence wins.
    std::unordered_set<std::string_view> batch_ids;
    for (std::size_t i = 0; i < n; ++i) {
        if (out.status[i] != RowStatus::ok) continue;
        if (!batch_ids.insert(batch[i].edge_id).second) out.status[i] = RowStatus::duplicate_edge_id;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return batch[a].timestamp < batch[b].timestamp; });

    auto& graph = state_->graph;
    BatchSummary summary;
    summary.rows = n;
    const auto t_before = graph.t_now();

    for (std::size_t i : order) {
        if (out.status[i] != RowStatus::ok) continue;
        if (t_before && batch[i].timestamp < *t_before && batch[i].timestamp >= 0) summary.out_of_order = true;
        const InsertOutcome r = graph.insert(batch[i]);
        out.status[i] = r.status;
        out.source[i] = r.source;
        out.target[i] = r.target;
    }
    summary.evicted = graph.evict_outdated().size();

    for (std::size_t i = 0; i < n; ++i) {
        switch (out.status[i]) {
            case RowStatus::ok: ++summary.inserted; break;
            case RowStatus::stale: {
                ++summary.stale;
                out.source[i] = graph.find_vertex(batch[i].source).value_or(kNoVertex);
                out.target[i] = graph.find_vertex(batch[i].target).value_or(kNoVertex);
                break;
            }
            default: ++summary.rejected; break;
        }
    }
    if (summary.out_of_order) ++out_of_order_batches_;
    last_batch_ = summary;
    return out;
}

BatchSummary Preprocessor::fit(std::span<const Transaction> history) {
    reset();
    ingest(history, {});
    fitted_ = true;
    return last_batch_;
}

BatchSummary Preprocessor::partial_fit(std::span<const Transaction> batch) {
    if (!fitted_) throw StateError("partial_fit requires a fitted engine");
    ingest(batch, {});
    return last_batch_;
}

FeatureTable Preprocessor::transform(std::span<const Transaction> batch, std::span<const RowStatus> preflags) {
    fitted_ = true;
    const Ingested ing = ingest(batch, preflags);
    const std::size_t n = batch.size();

    std::vector<MiningRow> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        rows[i].trigger = Trigger{ing.source[i], ing.target[i], batch[i].timestamp};
        rows[i].mine_patterns = ing.status[i] == RowStatus::ok;
    }
    const auto reports = state_->engine.mine_batch(state_->graph, rows);

    FeatureTable table;
    table.schema = schema();
    table.row_ids.reserve(n);
    for (const auto& txn : batch) table.row_ids.push_back(txn.edge_id);
    table.values.assign(n * table.schema.size(), 0.0);

    const StatsContext ctx = stats_context();
    const auto& encoder = state_->encoder;
    detail::parallel_for_each(n, config_.worker_count, [&](std::size_t i) {
        EncodeInput in;
        in.txn = &batch[i];
        in.status = ing.status[i];
        in.source = ing.source[i];
        in.target = ing.target[i];
        in.report = &reports[i];
        encoder.encode(in, ctx, {table.values.data() + i * table.schema.size(), table.schema.size()});
    });
    return table;
}

}  // namespace gfp
