#include "gfp/pattern_engine.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <unordered_map>
#include <utility>

#include "parallel.hpp"

namespace gfp {

void SizeHistogram::add(std::size_t size, std::uint64_t count) {
    if (count == 0) return;
    if (size >= counts_.size()) counts_.resize(size + 1, 0);
    counts_[size] += count;
}

void SizeHistogram::merge(const SizeHistogram& other) {
    for (std::size_t s = 0; s < other.counts_.size(); ++s) add(s, other.counts_[s]);
}

std::uint64_t SizeHistogram::total() const {
    return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

bool SizeHistogram::operator==(const SizeHistogram& other) const {
    const std::size_t n = std::max(counts_.size(), other.counts_.size());
    for (std::size_t s = 0; s < n; ++s) {
        if (count(s) != other.count(s)) return false;
    }
    return true;
}

namespace {

/// Members of `candidates` (ascending, excluding `skip_a`/`skip_b`) that have a
/// live edge to/from the pivot inside `w`, according to `pivot_map`.
std::vector<VertexId> intersect(const std::vector<VertexId>& candidates, const NeighborMap& pivot_map,
                                const TimeWindow& w, VertexId skip_a, VertexId skip_b) {
    std::vector<VertexId> out;
    if (candidates.size() <= pivot_map.size()) {
        for (VertexId x : candidates) {
            if (x == skip_a || x == skip_b) continue;
            auto it = pivot_map.find(x);
            if (it != pivot_map.end() && it->second.any_in(w)) out.push_back(x);
        }
    } else {
        for (const auto& [x, list] : pivot_map) {
            if (x == skip_a || x == skip_b) continue;
            if (std::binary_search(candidates.begin(), candidates.end(), x) && list.any_in(w)) out.push_back(x);
        }
        std::sort(out.begin(), out.end());
    }
    return out;
}

bool known(const GraphStore& g, VertexId v) { return v != kNoVertex && v < g.vertex_count(); }

/// Phase 1: the trigger target v is an intermediate; sinks are v's out-neighbors.
/// Phase 2: the trigger source u is an intermediate; sources are u's in-neighbors.
/// Within one trigger a (source, sink) pair is produced at most once and the
/// phases never overlap (phase 1 fixes the source to u, phase 2 the sink to v),
/// so the emitted hits are already distinct.
template <typename Sink>
void scatter_gather_phase(const GraphStore& g, const Trigger& t, Duration delta, int phase, Sink&& emit) {
    const VertexId u = t.source;
    const VertexId v = t.target;
    if (!known(g, u) || !known(g, v) || u == v) return;
    const TimeWindow tw = TimeWindow::ending_at(t.timestamp, delta);

    if (phase == 1) {
        const auto sources_out = g.out_neighbors(u, tw);
        for (const auto& [w, list] : g.out_edges(v)) {
            if (w == u || w == v || !list.any_in(tw)) continue;
            auto inter = intersect(sources_out, g.in_edges(w), tw, u, w);
            if (inter.size() >= 2) emit(ScatterGatherHit{u, std::move(inter), w});
        }
    } else {
        const auto sinks_in = g.in_neighbors(v, tw);
        for (const auto& [w, list] : g.in_edges(u)) {
            if (w == u || w == v || !list.any_in(tw)) continue;
            auto inter = intersect(sinks_in, g.out_edges(w), tw, w, v);
            if (inter.size() >= 2) emit(ScatterGatherHit{w, std::move(inter), v});
        }
    }
}

/// Hop-bounded simple-cycle search for one trigger u->v: paths v -> ... -> u
/// of at most max_length - 1 edges. A backward BFS from u gives each vertex
/// its hop distance to u, which prunes the forward DFS.
class SimpleCycleSearch {
public:
    SimpleCycleSearch(const GraphStore& g, const Trigger& t, Duration window, int max_length)
        : g_(g), u_(t.source), v_(t.target), tw_(TimeWindow::ending_at(t.timestamp, window)),
          max_path_(max_length - 1) {}

    /// Returns false when no cycle can exist.
    bool prepare() {
        if (!known(g_, u_) || !known(g_, v_) || u_ == v_ || max_path_ < 1) return false;
        dist_.emplace(u_, 0);
        std::vector<VertexId> frontier{u_};
        for (int d = 0; d < max_path_ && !frontier.empty(); ++d) {
            std::vector<VertexId> next;
            for (VertexId x : frontier) {
                if (x == v_) continue;
                for (const auto& [y, list] : g_.in_edges(x)) {
                    if (y == u_ || dist_.contains(y) || !list.any_in(tw_)) continue;
                    dist_.emplace(y, d + 1);
                    next.push_back(y);
                }
            }
            frontier = std::move(next);
        }
        return dist_.contains(v_);
    }

    std::vector<VertexId> first_hops() const {
        std::vector<VertexId> hops;
        for (const auto& [y, list] : g_.out_edges(v_)) {
            if (y == v_ || !list.any_in(tw_)) continue;
            if (y == u_ || reachable(y, 1)) hops.push_back(y);
        }
        std::sort(hops.begin(), hops.end());
        return hops;
    }

    void run_branch(VertexId first, SizeHistogram& out) const {
        const auto& list = g_.out_edges(v_).at(first);
        const std::uint64_t k = list.count_in(tw_);
        if (first == u_) {
            out.add(2, k);
            return;
        }
        std::vector<VertexId> path{v_, first};
        dfs(first, 1, k, path, out);
    }

private:
    bool reachable(VertexId y, int depth) const {
        auto it = dist_.find(y);
        return it != dist_.end() && depth + it->second <= max_path_;
    }

    void dfs(VertexId x, int depth, std::uint64_t mult, std::vector<VertexId>& path, SizeHistogram& out) const {
        for (const auto& [y, list] : g_.out_edges(x)) {
            if (y == u_) {
                const std::uint64_t k = list.count_in(tw_);
                if (k > 0) out.add(static_cast<std::size_t>(depth) + 2, mult * k);
                continue;
            }
            if (!reachable(y, depth + 1)) continue;
            if (std::find(path.begin(), path.end(), y) != path.end()) continue;
            const std::uint64_t k = list.count_in(tw_);
            if (k == 0) continue;
            path.push_back(y);
            dfs(y, depth + 1, mult * k, path, out);
            path.pop_back();
        }
    }

    const GraphStore& g_;
    VertexId u_;
    VertexId v_;
    TimeWindow tw_;
    int max_path_;
    std::unordered_map<VertexId, int> dist_;
};

/// Temporal-cycle search for one trigger u->v at time t: paths v -> ... -> u
/// whose edge timestamps strictly increase and stay below t. A backward pass
/// from u computes, per vertex, the latest departure time that can still reach
/// u in time; the forward DFS carries the multiset of arrival times so that
/// parallel edges are counted per time-respecting edge sequence.
class TemporalCycleSearch {
public:
    using Arrivals = std::vector<std::pair<Timestamp, std::uint64_t>>;  // ascending timestamps

    TemporalCycleSearch(const GraphStore& g, const Trigger& t, Duration window, std::optional<int> max_length)
        : g_(g), u_(t.source), v_(t.target), t_(t.timestamp), lo_(t.timestamp - window),
          max_path_(max_length ? *max_length - 1 : -1) {}

    bool prepare() {
        if (!known(g_, u_) || !known(g_, v_) || u_ == v_ || max_path_ == 0) return false;
        using Item = std::pair<Timestamp, VertexId>;
        std::priority_queue<Item> heap;
        latest_[u_] = t_;
        heap.emplace(t_, u_);
        while (!heap.empty()) {
            auto [bound, x] = heap.top();
            heap.pop();
            if (latest_.at(x) != bound || x == v_) continue;
            for (const auto& [y, list] : g_.in_edges(x)) {
                if (y == u_) continue;
                // Latest edge y->x with lo <= ts < bound.
                const std::size_t idx = list.lower_index(bound);
                if (idx == 0) continue;
                const Timestamp ts = list[idx - 1].timestamp;
                if (ts < lo_) continue;
                auto it = latest_.find(y);
                if (it == latest_.end() || it->second < ts) {
                    latest_[y] = ts;
                    heap.emplace(ts, y);
                }
            }
        }
        return latest_.contains(v_);
    }

    std::vector<VertexId> first_hops() const {
        std::vector<VertexId> hops;
        for (const auto& [y, list] : g_.out_edges(v_)) {
            if (y == v_) continue;
            if (y == u_ || latest_.contains(y)) hops.push_back(y);
        }
        std::sort(hops.begin(), hops.end());
        return hops;
    }

    void run_branch(VertexId first, SizeHistogram& out) const {
        const Arrivals start{{lo_ - 1, 1}};
        Arrivals next = step(start, g_.out_edges(v_).at(first), limit(first));
        if (next.empty()) return;
        if (first == u_) {
            out.add(2, total(next));
            return;
        }
        std::vector<VertexId> path{v_, first};
        dfs(first, 1, next, path, out);
    }

private:
    Timestamp limit(VertexId y) const { return y == u_ ? t_ : latest_.at(y); }

    static std::uint64_t total(const Arrivals& a) {
        std::uint64_t s = 0;
        for (const auto& [_, c] : a) s += c;
        return s;
    }

    /// Extends every sequence in `arrivals` by one edge of `list` with
    /// arrival < ts < limit and ts >= lo.
    Arrivals step(const Arrivals& arrivals, const ParallelEdgeList& list, Timestamp limit) const {
        Arrivals next;
        if (arrivals.empty()) return next;
        const Timestamp earliest = std::max(lo_, arrivals.front().first + 1);
        std::size_t i = list.lower_index(earliest);
        const std::size_t end = list.lower_index(limit);
        std::size_t a = 0;
        std::uint64_t ready = 0;
        for (; i < end; ++i) {
            const Timestamp ts = list[i].timestamp;
            while (a < arrivals.size() && arrivals[a].first < ts) ready += arrivals[a++].second;
            if (ready == 0) continue;
            if (!next.empty() && next.back().first == ts) {
                next.back().second += ready;
            } else {
                next.emplace_back(ts, ready);
            }
        }
        return next;
    }

    void dfs(VertexId x, int depth, const Arrivals& arrivals, std::vector<VertexId>& path, SizeHistogram& out) const {
        if (max_path_ >= 0 && depth + 1 > max_path_) return;
        for (const auto& [y, list] : g_.out_edges(x)) {
            if (y != u_ && !latest_.contains(y)) continue;
            if (y != u_ && std::find(path.begin(), path.end(), y) != path.end()) continue;
            Arrivals next = step(arrivals, list, limit(y));
            if (next.empty()) continue;
            if (y == u_) {
                out.add(static_cast<std::size_t>(depth) + 2, total(next));
                continue;
            }
            path.push_back(y);
            dfs(y, depth + 1, next, path, out);
            path.pop_back();
        }
    }

    const GraphStore& g_;
    VertexId u_;
    VertexId v_;
    Timestamp t_;
    Timestamp lo_;
    int max_path_;  // -1: unbounded
    std::unordered_map<VertexId, Timestamp> latest_;
};

}  // namespace

std::vector<ScatterGatherHit> scatter_gather_hits(const GraphStore& graph, const Trigger& trigger, Duration delta_sg) {
    std::vector<ScatterGatherHit> hits;
    auto emit = [&](ScatterGatherHit h) { hits.push_back(std::move(h)); };
    scatter_gather_phase(graph, trigger, delta_sg, 1, emit);
    scatter_gather_phase(graph, trigger, delta_sg, 2, emit);
    std::sort(hits.begin(), hits.end());
    return hits;
}

std::vector<std::vector<ScatterGatherHit>> scatter_gather_stream(const GraphStore& graph,
                                                                 std::span<const Trigger> batch,
                                                                 Duration delta_sg, unsigned workers) {
    std::vector<std::vector<ScatterGatherHit>> result(batch.size());
    detail::parallel_for_each(batch.size(), workers,
                              [&](std::size_t i) { result[i] = scatter_gather_hits(graph, batch[i], delta_sg); });
    return result;
}

SizeHistogram simple_cycle_lengths(const GraphStore& graph, const Trigger& trigger, Duration window, int max_length) {
    SizeHistogram out;
    SimpleCycleSearch search(graph, trigger, window, max_length);
    if (!search.prepare()) return out;
    for (VertexId y : search.first_hops()) search.run_branch(y, out);
    return out;
}

SizeHistogram temporal_cycle_lengths(const GraphStore& graph, const Trigger& trigger, Duration window,
                                     std::optional<int> max_length) {
    SizeHistogram out;
    TemporalCycleSearch search(graph, trigger, window, max_length);
    if (!search.prepare()) return out;
    for (VertexId y : search.first_hops()) search.run_branch(y, out);
    return out;
}

bool gather_scatter_flag(const GraphStore& graph, VertexId v, std::optional<TimeWindow> window) {
    return graph.fan_in(v, window) >= 2 && graph.fan_out(v, window) >= 2;
}

PatternEngine::PatternEngine(MiningConfig config, unsigned workers) : config_(config), workers_(std::max(workers, 1u)) {}

void PatternEngine::set_workers(unsigned workers) { workers_ = std::max(workers, 1u); }

std::vector<PatternReport> PatternEngine::mine_batch(const GraphStore& graph, std::span<const MiningRow> rows) const {
    std::vector<PatternReport> reports(rows.size());
    const auto& cfg = config_;

    // Stage 1, one task per (row, kind): fans, both scatter-gather phases, and
    // the pruning passes of the cycle searches.
    enum Kind { kFans = 0, kSgPhase1, kSgPhase2, kSimplePrep, kTemporalPrep, kKinds };
    std::vector<std::optional<SimpleCycleSearch>> simple(rows.size());
    std::vector<std::optional<TemporalCycleSearch>> temporal(rows.size());
    std::vector<std::vector<VertexId>> simple_hops(rows.size());
    std::vector<std::vector<VertexId>> temporal_hops(rows.size());
    std::vector<SizeHistogram> sg_phase(rows.size() * 2);

    detail::parallel_for_each(rows.size() * kKinds, workers_, [&](std::size_t task) {
        const std::size_t r = task / kKinds;
        const auto kind = static_cast<Kind>(task % kKinds);
        const MiningRow& row = rows[r];
        const Trigger& t = row.trigger;
        PatternReport& rep = reports[r];

        switch (kind) {
            case kFans: {
                const auto fan_window = cfg.windows.delta_fan
                                            ? std::optional<TimeWindow>(TimeWindow::ending_at(t.timestamp, *cfg.windows.delta_fan))
                                            : std::nullopt;
                if (known(graph, t.source)) {
                    rep.src_fan_in = graph.fan_in(t.source, fan_window);
                    rep.src_fan_out = graph.fan_out(t.source, fan_window);
                    rep.gather_scatter_src = rep.src_fan_in >= 2 && rep.src_fan_out >= 2;
                }
                if (known(graph, t.target)) {
                    rep.dst_fan_in = graph.fan_in(t.target, fan_window);
                    rep.dst_fan_out = graph.fan_out(t.target, fan_window);
                    rep.gather_scatter_dst = rep.dst_fan_in >= 2 && rep.dst_fan_out >= 2;
                }
                break;
            }
            case kSgPhase1:
            case kSgPhase2: {
                if (!row.mine_patterns || !cfg.patterns.scatter_gather) break;
                const int phase = kind == kSgPhase1 ? 1 : 2;
                auto& hist = sg_phase[r * 2 + static_cast<std::size_t>(phase - 1)];
                scatter_gather_phase(graph, t, cfg.windows.delta_sg, phase,
                                     [&](const ScatterGatherHit& h) { hist.add(h.intermediates.size()); });
                break;
            }
            case kSimplePrep: {
                if (!row.mine_patterns || !cfg.patterns.simple_cycles) break;
                SimpleCycleSearch s(graph, t, cfg.windows.delta_cycle, cfg.cycles.max_length);
                if (s.prepare()) {
                    simple_hops[r] = s.first_hops();
                    simple[r].emplace(std::move(s));
                }
                break;
            }
            case kTemporalPrep: {
                if (!row.mine_patterns || !cfg.patterns.temporal_cycles) break;
                TemporalCycleSearch s(graph, t, cfg.windows.delta_temporal, cfg.cycles.temporal_max_length);
                if (s.prepare()) {
                    temporal_hops[r] = s.first_hops();
                    temporal[r].emplace(std::move(s));
                }
                break;
            }
            default: break;
        }
    });

    // Stage 2, one task per (row, family, first hop).
    struct Branch {
        std::size_t row;
        bool temporal;
        VertexId hop;
    };
    std::vector<Branch> branches;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (VertexId y : simple_hops[r]) branches.push_back({r, false, y});
        for (VertexId y : temporal_hops[r]) branches.push_back({r, true, y});
    }
    std::vector<SizeHistogram> partial(branches.size());
    detail::parallel_for_each(branches.size(), workers_, [&](std::size_t i) {
        const Branch& b = branches[i];
        if (b.temporal) {
            temporal[b.row]->run_branch(b.hop, partial[i]);
        } else {
            simple[b.row]->run_branch(b.hop, partial[i]);
        }
    });

    for (std::size_t r = 0; r < rows.size(); ++r) {
        reports[r].sg_intermediate_sizes.merge(sg_phase[r * 2]);
        reports[r].sg_intermediate_sizes.merge(sg_phase[r * 2 + 1]);
    }
    for (std::size_t i = 0; i < branches.size(); ++i) {
        auto& rep = reports[branches[i].row];
        (branches[i].temporal ? rep.temporal_cycle_lengths : rep.simple_cycle_lengths).merge(partial[i]);
    }
    return reports;
}

}  // namespace gfp
