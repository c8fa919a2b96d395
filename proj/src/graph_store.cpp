#include "gfp/graph_store.hpp"

#include <cmath>
#include <sstream>

namespace gfp {

namespace {

bool by_timestamp(const ParallelEdge& a, const ParallelEdge& b) { return a.timestamp < b.timestamp; }

void add_parallel(ParallelEdgeList& list, ParallelEdge e) {
    if (list.empty() || list.back().timestamp <= e.timestamp) {
        list.push_back(e);
    } else {
        list.insert_ordered(e, by_timestamp);
    }
}

void remove_oldest(NeighborMap& map, VertexId key, EdgeSerial serial) {
    auto it = map.find(key);
    if (it == map.end() || it->second.empty() || it->second.front().serial != serial) {
        throw StateError("adjacency index out of sync with transaction log");
    }
    it->second.pop_front();
    if (it->second.empty()) map.erase(it);
}

}  // namespace

std::size_t ParallelEdgeList::lower_index(Timestamp t) const {
    auto it = std::lower_bound(begin(), end(), t, [](const ParallelEdge& e, Timestamp x) { return e.timestamp < x; });
    return static_cast<std::size_t>(it - begin());
}

std::size_t ParallelEdgeList::upper_index(Timestamp t) const {
    auto it = std::upper_bound(begin(), end(), t, [](Timestamp x, const ParallelEdge& e) { return x < e.timestamp; });
    return static_cast<std::size_t>(it - begin());
}

std::size_t ParallelEdgeList::count_in(const TimeWindow& w) const {
    if (empty() || back().timestamp < w.lo || front().timestamp > w.hi) return 0;
    if (front().timestamp >= w.lo && back().timestamp <= w.hi) return size();
    const std::size_t lo = lower_index(w.lo);
    const std::size_t hi = upper_index(w.hi);
    return hi > lo ? hi - lo : 0;
}

bool ParallelEdgeList::any_in(const TimeWindow& w) const {
    if (empty() || back().timestamp < w.lo || front().timestamp > w.hi) return false;
    const std::size_t lo = lower_index(w.lo);
    return lo < size() && (*this)[lo].timestamp <= w.hi;
}

GraphStore::GraphStore(WindowConfig window, std::size_t attribute_count)
    : window_(window), attribute_count_(attribute_count) {
    if (window_.delta <= 0) throw ConfigError("window.delta must be > 0");
}

RowStatus GraphStore::check(const Transaction& txn) const {
    if (txn.attributes.size() != attribute_count_) {
        throw SchemaError("transaction '" + txn.edge_id + "' has " + std::to_string(txn.attributes.size()) +
                          " attributes, expected " + std::to_string(attribute_count_));
    }
    if (txn.timestamp < 0) return RowStatus::negative_timestamp;
    if (seen_ids_.contains(txn.edge_id)) return RowStatus::duplicate_edge_id;
    for (double a : txn.attributes) {
        if (!std::isfinite(a)) return RowStatus::non_finite_attribute;
    }
    if (t_now_ && txn.timestamp < *t_now_ - window_.delta) return RowStatus::stale;
    return RowStatus::ok;
}

InsertOutcome GraphStore::insert(const Transaction& txn) {
    InsertOutcome out;
    out.status = check(txn);
    if (out.status == RowStatus::duplicate_edge_id) return out;
    seen_ids_.insert(txn.edge_id);
    if (out.status != RowStatus::ok) return out;

    out.source = intern(txn.source);
    out.target = intern(txn.target);
    out.serial = append_edge(txn, out.source, out.target);
    return out;
}

VertexId GraphStore::intern(const std::string& key) {
    auto [it, fresh] = ids_.try_emplace(key, static_cast<VertexId>(keys_.size()));
    if (fresh) {
        if (keys_.size() >= kNoVertex) throw StateError("vertex id space exhausted");
        keys_.push_back(key);
        adjacency_.emplace_back();
    }
    return it->second;
}

EdgeSerial GraphStore::append_edge(const Transaction& txn, VertexId src, VertexId dst) {
    const EdgeSerial serial = next_serial_++;
    slots_.push_back(EdgeSlot{txn.edge_id, src, dst, txn.timestamp, true});
    for (double a : txn.attributes) slot_attributes_.push_back(a);

    const LogEntry entry{txn.timestamp, serial};
    if (log_.empty() || log_.back().timestamp <= txn.timestamp) {
        log_.push_back(entry);
    } else {
        log_.insert_ordered(entry, [](const LogEntry& a, const LogEntry& b) { return a.timestamp < b.timestamp; });
    }

    add_parallel(adjacency_[src].out[dst], ParallelEdge{serial, txn.timestamp});
    add_parallel(adjacency_[dst].in[src], ParallelEdge{serial, txn.timestamp});

    if (!t_now_ || txn.timestamp > *t_now_) t_now_ = txn.timestamp;
    if (observer_) observer_->edge_inserted(edge(serial));
    return serial;
}

std::vector<std::string> GraphStore::evict_outdated() {
    std::vector<std::string> evicted;
    if (!t_now_) return evicted;
    const Timestamp cutoff = *t_now_ - window_.delta;

    while (!log_.empty() && log_.front().timestamp < cutoff) {
        const EdgeSerial serial = log_.front().serial;
        auto& slot = slots_[static_cast<std::size_t>(serial - slot_base_)];
        remove_oldest(adjacency_[slot.source].out, slot.target, serial);
        remove_oldest(adjacency_[slot.target].in, slot.source, serial);
        log_.pop_front();

        if (observer_) observer_->edge_removed(edge(serial));
        evicted.push_back(slot.edge_id);
        slot.live = false;
    }
    retire_slots();
    return evicted;
}

void GraphStore::retire_slots() {
    while (!slots_.empty() && !slots_.front().live) {
        slots_.pop_front();
        for (std::size_t i = 0; i < attribute_count_; ++i) slot_attributes_.pop_front();
        ++slot_base_;
    }
}

std::optional<VertexId> GraphStore::find_vertex(std::string_view key) const {
    auto it = ids_.find(std::string(key));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

const std::string& GraphStore::account_key(VertexId v) const {
    if (v >= keys_.size()) throw Error("unknown vertex id " + std::to_string(v));
    return keys_[v];
}

const GraphStore::VertexAdjacency& GraphStore::adjacency(VertexId v) const {
    if (v >= adjacency_.size()) throw Error("unknown vertex id " + std::to_string(v));
    return adjacency_[v];
}

namespace {

std::vector<VertexId> neighbors_in(const NeighborMap& map, const std::optional<TimeWindow>& window) {
    std::vector<VertexId> result;
    result.reserve(map.size());
    for (const auto& [w, list] : map) {
        if (!window || list.any_in(*window)) result.push_back(w);
    }
    std::sort(result.begin(), result.end());
    return result;
}

std::size_t fan_of(const NeighborMap& map, const std::optional<TimeWindow>& window) {
    if (!window) return map.size();
    std::size_t n = 0;
    for (const auto& [_, list] : map) n += list.any_in(*window) ? 1 : 0;
    return n;
}

}  // namespace

std::vector<VertexId> GraphStore::out_neighbors(VertexId v, std::optional<TimeWindow> window) const {
    return neighbors_in(adjacency(v).out, window);
}

std::vector<VertexId> GraphStore::in_neighbors(VertexId v, std::optional<TimeWindow> window) const {
    return neighbors_in(adjacency(v).in, window);
}

std::size_t GraphStore::fan_out(VertexId v, std::optional<TimeWindow> window) const {
    return fan_of(adjacency(v).out, window);
}

std::size_t GraphStore::fan_in(VertexId v, std::optional<TimeWindow> window) const {
    return fan_of(adjacency(v).in, window);
}

std::vector<std::pair<std::string, Timestamp>> GraphStore::parallel_edges(VertexId u, VertexId v) const {
    std::vector<std::pair<std::string, Timestamp>> result;
    adjacency(v);
    const auto& out = adjacency(u).out;
    auto it = out.find(v);
    if (it == out.end()) return result;
    for (const auto& e : it->second) result.emplace_back(edge(e.serial).edge_id, e.timestamp);
    return result;
}

EdgeView GraphStore::edge(EdgeSerial serial) const {
    if (serial < slot_base_ || serial >= next_serial_) throw Error("edge serial out of range");
    const std::size_t idx = static_cast<std::size_t>(serial - slot_base_);
    const auto& slot = slots_[idx];
    EdgeView view;
    view.serial = serial;
    view.edge_id = slot.edge_id;
    view.source = slot.source;
    view.target = slot.target;
    view.timestamp = slot.timestamp;
    if (attribute_count_ > 0) view.attributes = {&slot_attributes_[idx * attribute_count_], attribute_count_};
    return view;
}

void GraphStore::for_each_incident_edge(VertexId v, Direction d,
                                        const std::function<void(const EdgeView&)>& fn) const {
    for (const auto& [_, list] : edges(v, d)) {
        for (const auto& e : list) fn(edge(e.serial));
    }
}

void GraphStore::for_each_live_edge(const std::function<void(const EdgeView&)>& fn) const {
    for (const auto& entry : log_) fn(edge(entry.serial));
}

std::optional<std::string> GraphStore::audit() const {
    std::ostringstream err;
    std::size_t out_total = 0;
    std::size_t in_total = 0;

    for (std::size_t i = 0; i < log_.size(); ++i) {
        const auto& entry = log_[i];
        if (i > 0 && log_[i - 1].timestamp > entry.timestamp) {
            err << "log not sorted at position " << i;
            return err.str();
        }
        if (entry.serial < slot_base_ || entry.serial >= next_serial_ ||
            !slots_[static_cast<std::size_t>(entry.serial - slot_base_)].live) {
            err << "log entry " << entry.serial << " has no live slot";
            return err.str();
        }
    }

    for (VertexId v = 0; v < adjacency_.size(); ++v) {
        for (const auto& [w, list] : adjacency_[v].out) {
            if (list.empty()) {
                err << "empty parallel edge list " << v << "->" << w;
                return err.str();
            }
            const auto& mirror_map = adjacency_[w].in;
            auto mirror = mirror_map.find(v);
            if (mirror == mirror_map.end() || mirror->second.size() != list.size()) {
                err << "incoming mirror missing or differs for " << v << "->" << w;
                return err.str();
            }
            for (std::size_t k = 0; k < list.size(); ++k) {
                const auto& e = list[k];
                if (k > 0 && (list[k - 1].timestamp > e.timestamp ||
                              (list[k - 1].timestamp == e.timestamp && list[k - 1].serial > e.serial))) {
                    err << "parallel edge list " << v << "->" << w << " out of order";
                    return err.str();
                }
                if (mirror->second[k].serial != e.serial || mirror->second[k].timestamp != e.timestamp) {
                    err << "incoming mirror differs for " << v << "->" << w;
                    return err.str();
                }
                if (e.serial < slot_base_ || e.serial >= next_serial_) {
                    err << "dangling serial " << e.serial;
                    return err.str();
                }
                const auto& slot = slots_[static_cast<std::size_t>(e.serial - slot_base_)];
                if (!slot.live || slot.source != v || slot.target != w || slot.timestamp != e.timestamp) {
                    err << "index entry " << e.serial << " disagrees with its edge record";
                    return err.str();
                }
            }
            out_total += list.size();
        }
        for (const auto& [w, list] : adjacency_[v].in) {
            if (list.empty()) {
                err << "empty incoming list " << w << "->" << v;
                return err.str();
            }
            if (!adjacency_[w].out.contains(v)) {
                err << "outgoing mirror missing for " << w << "->" << v;
                return err.str();
            }
            in_total += list.size();
        }
    }

    if (out_total != log_.size() || in_total != log_.size()) {
        err << "edge counts differ: log=" << log_.size() << " out=" << out_total << " in=" << in_total;
        return err.str();
    }
    std::size_t live_slots = 0;
    for (const auto& s : slots_) live_slots += s.live ? 1 : 0;
    if (live_slots != log_.size()) {
        err << "live slot count " << live_slots << " != log length " << log_.size();
        return err.str();
    }
    return std::nullopt;
}

}  // namespace gfp
