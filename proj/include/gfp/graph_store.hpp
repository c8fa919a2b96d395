#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "gfp/config.hpp"
#include "gfp/types.hpp"

namespace gfp {

/// Vector with O(1) amortized pop_front. Storage is compacted once the
/// consumed prefix dominates.
template <typename T>
class SlidingBuffer {
public:
    using const_iterator = typename std::vector<T>::const_iterator;

    bool empty() const { return head_ == items_.size(); }
    std::size_t size() const { return items_.size() - head_; }

    const T& front() const { return items_[head_]; }
    const T& back() const { return items_.back(); }
    const T& operator[](std::size_t i) const { return items_[head_ + i]; }
    T& operator[](std::size_t i) { return items_[head_ + i]; }

    const_iterator begin() const { return items_.begin() + static_cast<std::ptrdiff_t>(head_); }
    const_iterator end() const { return items_.end(); }

    void push_back(T value) { items_.push_back(std::move(value)); }

    void pop_front() {
        ++head_;
        if (head_ == items_.size()) {
            items_.clear();
            head_ = 0;
        } else if (head_ >= 16 && head_ * 2 >= items_.size()) {
            items_.erase(items_.begin(), items_.begin() + static_cast<std::ptrdiff_t>(head_));
            head_ = 0;
        }
    }

    /// Inserts before the first element that `less(value, element)` holds for,
    /// keeping equal keys in insertion order.
    template <typename Less>
    void insert_ordered(T value, Less less) {
        auto it = std::upper_bound(items_.begin() + static_cast<std::ptrdiff_t>(head_), items_.end(), value, less);
        items_.insert(it, std::move(value));
    }

private:
    std::vector<T> items_;
    std::size_t head_ = 0;
};

struct ParallelEdge {
    EdgeSerial serial;
    Timestamp timestamp;
};

/// Edges between one ordered vertex pair, timestamp ascending (ties by insertion).
class ParallelEdgeList : public SlidingBuffer<ParallelEdge> {
public:
    std::size_t count_in(const TimeWindow& w) const;
    bool any_in(const TimeWindow& w) const;

    /// First edge with timestamp >= t, as an index relative to begin().
    std::size_t lower_index(Timestamp t) const;
    std::size_t upper_index(Timestamp t) const;
};

using NeighborMap = std::unordered_map<VertexId, ParallelEdgeList>;

struct EdgeView {
    EdgeSerial serial = 0;
    std::string_view edge_id;
    VertexId source = kNoVertex;
    VertexId target = kNoVertex;
    Timestamp timestamp = 0;
    std::span<const double> attributes;
};

/// Receives every edge entering or leaving the live graph. Callbacks run after
/// the adjacency index has been updated.
class EdgeObserver {
public:
    virtual ~EdgeObserver() = default;
    virtual void edge_inserted(const EdgeView& edge) = 0;
    virtual void edge_removed(const EdgeView& edge) = 0;
};

struct InsertOutcome {
    RowStatus status = RowStatus::ok;
    VertexId source = kNoVertex;
    VertexId target = kNoVertex;
    EdgeSerial serial = 0;

    bool inserted() const { return status == RowStatus::ok; }
};

/// Sliding-window temporal multigraph: a timestamp-ordered transaction log plus
/// a per-vertex outgoing/incoming adjacency index whose entries hold the
/// parallel edges between a vertex pair.
///
/// Single writer. All const members may run concurrently when no mutation is
/// in flight.
class GraphStore {
public:
    GraphStore(WindowConfig window, std::size_t attribute_count);

    GraphStore(const GraphStore&) = delete;
    GraphStore& operator=(const GraphStore&) = delete;
    GraphStore(GraphStore&&) = default;
    GraphStore& operator=(GraphStore&&) = default;

    void set_observer(EdgeObserver* observer) { observer_ = observer; }

    /// Inserts one transaction. Rows older than t_now - delta come back as
    /// `stale` and are not inserted; rejected rows leave the graph untouched.
    /// Every edge id offered here is remembered for duplicate detection. Throws SchemaError if the attribute
    /// count does not match.
    InsertOutcome insert(const Transaction& txn);

    /// Classifies `txn` without touching the graph.
    RowStatus check(const Transaction& txn) const;

    /// Removes every edge older than t_now - delta. Returns their edge ids, oldest first.
    std::vector<std::string> evict_outdated();

    std::optional<Timestamp> t_now() const { return t_now_; }
    const WindowConfig& window() const { return window_; }
    std::size_t attribute_count() const { return attribute_count_; }

    std::size_t vertex_count() const { return keys_.size(); }
    std::size_t live_edge_count() const { return log_.size(); }

    std::optional<VertexId> find_vertex(std::string_view key) const;
    const std::string& account_key(VertexId v) const;
    bool has_edge_id(const std::string& edge_id) const { return seen_ids_.contains(edge_id); }

    /// Distinct neighbors with at least one parallel edge inside `window`, ascending.
    std::vector<VertexId> out_neighbors(VertexId v, std::optional<TimeWindow> window = std::nullopt) const;
    std::vector<VertexId> in_neighbors(VertexId v, std::optional<TimeWindow> window = std::nullopt) const;

    /// O(1) over the retention window; O(deg) when a window is given.
    std::size_t fan_out(VertexId v, std::optional<TimeWindow> window = std::nullopt) const;
    std::size_t fan_in(VertexId v, std::optional<TimeWindow> window = std::nullopt) const;

    std::vector<std::pair<std::string, Timestamp>> parallel_edges(VertexId u, VertexId v) const;

    const NeighborMap& out_edges(VertexId v) const { return adjacency(v).out; }
    const NeighborMap& in_edges(VertexId v) const { return adjacency(v).in; }
    const NeighborMap& edges(VertexId v, Direction d) const {
        return d == Direction::out ? out_edges(v) : in_edges(v);
    }

    EdgeView edge(EdgeSerial serial) const;

    /// Visits v's live edges in direction `d` (out: v is the source).
    void for_each_incident_edge(VertexId v, Direction d, const std::function<void(const EdgeView&)>& fn) const;

    /// Visits live edges in log order (timestamp ascending).
    void for_each_live_edge(const std::function<void(const EdgeView&)>& fn) const;

    /// Full cross-check of log against index. Returns a description of the
    /// first inconsistency, or nullopt when consistent.
    std::optional<std::string> audit() const;

private:
    friend class SnapshotCodec;

    struct VertexAdjacency {
        NeighborMap out;
        NeighborMap in;
    };

    struct EdgeSlot {
        std::string edge_id;
        VertexId source = kNoVertex;
        VertexId target = kNoVertex;
        Timestamp timestamp = 0;
        bool live = false;
    };

    struct LogEntry {
        Timestamp timestamp;
        EdgeSerial serial;
    };

    const VertexAdjacency& adjacency(VertexId v) const;
    VertexId intern(const std::string& key);
    EdgeSerial append_edge(const Transaction& txn, VertexId src, VertexId dst);
    void retire_slots();

    WindowConfig window_;
    std::size_t attribute_count_;
    EdgeObserver* observer_ = nullptr;

    std::unordered_map<std::string, VertexId> ids_;
    std::vector<std::string> keys_;
    std::vector<VertexAdjacency> adjacency_;

    SlidingBuffer<LogEntry> log_;
    SlidingBuffer<EdgeSlot> slots_;  // indexed by serial - slot_base_
    SlidingBuffer<double> slot_attributes_;
    EdgeSerial slot_base_ = 0;
    EdgeSerial next_serial_ = 0;

    std::unordered_set<std::string> seen_ids_;
    std::optional<Timestamp> t_now_;
};

}  // namespace gfp
