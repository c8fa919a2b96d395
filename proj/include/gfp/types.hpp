#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gfp {

using Timestamp = std::int64_t;
using Duration = std::int64_t;
using VertexId = std::uint32_t;
using EdgeSerial = std::uint64_t;

inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

/// One input edge. `attributes` is aligned with the configured attribute columns.
struct Transaction {
    std::string edge_id;
    std::string source;
    std::string target;
    Timestamp timestamp = 0;
    std::vector<double> attributes;
};

/// Per-row outcome, emitted as the `row_status` feature column.
enum class RowStatus : std::int32_t {
    ok = 0,
    stale = 1,               // older than t_now - delta: scored, not inserted
    duplicate_edge_id = 2,
    negative_timestamp = 3,
    non_finite_attribute = 4,
    malformed = 5,           // flagged by the ingest layer before reaching the engine
};

const char* to_string(RowStatus status);

enum class Direction : std::uint8_t { in = 0, out = 1 };

/// Closed interval [anchor - width, anchor].
struct TimeWindow {
    Timestamp lo = std::numeric_limits<Timestamp>::min();
    Timestamp hi = std::numeric_limits<Timestamp>::max();

    static TimeWindow unbounded() { return {}; }
    static TimeWindow ending_at(Timestamp anchor, Duration width) { return {anchor - width, anchor}; }

    bool contains(Timestamp t) const { return t >= lo && t <= hi; }
};

inline TimeWindow window_or_all(std::optional<Duration> width, Timestamp anchor) {
    return width ? TimeWindow::ending_at(anchor, *width) : TimeWindow::unbounded();
}

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Input does not match the declared schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Operation not permitted in the engine's current lifecycle state, or a broken internal invariant.
class StateError : public Error {
public:
    using Error::Error;
};

}  // namespace gfp
