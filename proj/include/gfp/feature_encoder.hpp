#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gfp/config.hpp"
#include "gfp/pattern_engine.hpp"
#include "gfp/types.hpp"
#include "gfp/vertex_stats.hpp"

namespace gfp {

enum class ColumnKind { integer, real };

struct ColumnSpec {
    std::string name;
    ColumnKind kind = ColumnKind::integer;
    bool operator==(const ColumnSpec&) const = default;
};

/// Contiguous column range for one pattern family.
struct BinBlock {
    std::size_t offset = 0;
    BinSpec bins;
    bool enabled = false;
};

/// Deterministic column layout of a feature row:
///   basic features (timestamp, input attributes, optionally dense account ids),
///   row_status, pattern bins (cycle_len_*, tcycle_len_*, sg_size_*),
///   then per endpoint (src_, dst_): fan_in, fan_out, gather_scatter and one
///   value + presence column per (direction, stat attribute, stat).
class FeatureSchema {
public:
    static FeatureSchema build(const EngineConfig& config);

    const std::vector<ColumnSpec>& columns() const { return columns_; }
    std::size_t size() const { return columns_.size(); }
    std::optional<std::size_t> index_of(std::string_view name) const;

    /// Comma-separated column names.
    std::string header() const;

    bool operator==(const FeatureSchema& other) const { return columns_ == other.columns_; }

private:
    friend class FeatureEncoder;

    std::vector<ColumnSpec> columns_;
    std::size_t attributes_offset_ = 0;
    std::optional<std::size_t> account_ids_offset_;
    std::size_t status_offset_ = 0;
    BinBlock simple_;
    BinBlock temporal_;
    BinBlock sg_;
    std::size_t src_offset_ = 0;
    std::size_t dst_offset_ = 0;
    std::size_t stat_attribute_count_ = 0;
    std::vector<Stat> stats_;
};

/// Bin index for `size`; sizes below the first boundary land in bin 0.
std::size_t bin_index(const BinSpec& bins, std::size_t size);

/// Column names for a bin block. The last bin is `{prefix}_{k}plus` unless
/// `upper_bound` caps sizes at its boundary.
std::vector<std::string> bin_column_names(const std::string& prefix, const BinSpec& bins,
                                          std::optional<int> upper_bound);

/// Lower-case, non-alphanumerics replaced by '_'.
std::string column_token(std::string_view name);

/// Read access to vertex statistics during the feature phase.
struct StatsContext {
    const VertexStats* stats = nullptr;
    const StatsMaintainer* maintainer = nullptr;
};

struct EncodeInput {
    const Transaction* txn = nullptr;
    RowStatus status = RowStatus::ok;
    VertexId source = kNoVertex;
    VertexId target = kNoVertex;
    const PatternReport* report = nullptr;  // null: all pattern columns zero
};

class FeatureEncoder {
public:
    explicit FeatureEncoder(const EngineConfig& config);

    const FeatureSchema& schema() const { return schema_; }

    /// Fills `row` (schema().size() values). Thread-safe.
    void encode(const EncodeInput& in, const StatsContext& stats, std::span<double> row) const;

private:
    void encode_account(VertexId v, std::size_t offset, const PatternReport* report, bool source,
                        const StatsContext& stats, std::span<double> row) const;

    FeatureSchema schema_;
};

/// Rows aligned to a schema. Values are row-major; `row_ids` holds each row's edge id.
struct FeatureTable {
    FeatureSchema schema;
    std::vector<std::string> row_ids;
    std::vector<double> values;

    std::size_t rows() const { return row_ids.size(); }
    std::span<const double> row(std::size_t r) const {
        return {values.data() + r * schema.size(), schema.size()};
    }
    double at(std::size_t r, std::string_view column) const;
};

}  // namespace gfp
