#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gfp/gfp.h"

namespace gfpcli {

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// RFC 4180 record reader: comma delimiter, double-quote escaping, quoted
/// fields may span lines, CRLF or LF line endings.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    /// False at end of input. Blank lines are skipped.
    bool next(std::vector<std::string>& fields);
    std::uint64_t line() const { return line_; }

private:
    std::istream& in_;
    std::uint64_t line_ = 0;
};

/// Appends `field` to `out`, quoting when it contains a comma, quote or newline.
void append_field(std::string& out, std::string_view field);

std::optional<std::int64_t> parse_int(std::string_view text);
std::optional<double> parse_double(std::string_view text);

/// "YYYY-MM-DD[(T| )HH:MM[:SS]][Z]" or "YYYY/MM/DD HH:MM" as UTC epoch seconds.
std::optional<std::int64_t> parse_iso_timestamp(std::string_view text);

struct ColumnNames {
    std::string edge_id = "EdgeID";
    std::string source = "SourceAccountId";
    std::string target = "DestAccountId";
    std::string timestamp = "Timestamp";
    std::vector<std::string> attributes = {"Amount"};

    /// Reads input_schema from an engine config JSON document.
    static ColumnNames from_config_json(std::string_view json_text);
};

/// Column-major block of parsed rows that can be handed to the C API
/// without per-row calls.
struct RowBlock {
    std::vector<std::string> edge_ids;
    std::vector<std::string> sources;
    std::vector<std::string> targets;
    std::vector<std::int64_t> timestamps;
    std::vector<double> attributes;  // row-major
    std::vector<std::int32_t> status;
    std::size_t attribute_count = 0;

    std::size_t rows() const { return edge_ids.size(); }
    void clear();

    /// The returned batch borrows from this block and from `scratch`.
    gfp_batch view(std::vector<const char*>& scratch) const;
};

/// Reads transactions using the configured column names. Rows that cannot be
/// parsed are kept and flagged GFP_ROW_MALFORMED so output row counts match
/// input row counts.
class TransactionReader {
public:
    TransactionReader(std::istream& in, ColumnNames names, bool iso_timestamps);

    /// Appends up to `limit` rows to `block`; returns the number appended.
    std::size_t read(RowBlock& block, std::size_t limit);

    std::uint64_t malformed_rows() const { return malformed_; }

private:
    CsvReader csv_;
    ColumnNames names_;
    bool iso_;
    std::size_t header_width_ = 0;
    std::size_t edge_col_ = 0, source_col_ = 0, target_col_ = 0, time_col_ = 0;
    std::vector<std::size_t> attribute_cols_;
    std::vector<std::string> fields_;
    std::uint64_t malformed_ = 0;
};

/// Writes `table` as CSV: the edge id column, then the feature columns.
class TableWriter {
public:
    TableWriter(std::ostream& out, std::string id_column) : out_(out), id_column_(std::move(id_column)) {}

    void write(const gfp_table* table);

private:
    std::ostream& out_;
    std::string id_column_;
    bool header_written_ = false;
    std::string line_;
};

void append_number(std::string& out, double value, bool integer);

}  // namespace gfpcli
