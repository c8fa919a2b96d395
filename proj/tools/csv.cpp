#include "csv.hpp"

#include <charconv>
#include <cmath>
#include <json.hpp>
#include <limits>

namespace gfpcli {

bool CsvReader::next(std::vector<std::string>& fields) {
    auto* buf = in_.rdbuf();
    using traits = std::char_traits<char>;
    for (;;) {
        fields.clear();
        if (buf == nullptr || traits::eq_int_type(buf->sgetc(), traits::eof())) return false;

        std::string field;
        bool quoted = false;
        bool any = false;
        for (;;) {
            const auto c = buf->sbumpc();
            if (traits::eq_int_type(c, traits::eof())) {
                if (quoted) throw DataError("unterminated quoted field at line " + std::to_string(line_ + 1));
                break;
            }
            const char ch = traits::to_char_type(c);
            any = true;
            if (quoted) {
                if (ch == '"') {
                    if (buf->sgetc() == '"') {
                        buf->sbumpc();
                        field.push_back('"');
                    } else {
                        quoted = false;
                    }
                } else {
                    if (ch == '\n') ++line_;
                    field.push_back(ch);
                }
                continue;
            }
            if (ch == '"' && field.empty()) {
                quoted = true;
            } else if (ch == ',') {
                fields.push_back(std::move(field));
                field.clear();
            } else if (ch == '\n') {
                break;
            } else if (ch == '\r') {
                if (buf->sgetc() == '\n') buf->sbumpc();
                break;
            } else {
                field.push_back(ch);
            }
        }
        ++line_;
        if (!any || (fields.empty() && field.empty())) {
            if (traits::eq_int_type(buf->sgetc(), traits::eof()) && !any) return false;
            continue;
        }
        fields.push_back(std::move(field));
        return true;
    }
}

void append_field(std::string& out, std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        out.append(field);
        return;
    }
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool is_leap(std::int64_t y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

unsigned days_in_month(std::int64_t y, unsigned m) {
    static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

bool take_digits(std::string_view& s, std::size_t n, int& out) {
    if (s.size() < n) return false;
    int v = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        v = v * 10 + (s[i] - '0');
    }
    out = v;
    s.remove_prefix(n);
    return true;
}

bool take_char(std::string_view& s, char c) {
    if (s.empty() || s.front() != c) return false;
    s.remove_prefix(1);
    return true;
}

}  // namespace

std::optional<std::int64_t> parse_int(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size() || text.empty()) return std::nullopt;
    return v;
}

std::optional<double> parse_double(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return std::nullopt;
    double v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc::result_out_of_range) {
        return text.front() == '-' ? -std::numeric_limits<double>::infinity()
                                   : std::numeric_limits<double>::infinity();
    }
    if (ec != std::errc() || p != text.data() + text.size()) return std::nullopt;
    return v;
}

std::optional<std::int64_t> parse_iso_timestamp(std::string_view text) {
    std::string_view s = trim(text);
    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    if (!take_digits(s, 4, year)) return std::nullopt;
    const char sep = s.empty() ? '\0' : s.front();
    if (sep != '-' && sep != '/') return std::nullopt;
    s.remove_prefix(1);
    if (!take_digits(s, 2, month) || !take_char(s, sep) || !take_digits(s, 2, day)) return std::nullopt;
    if (!s.empty()) {
        if (!take_char(s, 'T') && !take_char(s, ' ')) return std::nullopt;
        if (!take_digits(s, 2, hour) || !take_char(s, ':') || !take_digits(s, 2, minute)) return std::nullopt;
        if (take_char(s, ':') && !take_digits(s, 2, second)) return std::nullopt;
        take_char(s, 'Z');
        if (!s.empty()) return std::nullopt;
    }
    if (month < 1 || month > 12 || day < 1 || static_cast<unsigned>(day) > days_in_month(year, month)) {
        return std::nullopt;
    }
    if (hour > 23 || minute > 59 || second > 59) return std::nullopt;
    return days_from_civil(year, month, day) * 86400 + hour * 3600 + minute * 60 + second;
}

ColumnNames ColumnNames::from_config_json(std::string_view json_text) {
    ColumnNames names;
    const auto j = nlohmann::json::parse(json_text);
    const auto& s = j.at("input_schema");
    names.edge_id = s.at("edge_id").get<std::string>();
    names.source = s.at("source").get<std::string>();
    names.target = s.at("target").get<std::string>();
    names.timestamp = s.at("timestamp").get<std::string>();
    names.attributes = s.at("attributes").get<std::vector<std::string>>();
    return names;
}

void RowBlock::clear() {
    edge_ids.clear();
    sources.clear();
    targets.clear();
    timestamps.clear();
    attributes.clear();
    status.clear();
}

gfp_batch RowBlock::view(std::vector<const char*>& scratch) const {
    const std::size_t n = rows();
    scratch.resize(3 * n);
    for (std::size_t i = 0; i < n; ++i) {
        scratch[i] = edge_ids[i].c_str();
        scratch[n + i] = sources[i].c_str();
        scratch[2 * n + i] = targets[i].c_str();
    }
    gfp_batch b{};
    b.rows = n;
    b.edge_ids = scratch.data();
    b.sources = scratch.data() + n;
    b.targets = scratch.data() + 2 * n;
    b.timestamps = timestamps.data();
    b.attribute_count = attribute_count;
    b.attributes = attributes.data();
    b.row_status = status.data();
    return b;
}

TransactionReader::TransactionReader(std::istream& in, ColumnNames names, bool iso_timestamps)
    : csv_(in), names_(std::move(names)), iso_(iso_timestamps) {
    std::vector<std::string> header;
    if (!csv_.next(header)) throw DataError("input has no header row");
    if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].erase(0, 3);
    header_width_ = header.size();

    std::string missing;
    auto find = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        missing += (missing.empty() ? "" : ", ") + name;
        return 0;
    };
    edge_col_ = find(names_.edge_id);
    source_col_ = find(names_.source);
    target_col_ = find(names_.target);
    time_col_ = find(names_.timestamp);
    for (const auto& a : names_.attributes) attribute_cols_.push_back(find(a));
    if (!missing.empty()) throw DataError("input is missing required columns: " + missing);
}

std::size_t TransactionReader::read(RowBlock& block, std::size_t limit) {
    block.attribute_count = attribute_cols_.size();
    std::size_t added = 0;
    while (added < limit && csv_.next(fields_)) {
        ++added;
        bool ok = fields_.size() == header_width_;
        auto field = [&](std::size_t col) -> std::string_view {
            return col < fields_.size() ? std::string_view(fields_[col]) : std::string_view();
        };
        block.edge_ids.emplace_back(field(edge_col_));
        block.sources.emplace_back(field(source_col_));
        block.targets.emplace_back(field(target_col_));

        std::optional<std::int64_t> ts = iso_ ? parse_iso_timestamp(field(time_col_)) : parse_int(field(time_col_));
        ok = ok && ts.has_value();
        block.timestamps.push_back(ts.value_or(0));
        for (std::size_t col : attribute_cols_) {
            auto v = parse_double(field(col));
            ok = ok && v.has_value();
            block.attributes.push_back(v.value_or(0.0));
        }
        ok = ok && !block.edge_ids.back().empty() && !block.sources.back().empty() && !block.targets.back().empty();
        block.status.push_back(ok ? GFP_ROW_OK : GFP_ROW_MALFORMED);
        if (!ok) ++malformed_;
    }
    return added;
}

void append_number(std::string& out, double value, bool integer) {
    char buf[64];
    std::to_chars_result r;
    if (integer && std::isfinite(value) && std::abs(value) < 9.2e18) {
        r = std::to_chars(buf, buf + sizeof(buf), static_cast<std::int64_t>(value));
    } else if (std::isnan(value)) {
        out.append("nan");
        return;
    } else {
        r = std::to_chars(buf, buf + sizeof(buf), value);
    }
    out.append(buf, r.ptr);
}

void TableWriter::write(const gfp_table* table) {
    const std::size_t cols = gfp_table_columns(table);
    if (!header_written_) {
        line_.clear();
        append_field(line_, id_column_);
        for (std::size_t c = 0; c < cols; ++c) {
            line_.push_back(',');
            append_field(line_, gfp_table_column_name(table, c));
        }
        line_.push_back('\n');
        out_ << line_;
        header_written_ = true;
    }
    std::vector<bool> integer(cols);
    for (std::size_t c = 0; c < cols; ++c) integer[c] = gfp_table_column_is_integer(table, c) != 0;

    const double* data = gfp_table_data(table);
    const std::size_t rows = gfp_table_rows(table);
    for (std::size_t r = 0; r < rows; ++r) {
        line_.clear();
        append_field(line_, gfp_table_row_id(table, r));
        const double* row = data + r * cols;
        for (std::size_t c = 0; c < cols; ++c) {
            line_.push_back(',');
            append_number(line_, row[c], integer[c]);
        }
        line_.push_back('\n');
        out_ << line_;
    }
}

}  // namespace gfpcli
