#include "gfp/feature_encoder.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace gfp {

std::string column_token(std::string_view name) {
    std::string out;
    out.reserve(name.size());
    for (char c : name) {
        const auto uc = static_cast<unsigned char>(c);
        out.push_back(std::isalnum(uc) ? static_cast<char>(std::tolower(uc)) : '_');
    }
    return out;
}

std::size_t bin_index(const BinSpec& bins, std::size_t size) {
    const auto& b = bins.boundaries;
    auto it = std::upper_bound(b.begin(), b.end(), static_cast<long long>(size),
                               [](long long s, int boundary) { return s < boundary; });
    if (it == b.begin()) return 0;
    return static_cast<std::size_t>(it - b.begin()) - 1;
}

std::vector<std::string> bin_column_names(const std::string& prefix, const BinSpec& bins,
                                          std::optional<int> upper_bound) {
    std::vector<std::string> names;
    const auto& b = bins.boundaries;
    for (std::size_t k = 0; k < b.size(); ++k) {
        const std::string lo = std::to_string(b[k]);
        if (k + 1 == b.size()) {
            if (!upper_bound) {
                names.push_back(prefix + "_" + lo + "plus");
            } else if (*upper_bound > b[k]) {
                names.push_back(prefix + "_" + lo + "to" + std::to_string(*upper_bound));
            } else {
                names.push_back(prefix + "_" + lo);
            }
        } else if (b[k + 1] == b[k] + 1) {
            names.push_back(prefix + "_" + lo);
        } else {
            names.push_back(prefix + "_" + lo + "to" + std::to_string(b[k + 1] - 1));
        }
    }
    return names;
}

namespace {

const char* direction_token(Direction d) { return d == Direction::in ? "in" : "out"; }

constexpr Direction kDirections[] = {Direction::in, Direction::out};

}  // namespace

FeatureSchema FeatureSchema::build(const EngineConfig& config) {
    FeatureSchema s;
    auto& cols = s.columns_;
    const auto& in = config.input_schema;

    cols.push_back({in.timestamp, ColumnKind::integer});
    s.attributes_offset_ = cols.size();
    for (const auto& a : in.attributes) cols.push_back({a, ColumnKind::real});
    if (!config.exclude_account_ids) {
        s.account_ids_offset_ = cols.size();
        cols.push_back({in.source, ColumnKind::integer});
        cols.push_back({in.target, ColumnKind::integer});
    }

    s.status_offset_ = cols.size();
    cols.push_back({"row_status", ColumnKind::integer});

    auto add_bins = [&](BinBlock& block, bool enabled, const char* prefix, const BinSpec& bins,
                        std::optional<int> upper) {
        block.enabled = enabled;
        block.bins = bins;
        block.offset = cols.size();
        if (!enabled) return;
        for (auto& name : bin_column_names(prefix, bins, upper)) cols.push_back({std::move(name), ColumnKind::integer});
    };
    add_bins(s.simple_, config.patterns.simple_cycles, "cycle_len", config.bin_specs.simple_cycle,
             config.cycle_constraint.max_length);
    add_bins(s.temporal_, config.patterns.temporal_cycles, "tcycle_len", config.bin_specs.temporal_cycle,
             config.cycle_constraint.temporal_max_length);
    add_bins(s.sg_, config.patterns.scatter_gather, "sg_size", config.bin_specs.scatter_gather, std::nullopt);

    for (Stat stat : kAllStats) {
        const auto& enabled = config.stat_config.stats_enabled;
        if (std::find(enabled.begin(), enabled.end(), stat) != enabled.end()) s.stats_.push_back(stat);
    }
    s.stat_attribute_count_ = s.stats_.empty() ? 0 : config.stat_config.attributes.size();

    for (const char* endpoint : {"src", "dst"}) {
        (std::string_view(endpoint) == "src" ? s.src_offset_ : s.dst_offset_) = cols.size();
        const std::string p = endpoint;
        cols.push_back({p + "_fan_in", ColumnKind::integer});
        cols.push_back({p + "_fan_out", ColumnKind::integer});
        cols.push_back({p + "_gather_scatter", ColumnKind::integer});
        for (Direction d : kDirections) {
            for (std::size_t a = 0; a < s.stat_attribute_count_; ++a) {
                const std::string base =
                    p + "_" + direction_token(d) + "_" + column_token(config.stat_config.attributes[a]) + "_";
                for (Stat stat : s.stats_) {
                    cols.push_back({base + to_string(stat), ColumnKind::real});
                    cols.push_back({base + to_string(stat) + "_present", ColumnKind::integer});
                }
            }
        }
    }

    std::set<std::string> seen;
    for (const auto& c : cols) {
        if (!seen.insert(c.name).second) throw ConfigError("duplicate feature column '" + c.name + "'");
    }
    return s;
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i].name == name) return i;
    }
    return std::nullopt;
}

std::string FeatureSchema::header() const {
    std::string out;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i > 0) out.push_back(',');
        out += columns_[i].name;
    }
    return out;
}

FeatureEncoder::FeatureEncoder(const EngineConfig& config) : schema_(FeatureSchema::build(config)) {}

void FeatureEncoder::encode(const EncodeInput& in, const StatsContext& stats, std::span<double> row) const {
    if (row.size() != schema_.size()) throw Error("feature row size mismatch");
    std::fill(row.begin(), row.end(), 0.0);
    const Transaction& txn = *in.txn;

    row[0] = static_cast<double>(txn.timestamp);
    for (std::size_t a = 0; a < txn.attributes.size(); ++a) row[schema_.attributes_offset_ + a] = txn.attributes[a];
    if (schema_.account_ids_offset_) {
        row[*schema_.account_ids_offset_] = in.source == kNoVertex ? -1.0 : static_cast<double>(in.source);
        row[*schema_.account_ids_offset_ + 1] = in.target == kNoVertex ? -1.0 : static_cast<double>(in.target);
    }
    row[schema_.status_offset_] = static_cast<double>(static_cast<std::int32_t>(in.status));

    if (in.report != nullptr) {
        auto fill = [&](const BinBlock& block, const SizeHistogram& hist) {
            if (!block.enabled) return;
            for (std::size_t size = 0; size <= hist.max_size(); ++size) {
                const auto c = hist.count(size);
                if (c > 0) row[block.offset + bin_index(block.bins, size)] += static_cast<double>(c);
            }
        };
        fill(schema_.simple_, in.report->simple_cycle_lengths);
        fill(schema_.temporal_, in.report->temporal_cycle_lengths);
        fill(schema_.sg_, in.report->sg_intermediate_sizes);
    }

    encode_account(in.source, schema_.src_offset_, in.report, true, stats, row);
    encode_account(in.target, schema_.dst_offset_, in.report, false, stats, row);
}

void FeatureEncoder::encode_account(VertexId v, std::size_t offset, const PatternReport* report, bool source,
                                    const StatsContext& stats, std::span<double> row) const {
    if (report != nullptr) {
        const auto fan_in = source ? report->src_fan_in : report->dst_fan_in;
        const auto fan_out = source ? report->src_fan_out : report->dst_fan_out;
        const bool gs = source ? report->gather_scatter_src : report->gather_scatter_dst;
        row[offset] = static_cast<double>(fan_in);
        row[offset + 1] = static_cast<double>(fan_out);
        row[offset + 2] = gs ? 1.0 : 0.0;
    }

    const std::size_t n_attr = schema_.stat_attribute_count_;
    if (v == kNoVertex || n_attr == 0 || stats.stats == nullptr) return;

    const bool needs_order = std::any_of(schema_.stats_.begin(), schema_.stats_.end(),
                                         [](Stat s) { return s == Stat::min || s == Stat::max || s == Stat::median; });
    const std::size_t per_attr = schema_.stats_.size() * 2;
    std::size_t col = offset + 3;

    for (Direction d : kDirections) {
        std::vector<std::optional<OrderStats>> order(n_attr);
        if (needs_order && stats.maintainer != nullptr) {
            std::vector<std::vector<double>> values(n_attr);
            stats.maintainer->scan(v, d)([&](std::span<const double> obs) {
                for (std::size_t a = 0; a < n_attr; ++a) values[a].push_back(obs[a]);
            });
            for (std::size_t a = 0; a < n_attr; ++a) order[a] = order_stats(std::move(values[a]));
        }

        for (std::size_t a = 0; a < n_attr; ++a, col += per_attr) {
            const auto& acc = stats.stats->accumulator(v, d, a);
            std::size_t c = col;
            for (Stat s : schema_.stats_) {
                std::optional<double> value;
                switch (s) {
                    case Stat::sum: value = acc.n ? std::optional(acc.sum()) : std::nullopt; break;
                    case Stat::mean: value = acc.n ? std::optional(acc.mean) : std::nullopt; break;
                    case Stat::var: value = acc.n ? std::optional(acc.variance()) : std::nullopt; break;
                    case Stat::skew: value = acc.n ? std::optional(acc.skew()) : std::nullopt; break;
                    case Stat::kurtosis: value = acc.n ? std::optional(acc.kurtosis()) : std::nullopt; break;
                    case Stat::min: if (order[a]) value = order[a]->min; break;
                    case Stat::max: if (order[a]) value = order[a]->max; break;
                    case Stat::median: if (order[a]) value = order[a]->median; break;
                }
                row[c] = value.value_or(0.0);
                row[c + 1] = value ? 1.0 : 0.0;
                c += 2;
            }
        }
    }
}

double FeatureTable::at(std::size_t r, std::string_view column) const {
    auto idx = schema.index_of(column);
    if (!idx) throw Error("no feature column '" + std::string(column) + "'");
    return values[r * schema.size() + *idx];
}

}  // namespace gfp
