#include "gfp/config.hpp"

#include <algorithm>
#include <set>
#include <type_traits>

#include <json.hpp>

namespace gfp {

using nlohmann::json;

const char* to_string(RowStatus status) {
    switch (status) {
        case RowStatus::ok: return "ok";
        case RowStatus::stale: return "stale";
        case RowStatus::duplicate_edge_id: return "duplicate_edge_id";
        case RowStatus::negative_timestamp: return "negative_timestamp";
        case RowStatus::non_finite_attribute: return "non_finite_attribute";
        case RowStatus::malformed: return "malformed";
    }
    return "unknown";
}

const char* to_string(Stat stat) {
    switch (stat) {
        case Stat::sum: return "sum";
        case Stat::mean: return "mean";
        case Stat::min: return "min";
        case Stat::max: return "max";
        case Stat::median: return "median";
        case Stat::var: return "var";
        case Stat::skew: return "skew";
        case Stat::kurtosis: return "kurtosis";
    }
    return "unknown";
}

std::optional<Stat> stat_from_string(std::string_view name) {
    for (Stat s : kAllStats) {
        if (name == to_string(s)) return s;
    }
    return std::nullopt;
}

BinSpec BinSpec::range(int first, int last) {
    BinSpec spec;
    for (int k = first; k <= last; ++k) spec.boundaries.push_back(k);
    return spec;
}

namespace {

void require(bool condition, const std::string& message) {
    if (!condition) throw ConfigError(message);
}

void validate_bins(const BinSpec& bins, const char* family) {
    const std::string name = family;
    require(!bins.boundaries.empty(), name + " bins: boundaries must be non-empty");
    require(bins.boundaries.front() >= 2, name + " bins: first boundary must be >= 2");
    require(std::adjacent_find(bins.boundaries.begin(), bins.boundaries.end(),
                               [](int a, int b) { return a >= b; }) == bins.boundaries.end(),
            name + " bins: boundaries must be strictly increasing");
}

}  // namespace

void EngineConfig::validate() const {
    require(window.delta > 0, "window.delta must be > 0");

    auto check_pattern_window = [&](Duration d, const char* name) {
        require(d >= 0, std::string(name) + " must be >= 0");
        require(d <= window.delta, std::string(name) + " must not exceed the retention window delta");
    };
    check_pattern_window(pattern_windows.delta_sg, "pattern_windows.delta_sg");
    check_pattern_window(pattern_windows.delta_cycle, "pattern_windows.delta_cycle");
    check_pattern_window(pattern_windows.delta_temporal, "pattern_windows.delta_temporal");
    if (pattern_windows.delta_fan) check_pattern_window(*pattern_windows.delta_fan, "pattern_windows.delta_fan");

    require(cycle_constraint.max_length >= 2, "cycle_constraint.max_length must be >= 2");
    if (cycle_constraint.temporal_max_length) {
        require(*cycle_constraint.temporal_max_length >= 2, "cycle_constraint.temporal_max_length must be >= 2");
    }

    validate_bins(bin_specs.simple_cycle, "simple_cycle");
    validate_bins(bin_specs.temporal_cycle, "temporal_cycle");
    validate_bins(bin_specs.scatter_gather, "scatter_gather");

    const auto& in = input_schema;
    require(!in.edge_id.empty() && !in.source.empty() && !in.target.empty() && !in.timestamp.empty(),
            "input_schema: edge_id, source, target and timestamp columns are mandatory");
    std::set<std::string> names = {in.edge_id, in.source, in.target, in.timestamp};
    require(names.size() == 4, "input_schema: role columns must be distinct");
    for (const auto& a : in.attributes) {
        require(!a.empty(), "input_schema: attribute names must be non-empty");
        require(names.insert(a).second, "input_schema: duplicate column '" + a + "'");
    }

    if (!stat_config.stats_enabled.empty()) {
        require(!stat_config.attributes.empty(), "stat_config: attributes must be non-empty when stats are enabled");
    }
    std::set<std::string> stat_attrs;
    for (const auto& a : stat_config.attributes) {
        const bool known = a == in.timestamp ||
                           std::find(in.attributes.begin(), in.attributes.end(), a) != in.attributes.end();
        require(known, "stat_config: attribute '" + a + "' is not an input attribute or the timestamp column");
        require(stat_attrs.insert(a).second, "stat_config: duplicate attribute '" + a + "'");
    }
    std::set<Stat> enabled(stat_config.stats_enabled.begin(), stat_config.stats_enabled.end());
    require(enabled.size() == stat_config.stats_enabled.size(), "stat_config: duplicate stat");

    require(worker_count >= 1, "worker_count must be >= 1");
}

namespace {

json bins_to_json(const BinSpec& b) { return json{{"boundaries", b.boundaries}}; }

template <typename T>
T read_value(const json& v, const char* key) {
    if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!v.is_number_integer()) throw ConfigError(std::string("'") + key + "' must be an integer");
        if constexpr (std::is_unsigned_v<T>) {
            if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
                throw ConfigError(std::string("'") + key + "' must be non-negative");
            }
        }
    }
    return v.get<T>();
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = read_value<T>(j.at(key), key);
}

template <typename T>
void read_nullable(const json& j, const char* key, std::optional<T>& out) {
    if (!j.contains(key)) return;
    if (j.at(key).is_null()) {
        out.reset();
    } else {
        out = read_value<T>(j.at(key), key);
    }
}

void read_bins(const json& j, const char* key, BinSpec& out) {
    if (j.contains(key)) read_opt(j.at(key), "boundaries", out.boundaries);
}

json optional_to_json(const std::optional<Duration>& d) { return d ? json(*d) : json(nullptr); }
json optional_to_json(const std::optional<int>& d) { return d ? json(*d) : json(nullptr); }

}  // namespace

std::string to_json(const EngineConfig& c, int indent) {
    json stats = json::array();
    for (Stat s : c.stat_config.stats_enabled) stats.push_back(to_string(s));

    json j = {
        {"window_config", {{"delta", c.window.delta}}},
        {"pattern_windows",
         {{"delta_sg", c.pattern_windows.delta_sg},
          {"delta_cycle", c.pattern_windows.delta_cycle},
          {"delta_temporal", c.pattern_windows.delta_temporal},
          {"delta_fan", optional_to_json(c.pattern_windows.delta_fan)}}},
        {"cycle_constraint",
         {{"max_length", c.cycle_constraint.max_length},
          {"temporal_max_length", optional_to_json(c.cycle_constraint.temporal_max_length)}}},
        {"patterns",
         {{"simple_cycles", c.patterns.simple_cycles},
          {"temporal_cycles", c.patterns.temporal_cycles},
          {"scatter_gather", c.patterns.scatter_gather}}},
        {"stat_config", {{"attributes", c.stat_config.attributes}, {"stats_enabled", stats}}},
        {"bin_specs",
         {{"simple_cycle", bins_to_json(c.bin_specs.simple_cycle)},
          {"temporal_cycle", bins_to_json(c.bin_specs.temporal_cycle)},
          {"scatter_gather", bins_to_json(c.bin_specs.scatter_gather)}}},
        {"input_schema",
         {{"edge_id", c.input_schema.edge_id},
          {"source", c.input_schema.source},
          {"target", c.input_schema.target},
          {"timestamp", c.input_schema.timestamp},
          {"attributes", c.input_schema.attributes}}},
        {"worker_count", c.worker_count},
        {"exclude_account_ids", c.exclude_account_ids},
    };
    return j.dump(indent);
}

EngineConfig config_from_json(std::string_view text) {
    EngineConfig c;
    try {
        const json j = json::parse(text);
        if (!j.is_object()) throw ConfigError("config must be a JSON object");

        static const std::set<std::string> known = {
            "window_config", "pattern_windows", "cycle_constraint", "patterns",     "stat_config",
            "bin_specs",     "input_schema",    "worker_count",     "exclude_account_ids"};
        for (const auto& [key, _] : j.items()) {
            if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
        }

        if (j.contains("window_config")) read_opt(j.at("window_config"), "delta", c.window.delta);
        if (j.contains("pattern_windows")) {
            const auto& p = j.at("pattern_windows");
            read_opt(p, "delta_sg", c.pattern_windows.delta_sg);
            read_opt(p, "delta_cycle", c.pattern_windows.delta_cycle);
            read_opt(p, "delta_temporal", c.pattern_windows.delta_temporal);
            read_nullable(p, "delta_fan", c.pattern_windows.delta_fan);
        }
        if (j.contains("cycle_constraint")) {
            const auto& p = j.at("cycle_constraint");
            read_opt(p, "max_length", c.cycle_constraint.max_length);
            read_nullable(p, "temporal_max_length", c.cycle_constraint.temporal_max_length);
        }
        if (j.contains("patterns")) {
            const auto& p = j.at("patterns");
            read_opt(p, "simple_cycles", c.patterns.simple_cycles);
            read_opt(p, "temporal_cycles", c.patterns.temporal_cycles);
            read_opt(p, "scatter_gather", c.patterns.scatter_gather);
        }
        if (j.contains("stat_config")) {
            const auto& p = j.at("stat_config");
            read_opt(p, "attributes", c.stat_config.attributes);
            if (p.contains("stats_enabled")) {
                c.stat_config.stats_enabled.clear();
                for (const auto& name : p.at("stats_enabled")) {
                    auto stat = stat_from_string(name.get<std::string>());
                    if (!stat) throw ConfigError("unknown stat '" + name.get<std::string>() + "'");
                    c.stat_config.stats_enabled.push_back(*stat);
                }
            }
        }
        if (j.contains("bin_specs")) {
            const auto& p = j.at("bin_specs");
            read_bins(p, "simple_cycle", c.bin_specs.simple_cycle);
            read_bins(p, "temporal_cycle", c.bin_specs.temporal_cycle);
            read_bins(p, "scatter_gather", c.bin_specs.scatter_gather);
        }
        if (j.contains("input_schema")) {
            const auto& p = j.at("input_schema");
            read_opt(p, "edge_id", c.input_schema.edge_id);
            read_opt(p, "source", c.input_schema.source);
            read_opt(p, "target", c.input_schema.target);
            read_opt(p, "timestamp", c.input_schema.timestamp);
            read_opt(p, "attributes", c.input_schema.attributes);
        }
        read_opt(j, "worker_count", c.worker_count);
        read_opt(j, "exclude_account_ids", c.exclude_account_ids);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    c.validate();
    return c;
}

}  // namespace gfp
