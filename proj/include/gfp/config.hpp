#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gfp/types.hpp"

namespace gfp {

struct WindowConfig {
    Duration delta = 86400;  // graph retention window
    bool operator==(const WindowConfig&) const = default;
};

/// Per-pattern windows, each anchored at the trigger edge's timestamp.
struct PatternWindows {
    Duration delta_sg = 6 * 3600;
    Duration delta_cycle = 86400;
    Duration delta_temporal = 86400;
    std::optional<Duration> delta_fan;  // unset: fans over the full retention window
    bool operator==(const PatternWindows&) const = default;
};

struct CycleConstraint {
    int max_length = 10;
    std::optional<int> temporal_max_length;
    bool operator==(const CycleConstraint&) const = default;
};

/// Which multi-hop pattern families are mined. Fans and gather-scatter are always produced.
struct PatternToggles {
    bool simple_cycles = true;
    bool temporal_cycles = true;
    bool scatter_gather = true;
    bool operator==(const PatternToggles&) const = default;
};

enum class Stat { sum, mean, min, max, median, var, skew, kurtosis };

inline constexpr std::array<Stat, 8> kAllStats = {Stat::sum, Stat::mean, Stat::min,  Stat::max,
                                                   Stat::median, Stat::var, Stat::skew, Stat::kurtosis};

const char* to_string(Stat stat);
std::optional<Stat> stat_from_string(std::string_view name);

struct StatConfig {
    std::vector<std::string> attributes = {"Amount", "Timestamp"};
    std::vector<Stat> stats_enabled = {kAllStats.begin(), kAllStats.end()};
    bool operator==(const StatConfig&) const = default;
};

/// Bin k covers sizes in [boundaries[k], boundaries[k+1]); the last bin is open-ended.
/// Sizes below the first boundary fall into the first bin.
struct BinSpec {
    std::vector<int> boundaries;
    bool operator==(const BinSpec&) const = default;

    static BinSpec range(int first, int last);
};

struct BinSpecs {
    BinSpec simple_cycle = BinSpec::range(2, 10);
    BinSpec temporal_cycle = BinSpec::range(2, 30);
    BinSpec scatter_gather = BinSpec::range(2, 10);
    bool operator==(const BinSpecs&) const = default;
};

/// Maps input column names onto roles.
struct InputSchema {
    std::string edge_id = "EdgeID";
    std::string source = "SourceAccountId";
    std::string target = "DestAccountId";
    std::string timestamp = "Timestamp";
    std::vector<std::string> attributes = {"Amount"};
    bool operator==(const InputSchema&) const = default;
};

struct EngineConfig {
    WindowConfig window;
    PatternWindows pattern_windows;
    CycleConstraint cycle_constraint;
    PatternToggles patterns;
    StatConfig stat_config;
    BinSpecs bin_specs;
    InputSchema input_schema;
    unsigned worker_count = 1;
    bool exclude_account_ids = true;

    bool operator==(const EngineConfig&) const = default;

    /// Throws ConfigError naming the first violated constraint.
    void validate() const;
};

std::string to_json(const EngineConfig& config, int indent = 2);

/// Missing keys keep their defaults. Throws ConfigError on malformed input or
/// when the result fails validation.
EngineConfig config_from_json(std::string_view text);

}  // namespace gfp
