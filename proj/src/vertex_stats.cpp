#include "gfp/vertex_stats.hpp"

#include <algorithm>
#include <cmath>

namespace gfp {

void MomentAccumulator::add(double x) {
    const double n1 = static_cast<double>(n);
    ++n;
    const double nn = static_cast<double>(n);
    const double delta = x - mean;
    const double dn = delta / nn;
    const double dn2 = dn * dn;
    const double term1 = delta * dn * n1;
    mean += dn;
    m4 += term1 * dn2 * (nn * nn - 3.0 * nn + 3.0) + 6.0 * dn2 * m2 - 4.0 * dn * m3;
    m3 += term1 * dn * (nn - 2.0) - 3.0 * dn * m2;
    m2 += term1;
}

void MomentAccumulator::remove(double x) {
    if (n == 0) throw StateError("remove from empty moment accumulator");
    if (n == 1) {
        reset();
        return;
    }
    const double nn = static_cast<double>(n);
    const double n1 = nn - 1.0;
    const double mean_old = mean - (x - mean) / n1;
    const double delta = x - mean_old;
    const double dn = delta / nn;
    const double dn2 = dn * dn;
    const double term1 = delta * dn * n1;

    const double m2_old = m2 - term1;
    const double m3_old = m3 - term1 * dn * (nn - 2.0) + 3.0 * dn * m2_old;
    const double m4_old = m4 - term1 * dn2 * (nn * nn - 3.0 * nn + 3.0) - 6.0 * dn2 * m2_old + 4.0 * dn * m3_old;

    --n;
    mean = mean_old;
    m2 = m2_old;
    m3 = m3_old;
    m4 = m4_old;
    if (n == 2) {
        // Two points sit symmetrically about their mean; drop the cancellation residue.
        m3 = 0.0;
        m4 = m2 * m2 / 2.0;
    }
}

double MomentAccumulator::variance() const {
    if (n == 0) return 0.0;
    return std::max(m2, 0.0) / static_cast<double>(n);
}

bool MomentAccumulator::zero_spread() const {
    if (n == 0 || m2 <= 0.0) return true;
    // Spread below double resolution of the mean is rounding residue.
    return variance() <= 1e-28 * mean * mean;
}

double MomentAccumulator::skew() const {
    if (zero_spread()) return 0.0;
    const double var = variance();
    return (m3 / static_cast<double>(n)) / (var * std::sqrt(var));
}

double MomentAccumulator::kurtosis() const {
    if (zero_spread()) return 0.0;
    const double var = variance();
    return (m4 / static_cast<double>(n)) / (var * var);
}

std::optional<OrderStats> order_stats(std::vector<double> values) {
    if (values.empty()) return std::nullopt;
    std::sort(values.begin(), values.end());
    OrderStats s;
    s.min = values.front();
    s.max = values.back();
    const std::size_t mid = values.size() / 2;
    s.median = values.size() % 2 == 1 ? values[mid] : (values[mid - 1] + values[mid]) / 2.0;
    return s;
}

VertexStats::VertexStats(std::size_t attribute_count) : attribute_count_(attribute_count) {}

VertexStats::DirectionState& VertexStats::state(VertexId v, Direction d) {
    const std::size_t idx = 2 * static_cast<std::size_t>(v) + static_cast<std::size_t>(d);
    if (idx >= states_.size()) states_.resize(idx + 1);
    auto& s = states_[idx];
    if (s.acc.size() != attribute_count_) {
        s.acc.assign(attribute_count_, MomentAccumulator{});
        s.peak_m2.assign(attribute_count_, 0.0);
    }
    return s;
}

const VertexStats::DirectionState* VertexStats::find_state(VertexId v, Direction d) const {
    const std::size_t idx = 2 * static_cast<std::size_t>(v) + static_cast<std::size_t>(d);
    if (idx >= states_.size() || states_[idx].acc.size() != attribute_count_) return nullptr;
    return &states_[idx];
}

bool VertexStats::on_insert(VertexId v, Direction d, std::span<const double> values) {
    if (values.size() != attribute_count_) throw SchemaError("stat attribute count mismatch");
    for (double x : values) {
        if (!std::isfinite(x)) return false;
    }
    auto& s = state(v, d);
    for (std::size_t a = 0; a < attribute_count_; ++a) {
        s.acc[a].add(values[a]);
        s.peak_m2[a] = std::max(s.peak_m2[a], s.acc[a].m2);
    }
    if (attribute_count_ > 0) s.peak_n = std::max(s.peak_n, s.acc[0].n);
    return true;
}

bool VertexStats::needs_rebuild(const DirectionState& s) const {
    if (attribute_count_ == 0) return false;
    const std::uint64_t n = s.acc[0].n;
    if (n == 0) return false;
    if (n <= kExactRebuildCount) return true;
    if (s.removals_since_rebuild >= kAuditInterval) return true;
    if (n * 4 < s.peak_n) return true;
    for (std::size_t a = 0; a < attribute_count_; ++a) {
        const auto& acc = s.acc[a];
        if (acc.m2 < -1e-9 * acc.mean * acc.mean * static_cast<double>(acc.n)) return true;
        if (s.peak_m2[a] > 0.0 && acc.m2 * 16.0 < s.peak_m2[a]) return true;
    }
    return false;
}

void VertexStats::on_remove(VertexId v, Direction d, std::span<const double> values, const ObservationScan& scan) {
    if (values.size() != attribute_count_) throw SchemaError("stat attribute count mismatch");
    auto* existing = find_state(v, d);
    if (attribute_count_ == 0) return;
    if (existing == nullptr || existing->acc[0].n == 0) {
        throw StateError("remove from empty accumulator of vertex " + std::to_string(v));
    }
    auto& s = state(v, d);
    for (std::size_t a = 0; a < attribute_count_; ++a) s.acc[a].remove(values[a]);
    ++s.removals_since_rebuild;

    if (s.acc[0].n == 0) {
        for (auto& acc : s.acc) acc.reset();
        std::fill(s.peak_m2.begin(), s.peak_m2.end(), 0.0);
        s.peak_n = 0;
        s.removals_since_rebuild = 0;
    } else if (needs_rebuild(s)) {
        rebuild(v, d, scan);
    }
}

void VertexStats::rebuild(VertexId v, Direction d, const ObservationScan& scan) {
    auto& s = state(v, d);
    std::vector<std::vector<double>> columns(attribute_count_);
    scan([&](std::span<const double> values) {
        for (std::size_t a = 0; a < attribute_count_; ++a) columns[a].push_back(values[a]);
    });

    for (std::size_t a = 0; a < attribute_count_; ++a) {
        const auto& xs = columns[a];
        MomentAccumulator acc;
        acc.n = xs.size();
        if (!xs.empty()) {
            // Extended precision keeps odd moments of symmetric data at zero.
            long double sum = 0.0L;
            for (double x : xs) sum += x;
            const long double mean = sum / static_cast<long double>(xs.size());
            long double m2 = 0.0L, m3 = 0.0L, m4 = 0.0L;
            for (double x : xs) {
                const long double dx = x - mean;
                const long double dx2 = dx * dx;
                m2 += dx2;
                m3 += dx2 * dx;
                m4 += dx2 * dx2;
            }
            acc.mean = static_cast<double>(mean);
            acc.m2 = static_cast<double>(m2);
            acc.m3 = static_cast<double>(m3);
            acc.m4 = static_cast<double>(m4);
        }
        s.acc[a] = acc;
        s.peak_m2[a] = acc.m2;
    }
    s.peak_n = attribute_count_ > 0 ? s.acc[0].n : 0;
    s.removals_since_rebuild = 0;
    ++rebuilds_;
}

const MomentAccumulator& VertexStats::accumulator(VertexId v, Direction d, std::size_t attr) const {
    static const MomentAccumulator empty{};
    const auto* s = find_state(v, d);
    if (s == nullptr || attr >= s->acc.size()) return empty;
    return s->acc[attr];
}

std::optional<double> VertexStats::query_stat(VertexId v, Direction d, std::size_t attr, Stat stat,
                                              const ObservationScan& scan) const {
    if (attr >= attribute_count_) throw Error("stat attribute index out of range");

    if (stat == Stat::min || stat == Stat::max || stat == Stat::median) {
        std::vector<double> values;
        scan([&](std::span<const double> obs) { values.push_back(obs[attr]); });
        auto os = order_stats(std::move(values));
        if (!os) return std::nullopt;
        if (stat == Stat::min) return os->min;
        if (stat == Stat::max) return os->max;
        return os->median;
    }

    const auto& acc = accumulator(v, d, attr);
    if (acc.n == 0) return std::nullopt;
    switch (stat) {
        case Stat::sum: return acc.sum();
        case Stat::mean: return acc.mean;
        case Stat::var: return acc.variance();
        case Stat::skew: return acc.skew();
        case Stat::kurtosis: return acc.kurtosis();
        default: break;
    }
    return std::nullopt;
}

StatsMaintainer::StatsMaintainer(const GraphStore& graph, VertexStats& stats, std::vector<int> projection)
    : graph_(graph), stats_(stats), projection_(std::move(projection)) {
    if (projection_.size() != stats_.attribute_count()) throw ConfigError("stat projection size mismatch");
}

std::vector<int> StatsMaintainer::projection_for(const EngineConfig& config) {
    std::vector<int> projection;
    const auto& inputs = config.input_schema.attributes;
    for (const auto& name : config.stat_config.attributes) {
        if (name == config.input_schema.timestamp) {
            projection.push_back(kTimestampSource);
            continue;
        }
        auto it = std::find(inputs.begin(), inputs.end(), name);
        if (it == inputs.end()) throw ConfigError("stat attribute '" + name + "' is not an input attribute");
        projection.push_back(static_cast<int>(it - inputs.begin()));
    }
    return projection;
}

void StatsMaintainer::project(const EdgeView& edge, std::span<double> out) const {
    for (std::size_t k = 0; k < projection_.size(); ++k) {
        const int src = projection_[k];
        out[k] = src == kTimestampSource ? static_cast<double>(edge.timestamp)
                                         : edge.attributes[static_cast<std::size_t>(src)];
    }
}

ObservationScan StatsMaintainer::scan(VertexId v, Direction d) const {
    return [this, v, d](const std::function<void(std::span<const double>)>& visit) {
        std::vector<double> buf(projection_.size());
        graph_.for_each_incident_edge(v, d, [&](const EdgeView& e) {
            project(e, buf);
            visit(buf);
        });
    };
}

void StatsMaintainer::edge_inserted(const EdgeView& edge) {
    if (projection_.empty()) return;
    std::vector<double> values(projection_.size());
    project(edge, values);
    stats_.on_insert(edge.source, Direction::out, values);
    stats_.on_insert(edge.target, Direction::in, values);
}

void StatsMaintainer::edge_removed(const EdgeView& edge) {
    if (projection_.empty()) return;
    std::vector<double> values(projection_.size());
    project(edge, values);
    stats_.on_remove(edge.source, Direction::out, values, scan(edge.source, Direction::out));
    stats_.on_remove(edge.target, Direction::in, values, scan(edge.target, Direction::in));
}

}  // namespace gfp
