// Acceptance runner: one PASS/FAIL line per criterion.
//
//   gfp_acceptance            run every criterion
//   gfp_acceptance <name>...  run the named ones
//
// Exit status is 0 only when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>
#include <vector>

#include <json.hpp>

#include "gfp/graph_store.hpp"
#include "gfp/pattern_engine.hpp"
#include "gfp/vertex_stats.hpp"
#include "oracles.hpp"

using namespace gfp;
using namespace gfp::testing;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned limits.
constexpr double kStatsRelTol = 1e-9;
constexpr double kStatsAbsTol = 1e-12;
constexpr double kSgOracleSeconds = 60;
constexpr double kCycleOracleSeconds = 120;
constexpr double kStatsSeconds = 30;
constexpr double kEvictionSeconds = 30;
constexpr double kPerformanceSeconds = 600;
constexpr double kPerformanceP50Ms = 2000;
constexpr double kScalingFactor = 2.0;

constexpr std::uint64_t kCorpusSeed = 20240611;
constexpr int kOracleGraphs = 200;
constexpr int kOracleMaxBatch = 16;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int precision = 2) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(precision);
    s << v;
    return s.str();
}

std::string sci(double v) {
    std::ostringstream s;
    s.precision(2);
    s << std::scientific << v;
    return s.str();
}

struct Workdir {
    fs::path path;
    Workdir() {
        path = fs::temp_directory_path() / ("gfp_acceptance_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~Workdir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(GFP_CLI_PATH) + " " + args;
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json read_json(const std::string& path) { return nlohmann::json::parse(slurp(path)); }

// ---- oracle suites ------------------------------------------------------

const RandomGraphSpec kOracleSpec{30, 300, 1000, 10, 300};

Outcome scatter_gather_oracle() {
    const auto start = Clock::now();
    std::mt19937_64 rng(kCorpusSeed);
    std::uint64_t triggers = 0, hits = 0, mismatches = 0;
    for (int i = 0; i < kOracleGraphs; ++i) {
        const RandomGraph g = random_graph(rng, kOracleSpec);
        stream_graph(g, rng, kOracleMaxBatch, [&](const StreamStep& step) {
            for (const auto& t : step.triggers) {
                const auto engine = scatter_gather_hits(step.graph, t, g.pattern_window);
                const auto oracle = oracle_scatter_gather(step.live, step.graph.vertex_count(), t, g.pattern_window);
                ++triggers;
                hits += oracle.size();
                if (engine != oracle) ++mismatches;
            }
        });
    }
    const double elapsed = seconds_since(start);
    return {mismatches == 0 && elapsed < kSgOracleSeconds,
            std::to_string(kOracleGraphs) + " graphs, " + std::to_string(triggers) + " trigger edges, " +
                std::to_string(hits) + " hits, " + std::to_string(mismatches) + " mismatches, " + fmt(elapsed) +
                " s (limit " + fmt(kSgOracleSeconds, 0) + " s)"};
}

Outcome cycle_oracle() {
    const auto start = Clock::now();
    std::mt19937_64 rng(kCorpusSeed);
    std::uint64_t triggers = 0, cycles = 0, temporal = 0, mismatches = 0;
    for (int i = 0; i < kOracleGraphs; ++i) {
        const RandomGraph g = random_graph(rng, kOracleSpec);
        stream_graph(g, rng, kOracleMaxBatch, [&](const StreamStep& step) {
            for (const auto& t : step.triggers) {
                ++triggers;
                for (int max_len : {3, 5, 10}) {
                    const auto oracle = oracle_simple_cycles(step.live, t, g.pattern_window, max_len);
                    if (to_map(simple_cycle_lengths(step.graph, t, g.pattern_window, max_len)) != oracle) {
                        ++mismatches;
                    }
                    if (max_len == 10) {
                        for (const auto& [len, n] : oracle) cycles += n;
                    }
                }
                const auto oracle = oracle_temporal_cycles(step.live, t, g.pattern_window, std::nullopt);
                if (to_map(temporal_cycle_lengths(step.graph, t, g.pattern_window)) != oracle) ++mismatches;
                for (const auto& [len, n] : oracle) temporal += n;
            }
        });
    }
    const double elapsed = seconds_since(start);
    return {mismatches == 0 && elapsed < kCycleOracleSeconds,
            std::to_string(triggers) + " trigger edges x max_length {3,5,10} + temporal, " + std::to_string(cycles) +
                " simple / " + std::to_string(temporal) + " temporal cycles, " + std::to_string(mismatches) +
                " mismatches, " + fmt(elapsed) + " s (limit " + fmt(kCycleOracleSeconds, 0) + " s)"};
}

// ---- statistics ---------------------------------------------------------

Outcome stats_accuracy() {
    constexpr int kAccumulators = 100;
    constexpr int kOps = 10000;
    constexpr std::size_t kMaxLive = 256;
    const auto start = Clock::now();

    VertexStats stats(1);
    std::vector<std::vector<double>> live(kAccumulators);
    auto slot = [](int a) { return std::pair<VertexId, Direction>(a / 2, a % 2 ? Direction::out : Direction::in); };
    auto scan_of = [&](int a) -> ObservationScan {
        return [&live, a](const std::function<void(std::span<const double>)>& visit) {
            for (double x : live[a]) visit(std::span<const double>(&x, 1));
        };
    };

    std::mt19937_64 rng(kCorpusSeed);
    std::uint64_t checks = 0, failures = 0;
    double worst_rel = 0;
    std::string first_failure;
    for (int a = 0; a < kAccumulators; ++a) {
        const auto [v, d] = slot(a);
        auto& values = live[a];
        // Mix of scales: amounts in cents, unix timestamps, small signed values.
        std::function<double()> draw;
        switch (a % 3) {
            case 0: draw = [&, dist = std::lognormal_distribution<double>(5.0, 1.5)]() mutable {
                        return std::round(dist(rng) * 100) / 100;
                    };
                    break;
            case 1: draw = [&, dist = std::uniform_int_distribution<std::int64_t>(1600000000, 1700000000)]() mutable {
                        return static_cast<double>(dist(rng));
                    };
                    break;
            default: draw = [&, dist = std::normal_distribution<double>(0.0, 3.0)]() mutable { return dist(rng); };
        }
        for (int op = 0; op < kOps; ++op) {
            const bool add = values.empty() || (values.size() < kMaxLive && rng() % 2 == 0);
            if (add) {
                const double x = draw();
                values.push_back(x);
                stats.on_insert(v, d, std::span<const double>(&x, 1));
            } else {
                const std::size_t i = std::uniform_int_distribution<std::size_t>(0, values.size() - 1)(rng);
                const double x = values[i];
                values.erase(values.begin() + static_cast<std::ptrdiff_t>(i));
                stats.on_remove(v, d, std::span<const double>(&x, 1), scan_of(a));
            }
            if (values.empty()) continue;

            const auto ref = scratch_moments(values);
            std::vector<double> sorted = values;
            std::sort(sorted.begin(), sorted.end());
            const std::size_t n = sorted.size();
            const double median = n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2;

            auto query = [&](Stat s) { return stats.query_stat(v, d, 0, s, scan_of(a)).value(); };
            auto check = [&](Stat s, long double expected, bool exact) {
                const double got = query(s);
                const bool ok = exact ? got == static_cast<double>(expected)
                                      : close(got, expected, kStatsRelTol, kStatsAbsTol);
                ++checks;
                if (!exact && expected != 0) {
                    worst_rel = std::max(worst_rel, static_cast<double>(std::fabs((got - expected) / expected)));
                }
                if (!ok && failures++ == 0) {
                    std::ostringstream m;
                    m.precision(17);
                    m << to_string(s) << " got " << got << " expected " << static_cast<double>(expected) << " (n="
                      << n << ", accumulator " << a << ", op " << op << ")";
                    first_failure = m.str();
                }
            };
            check(Stat::sum, ref.sum, false);
            check(Stat::mean, ref.mean, false);
            check(Stat::var, ref.var, false);
            check(Stat::skew, ref.skew, false);
            check(Stat::kurtosis, ref.kurtosis, false);
            check(Stat::min, sorted.front(), true);
            check(Stat::max, sorted.back(), true);
            check(Stat::median, median, true);
        }
    }
    const double elapsed = seconds_since(start);
    std::string detail = std::to_string(kAccumulators) + " accumulators x " + std::to_string(kOps) + " ops, " +
                         std::to_string(checks) + " checks, " + std::to_string(failures) + " failures, worst rel " +
                         sci(worst_rel) + ", " + fmt(elapsed) + " s (limit " + fmt(kStatsSeconds, 0) + " s)";
    if (!first_failure.empty()) detail += "; first: " + first_failure;
    return {failures == 0 && elapsed < kStatsSeconds, detail};
}

// ---- eviction -----------------------------------------------------------

Outcome eviction() {
    constexpr int kEdges = 100000;
    const auto start = Clock::now();
    std::mt19937_64 rng(kCorpusSeed);
    std::uint64_t checks = 0, mismatches = 0, audits_failed = 0, stale = 0;
    std::string first_problem;

    for (Duration delta : {Duration{10}, Duration{1000}}) {
        GraphStore g(WindowConfig{delta}, 0);
        std::vector<std::pair<std::string, Timestamp>> offered;  // rows that were inserted
        Timestamp clock = 0;
        int next = 0;
        while (next < kEdges) {
            const int batch = std::uniform_int_distribution<int>(1, 200)(rng);
            std::vector<Transaction> rows;
            for (int i = 0; i < batch && next < kEdges; ++i, ++next) {
                clock += std::uniform_int_distribution<int>(0, 2)(rng);
                // Some rows arrive late by up to 1.5 windows.
                Timestamp ts = clock;
                if (rng() % 10 == 0) ts -= std::uniform_int_distribution<Timestamp>(0, delta + delta / 2)(rng);
                const auto u = std::uniform_int_distribution<int>(0, 499)(rng);
                const auto w = std::uniform_int_distribution<int>(0, 499)(rng);
                rows.push_back(Transaction{"e" + std::to_string(next), vertex_key(u), vertex_key(w), std::max<Timestamp>(ts, 0), {}});
            }
            std::stable_sort(rows.begin(), rows.end(),
                             [](const Transaction& a, const Transaction& b) { return a.timestamp < b.timestamp; });
            for (const auto& r : rows) {
                const auto outcome = g.insert(r);
                if (outcome.inserted()) {
                    offered.emplace_back(r.edge_id, r.timestamp);
                } else if (outcome.status == RowStatus::stale) {
                    ++stale;
                }
            }
            g.evict_outdated();

            const Timestamp cutoff = *g.t_now() - delta;
            std::multiset<std::pair<Timestamp, std::string>> expected, actual;
            for (const auto& [id, ts] : offered) {
                if (ts >= cutoff) expected.emplace(ts, id);
            }
            g.for_each_live_edge([&](const EdgeView& e) { actual.emplace(e.timestamp, std::string(e.edge_id)); });
            ++checks;
            if (expected != actual) {
                if (mismatches++ == 0) {
                    first_problem = "live set differs at t_now=" + std::to_string(*g.t_now()) + " (delta " +
                                    std::to_string(delta) + ")";
                }
            }
            if (const auto problem = g.audit()) {
                if (audits_failed++ == 0 && first_problem.empty()) first_problem = "audit: " + *problem;
            }
            // Keep the oracle list short: anything below the cutoff can never return.
            std::erase_if(offered, [&](const auto& e) { return e.second < cutoff; });
        }
    }
    const double elapsed = seconds_since(start);
    std::string detail = "2 x " + std::to_string(kEdges) + " edges (delta 10, 1000), " + std::to_string(checks) +
                         " batch checks, " + std::to_string(stale) + " stale rows, " + std::to_string(mismatches) +
                         " live-set mismatches, " + std::to_string(audits_failed) + " audit failures, " +
                         fmt(elapsed) + " s (limit " + fmt(kEvictionSeconds, 0) + " s)";
    if (!first_problem.empty()) detail += "; first: " + first_problem;
    return {mismatches == 0 && audits_failed == 0 && elapsed < kEvictionSeconds, detail};
}

// ---- CLI-driven criteria ------------------------------------------------

Outcome determinism() {
    Workdir dir;
    if (run_cli("gen --pattern mixed --edges 100000 --seed 5 --output " + dir.file("in.csv")) != 0) {
        return {false, "gen failed"};
    }
    for (int threads : {1, 8}) {
        const std::string out = dir.file("out" + std::to_string(threads) + ".csv");
        if (run_cli("transform -i " + dir.file("in.csv") + " -o " + out + " --threads " + std::to_string(threads)) !=
            0) {
            return {false, "transform --threads " + std::to_string(threads) + " failed"};
        }
    }
    const std::string a = slurp(dir.file("out1.csv"));
    const std::string b = slurp(dir.file("out8.csv"));
    const bool same = !a.empty() && a == b;
    return {same, "100000-edge mixed corpus, --threads 1 vs 8: " + std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()) + " bytes, " + (same ? "identical" : "different") +
                      " (hardware threads: " + std::to_string(std::thread::hardware_concurrency()) + ")"};
}

// Sums the bin columns of one pattern family over rows whose id starts with `prefix`.
std::map<int, std::uint64_t> sum_bins(const std::string& csv, const std::string& family, bool motif_rows) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    std::vector<std::pair<std::size_t, int>> cols;
    {
        std::istringstream header(line);
        std::string name;
        for (std::size_t c = 0; std::getline(header, name, ','); ++c) {
            const std::string stem = family + "_";
            if (name.rfind(stem, 0) != 0) continue;
            std::string rest = name.substr(stem.size());
            if (rest.ends_with("plus")) rest.resize(rest.size() - 4);
            cols.emplace_back(c, std::stoi(rest));
        }
    }
    std::map<int, std::uint64_t> totals;
    std::vector<std::string> fields;
    while (std::getline(in, line)) {
        if (line.empty() || (line[0] == 'm') != motif_rows) continue;
        fields.clear();
        std::istringstream row(line);
        for (std::string f; std::getline(row, f, ',');) fields.push_back(f);
        for (const auto& [c, size] : cols) {
            const auto n = std::stoull(fields.at(c));
            if (n > 0) totals[size] += n;
        }
    }
    return totals;
}

std::map<int, std::uint64_t> from_json_map(const nlohmann::json& j) {
    std::map<int, std::uint64_t> out;
    for (const auto& [k, v] : j.items()) {
        if (v.get<std::uint64_t>() > 0) out[std::stoi(k)] = v.get<std::uint64_t>();
    }
    return out;
}

std::string describe(const std::map<int, std::uint64_t>& m) {
    std::string s = "{";
    for (const auto& [k, v] : m) s += (s.size() > 1 ? "," : "") + std::to_string(k) + ":" + std::to_string(v);
    return s + "}";
}

Outcome motif_recovery() {
    Workdir dir;
    if (run_cli("gen --pattern mixed --edges 20000 --seed 9 --output " + dir.file("in.csv") + " --truth " +
                dir.file("truth.json")) != 0) {
        return {false, "gen failed"};
    }
    // Every window spans the whole stream (about 30000 s).
    std::ofstream(dir.file("config.json")) << R"({
        "window_config": {"delta": 10000000},
        "pattern_windows": {"delta_sg": 10000000, "delta_cycle": 10000000, "delta_temporal": 10000000},
        "stat_config": {"stats_enabled": []}
    })";
    if (run_cli("transform -i " + dir.file("in.csv") + " -c " + dir.file("config.json") + " -o " +
                dir.file("out.csv")) != 0) {
        return {false, "transform failed"};
    }
    const auto truth = read_json(dir.file("truth.json"));
    const std::string csv = slurp(dir.file("out.csv"));

    const auto cycles = sum_bins(csv, "cycle_len", true);
    const auto tcycles = sum_bins(csv, "tcycle_len", true);
    const auto sg = sum_bins(csv, "sg_size", true);
    const auto want_cycles = from_json_map(truth["expected"]["simple_cycle"]);
    const auto want_tcycles = from_json_map(truth["expected"]["temporal_cycle"]);
    const auto want_sg = from_json_map(truth["expected"]["scatter_gather"]);
    // Background is a layered DAG, so it must not produce any cycle.
    const auto bg_cycles = sum_bins(csv, "cycle_len", false);
    const auto bg_tcycles = sum_bins(csv, "tcycle_len", false);

    const bool pass = cycles == want_cycles && tcycles == want_tcycles && sg == want_sg && bg_cycles.empty() &&
                      bg_tcycles.empty() && !want_cycles.empty() && !want_sg.empty();
    return {pass, "planted cycles " + describe(from_json_map(truth["planted"]["cycles"])) + ", scatter-gather " +
                      describe(from_json_map(truth["planted"]["scatter_gather"])) + "; encoded cycle_len " +
                      describe(cycles) + ", tcycle_len " + describe(tcycles) + ", sg_size " + describe(sg) +
                      " (expected sg " + describe(want_sg) + "); background cycles " + describe(bg_cycles)};
}

Outcome performance() {
    Workdir dir;
    const auto start = Clock::now();
    if (run_cli("gen --pattern mixed --edges 1000000 --seed 13 --output " + dir.file("in.csv")) != 0) {
        return {false, "gen failed"};
    }
    if (run_cli("bench -i " + dir.file("in.csv") + " -b 2048 --threads 8 --report " + dir.file("report.json")) != 0) {
        return {false, "bench failed"};
    }
    const double elapsed = seconds_since(start);
    const auto report = read_json(dir.file("report.json"));
    const double p50 = report["wall_clock"]["latency_ms"]["p50"].get<double>();
    const auto rows = report["rows"].get<std::uint64_t>();
    const bool pass = rows == 1000000 && elapsed < kPerformanceSeconds && p50 < kPerformanceP50Ms;
    return {pass, std::to_string(rows) + " rows, batch 2048, 8 workers: gen + bench " + fmt(elapsed, 1) +
                      " s (limit " + fmt(kPerformanceSeconds, 0) + " s), p50 " + fmt(p50, 1) + " ms (limit " +
                      fmt(kPerformanceP50Ms, 0) + " ms), p99 " +
                      fmt(report["wall_clock"]["latency_ms"]["p99"].get<double>(), 1) + " ms, " +
                      fmt(report["wall_clock"]["throughput_rows_per_s"].get<double>(), 0) + " rows/s"};
}

Outcome scaling() {
    Workdir dir;
    if (run_cli("gen --pattern mixed --edges 200000 --seed 17 --output " + dir.file("in.csv")) != 0) {
        return {false, "gen failed"};
    }
    std::map<int, double> throughput;
    for (int threads : {1, 8}) {
        const std::string report = dir.file("report" + std::to_string(threads) + ".json");
        if (run_cli("bench -i " + dir.file("in.csv") + " -b 2048 --threads " + std::to_string(threads) +
                    " --report " + report) != 0) {
            return {false, "bench --threads " + std::to_string(threads) + " failed"};
        }
        throughput[threads] = read_json(report)["wall_clock"]["throughput_rows_per_s"].get<double>();
    }
    const double ratio = throughput[8] / throughput[1];
    return {ratio >= kScalingFactor,
            "throughput 1 worker " + fmt(throughput[1], 0) + " rows/s, 8 workers " + fmt(throughput[8], 0) +
                " rows/s, speedup " + fmt(ratio) + "x (required " + fmt(kScalingFactor, 1) + "x); hardware threads: " +
                std::to_string(std::thread::hardware_concurrency())};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> kCriteria{
    {"scatter_gather_oracle", scatter_gather_oracle},
    {"cycle_oracle", cycle_oracle},
    {"stats_accuracy", stats_accuracy},
    {"eviction", eviction},
    {"determinism", determinism},
    {"motif_recovery", motif_recovery},
    {"performance", performance},
    {"scaling", scaling},
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> selected(argv + 1, argv + argc);
    if (selected.empty()) {
        for (const auto& [name, fn] : kCriteria) selected.push_back(name);
    }
    bool all = true;
    for (const auto& name : selected) {
        const auto it = std::find_if(kCriteria.begin(), kCriteria.end(), [&](const auto& c) { return c.first == name; });
        if (it == kCriteria.end()) {
            std::cerr << "unknown criterion '" << name << "'\n";
            return 2;
        }
        Outcome o;
        try {
            o = it->second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        all = all && o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    }
    return all ? 0 : 1;
}
