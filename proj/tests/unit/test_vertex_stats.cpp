#include <doctest.h>

#include <algorithm>
#include <random>

#include "gfp/vertex_stats.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace gfp;
using namespace gfp::testing;

namespace {

MomentAccumulator of(std::initializer_list<double> xs) {
    MomentAccumulator acc;
    for (double x : xs) acc.add(x);
    return acc;
}

/// One (vertex, direction) with its live values kept on the side for scans.
struct Tracked {
    VertexStats stats{1};
    std::vector<double> live;

    ObservationScan scan() const {
        return [this](const std::function<void(std::span<const double>)>& visit) {
            for (double x : live) visit(std::span<const double>(&x, 1));
        };
    }
    void insert(double x) {
        live.push_back(x);
        REQUIRE(stats.on_insert(0, Direction::out, std::span<const double>(&x, 1)));
    }
    void remove_at(std::size_t i) {
        const double x = live[i];
        live.erase(live.begin() + static_cast<std::ptrdiff_t>(i));
        stats.on_remove(0, Direction::out, std::span<const double>(&x, 1), scan());
    }
    double query(Stat s) const { return stats.query_stat(0, Direction::out, 0, s, scan()).value(); }
};

}  // namespace

TEST_SUITE("vertex_stats") {

TEST_CASE("moments of {1,2,3}") {
    const auto acc = of({1, 2, 3});
    CHECK(acc.n == 3);
    CHECK(acc.mean == doctest::Approx(2.0));
    CHECK(acc.sum() == doctest::Approx(6.0));
    CHECK(acc.m2 == doctest::Approx(2.0));
    CHECK(acc.variance() == doctest::Approx(2.0 / 3.0));
    CHECK(acc.kurtosis() == doctest::Approx(1.5));
    CHECK(acc.skew() == doctest::Approx(0.0));
}

TEST_CASE("single observation has zero central moments") {
    const auto acc = of({7.25});
    CHECK(acc.m2 == 0.0);
    CHECK(acc.m3 == 0.0);
    CHECK(acc.m4 == 0.0);
    CHECK(acc.skew() == 0.0);
    CHECK(acc.kurtosis() == 0.0);
}

TEST_CASE("symmetric values have zero skew") { CHECK(of({-1, 0, 1}).skew() == doctest::Approx(0.0)); }

TEST_CASE("constant values use the zero-spread convention") {
    const auto acc = of({5, 5, 5});
    CHECK(acc.variance() == 0.0);
    CHECK(acc.skew() == 0.0);
    CHECK(acc.kurtosis() == 0.0);
    CHECK(acc.zero_spread());
}

TEST_CASE("remove is the inverse of add") {
    auto acc = of({1, 2, 3});
    acc.remove(2);
    const auto fresh = of({1, 3});
    CHECK(acc.n == 2);
    CHECK(acc.mean == doctest::Approx(fresh.mean));
    CHECK(acc.m2 == doctest::Approx(2.0));

    auto single = of({4.5});
    single.remove(4.5);
    CHECK(single == MomentAccumulator{});
}

TEST_CASE("order statistics") {
    const auto s = order_stats({4, 1, 3, 2}).value();
    CHECK(s.median == 2.5);
    CHECK(s.min == 1);
    CHECK(s.max == 4);
    CHECK(order_stats({3, 1, 2})->median == 2);
    CHECK_FALSE(order_stats({}).has_value());
}

TEST_CASE("query_stat and null semantics") {
    Tracked t;
    CHECK_FALSE(t.stats.query_stat(0, Direction::out, 0, Stat::mean, t.scan()).has_value());
    for (double x : {1.0, 2.0, 3.0, 4.0}) t.insert(x);
    CHECK(t.query(Stat::sum) == doctest::Approx(10));
    CHECK(t.query(Stat::mean) == doctest::Approx(2.5));
    CHECK(t.query(Stat::median) == 2.5);
    CHECK(t.query(Stat::min) == 1);
    CHECK(t.query(Stat::max) == 4);
    CHECK(t.query(Stat::var) == doctest::Approx(1.25));
    CHECK_FALSE(t.stats.query_stat(0, Direction::in, 0, Stat::mean, t.scan()).has_value());
}

TEST_CASE("non-finite values are refused") {
    VertexStats stats(2);
    const double bad[] = {1.0, std::numeric_limits<double>::infinity()};
    CHECK_FALSE(stats.on_insert(0, Direction::in, bad));
    CHECK(stats.accumulator(0, Direction::in, 0).n == 0);
}

TEST_CASE("remove from an empty accumulator is an invariant violation") {
    Tracked t;
    const double x = 1.0;
    CHECK_THROWS_AS(t.stats.on_remove(0, Direction::out, std::span<const double>(&x, 1), t.scan()), StateError);
}

TEST_CASE("property: random insert/remove matches scratch recomputation") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        Tracked t;
        std::lognormal_distribution<double> amount(5.0, 1.5);
        for (int op = 0; op < 3000; ++op) {
            const bool add = t.live.empty() || (t.live.size() < 200 && rng() % 2 == 0);
            if (add) {
                t.insert(std::round(amount(rng) * 100) / 100);
            } else {
                t.remove_at(std::uniform_int_distribution<std::size_t>(0, t.live.size() - 1)(rng));
            }
            if (t.live.empty()) continue;
            const auto ref = scratch_moments(t.live);
            CHECK(close(t.query(Stat::mean), ref.mean, 1e-9, 1e-12));
            CHECK(close(t.query(Stat::var), ref.var, 1e-9, 1e-12));
            CHECK(close(t.query(Stat::kurtosis), ref.kurtosis, 1e-9, 1e-12));
        }
    }
}

TEST_CASE("maintainer keeps directions separate and follows eviction") {
    EngineConfig config;
    config.stat_config.attributes = {"Amount"};
    GraphStore g(WindowConfig{10}, 1);
    VertexStats stats(1);
    StatsMaintainer m(g, stats, StatsMaintainer::projection_for(config));
    g.set_observer(&m);

    g.insert(tx("1", "a", "b", 0, {10}));
    g.insert(tx("2", "c", "a", 1, {20}));
    g.insert(tx("3", "a", "a", 2, {30}));
    const auto a = vid(g, "a");
    CHECK(stats.accumulator(a, Direction::out, 0).n == 2);
    CHECK(stats.accumulator(a, Direction::out, 0).mean == doctest::Approx(20));
    CHECK(stats.accumulator(a, Direction::in, 0).n == 2);
    CHECK(stats.accumulator(a, Direction::in, 0).mean == doctest::Approx(25));

    g.insert(tx("4", "x", "y", 11, {1}));
    g.evict_outdated();  // drops edge 1 only
    CHECK(stats.accumulator(a, Direction::out, 0).n == 1);
    CHECK(stats.accumulator(a, Direction::out, 0).mean == doctest::Approx(30));
    CHECK(stats.accumulator(vid(g, "b"), Direction::in, 0).n == 0);
    CHECK(stats.accumulator(a, Direction::in, 0).n == 2);
}

TEST_CASE("timestamp projection") {
    EngineConfig config;
    config.stat_config.attributes = {"Timestamp", "Amount"};
    const auto p = StatsMaintainer::projection_for(config);
    CHECK(p == std::vector<int>{StatsMaintainer::kTimestampSource, 0});
}

}  // TEST_SUITE
