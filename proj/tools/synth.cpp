#include "synth.hpp"

#include <charconv>
#include <json.hpp>
#include <random>
#include <vector>

namespace gfpcli {

std::optional<SynthPattern> synth_pattern_from_string(std::string_view name) {
    if (name == "cycles") return SynthPattern::cycles;
    if (name == "smurfing") return SynthPattern::smurfing;
    if (name == "mixed") return SynthPattern::mixed;
    return std::nullopt;
}

std::map<int, std::uint64_t> SynthTruth::expected_cycle_lengths() const { return planted_cycles; }

std::map<int, std::uint64_t> SynthTruth::expected_scatter_gather_sizes() const {
    std::map<int, std::uint64_t> out;
    for (const auto& [k, count] : planted_scatter_gather) {
        for (int size = 2; size <= k; ++size) out[size] += count;
    }
    return out;
}

std::string SynthTruth::to_json(const SynthOptions& options) const {
    auto keyed = [](const std::map<int, std::uint64_t>& m) {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& [k, v] : m) j[std::to_string(k)] = v;
        return j;
    };
    static const char* kNames[] = {"cycles", "smurfing", "mixed"};
    nlohmann::json j;
    j["pattern"] = kNames[static_cast<int>(options.pattern)];
    j["edges"] = options.edges;
    j["seed"] = options.seed;
    j["motif_edge_prefix"] = "m";
    j["background_edges"] = background_edges;
    j["motif_edges"] = motif_edges;
    j["first_timestamp"] = first_timestamp;
    j["last_timestamp"] = last_timestamp;
    j["planted"] = {{"cycles", keyed(planted_cycles)}, {"scatter_gather", keyed(planted_scatter_gather)}};
    j["expected"] = {{"simple_cycle", keyed(expected_cycle_lengths())},
                     {"temporal_cycle", keyed(expected_cycle_lengths())},
                     {"scatter_gather", keyed(expected_scatter_gather_sizes())}};
    return j.dump(2) + "\n";
}

namespace {

class Emitter {
public:
    Emitter(std::ostream& out, std::mt19937_64& rng, std::int64_t start) : out_(out), rng_(rng), now_(start) {}

    void edge(const std::string& id, const std::string& src, const std::string& dst) {
        now_ += gap_(rng_);
        const double amount = static_cast<double>(cents_(rng_)) / 100.0;
        line_.clear();
        line_ += id;
        line_ += ',';
        line_ += src;
        line_ += ',';
        line_ += dst;
        line_ += ',';
        char buf[32];
        line_.append(buf, std::to_chars(buf, buf + sizeof(buf), now_).ptr);
        line_ += ',';
        line_.append(buf, std::to_chars(buf, buf + sizeof(buf), amount).ptr);
        line_ += '\n';
        out_ << line_;
    }

    std::int64_t now() const { return now_; }

private:
    std::ostream& out_;
    std::mt19937_64& rng_;
    std::int64_t now_;
    std::uniform_int_distribution<int> gap_{1, 2};
    std::uniform_int_distribution<std::int64_t> cents_{1000, 500000};
    std::string line_;
};

}  // namespace

SynthTruth generate_stream(const SynthOptions& options, std::ostream& csv) {
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> cycle_len(3, 6);
    std::uniform_int_distribution<int> smurf_width(3, 6);

    const std::uint32_t layer = std::max<std::uint32_t>(1, options.background_accounts / 3);
    std::uniform_int_distribution<std::uint32_t> pick(0, layer - 1);

    csv << "EdgeID,SourceAccountId,DestAccountId,Timestamp,Amount\n";
    Emitter emit(csv, rng, options.start_time - 1);
    SynthTruth truth;
    truth.first_timestamp = options.start_time;

    std::uint64_t written = 0;
    std::uint64_t motifs = 0;
    auto background = [&] {
        const bool first_hop = unit(rng) < 0.5;
        const std::string src = (first_hop ? "S" : "R") + std::to_string(pick(rng));
        const std::string dst = (first_hop ? "R" : "T") + std::to_string(pick(rng));
        emit.edge("b" + std::to_string(written), src, dst);
        ++written;
        ++truth.background_edges;
    };

    while (written < options.edges) {
        const std::uint64_t remaining = options.edges - written;
        if (unit(rng) >= options.motif_rate) {
            background();
            continue;
        }
        bool cycle = options.pattern == SynthPattern::cycles;
        if (options.pattern == SynthPattern::mixed) cycle = unit(rng) < 0.5;

        const std::string tag = std::to_string(motifs);
        auto account = [&](const std::string& role) { return "M" + tag + "_" + role; };
        auto edge_id = [&](int k) { return "m" + tag + "_" + std::to_string(k); };

        if (cycle) {
            const int len = cycle_len(rng);
            if (remaining < static_cast<std::uint64_t>(len)) {
                background();
                continue;
            }
            for (int i = 0; i < len; ++i) {
                emit.edge(edge_id(i), account(std::to_string(i)), account(std::to_string((i + 1) % len)));
            }
            written += len;
            truth.motif_edges += len;
            ++truth.planted_cycles[len];
        } else {
            const int width = options.pattern == SynthPattern::mixed ? 3 : smurf_width(rng);
            if (remaining < static_cast<std::uint64_t>(2 * width)) {
                background();
                continue;
            }
            for (int i = 0; i < width; ++i) emit.edge(edge_id(i), account("src"), account(std::to_string(i)));
            for (int i = 0; i < width; ++i) {
                emit.edge(edge_id(width + i), account(std::to_string(i)), account("dst"));
            }
            written += 2 * width;
            truth.motif_edges += 2 * width;
            ++truth.planted_scatter_gather[width];
        }
        ++motifs;
    }
    truth.last_timestamp = written > 0 ? emit.now() : options.start_time;
    return truth;
}

}  // namespace gfpcli
