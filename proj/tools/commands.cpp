#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <sstream>

#include "csv.hpp"
#include "gfp/gfp.h"

namespace gfpcli {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr const char* kStatusNames[] = {"ok", "stale", "duplicate_edge_id", "negative_timestamp",
                                        "non_finite_attribute", "malformed"};
constexpr std::size_t kStatusCount = std::size(kStatusNames);

int exit_code_for(gfp_status status) {
    switch (status) {
        case GFP_OK: return kExitOk;
        case GFP_ERR_CONFIG: return kExitConfig;
        case GFP_ERR_IO: return kExitIo;
        case GFP_ERR_INVALID_ARGUMENT:
        case GFP_ERR_SCHEMA:
        case GFP_ERR_STATE: return kExitData;
        default: return kExitInternal;
    }
}

void check(gfp_status status, const std::string& what) {
    if (status != GFP_OK) throw CliError(exit_code_for(status), what + ": " + gfp_last_error());
}

struct EngineDeleter {
    void operator()(gfp_engine* e) const { gfp_engine_destroy(e); }
};
struct TableDeleter {
    void operator()(gfp_table* t) const { gfp_table_destroy(t); }
};
using EnginePtr = std::unique_ptr<gfp_engine, EngineDeleter>;
using TablePtr = std::unique_ptr<gfp_table, TableDeleter>;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError(kExitIo, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw CliError(kExitIo, "failed reading '" + path + "'");
    return ss.str();
}

EnginePtr engine_from_config(const std::string& config_path) {
    std::string text;
    if (!config_path.empty()) text = read_file(config_path);
    gfp_engine* raw = nullptr;
    check(gfp_engine_create(config_path.empty() ? nullptr : text.c_str(), &raw),
          config_path.empty() ? std::string("default config") : "config '" + config_path + "'");
    return EnginePtr(raw);
}

EnginePtr engine_from_state(const std::string& state_path) {
    gfp_engine* raw = nullptr;
    check(gfp_engine_load(state_path.c_str(), &raw), "state '" + state_path + "'");
    return EnginePtr(raw);
}

std::string params_of(const gfp_engine* engine) {
    char* raw = nullptr;
    check(gfp_engine_get_params(engine, &raw), "get_params");
    std::string out(raw);
    gfp_string_free(raw);
    return out;
}

void apply_threads(gfp_engine* engine, const std::optional<unsigned>& threads) {
    if (threads) check(gfp_engine_set_worker_count(engine, *threads), "worker count");
}

class InputFile {
public:
    explicit InputFile(const std::string& path) {
        if (path == "-") {
            stream_ = &std::cin;
            return;
        }
        file_.open(path, std::ios::binary);
        if (!file_) throw CliError(kExitIo, "cannot open input '" + path + "'");
        stream_ = &file_;
    }
    std::istream& stream() { return *stream_; }

private:
    std::ifstream file_;
    std::istream* stream_ = nullptr;
};

class OutputFile {
public:
    explicit OutputFile(const std::string& path) : path_(path) {
        if (path.empty()) return;
        if (path == "-") {
            stream_ = &std::cout;
            return;
        }
        file_.rdbuf()->pubsetbuf(buffer_, sizeof(buffer_));
        file_.open(path, std::ios::binary | std::ios::trunc);
        if (!file_) throw CliError(kExitIo, "cannot open output '" + path + "'");
        stream_ = &file_;
    }
    std::ostream* stream() { return stream_; }
    void finish() {
        if (stream_ == nullptr) return;
        stream_->flush();
        if (!*stream_) throw CliError(kExitIo, "failed writing '" + path_ + "'");
    }

private:
    std::string path_;
    std::ofstream file_;
    std::ostream* stream_ = nullptr;
    char buffer_[1 << 16];
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CliError(kExitIo, "cannot open '" + path + "' for writing");
    out << text;
    out.close();
    if (!out) throw CliError(kExitIo, "failed writing '" + path + "'");
}

struct RunStats {
    std::uint64_t batches = 0;
    std::uint64_t rows = 0;
    std::uint64_t out_of_order_batches = 0;
    std::uint64_t status_counts[kStatusCount] = {};
    std::vector<double> latency_ms;
    double elapsed_s = 0.0;
    double transform_s = 0.0;
};

double percentile(std::vector<double> sorted, double q) {
    if (sorted.empty()) return 0.0;
    std::sort(sorted.begin(), sorted.end());
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
    return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

RunStats stream_batches(gfp_engine* engine, TransactionReader& reader, TableWriter* writer,
                        std::uint64_t batch_size) {
    RunStats stats;
    const auto start = Clock::now();
    RowBlock block;
    std::vector<const char*> scratch;
    std::optional<std::size_t> status_col;
    for (;;) {
        block.clear();
        if (reader.read(block, batch_size) == 0) break;
        const gfp_batch batch = block.view(scratch);

        gfp_table* raw = nullptr;
        const auto t0 = Clock::now();
        gfp_batch_summary summary{};
        const gfp_status rc = gfp_engine_transform(engine, &batch, &raw, &summary);
        const auto t1 = Clock::now();
        check(rc, "transform of batch " + std::to_string(stats.batches + 1));
        TablePtr table(raw);

        const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        stats.latency_ms.push_back(ms);
        stats.transform_s += ms / 1000.0;
        ++stats.batches;
        stats.rows += block.rows();
        if (summary.out_of_order && stats.out_of_order_batches++ == 0) {
            std::cerr << "gfp: warning: batch " << stats.batches
                      << " reaches back before earlier batches; input is not in chronological order\n";
        }

        if (!status_col) {
            for (std::size_t c = 0; c < gfp_table_columns(table.get()); ++c) {
                if (std::string_view(gfp_table_column_name(table.get(), c)) == "row_status") status_col = c;
            }
        }
        if (status_col) {
            const double* data = gfp_table_data(table.get());
            const std::size_t cols = gfp_table_columns(table.get());
            for (std::size_t r = 0; r < gfp_table_rows(table.get()); ++r) {
                const auto s = static_cast<std::size_t>(data[r * cols + *status_col]);
                if (s < kStatusCount) ++stats.status_counts[s];
            }
        }
        if (writer != nullptr) writer->write(table.get());
    }
    stats.elapsed_s = std::chrono::duration<double>(Clock::now() - start).count();
    return stats;
}

json manifest(const char* command, const StreamOptions& o, const std::string& params, unsigned threads,
              const RunStats& stats) {
    json j;
    j["command"] = command;
    j["config"] = json::parse(params);
    j["paths"] = {{"input", o.input}, {"output", o.output}, {"state", o.state}, {"save_state", o.save_state}};
    j["batch_size"] = o.batch_size;
    j["threads"] = threads;
    j["batches"] = stats.batches;
    j["rows"] = stats.rows;
    json errors = json::object();
    std::uint64_t rejected = 0;
    for (std::size_t s = 0; s < kStatusCount; ++s) {
        errors[kStatusNames[s]] = stats.status_counts[s];
        if (s != 0) rejected += stats.status_counts[s];
    }
    j["row_status_counts"] = errors;
    j["rows_not_ok"] = rejected;
    j["out_of_order_batches"] = stats.out_of_order_batches;

    double mean = 0.0;
    for (double ms : stats.latency_ms) mean += ms;
    if (!stats.latency_ms.empty()) mean /= static_cast<double>(stats.latency_ms.size());
    // Everything that depends on timing lives under wall_clock so manifests
    // can be compared for reproducibility by dropping one key.
    j["wall_clock"] = {
        {"elapsed_s", stats.elapsed_s},
        {"transform_s", stats.transform_s},
        {"latency_ms",
         {{"mean", mean},
          {"p50", percentile(stats.latency_ms, 0.50)},
          {"p99", percentile(stats.latency_ms, 0.99)},
          {"max", percentile(stats.latency_ms, 1.0)}}},
        {"throughput_rows_per_s",
         stats.transform_s > 0 ? static_cast<double>(stats.rows) / stats.transform_s : 0.0},
    };
    return j;
}

int run_stream(const char* command, const StreamOptions& o) {
    if (o.batch_size < 1) throw CliError(kExitUsage, "--batch-size must be >= 1");
    EnginePtr engine = o.state.empty() ? engine_from_config(o.config) : engine_from_state(o.state);
    apply_threads(engine.get(), o.threads);
    const std::string params = params_of(engine.get());
    const ColumnNames names = ColumnNames::from_config_json(params);
    const unsigned threads = json::parse(params).at("worker_count").get<unsigned>();

    InputFile input(o.input);
    TransactionReader reader(input.stream(), names, o.iso_timestamps);
    OutputFile output(o.output);
    std::optional<TableWriter> writer;
    if (output.stream() != nullptr) writer.emplace(*output.stream(), names.edge_id);

    const RunStats stats = stream_batches(engine.get(), reader, writer ? &*writer : nullptr, o.batch_size);
    if (writer && stats.batches == 0) {
        gfp_table* raw = nullptr;
        check(gfp_engine_schema(engine.get(), &raw), "schema");
        TablePtr empty(raw);
        writer->write(empty.get());
    }
    output.finish();

    if (!o.save_state.empty()) check(gfp_engine_save(engine.get(), o.save_state.c_str()), "save state");
    if (!o.report.empty()) {
        const json m = manifest(command, o, params, threads, stats);
        if (o.report == "-") {
            std::cout << m.dump(2) << '\n';
        } else {
            write_text(o.report, m.dump(2) + "\n");
        }
    }
    if (reader.malformed_rows() > 0) {
        std::cerr << "gfp: " << reader.malformed_rows() << " malformed input rows passed through with row_status "
                  << GFP_ROW_MALFORMED << '\n';
    }
    return kExitOk;
}

}  // namespace

int run_guarded(const std::function<int()>& body, std::ostream& err) {
    try {
        return body();
    } catch (const CliError& e) {
        err << "gfp: " << e.what() << '\n';
        return e.code;
    } catch (const DataError& e) {
        err << "gfp: " << e.what() << '\n';
        return kExitData;
    } catch (const json::exception& e) {
        err << "gfp: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "gfp: internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}

int cmd_fit(const FitOptions& o) {
    EnginePtr engine = engine_from_config(o.config);
    apply_threads(engine.get(), o.threads);
    const ColumnNames names = ColumnNames::from_config_json(params_of(engine.get()));

    InputFile input(o.input);
    TransactionReader reader(input.stream(), names, o.iso_timestamps);
    RowBlock block;
    reader.read(block, std::numeric_limits<std::size_t>::max());

    // fit() has no row flags, so malformed rows are left out of the history.
    RowBlock clean;
    clean.attribute_count = block.attribute_count;
    for (std::size_t i = 0; i < block.rows(); ++i) {
        if (block.status[i] != GFP_ROW_OK) continue;
        clean.edge_ids.push_back(std::move(block.edge_ids[i]));
        clean.sources.push_back(std::move(block.sources[i]));
        clean.targets.push_back(std::move(block.targets[i]));
        clean.timestamps.push_back(block.timestamps[i]);
        clean.status.push_back(GFP_ROW_OK);
        const auto a = block.attribute_count;
        clean.attributes.insert(clean.attributes.end(), block.attributes.begin() + i * a,
                                block.attributes.begin() + (i + 1) * a);
    }
    std::vector<const char*> scratch;
    const gfp_batch batch = clean.view(scratch);
    gfp_batch_summary summary{};
    check(gfp_engine_fit(engine.get(), &batch, &summary), "fit");
    check(gfp_engine_save(engine.get(), o.state.c_str()), "save state");

    std::cerr << "gfp: fit " << block.rows() << " rows: " << summary.inserted << " inserted, " << summary.stale
              << " stale, " << summary.rejected + (block.rows() - clean.rows()) << " rejected, " << summary.evicted
              << " evicted\n";
    return kExitOk;
}

int cmd_transform(const StreamOptions& o) { return run_stream("transform", o); }

int cmd_bench(const StreamOptions& o) { return run_stream("bench", o); }

int cmd_gen(const GenOptions& o) {
    SynthTruth truth;
    if (o.output == "-") {
        truth = generate_stream(o.synth, std::cout);
        std::cout.flush();
    } else {
        OutputFile out(o.output);
        truth = generate_stream(o.synth, *out.stream());
        out.finish();
    }
    if (!o.truth.empty()) write_text(o.truth, truth.to_json(o.synth));
    return kExitOk;
}

}  // namespace gfpcli
