#include "gfp/gfp.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <mutex>
#include <new>
#include <string>

#include "gfp/preprocessor.hpp"

struct gfp_engine {
    gfp::Preprocessor impl;
};

struct gfp_table {
    gfp::FeatureTable impl;
};

namespace {

thread_local std::string g_last_error;

gfp_status fail(gfp_status code, std::string message) {
    g_last_error = std::move(message);
    return code;
}

template <typename Fn>
gfp_status guarded(Fn&& fn) {
    try {
        g_last_error.clear();
        return fn();
    } catch (const gfp::ConfigError& e) {
        return fail(GFP_ERR_CONFIG, e.what());
    } catch (const gfp::SchemaError& e) {
        return fail(GFP_ERR_SCHEMA, e.what());
    } catch (const gfp::StateError& e) {
        return fail(GFP_ERR_STATE, e.what());
    } catch (const gfp::Error& e) {
        return fail(GFP_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(GFP_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(GFP_ERR_INTERNAL, e.what());
    }
}

std::vector<gfp::Transaction> to_transactions(const gfp_batch& b) {
    if (b.rows > 0 && (b.edge_ids == nullptr || b.sources == nullptr || b.targets == nullptr ||
                       b.timestamps == nullptr || (b.attribute_count > 0 && b.attributes == nullptr))) {
        throw gfp::Error("batch buffers must be non-null");
    }
    std::vector<gfp::Transaction> txns(b.rows);
    for (std::size_t i = 0; i < b.rows; ++i) {
        auto& t = txns[i];
        t.edge_id = b.edge_ids[i] ? b.edge_ids[i] : "";
        t.source = b.sources[i] ? b.sources[i] : "";
        t.target = b.targets[i] ? b.targets[i] : "";
        t.timestamp = b.timestamps[i];
        t.attributes.assign(b.attributes + i * b.attribute_count, b.attributes + (i + 1) * b.attribute_count);
    }
    return txns;
}

std::vector<gfp::RowStatus> to_flags(const gfp_batch& b) {
    std::vector<gfp::RowStatus> flags;
    if (b.row_status == nullptr) return flags;
    flags.reserve(b.rows);
    for (std::size_t i = 0; i < b.rows; ++i) {
        const auto s = b.row_status[i];
        if (s < GFP_ROW_OK || s > GFP_ROW_MALFORMED) throw gfp::Error("invalid row status flag");
        flags.push_back(static_cast<gfp::RowStatus>(s));
    }
    return flags;
}

void fill_summary(const gfp::BatchSummary& s, gfp_batch_summary* out) {
    if (out == nullptr) return;
    out->rows = s.rows;
    out->inserted = s.inserted;
    out->stale = s.stale;
    out->rejected = s.rejected;
    out->evicted = s.evicted;
    out->out_of_order = s.out_of_order ? 1 : 0;
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* gfp_version(void) { return "1.0.0"; }

const char* gfp_last_error(void) { return g_last_error.c_str(); }

void gfp_string_free(char* s) { std::free(s); }

gfp_status gfp_engine_create(const char* config_json, gfp_engine** out) {
    return guarded([&] {
        if (out == nullptr) return fail(GFP_ERR_INVALID_ARGUMENT, "out must be non-null");
        gfp::EngineConfig config = config_json ? gfp::config_from_json(config_json) : gfp::EngineConfig{};
        *out = new gfp_engine{gfp::Preprocessor(std::move(config))};
        return GFP_OK;
    });
}

void gfp_engine_destroy(gfp_engine* engine) { delete engine; }

gfp_status gfp_engine_get_params(const gfp_engine* engine, char** json_out) {
    return guarded([&] {
        if (engine == nullptr || json_out == nullptr) return fail(GFP_ERR_INVALID_ARGUMENT, "null argument");
        *json_out = copy_string(gfp::to_json(engine->impl.get_params()));
        return GFP_OK;
    });
}

gfp_status gfp_engine_set_params(gfp_engine* engine, const char* config_json) {
    return guarded([&] {
        if (engine == nullptr || config_json == nullptr) return fail(GFP_ERR_INVALID_ARGUMENT, "null argument");
        engine->impl.set_params(gfp::config_from_json(config_json));
        return GFP_OK;
    });
}

gfp_status gfp_engine_set_worker_count(gfp_engine* engine, uint32_t workers) {
    return guarded([&] {
        if (engine == nullptr) return fail(GFP_ERR_INVALID_ARGUMENT, "null engine");
        engine->impl.set_worker_count(workers);
        return GFP_OK;
    });
}

gfp_status gfp_engine_reset(gfp_engine* engine) {
    return guarded([&] {
        if (engine == nullptr) return fail(GFP_ERR_INVALID_ARGUMENT, "null engine");
        engine->impl.reset();
        return GFP_OK;
    });
}

gfp_status gfp_engine_fit(gfp_engine* engine, const gfp_batch* batch, gfp_batch_summary* summary) {
    return guarded([&] {
        if (engine == nullptr || batch == nullptr) return fail(GFP_ERR_INVALID_ARGUMENT, "null argument");
        fill_summary(engine->impl.fit(to_transactions(*batch)), summary);
        return GFP_OK;
    });
}

gfp_status gfp_engine_partial_fit(gfp_engine* engine, const gfp_batch* batch, gfp_batch_summary* summary) {
    return guarded([&] {
        if (engine == nullptr || batch == nullptr) return fail(GFP_ERR_INVALID_ARGUMENT, "null argument");
        fill_summary(engine->impl.partial_fit(to_transactions(*batch)), summary);
        return GFP_OK;
    });
}

gfp_status gfp_engine_transform(gfp_engine* engine, const gfp_batch* batch, gfp_table** out,
                                gfp_batch_summary* summary) {
    return guarded([&] {
        if (engine == nullptr || batch == nullptr || out == nullptr) {
            return fail(GFP_ERR_INVALID_ARGUMENT, "null argument");
        }
        const auto txns = to_transactions(*batch);
        const auto flags = to_flags(*batch);
        auto table = engine->impl.transform(txns, flags);
        fill_summary(engine->impl.last_batch(), summary);
        *out = new gfp_table{std::move(table)};
        return GFP_OK;
    });
}

gfp_status gfp_engine_schema(const gfp_engine* engine, gfp_table** out) {
    return guarded([&] {
        if (engine == nullptr || out == nullptr) return fail(GFP_ERR_INVALID_ARGUMENT, "null argument");
        *out = new gfp_table{gfp::FeatureTable{engine->impl.schema(), {}, {}}};
        return GFP_OK;
    });
}

gfp_status gfp_engine_info_get(const gfp_engine* engine, gfp_engine_info* info) {
    return guarded([&] {
        if (engine == nullptr || info == nullptr) return fail(GFP_ERR_INVALID_ARGUMENT, "null argument");
        const auto& g = engine->impl.graph();
        info->live_edges = g.live_edge_count();
        info->vertices = g.vertex_count();
        info->has_t_now = g.t_now() ? 1 : 0;
        info->t_now = g.t_now().value_or(0);
        info->fitted = engine->impl.fitted() ? 1 : 0;
        info->out_of_order_batches = engine->impl.out_of_order_batches();
        return GFP_OK;
    });
}

gfp_status gfp_engine_save(const gfp_engine* engine, const char* path) {
    return guarded([&] {
        if (engine == nullptr || path == nullptr) return fail(GFP_ERR_INVALID_ARGUMENT, "null argument");
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) return fail(GFP_ERR_IO, std::string("cannot open '") + path + "' for writing");
        gfp::save_snapshot(engine->impl, out);
        out.close();
        if (!out) return fail(GFP_ERR_IO, std::string("failed writing '") + path + "'");
        return GFP_OK;
    });
}

gfp_status gfp_engine_load(const char* path, gfp_engine** out) {
    return guarded([&] {
        if (path == nullptr || out == nullptr) return fail(GFP_ERR_INVALID_ARGUMENT, "null argument");
        std::ifstream in(path, std::ios::binary);
        if (!in) return fail(GFP_ERR_IO, std::string("cannot open '") + path + "'");
        *out = new gfp_engine{gfp::load_snapshot(in)};
        return GFP_OK;
    });
}

size_t gfp_table_rows(const gfp_table* table) { return table ? table->impl.rows() : 0; }

size_t gfp_table_columns(const gfp_table* table) { return table ? table->impl.schema.size() : 0; }

const char* gfp_table_column_name(const gfp_table* table, size_t column) {
    if (table == nullptr || column >= table->impl.schema.size()) return nullptr;
    return table->impl.schema.columns()[column].name.c_str();
}

int gfp_table_column_is_integer(const gfp_table* table, size_t column) {
    if (table == nullptr || column >= table->impl.schema.size()) return 0;
    return table->impl.schema.columns()[column].kind == gfp::ColumnKind::integer ? 1 : 0;
}

const double* gfp_table_data(const gfp_table* table) { return table ? table->impl.values.data() : nullptr; }

const char* gfp_table_row_id(const gfp_table* table, size_t row) {
    if (table == nullptr || row >= table->impl.rows()) return nullptr;
    return table->impl.row_ids[row].c_str();
}

void gfp_table_destroy(gfp_table* table) { delete table; }

}  // extern "C"
