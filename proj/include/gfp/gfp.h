/*
 * C interface to the streaming graph feature preprocessor.
 *
 * All objects are opaque handles. Functions returning gfp_status set a
 * thread-local message retrievable with gfp_last_error() on failure.
 * Strings returned through char** must be released with gfp_string_free().
 */
#ifndef GFP_GFP_H
#define GFP_GFP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GFP_API __declspec(dllexport)
#else
#define GFP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct gfp_engine gfp_engine;
typedef struct gfp_table gfp_table;

typedef enum gfp_status {
    GFP_OK = 0,
    GFP_ERR_INVALID_ARGUMENT = 1,
    GFP_ERR_CONFIG = 2,
    GFP_ERR_IO = 3,
    GFP_ERR_SCHEMA = 4,
    GFP_ERR_STATE = 5,
    GFP_ERR_INTERNAL = 6
} gfp_status;

/* Values of the row_status feature column. */
typedef enum gfp_row_status {
    GFP_ROW_OK = 0,
    GFP_ROW_STALE = 1,
    GFP_ROW_DUPLICATE_ID = 2,
    GFP_ROW_NEGATIVE_TIMESTAMP = 3,
    GFP_ROW_NON_FINITE = 4,
    GFP_ROW_MALFORMED = 5
} gfp_row_status;

/*
 * A batch of transactions in bulk buffers. `attributes` is row-major with
 * `attribute_count` values per row, matching the configured attribute columns.
 * `row_status` is optional (may be NULL); rows flagged GFP_ROW_MALFORMED are
 * not ingested and come back with zeroed features.
 */
typedef struct gfp_batch {
    size_t rows;
    const char* const* edge_ids;
    const char* const* sources;
    const char* const* targets;
    const int64_t* timestamps;
    size_t attribute_count;
    const double* attributes;
    const int32_t* row_status;
} gfp_batch;

typedef struct gfp_batch_summary {
    size_t rows;
    size_t inserted;
    size_t stale;
    size_t rejected;
    size_t evicted;
    int out_of_order;
} gfp_batch_summary;

typedef struct gfp_engine_info {
    size_t live_edges;
    size_t vertices;
    int has_t_now;
    int64_t t_now;
    int fitted;
    uint64_t out_of_order_batches;
} gfp_engine_info;

GFP_API const char* gfp_version(void);
GFP_API const char* gfp_last_error(void);
GFP_API void gfp_string_free(char* s);

/* config_json may be NULL for the default configuration. */
GFP_API gfp_status gfp_engine_create(const char* config_json, gfp_engine** out);
GFP_API void gfp_engine_destroy(gfp_engine* engine);

GFP_API gfp_status gfp_engine_get_params(const gfp_engine* engine, char** json_out);
GFP_API gfp_status gfp_engine_set_params(gfp_engine* engine, const char* config_json);
GFP_API gfp_status gfp_engine_set_worker_count(gfp_engine* engine, uint32_t workers);
GFP_API gfp_status gfp_engine_reset(gfp_engine* engine);

/* summary may be NULL. */
GFP_API gfp_status gfp_engine_fit(gfp_engine* engine, const gfp_batch* batch, gfp_batch_summary* summary);
GFP_API gfp_status gfp_engine_partial_fit(gfp_engine* engine, const gfp_batch* batch, gfp_batch_summary* summary);
GFP_API gfp_status gfp_engine_transform(gfp_engine* engine, const gfp_batch* batch, gfp_table** out,
                                        gfp_batch_summary* summary);

/* Zero-row table carrying the current feature schema. */
GFP_API gfp_status gfp_engine_schema(const gfp_engine* engine, gfp_table** out);
GFP_API gfp_status gfp_engine_info_get(const gfp_engine* engine, gfp_engine_info* info);

GFP_API gfp_status gfp_engine_save(const gfp_engine* engine, const char* path);
GFP_API gfp_status gfp_engine_load(const char* path, gfp_engine** out);

GFP_API size_t gfp_table_rows(const gfp_table* table);
GFP_API size_t gfp_table_columns(const gfp_table* table);
GFP_API const char* gfp_table_column_name(const gfp_table* table, size_t column);
/* 1 for integer-valued columns (counts, flags, timestamps), 0 for reals. */
GFP_API int gfp_table_column_is_integer(const gfp_table* table, size_t column);
/* Row-major rows x columns. */
GFP_API const double* gfp_table_data(const gfp_table* table);
GFP_API const char* gfp_table_row_id(const gfp_table* table, size_t row);
GFP_API void gfp_table_destroy(gfp_table* table);

#ifdef __cplusplus
}
#endif

#endif /* GFP_GFP_H */
