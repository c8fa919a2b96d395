#pragma once

#include <algorithm>
#include <cstddef>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/global_control.h>
#include <tbb/task_arena.h>

namespace gfp::detail {

/// Calls fn(i) for i in [0, n) on at most `workers` threads, capped at the
/// process-wide TBB parallelism limit (the hardware concurrency unless a
/// tbb::global_control raises it). Tasks are scheduled dynamically one index at a time;
/// fn must only write to per-index state.
template <typename Fn>
void parallel_for_each(std::size_t n, unsigned workers, Fn&& fn) {
    const auto limit = tbb::global_control::active_value(tbb::global_control::max_allowed_parallelism);
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, limit)));
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    tbb::task_arena arena(static_cast<int>(workers));
    arena.execute([&] {
        tbb::parallel_for(
            tbb::blocked_range<std::size_t>(0, n, 1),
            [&](const tbb::blocked_range<std::size_t>& r) {
                for (std::size_t i = r.begin(); i != r.end(); ++i) fn(i);
            },
            tbb::simple_partitioner());
    });
}

}  // namespace gfp::detail
