#pragma once

#include <cstdint>
#include <functional>

namespace vulnfwd {

/// Worker count: min(hardware_concurrency, VULNFWD_THREADS if set), at least 1.
int thread_count();

/// Runs fn(block_index, begin, end) over [0, n) split into blocks of
/// block_size. Blocks are claimed atomically by a small thread pool; callers
/// get determinism by writing per-block results and reducing in index order.
void parallel_blocks(std::int64_t n, std::int64_t block_size,
                     const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& fn);

}  // namespace vulnfwd
