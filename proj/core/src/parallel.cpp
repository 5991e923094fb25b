#include "vulnfwd/parallel.hpp"

#include "vulnfwd/normal.hpp"
#include "vulnfwd/rng.hpp"

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace vulnfwd {

double PathRng::normal(std::uint64_t i) const { return norm_ppf(uniform(i)); }

int thread_count() {
    int n = int(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("VULNFWD_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap >= 1 && cap < n) n = cap;
        } catch (...) {
            // unparsable value: keep the hardware default
        }
    }
    return n;
}

void parallel_blocks(std::int64_t n, std::int64_t block_size,
                     const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& fn) {
    if (n <= 0) return;
    if (block_size < 1) block_size = 1;
    const std::int64_t n_blocks = (n + block_size - 1) / block_size;
    const int workers = int(std::min<std::int64_t>(thread_count(), n_blocks));

    if (workers <= 1) {
        for (std::int64_t b = 0; b < n_blocks; ++b)
            fn(b, b * block_size, std::min(n, (b + 1) * block_size));
        return;
    }

    std::atomic<std::int64_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::int64_t b = next.fetch_add(1);
            if (b >= n_blocks) return;
            fn(b, b * block_size, std::min(n, (b + 1) * block_size));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int i = 0; i < workers - 1; ++i) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
}

}  // namespace vulnfwd
