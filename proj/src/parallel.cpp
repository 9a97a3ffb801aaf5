#include "eclipse/parallel.h"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace eclipse {

int workerCount() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (const char* env = std::getenv("ECLIPSE_THREADS")) {
        int cap = std::atoi(env);
        if (cap > 0 && cap < n) n = cap;
    }
    return n;
}

void parallelChunks(int64_t n, int64_t chunkSize,
                    const std::function<void(int64_t, int64_t, int64_t)>& fn) {
    if (n <= 0) return;
    if (chunkSize <= 0) chunkSize = 1;
    const int64_t numChunks = (n + chunkSize - 1) / chunkSize;
    const int workers = static_cast<int>(std::min<int64_t>(workerCount(), numChunks));
    if (workers <= 1) {
        for (int64_t c = 0; c < numChunks; ++c)
            fn(c, c * chunkSize, std::min(n, (c + 1) * chunkSize));
        return;
    }
    std::atomic<int64_t> next{0};
    auto work = [&]() {
        for (;;) {
            int64_t c = next.fetch_add(1);
            if (c >= numChunks) break;
            fn(c, c * chunkSize, std::min(n, (c + 1) * chunkSize));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int i = 0; i < workers - 1; ++i) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
}

void parallelFor(int64_t n, const std::function<void(int64_t)>& fn) {
    const int64_t chunk = std::max<int64_t>(1, n / (4 * workerCount()));
    parallelChunks(n, chunk, [&](int64_t, int64_t b, int64_t e) {
        for (int64_t i = b; i < e; ++i) fn(i);
    });
}

}  // namespace eclipse
