#pragma once

#include <cstdint>
#include <functional>

namespace eclipse {

// Number of worker threads: hardware concurrency, capped by the
// ECLIPSE_THREADS environment variable when set.
int workerCount();

// Splits [0, n) into chunks of at most chunkSize and runs fn(chunkIndex,
// begin, end) across workers. Chunk indices are stable, so callers that need a
// deterministic reduction can accumulate per chunk and combine in chunk order.
void parallelChunks(int64_t n, int64_t chunkSize,
                    const std::function<void(int64_t chunk, int64_t begin, int64_t end)>& fn);

// Convenience: parallel loop over [0, n) without ordering guarantees beyond
// disjointness of the index ranges.
void parallelFor(int64_t n, const std::function<void(int64_t)>& fn);

}  // namespace eclipse
