#pragma once

#include <cstddef>
#include <functional>

namespace zinfer {

// Worker count used by parallel_chunks. Respects the ZINFER_THREADS
// environment variable; falls back to the hardware concurrency.
int worker_count();

// Splits [0, n) into contiguous chunks and runs `body(begin, end, chunk)` on
// each, in parallel. Chunk indices are dense, so callers can write results
// into a pre-sized per-chunk slot and merge in index order; results are then
// independent of the actual thread count.
void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body,
                     std::size_t* n_chunks_out = nullptr);

std::size_t parallel_chunk_count(std::size_t n);

}  // namespace zinfer
