#include "zinfer/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace zinfer {

int worker_count() {
  if (const char* env = std::getenv("ZINFER_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (...) {
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 16u));
}

std::size_t parallel_chunk_count(std::size_t n) {
  std::size_t workers = static_cast<std::size_t>(worker_count());
  if (n == 0) return 0;
  // a few chunks per worker smooths uneven per-item cost
  return std::min(n, std::max<std::size_t>(1, workers * 4));
}

void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body,
                     std::size_t* n_chunks_out) {
  std::size_t chunks = parallel_chunk_count(n);
  if (n_chunks_out) *n_chunks_out = chunks;
  if (chunks == 0) return;
  if (chunks == 1) {
    body(0, n, 0);
    return;
  }
  std::size_t workers = std::min<std::size_t>(worker_count(), chunks);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t chunk = w; chunk < chunks; chunk += workers) {
        std::size_t begin = chunk * n / chunks;
        std::size_t end = (chunk + 1) * n / chunks;
        body(begin, end, chunk);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace zinfer
