#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace dolfe {

// Fixed-size chunking with an in-order merge: chunk boundaries and the merge
// sequence do not depend on the thread count, so the reduction result is
// identical for any number of workers.
template <typename Acc, typename ChunkFn, typename MergeFn>
Acc chunked_reduce(std::size_t n_items, std::size_t chunk_size, int threads, Acc init,
                   ChunkFn per_chunk, MergeFn merge) {
  if (n_items == 0) return init;
  const std::size_t n_chunks = (n_items + chunk_size - 1) / chunk_size;
  std::vector<Acc> partial(n_chunks, init);

  auto run_chunk = [&](std::size_t c) {
    const std::size_t begin = c * chunk_size;
    const std::size_t end = begin + chunk_size < n_items ? begin + chunk_size : n_items;
    partial[c] = per_chunk(begin, end);
  };

  if (threads <= 1 || n_chunks == 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1))
        run_chunk(c);
    };
    std::vector<std::thread> pool;
    const int n_workers = threads < static_cast<int>(n_chunks)
                              ? threads
                              : static_cast<int>(n_chunks);
    pool.reserve(n_workers);
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  Acc total = init;
  for (std::size_t c = 0; c < n_chunks; ++c) merge(total, partial[c]);
  return total;
}

// Runs fn(i) for i in [0, n) on the given number of threads; each item must
// be independent of the others.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
  };
  std::vector<std::thread> pool;
  const int n_workers = threads < static_cast<int>(n) ? threads : static_cast<int>(n);
  pool.reserve(n_workers);
  for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

}  // namespace dolfe
