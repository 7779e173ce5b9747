#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace magfrac {

/// Worker-pool size cap. Work is always split into a fixed number of chunks
/// that does not depend on this value, and chunk results are combined by a
/// fixed-shape pairwise tree, so every reduction is bit-stable across thread
/// counts.
int max_threads();
void set_max_threads(int k);

/// Pairwise tree sum over a fixed index order.
inline double pairwise_sum(std::vector<double>& parts) {
  const std::size_t n = parts.size();
  if (n == 0) return 0.0;
  for (std::size_t step = 1; step < n; step *= 2)
    for (std::size_t i = 0; i + step < n; i += 2 * step) parts[i] += parts[i + step];
  return parts[0];
}

template <class T>
T tree_combine(std::vector<T>& parts) {
  const std::size_t n = parts.size();
  if (n == 0) return T{};
  for (std::size_t step = 1; step < n; step *= 2)
    for (std::size_t i = 0; i + step < n; i += 2 * step) parts[i] += parts[i + step];
  return parts[0];
}

namespace detail {

template <class Fn>
void run_chunks(std::size_t n_chunks, Fn&& fn) {
  int nt = max_threads();
  if (nt > static_cast<int>(n_chunks)) nt = static_cast<int>(n_chunks);
  if (nt <= 1) {
    for (std::size_t i = 0; i < n_chunks; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n_chunks) break;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace detail

/// Evaluates chunk_fn(chunk_index) for a fixed chunk grid and combines the
/// results with tree_combine. The chunk count is a function of the workload
/// only; execution order is irrelevant because results land in slots indexed
/// by chunk.
template <class T, class Fn>
T parallel_map_reduce(std::size_t n_chunks, Fn&& chunk_fn) {
  std::vector<T> parts(n_chunks);
  detail::run_chunks(n_chunks, [&](std::size_t i) { parts[i] = chunk_fn(i); });
  return tree_combine(parts);
}

/// Splits [0, n) into a fixed chunk grid and runs body(begin, end, chunk).
template <class Fn>
void parallel_for_chunked(std::size_t n, std::size_t n_chunks, Fn&& body) {
  if (n == 0) return;
  if (n_chunks > n) n_chunks = n;
  detail::run_chunks(n_chunks, [&](std::size_t ci) {
    std::size_t b = ci * n / n_chunks;
    std::size_t e = (ci + 1) * n / n_chunks;
    body(b, e, ci);
  });
}

inline std::size_t default_chunk_count(std::size_t items) {
  // Fixed function of the workload; never of the thread count.
  std::size_t c = 256;
  if (items < c) c = items ? items : 1;
  return c;
}

}  // namespace magfrac
