#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace radiso {

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(int n, int k);

/// Advances `idx` (sorted, size k, entries < n) to the next k-subset in
/// lexicographic order. Returns false after the last one.
bool next_combination(std::vector<int>& idx, int n);

/// The rank-th k-subset of {0..n-1} in lexicographic order.
std::vector<int> unrank_combination(int n, int k, std::uint64_t rank);

/// Worker count from RADISO_THREADS, clamped to [1, 256]; defaults to the
/// hardware concurrency.
int thread_count();

/// Runs fn(begin, end) over [0, total) split into fixed-size blocks. Block
/// boundaries do not depend on the thread count, so any per-index output is
/// identical whatever RADISO_THREADS says.
void parallel_blocks(std::uint64_t total, std::uint64_t block,
                     const std::function<void(std::uint64_t, std::uint64_t)>& fn);

}  // namespace radiso
