#include "radiso/combinatorics.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

namespace radiso {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    // result * (n - k + i) / i stays integral at every step.
    const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    if (result > kMax / num) return kMax;
    result = result * num / static_cast<std::uint64_t>(i);
  }
  return result;
}

bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[i] == n - k + i) --i;
  if (i < 0) return false;
  ++idx[i];
  for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  return true;
}

std::vector<int> unrank_combination(int n, int k, std::uint64_t rank) {
  std::vector<int> idx;
  idx.reserve(static_cast<std::size_t>(k));
  int next = 0;
  for (int slot = 0; slot < k; ++slot) {
    for (int v = next; v < n; ++v) {
      // Number of combinations that start with v in this slot.
      const std::uint64_t count = binomial(n - v - 1, k - slot - 1);
      if (rank < count) {
        idx.push_back(v);
        next = v + 1;
        break;
      }
      rank -= count;
    }
  }
  return idx;
}

int thread_count() {
  const char* env = std::getenv("RADISO_THREADS");
  const int fallback = std::clamp(static_cast<int>(std::thread::hardware_concurrency()), 1, 256);
  if (env == nullptr || *env == '\0') return fallback;
  try {
    return std::clamp(std::stoi(env), 1, 256);
  } catch (const std::exception&) {
    return fallback;
  }
}

void parallel_blocks(std::uint64_t total, std::uint64_t block,
                     const std::function<void(std::uint64_t, std::uint64_t)>& fn) {
  if (total == 0) return;
  block = std::max<std::uint64_t>(block, 1);
  const std::uint64_t blocks = (total + block - 1) / block;
  const int workers = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(thread_count()), blocks));

  auto run_block = [&](std::uint64_t b) {
    const std::uint64_t begin = b * block;
    fn(begin, std::min(total, begin + block));
  };
  if (workers <= 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
    return;
  }

  std::atomic<std::uint64_t> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::uint64_t b = cursor++; b < blocks; b = cursor++) {
        try {
          run_block(b);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace radiso
