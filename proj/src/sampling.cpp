#include "microrev/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace microrev::sampling {

std::mt19937_64 partition_engine(std::uint64_t seed, std::uint64_t partition) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(partition),
                    static_cast<std::uint32_t>(partition >> 32)};
  return std::mt19937_64(seq);
}

Categorical::Categorical(std::span<const double> weights) {
  cumulative_.reserve(weights.size());
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("Categorical: weights must be finite and nonnegative");
    }
    total += w;
    cumulative_.push_back(total);
  }
  if (!(total > 0.0)) throw std::invalid_argument("Categorical: weights sum to zero");
  for (double& c : cumulative_) c /= total;
  cumulative_.back() = 1.0;
}

std::size_t Categorical::operator()(std::mt19937_64& engine) const {
  const double u = uniform01(engine);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return static_cast<std::size_t>(std::min(it - cumulative_.begin(),
                                            static_cast<std::ptrdiff_t>(cumulative_.size() - 1)));
}

void for_each_partition(
    std::uint64_t n_events,
    const std::function<void(std::uint64_t, std::uint64_t, std::uint64_t)>& body) {
  const std::uint64_t n_partitions = (n_events + kPartitionSize - 1) / kPartitionSize;
  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(
      std::max(1u, std::thread::hardware_concurrency()), n_partitions));

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (std::uint64_t p = next++; p < n_partitions; p = next++) {
      const std::uint64_t first = p * kPartitionSize;
      try {
        body(p, first, std::min(kPartitionSize, n_events - first));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    run();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace microrev::sampling
