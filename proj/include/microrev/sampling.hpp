#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace microrev::sampling {

/// Events are split into fixed-size partitions, each with its own stream
/// seeded from (seed, partition index). Results do not depend on how many
/// workers run the partitions.
inline constexpr std::uint64_t kPartitionSize = 1u << 16;

std::mt19937_64 partition_engine(std::uint64_t seed, std::uint64_t partition);

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Inverse-CDF draws from a fixed discrete distribution.
class Categorical {
 public:
  /// Weights must be nonnegative with a positive sum; they need not be normalized.
  explicit Categorical(std::span<const double> weights);

  std::size_t operator()(std::mt19937_64& engine) const;
  std::size_t size() const noexcept { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
};

/// Runs `body(partition, first_event, n_in_partition)` for every partition,
/// across hardware threads.
void for_each_partition(
    std::uint64_t n_events,
    const std::function<void(std::uint64_t, std::uint64_t, std::uint64_t)>& body);

}  // namespace microrev::sampling
