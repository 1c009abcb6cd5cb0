#pragma once

#include <cstdint>
#include <string_view>

namespace mono3d {

// Counter-based random stream. Every draw is a pure function of
// (seed, frame key, index, stream tag, counter), so results never depend on
// call order or on which thread produced them. The standard <random>
// distributions are avoided on purpose: their output is implementation
// defined and would break cross-platform reproducibility.
class KeyedRng {
 public:
  KeyedRng(std::uint64_t seed, std::string_view frame_id, std::uint64_t index,
           std::uint64_t stream = 0);

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform();

  // Uniform in [lo, hi]; requires lo <= hi. Unbiased (rejection sampling).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace mono3d
