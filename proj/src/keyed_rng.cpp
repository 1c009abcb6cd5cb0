#include "mono3d/keyed_rng.hpp"

namespace mono3d {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

KeyedRng::KeyedRng(std::uint64_t seed, std::string_view frame_id,
                   std::uint64_t index, std::uint64_t stream) {
  std::uint64_t k = splitmix64(seed);
  k = splitmix64(k ^ fnv1a64(frame_id));
  k = splitmix64(k ^ index);
  key_ = splitmix64(k ^ (stream * 0xd1342543de82ef95ULL));
}

std::uint64_t KeyedRng::next_u64() {
  return splitmix64(key_ ^ splitmix64(counter_++));
}

double KeyedRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::int64_t KeyedRng::uniform_int(std::int64_t lo, std::int64_t hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next_u64());  // full range
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t r;
  do {
    r = next_u64();
  } while (r >= limit);
  return lo + static_cast<std::int64_t>(r % span);
}

}  // namespace mono3d
