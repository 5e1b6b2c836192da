#pragma once

#include <cstdint>

namespace zinfer {

// Splittable counter-style generator (splitmix64 core). Substreams let the
// simulation harness reproduce DGP i without generating DGPs 0..i-1, and the
// raw-bits-to-double conversion keeps draws identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform on [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // derive an independent substream seed; substream(s, i) != substream(s, j)
  // with overwhelming probability for i != j
  static std::uint64_t substream(std::uint64_t seed, std::uint64_t index) {
    Rng mixer(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
    return mixer.next_u64();
  }

 private:
  std::uint64_t state_;
};

}  // namespace zinfer
