#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace zpres {

// mt19937_64 with hand-mapped real draws. The engine is bit-specified by the
// standard; the <random> distributions are not, and reproducibility here is
// byte-level.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // [0, 1)
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // [-range, range]
  double next_uniform(double range) { return (2.0 * next_unit() - 1.0) * range; }

  // [0, n); n > 0
  std::size_t next_index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

  bool next_bool() { return (next_u64() & 1u) != 0; }

  // Fisher-Yates
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = next_index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace zpres
