#ifndef TABSYNTH_RNG_HPP
#define TABSYNTH_RNG_HPP

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace tabsynth {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seeded random stream. Only mt19937_64 raw output is used, never the
/// std distributions, so draws are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
  }

  /// Independent child stream keyed by a label; does not advance this stream.
  Rng substream(std::uint64_t key) const {
    return Rng(splitmix64(base_seed_mix() ^ splitmix64(key + 0x632be59bd9b4e019ULL)));
  }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t base_seed_mix() const {
    // Copy so that deriving a substream never perturbs the parent.
    std::mt19937_64 probe = engine_;
    return probe();
  }

  std::mt19937_64 engine_;
};

}  // namespace tabsynth

#endif  // TABSYNTH_RNG_HPP
