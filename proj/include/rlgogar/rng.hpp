#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace rlgogar {

// SplitMix64 mixing step; used both for seed derivation and generator warm-up.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Fans a master seed out to per-component streams. Chain calls for nested
// streams: derive_seed(derive_seed(master, round), pair).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream ^ 0x632be59bd9b4e019ULL));
}

// Seeded random source. All sampling goes through explicit helpers built on
// raw 64-bit draws so the same seed gives the same sequence everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53 bits of resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  int below(int n) {
    if (n <= 0) throw std::invalid_argument("[rng] below() requires n > 0");
    int v = static_cast<int>(uniform() * static_cast<double>(n));
    return v < n ? v : n - 1;
  }

  // Index sampled according to `probs` (assumed normalized). The final
  // positive-probability index absorbs any floating-point shortfall.
  int categorical(std::span<const double> probs) {
    if (probs.empty()) throw std::invalid_argument("[rng] empty distribution");
    const double u = uniform();
    double cum = 0.0;
    int last_positive = -1;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] > 0.0) last_positive = static_cast<int>(i);
      cum += probs[i];
      if (u < cum) return static_cast<int>(i);
    }
    if (last_positive < 0) throw std::invalid_argument("[rng] all-zero distribution");
    return last_positive;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace rlgogar
