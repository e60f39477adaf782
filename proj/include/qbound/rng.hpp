#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace qb {

// splitmix64-based generator. Self-contained so that streams are identical
// across platforms and standard-library versions; trial substreams are
// derived from (seed, trial) so parallel and serial suite runs see the same
// draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  static Rng for_trial(std::uint64_t seed, std::uint64_t trial) noexcept {
    std::uint64_t s = seed;
    const std::uint64_t mixed = next_state(s);
    return Rng(mixed ^ (trial * 0xD1B54A32D192ED03ull + 0x2545F4914F6CDD1Dull));
  }

  std::uint64_t next_u64() noexcept { return next_state(state_); }

  // strictly inside (0, 1)
  double uniform01() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform01();
  }

  double log_uniform(double lo, double hi) noexcept {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  // inclusive bounds
  int uniform_int(int lo, int hi) noexcept {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    const auto scaled = static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * span) >> 64);
    return lo + static_cast<int>(scaled);
  }

  // uniform on the k-simplex (exponential spacings, normalized)
  std::vector<double> dirichlet(std::size_t k) {
    std::vector<double> w(k);
    double total = 0.0;
    for (double& v : w) {
      v = -std::log(uniform01());
      total += v;
    }
    for (double& v : w) v /= total;
    return w;
  }

 private:
  static std::uint64_t next_state(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace qb
