#include "fedpg/random.hpp"

#include <cmath>

namespace fedpg {

Rng derive_stream(std::uint64_t root, StreamRole role, std::uint64_t node,
                  std::uint64_t epoch, std::uint64_t index) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(root),  hi(root),  static_cast<std::uint32_t>(role),
                    lo(node),  hi(node),  lo(epoch),
                    hi(epoch), lo(index), hi(index)};
  return Rng(seq);
}

double standard_normal(Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

std::complex<double> complex_normal(Rng& rng) {
  static const double kScale = std::sqrt(0.5);
  std::normal_distribution<double> dist(0.0, kScale);
  const double re = dist(rng);
  const double im = dist(rng);
  return {re, im};
}

double uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(rng);
}

}  // namespace fedpg
