#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace fedpg {

using Rng = std::mt19937_64;

/// Named substreams. Every random draw in training and evaluation comes from
/// a stream keyed by (root seed, role, node, epoch, index), so results do not
/// depend on how work is scheduled across threads.
enum class StreamRole : std::uint32_t {
  kParamInit = 1,
  kScenario = 2,
  kNodeRollout = 3,
  kMasterRollout = 4,
  kSchedule = 5,
  kVirtualEnv = 6,
  kEvalScenario = 7,
  kEvalRollout = 8,
};

Rng derive_stream(std::uint64_t root, StreamRole role, std::uint64_t node = 0,
                  std::uint64_t epoch = 0, std::uint64_t index = 0);

double standard_normal(Rng& rng);

/// Circularly-symmetric complex normal with unit variance
/// (real and imaginary parts each have variance 1/2).
std::complex<double> complex_normal(Rng& rng);

double uniform(Rng& rng, double lo, double hi);

}  // namespace fedpg
