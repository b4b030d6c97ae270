#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "fedpg/env.hpp"
#include "fedpg/policy.hpp"
#include "fedpg/random.hpp"

namespace fedpg::testing {

/// State dim 8 is not reachable through 3 + 4K, so the tiny net is used
/// directly with synthetic states.
inline PolicyArchitecture tiny_architecture(int input = 8, std::vector<int> hidden = {8, 8},
                                            int m = 2, int c = 3) {
  PolicyArchitecture a;
  a.input_dim = input;
  a.hidden = std::move(hidden);
  a.ris_elements = m;
  a.phase_levels = c;
  return a;
}

inline ScenarioTemplate tiny_template() {
  ScenarioTemplate t;
  t.hotspots = 2;
  t.users_per_hotspot = 3;
  t.ris_elements = 4;
  t.phase_levels = 4;
  t.ports = {2, 2, 1.0, 1.0};
  t.horizon = 4;
  t.budget = LinkBudget::make(-16.82, -174.0, 2e7, 1.17e10);
  t.rician = RicianParams::from_db(15.0, 10.0, 1.17e10);
  return t;
}

inline ScenarioSpec tiny_scenario(std::uint64_t seed = 7) {
  Rng rng = derive_stream(seed, StreamRole::kScenario);
  return generate_heterogeneous_scenario(tiny_template(), Heterogeneity{}, rng);
}

inline PolicyArchitecture architecture_for(const ScenarioSpec& s, std::vector<int> hidden = {6, 5}) {
  return tiny_architecture(s.state_dim(), std::move(hidden), s.ris_elements, s.phase_levels);
}

inline Eigen::VectorXd random_vector(int n, Rng& rng, double scale = 1.0) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = scale * standard_normal(rng);
  return v;
}

/// Parameters with non-zero biases so every code path sees generic values.
inline PolicyParams random_params(const PolicyArchitecture& arch, Rng& rng, double scale = 0.5) {
  PolicyParams p = init_params(arch, rng);
  for (int z = 0; z < p.num_layers(); ++z) {
    auto& b = p.layer(z).bias;
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = scale * standard_normal(rng);
  }
  return p;
}

inline double rel_error(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace fedpg::testing
