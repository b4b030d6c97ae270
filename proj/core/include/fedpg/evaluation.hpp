#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fedpg/env.hpp"
#include "fedpg/policy.hpp"

namespace fedpg {

/// Least-squares slope of y against t = 0, 1, ..., n-1.
double least_squares_slope(std::span<const double> y);

/// Cross-run statistics of per-time mean-rate curves.
struct RateSummary {
  std::vector<double> mean;  // per t, over runs
  std::vector<double> std_dev;  // population std over runs
  std::vector<double> cv;    // std / mean; 0 where the mean is 0
  double slope_deviation = 0.0;  // |slope| of the mean curve
};

/// `curves[r][t]`; every run must have the same length.
RateSummary summarize_rate_curves(const std::vector<std::vector<double>>& curves);

struct EvaluationResult {
  std::vector<std::vector<double>> curves;  // runs x horizon, mean active-user rate
  RateSummary summary;
};

/// Deploys `policies[n]` on hotspot n of a freshly generated scenario in each
/// run and records the hotspot-averaged mean active-user rate per time step.
EvaluationResult evaluate(const PolicyNetwork& net, const std::vector<PolicyParams>& policies,
                          const ScenarioTemplate& base, const Heterogeneity& heterogeneity,
                          int runs, std::uint64_t seed);

}  // namespace fedpg
