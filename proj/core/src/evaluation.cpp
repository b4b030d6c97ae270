#include "fedpg/evaluation.hpp"

#include <cmath>
#include <stdexcept>

namespace fedpg {

double least_squares_slope(std::span<const double> y) {
  const std::size_t n = y.size();
  if (n < 2) return 0.0;
  const double t_mean = 0.5 * static_cast<double>(n - 1);
  double y_mean = 0.0;
  for (double v : y) y_mean += v;
  y_mean /= static_cast<double>(n);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double dt = static_cast<double>(t) - t_mean;
    num += dt * (y[t] - y_mean);
    den += dt * dt;
  }
  return num / den;
}

RateSummary summarize_rate_curves(const std::vector<std::vector<double>>& curves) {
  if (curves.empty()) throw std::invalid_argument("summarize_rate_curves: no runs");
  const std::size_t horizon = curves.front().size();
  for (const auto& c : curves) {
    if (c.size() != horizon) throw std::invalid_argument("summarize_rate_curves: ragged runs");
  }
  const double runs = static_cast<double>(curves.size());
  RateSummary s;
  s.mean.assign(horizon, 0.0);
  s.std_dev.assign(horizon, 0.0);
  s.cv.assign(horizon, 0.0);
  for (std::size_t t = 0; t < horizon; ++t) {
    double sum = 0.0;
    for (const auto& c : curves) sum += c[t];
    const double mean = sum / runs;
    double var = 0.0;
    for (const auto& c : curves) var += (c[t] - mean) * (c[t] - mean);
    s.mean[t] = mean;
    s.std_dev[t] = std::sqrt(var / runs);
    s.cv[t] = mean != 0.0 ? s.std_dev[t] / mean : 0.0;
  }
  s.slope_deviation = std::abs(least_squares_slope(s.mean));
  return s;
}

EvaluationResult evaluate(const PolicyNetwork& net, const std::vector<PolicyParams>& policies,
                          const ScenarioTemplate& base, const Heterogeneity& heterogeneity,
                          int runs, std::uint64_t seed) {
  if (runs < 1) throw std::invalid_argument("evaluate: runs must be >= 1");
  if (policies.empty()) throw std::invalid_argument("evaluate: no policies");
  for (const auto& p : policies) net.check_params(p);
  ScenarioTemplate tmpl = base;
  tmpl.hotspots = static_cast<int>(policies.size());

  EvaluationResult result;
  for (int r = 0; r < runs; ++r) {
    Rng scenario_rng = derive_stream(seed, StreamRole::kEvalScenario, 0, 0,
                                     static_cast<std::uint64_t>(r));
    const ScenarioSpec scenario = generate_heterogeneous_scenario(tmpl, heterogeneity, scenario_rng);
    const auto envs = make_envs(scenario);
    std::vector<double> curve(static_cast<std::size_t>(tmpl.horizon), 0.0);
    for (std::size_t n = 0; n < envs.size(); ++n) {
      Rng rng = derive_stream(seed, StreamRole::kEvalRollout, n, 0, static_cast<std::uint64_t>(r));
      const ExperienceTrace trace = rollout(net, policies[n], envs[n], rng);
      for (std::size_t t = 0; t < trace.steps.size(); ++t) curve[t] += trace.steps[t].reward;
    }
    for (double& v : curve) v /= static_cast<double>(envs.size());
    result.curves.push_back(std::move(curve));
  }
  result.summary = summarize_rate_curves(result.curves);
  return result;
}

}  // namespace fedpg
