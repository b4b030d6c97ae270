#include "fedpg/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <tbb/parallel_for.h>

namespace fedpg {

std::vector<double> discounted_returns(std::span<const double> rewards, double gamma) {
  if (rewards.empty()) throw std::invalid_argument("discounted_returns: empty reward list");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("discounted_returns: gamma must lie in (0, 1)");
  }
  std::vector<double> out(rewards.size());
  double running = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    running = rewards[i] + gamma * running;
    out[i] = running;
  }
  return out;
}

std::vector<double> normalize_advantage(std::span<const double> returns) {
  if (returns.empty()) return {};
  const double n = static_cast<double>(returns.size());
  const double mean = std::accumulate(returns.begin(), returns.end(), 0.0) / n;
  double var = 0.0;
  for (double r : returns) var += (r - mean) * (r - mean);
  const double std_dev = std::sqrt(var / n);
  std::vector<double> out(returns.size(), 0.0);
  if (std_dev < kAdvantageStdFloor) return out;
  for (std::size_t i = 0; i < returns.size(); ++i) out[i] = (returns[i] - mean) / std_dev;
  return out;
}

std::vector<double> trace_advantages(const ExperienceTrace& trace, double gamma) {
  const std::vector<double> r = trace.rewards();
  return normalize_advantage(discounted_returns(r, gamma));
}

TraceGradient trace_gradient(const PolicyNetwork& net, const PolicyParams& params,
                             const ExperienceTrace& trace, std::span<const double> advantages) {
  if (advantages.size() != trace.steps.size()) {
    throw std::invalid_argument("trace_gradient: advantage length mismatch");
  }
  PolicyParams grad = PolicyParams::zeros(net.architecture());
  TraceGradient out;
  for (std::size_t t = 0; t < trace.steps.size(); ++t) {
    const auto& step = trace.steps[t];
    const double lp =
        net.accumulate_logprob_gradient(params, step.state, step.action, advantages[t], grad);
    out.surrogate += advantages[t] * lp;
    out.log_prob += lp;
  }
  out.flat = grad.flatten();
  return out;
}

double clipped_weight(double log_ratio, const WeightClip& clip) {
  const double w = std::exp(log_ratio);
  return clip.enabled ? std::clamp(w, clip.lo, clip.hi) : w;
}

GradientEstimate gpomdp_gradient(const PolicyNetwork& net, const PolicyParams& params,
                                 std::span<const ExperienceTrace> traces, double gamma) {
  if (traces.empty()) throw std::invalid_argument("gpomdp_gradient: empty batch");
  net.check_params(params);
  const std::size_t b = traces.size();
  std::vector<Eigen::VectorXd> per_trace(b);
  std::vector<double> surrogate(b, 0.0);
  tbb::parallel_for(std::size_t{0}, b, [&](std::size_t i) {
    const auto adv = trace_advantages(traces[i], gamma);
    TraceGradient g = trace_gradient(net, params, traces[i], adv);
    per_trace[i] = std::move(g.flat);
    surrogate[i] = g.surrogate;
  });
  GradientEstimate est;
  est.flat = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(params.size()));
  for (std::size_t i = 0; i < b; ++i) {
    est.flat += per_trace[i];
    est.surrogate += surrogate[i];
  }
  est.flat /= static_cast<double>(b);
  est.surrogate /= static_cast<double>(b);
  est.batch_size = b;
  return est;
}

double trace_log_prob(const PolicyNetwork& net, const PolicyParams& params,
                      const ExperienceTrace& trace) {
  double lp = 0.0;
  for (const auto& step : trace.steps) lp += net.log_prob(params, step.state, step.action);
  return lp;
}

double importance_weight(const PolicyNetwork& net, const ExperienceTrace& trace,
                         const PolicyParams& params_old, const PolicyParams& params_new,
                         const WeightClip& clip) {
  return clipped_weight(
      trace_log_prob(net, params_old, trace) - trace_log_prob(net, params_new, trace), clip);
}

Eigen::VectorXd svrpg_direction(const PolicyNetwork& net, const Eigen::VectorXd& mu_bar,
                                std::span<const ExperienceTrace> traces_m,
                                const PolicyParams& params_m, const PolicyParams& snapshot,
                                double gamma, const WeightClip& clip) {
  if (traces_m.empty()) throw std::invalid_argument("svrpg_direction: empty inner batch");
  if (static_cast<std::size_t>(mu_bar.size()) != params_m.size() ||
      !params_m.same_shape(snapshot)) {
    throw std::invalid_argument("svrpg_direction: shape mismatch");
  }
  const std::size_t b = traces_m.size();
  std::vector<Eigen::VectorXd> correction(b);
  tbb::parallel_for(std::size_t{0}, b, [&](std::size_t j) {
    const auto& trace = traces_m[j];
    const auto adv = trace_advantages(trace, gamma);
    const TraceGradient current = trace_gradient(net, params_m, trace, adv);
    const TraceGradient snap = trace_gradient(net, snapshot, trace, adv);
    const double w = clipped_weight(snap.log_prob - current.log_prob, clip);
    correction[j] = current.flat - w * snap.flat;
  });
  Eigen::VectorXd kappa = Eigen::VectorXd::Zero(mu_bar.size());
  for (const auto& c : correction) kappa += c;
  kappa /= static_cast<double>(b);
  return mu_bar + kappa;
}

int sample_inner_length(int big_batch, int small_batch, Rng& rng, int cap) {
  if (big_batch < 1 || small_batch < 0 || cap < 1) {
    throw std::invalid_argument("sample_inner_length: invalid batch sizes");
  }
  const double p = static_cast<double>(big_batch) / (big_batch + small_batch);
  if (p >= 1.0) return 1;
  std::geometric_distribution<int> failures(p);
  return std::min(1 + failures(rng), cap);
}

}  // namespace fedpg
