#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fedpg/env.hpp"
#include "fedpg/policy.hpp"
#include "fedpg/random.hpp"

namespace fedpg {

/// R[t] = r[t] + gamma * R[t+1]. Throws on empty input or gamma outside (0, 1).
std::vector<double> discounted_returns(std::span<const double> rewards, double gamma);

/// (R - mean) / std over the time axis, population std. A spread below
/// kAdvantageStdFloor is treated as zero spread.
inline constexpr double kAdvantageStdFloor = 1e-8;
std::vector<double> normalize_advantage(std::span<const double> returns);

/// Advantages of one trace: normalized discounted returns-to-go.
std::vector<double> trace_advantages(const ExperienceTrace& trace, double gamma);

struct WeightClip {
  double lo = 1e-4;
  double hi = 1e4;
  bool enabled = true;
};

struct GradientEstimate {
  Eigen::VectorXd flat;  // ascent direction, flattened parameter layout
  std::size_t batch_size = 0;
  double surrogate = 0.0;  // (1/B) sum_i sum_t A log pi
};

struct TraceGradient {
  Eigen::VectorXd flat;
  double surrogate = 0.0;  // sum_t A[t] log pi(a_t | s_t)
  double log_prob = 0.0;   // sum_t log pi(a_t | s_t)
};

/// g(tau | theta) = sum_t A[t] grad log pi(a_t | s_t), in ascent orientation.
TraceGradient trace_gradient(const PolicyNetwork& net, const PolicyParams& params,
                             const ExperienceTrace& trace, std::span<const double> advantages);

/// Clamps an importance weight exp(log_ratio) according to `clip`.
double clipped_weight(double log_ratio, const WeightClip& clip);

/// Batch mean of the per-trace GPOMDP gradients. Per-trace work runs on the
/// calling TBB arena; the reduction is in trace order.
GradientEstimate gpomdp_gradient(const PolicyNetwork& net, const PolicyParams& params,
                                 std::span<const ExperienceTrace> traces, double gamma);

double trace_log_prob(const PolicyNetwork& net, const PolicyParams& params,
                      const ExperienceTrace& trace);

/// p(tau | old) / p(tau | new); the dynamics cancel, leaving the policy
/// log-likelihood difference.
double importance_weight(const PolicyNetwork& net, const ExperienceTrace& trace,
                         const PolicyParams& params_old, const PolicyParams& params_new,
                         const WeightClip& clip = {});

/// v = mu + (1/b) sum_j [g(tau_j | theta_m) - w_j g(tau_j | snapshot)], with
/// w_j = p(tau_j | snapshot) / p(tau_j | theta_m).
Eigen::VectorXd svrpg_direction(const PolicyNetwork& net, const Eigen::VectorXd& mu_bar,
                                std::span<const ExperienceTrace> traces_m,
                                const PolicyParams& params_m, const PolicyParams& snapshot,
                                double gamma, const WeightClip& clip = {});

/// Inner-loop length ~ Geometric(B / (B + b)) on {1, 2, ...}, capped at `cap`.
int sample_inner_length(int big_batch, int small_batch, Rng& rng, int cap = 50);

}  // namespace fedpg
