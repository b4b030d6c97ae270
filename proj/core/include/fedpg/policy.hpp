#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "fedpg/action.hpp"
#include "fedpg/random.hpp"

namespace fedpg {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Shape of the shared policy MLP: Tanh hidden layers followed by one Sigmoid
/// output layer carrying both heads (4 Beta parameters, then M blocks of C
/// phase-level scores).
struct PolicyArchitecture {
  int input_dim = 0;
  std::vector<int> hidden;
  int ris_elements = 0;
  int phase_levels = 0;
  double beta_scale = 5.0;

  int output_dim() const { return 4 + ris_elements * phase_levels; }
  int num_layers() const { return static_cast<int>(hidden.size()) + 1; }
  int layer_input(int z) const;
  int layer_output(int z) const;

  friend bool operator==(const PolicyArchitecture&, const PolicyArchitecture&) = default;
};

struct DenseLayer {
  RowMatrix weights;  // out x in
  Eigen::VectorXd bias;

  friend bool operator==(const DenseLayer& a, const DenseLayer& b) {
    return a.weights.rows() == b.weights.rows() && a.weights.cols() == b.weights.cols() &&
           a.bias.size() == b.bias.size() && a.weights == b.weights && a.bias == b.bias;
  }
};

/// Layered parameter container. Also used for gradients, which share the
/// parameter layout. Flattening order: layer by layer, weights row-major,
/// then biases.
class PolicyParams {
 public:
  PolicyParams() = default;
  explicit PolicyParams(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {}

  static PolicyParams zeros(const PolicyArchitecture& arch);
  static PolicyParams unflatten(const Eigen::VectorXd& flat, const PolicyArchitecture& arch);

  int num_layers() const { return static_cast<int>(layers_.size()); }
  const DenseLayer& layer(int z) const { return layers_.at(static_cast<std::size_t>(z)); }
  DenseLayer& layer(int z) { return layers_.at(static_cast<std::size_t>(z)); }

  std::size_t size() const;
  Eigen::VectorXd flatten() const;
  bool same_shape(const PolicyParams& other) const;

  /// this += step * direction. Throws on shape mismatch.
  void axpy(double step, const PolicyParams& direction);
  void scale(double factor);

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;

 private:
  std::vector<DenseLayer> layers_;
};

/// Glorot-uniform weights, zero biases.
PolicyParams init_params(const PolicyArchitecture& arch, Rng& rng);

/// params + step * direction, with `direction` in flattened layout.
PolicyParams axpy_update(const PolicyParams& params, const Eigen::VectorXd& direction,
                         double step);

struct BetaParams {
  double alpha = 1.0;
  double beta = 1.0;
};

struct ActionDistribution {
  BetaParams yaw;
  BetaParams speed;
  Eigen::MatrixXd phase_probs;  // M x C, rows sum to one
};

struct SampledAction {
  ActionValue action;
  double log_prob = 0.0;
};

double beta_log_density(double x, const BetaParams& p);

/// Stateless evaluator for a given architecture and UAV speed limit.
///
/// Action log-probabilities are those of the unit-interval Beta variates and
/// the categorical levels; the constant Jacobians of the yaw and speed
/// scalings are left out since they do not depend on the parameters.
class PolicyNetwork {
 public:
  static constexpr double kBoundaryEps = 1e-9;

  PolicyNetwork(PolicyArchitecture arch, double max_speed);

  const PolicyArchitecture& architecture() const { return arch_; }
  double max_speed() const { return max_speed_; }

  ActionDistribution forward(const PolicyParams& params, const Eigen::VectorXd& state) const;
  SampledAction sample_action(const ActionDistribution& dist, Rng& rng) const;
  double log_prob(const PolicyParams& params, const Eigen::VectorXd& state,
                  const ActionValue& action) const;
  double log_prob(const ActionDistribution& dist, const ActionValue& action) const;

  /// Exact gradient of log_prob with respect to every parameter.
  PolicyParams backward_logprob(const PolicyParams& params, const Eigen::VectorXd& state,
                                const ActionValue& action) const;

  /// grad += weight * d log_prob / d params; returns log_prob.
  double accumulate_logprob_gradient(const PolicyParams& params, const Eigen::VectorXd& state,
                                     const ActionValue& action, double weight,
                                     PolicyParams& grad) const;

  /// Throws std::invalid_argument on params/architecture mismatch.
  void check_params(const PolicyParams& params) const;

 private:
  struct Pass {
    std::vector<Eigen::VectorXd> activations;  // input, hidden..., sigmoid output
  };
  Pass run(const PolicyParams& params, const Eigen::VectorXd& state) const;
  ActionDistribution distribution_from_output(const Eigen::VectorXd& y) const;
  void unit_variates(const ActionValue& action, double& x_yaw, double& x_speed) const;

  PolicyArchitecture arch_;
  double max_speed_;
};

}  // namespace fedpg
