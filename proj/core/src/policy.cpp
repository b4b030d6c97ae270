#include "fedpg/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace fedpg {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double log_beta_fn(double a, double b) {
  return boost::math::lgamma(a) + boost::math::lgamma(b) - boost::math::lgamma(a + b);
}

double sample_beta(const BetaParams& p, Rng& rng) {
  std::gamma_distribution<double> ga(p.alpha, 1.0);
  std::gamma_distribution<double> gb(p.beta, 1.0);
  const double a = ga(rng);
  const double b = gb(rng);
  return a / (a + b);
}

}  // namespace

int PolicyArchitecture::layer_input(int z) const {
  return z == 0 ? input_dim : hidden.at(static_cast<std::size_t>(z - 1));
}

int PolicyArchitecture::layer_output(int z) const {
  return z == num_layers() - 1 ? output_dim() : hidden.at(static_cast<std::size_t>(z));
}

PolicyParams PolicyParams::zeros(const PolicyArchitecture& arch) {
  std::vector<DenseLayer> layers;
  for (int z = 0; z < arch.num_layers(); ++z) {
    layers.push_back({RowMatrix::Zero(arch.layer_output(z), arch.layer_input(z)),
                      Eigen::VectorXd::Zero(arch.layer_output(z))});
  }
  return PolicyParams(std::move(layers));
}

std::size_t PolicyParams::size() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  return n;
}

Eigen::VectorXd PolicyParams::flatten() const {
  Eigen::VectorXd flat(static_cast<Eigen::Index>(size()));
  Eigen::Index offset = 0;
  for (const auto& l : layers_) {
    // RowMajor storage makes the raw buffer row-major already.
    flat.segment(offset, l.weights.size()) =
        Eigen::Map<const Eigen::VectorXd>(l.weights.data(), l.weights.size());
    offset += l.weights.size();
    flat.segment(offset, l.bias.size()) = l.bias;
    offset += l.bias.size();
  }
  return flat;
}

PolicyParams PolicyParams::unflatten(const Eigen::VectorXd& flat, const PolicyArchitecture& arch) {
  PolicyParams p = zeros(arch);
  if (static_cast<std::size_t>(flat.size()) != p.size()) {
    throw std::invalid_argument("unflatten: length does not match architecture");
  }
  Eigen::Index offset = 0;
  for (auto& l : p.layers_) {
    Eigen::Map<Eigen::VectorXd>(l.weights.data(), l.weights.size()) =
        flat.segment(offset, l.weights.size());
    offset += l.weights.size();
    l.bias = flat.segment(offset, l.bias.size());
    offset += l.bias.size();
  }
  return p;
}

bool PolicyParams::same_shape(const PolicyParams& other) const {
  if (layers_.size() != other.layers_.size()) return false;
  for (std::size_t z = 0; z < layers_.size(); ++z) {
    const auto& a = layers_[z];
    const auto& b = other.layers_[z];
    if (a.weights.rows() != b.weights.rows() || a.weights.cols() != b.weights.cols() ||
        a.bias.size() != b.bias.size()) {
      return false;
    }
  }
  return true;
}

void PolicyParams::axpy(double step, const PolicyParams& direction) {
  if (!same_shape(direction)) throw std::invalid_argument("axpy: shape mismatch");
  for (std::size_t z = 0; z < layers_.size(); ++z) {
    layers_[z].weights += step * direction.layers_[z].weights;
    layers_[z].bias += step * direction.layers_[z].bias;
  }
}

void PolicyParams::scale(double factor) {
  for (auto& l : layers_) {
    l.weights *= factor;
    l.bias *= factor;
  }
}

PolicyParams init_params(const PolicyArchitecture& arch, Rng& rng) {
  PolicyParams p = PolicyParams::zeros(arch);
  for (int z = 0; z < arch.num_layers(); ++z) {
    auto& w = p.layer(z).weights;
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = dist(rng);
    }
  }
  return p;
}

PolicyParams axpy_update(const PolicyParams& params, const Eigen::VectorXd& direction,
                         double step) {
  if (static_cast<std::size_t>(direction.size()) != params.size()) {
    throw std::invalid_argument("axpy_update: shape mismatch");
  }
  // Layer-wise update through the flattened layout.
  Eigen::VectorXd flat = params.flatten();
  flat += step * direction;
  PolicyParams out = params;
  Eigen::Index offset = 0;
  for (int z = 0; z < out.num_layers(); ++z) {
    auto& l = out.layer(z);
    Eigen::Map<Eigen::VectorXd>(l.weights.data(), l.weights.size()) =
        flat.segment(offset, l.weights.size());
    offset += l.weights.size();
    l.bias = flat.segment(offset, l.bias.size());
    offset += l.bias.size();
  }
  return out;
}

double beta_log_density(double x, const BetaParams& p) {
  return (p.alpha - 1.0) * std::log(x) + (p.beta - 1.0) * std::log1p(-x) -
         log_beta_fn(p.alpha, p.beta);
}

PolicyNetwork::PolicyNetwork(PolicyArchitecture arch, double max_speed)
    : arch_(std::move(arch)), max_speed_(max_speed) {
  if (arch_.input_dim < 1 || arch_.ris_elements < 1 || arch_.phase_levels < 1) {
    throw std::invalid_argument("PolicyNetwork: widths must be >= 1");
  }
  for (int h : arch_.hidden) {
    if (h < 1) throw std::invalid_argument("PolicyNetwork: hidden widths must be >= 1");
  }
  if (!(max_speed_ > 0.0)) throw std::invalid_argument("PolicyNetwork: max_speed must be > 0");
}

void PolicyNetwork::check_params(const PolicyParams& params) const {
  if (params.num_layers() != arch_.num_layers()) {
    throw std::invalid_argument("policy: layer count does not match architecture");
  }
  for (int z = 0; z < arch_.num_layers(); ++z) {
    const auto& l = params.layer(z);
    if (l.weights.rows() != arch_.layer_output(z) || l.weights.cols() != arch_.layer_input(z) ||
        l.bias.size() != arch_.layer_output(z)) {
      throw std::invalid_argument("policy: layer shape does not match architecture");
    }
  }
}

PolicyNetwork::Pass PolicyNetwork::run(const PolicyParams& params,
                                       const Eigen::VectorXd& state) const {
  if (state.size() != arch_.input_dim) {
    throw std::invalid_argument("policy: state dimension mismatch");
  }
  check_params(params);
  Pass pass;
  pass.activations.reserve(static_cast<std::size_t>(arch_.num_layers() + 1));
  pass.activations.push_back(state);
  const int last = arch_.num_layers() - 1;
  for (int z = 0; z <= last; ++z) {
    const auto& l = params.layer(z);
    Eigen::VectorXd pre = l.weights * pass.activations.back() + l.bias;
    if (z < last) {
      pass.activations.push_back(pre.array().tanh().matrix());
    } else {
      pass.activations.push_back(pre.unaryExpr([](double v) { return sigmoid(v); }));
    }
  }
  return pass;
}

ActionDistribution PolicyNetwork::distribution_from_output(const Eigen::VectorXd& y) const {
  if (!y.allFinite()) throw std::domain_error("policy output is not finite");
  const double a = arch_.beta_scale;
  ActionDistribution d;
  d.yaw = {1.0 + a * y(0), 1.0 + a * y(1)};
  d.speed = {1.0 + a * y(2), 1.0 + a * y(3)};
  const int m = arch_.ris_elements;
  const int c = arch_.phase_levels;
  d.phase_probs.resize(m, c);
  for (int e = 0; e < m; ++e) {
    const auto scores = y.segment(4 + e * c, c).array();
    const double top = scores.maxCoeff();
    Eigen::ArrayXd w = (scores - top).exp();
    d.phase_probs.row(e) = (w / w.sum()).matrix().transpose();
  }
  return d;
}

ActionDistribution PolicyNetwork::forward(const PolicyParams& params,
                                          const Eigen::VectorXd& state) const {
  return distribution_from_output(run(params, state).activations.back());
}

SampledAction PolicyNetwork::sample_action(const ActionDistribution& dist, Rng& rng) const {
  SampledAction out;
  const double x_yaw = std::clamp(sample_beta(dist.yaw, rng), kBoundaryEps, 1.0 - kBoundaryEps);
  const double x_speed =
      std::clamp(sample_beta(dist.speed, rng), kBoundaryEps, 1.0 - kBoundaryEps);
  out.action.yaw = 2.0 * std::numbers::pi * x_yaw;
  out.action.speed = max_speed_ * x_speed;
  out.log_prob = beta_log_density(x_yaw, dist.yaw) + beta_log_density(x_speed, dist.speed);

  const auto m = dist.phase_probs.rows();
  const auto c = dist.phase_probs.cols();
  out.action.levels.resize(static_cast<std::size_t>(m));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (Eigen::Index e = 0; e < m; ++e) {
    const double u = u01(rng);
    Eigen::Index chosen = c - 1;
    double cdf = 0.0;
    for (Eigen::Index j = 0; j < c; ++j) {
      cdf += dist.phase_probs(e, j);
      if (u < cdf) {
        chosen = j;
        break;
      }
    }
    out.action.levels[static_cast<std::size_t>(e)] = static_cast<int>(chosen) + 1;
    out.log_prob += std::log(dist.phase_probs(e, chosen));
  }
  return out;
}

void PolicyNetwork::unit_variates(const ActionValue& action, double& x_yaw,
                                  double& x_speed) const {
  const double two_pi = 2.0 * std::numbers::pi;
  if (!(action.yaw >= 0.0 && action.yaw < two_pi)) {
    throw std::invalid_argument("policy: yaw outside [0, 2pi)");
  }
  if (!(action.speed >= 0.0 && action.speed <= max_speed_)) {
    throw std::invalid_argument("policy: speed outside [0, max_speed]");
  }
  if (action.levels.size() != static_cast<std::size_t>(arch_.ris_elements)) {
    throw std::invalid_argument("policy: wrong number of phase levels");
  }
  for (int c : action.levels) {
    if (c < 1 || c > arch_.phase_levels) throw std::invalid_argument("policy: phase level out of range");
  }
  x_yaw = std::clamp(action.yaw / two_pi, kBoundaryEps, 1.0 - kBoundaryEps);
  x_speed = std::clamp(action.speed / max_speed_, kBoundaryEps, 1.0 - kBoundaryEps);
}

double PolicyNetwork::log_prob(const ActionDistribution& dist, const ActionValue& action) const {
  double x_yaw = 0.0;
  double x_speed = 0.0;
  unit_variates(action, x_yaw, x_speed);
  double lp = beta_log_density(x_yaw, dist.yaw) + beta_log_density(x_speed, dist.speed);
  for (std::size_t e = 0; e < action.levels.size(); ++e) {
    lp += std::log(dist.phase_probs(static_cast<Eigen::Index>(e), action.levels[e] - 1));
  }
  return lp;
}

double PolicyNetwork::log_prob(const PolicyParams& params, const Eigen::VectorXd& state,
                               const ActionValue& action) const {
  return log_prob(forward(params, state), action);
}

PolicyParams PolicyNetwork::backward_logprob(const PolicyParams& params,
                                             const Eigen::VectorXd& state,
                                             const ActionValue& action) const {
  PolicyParams grad = PolicyParams::zeros(arch_);
  accumulate_logprob_gradient(params, state, action, 1.0, grad);
  return grad;
}

double PolicyNetwork::accumulate_logprob_gradient(const PolicyParams& params,
                                                  const Eigen::VectorXd& state,
                                                  const ActionValue& action, double weight,
                                                  PolicyParams& grad) const {
  double x_yaw = 0.0;
  double x_speed = 0.0;
  unit_variates(action, x_yaw, x_speed);
  if (!grad.same_shape(params)) throw std::invalid_argument("policy: gradient shape mismatch");

  const Pass pass = run(params, state);
  const Eigen::VectorXd& y = pass.activations.back();
  const ActionDistribution dist = distribution_from_output(y);

  // d log_prob / d y
  Eigen::VectorXd dy(y.size());
  const double a = arch_.beta_scale;
  using boost::math::digamma;
  const double psi_yaw = digamma(dist.yaw.alpha + dist.yaw.beta);
  dy(0) = a * (std::log(x_yaw) - digamma(dist.yaw.alpha) + psi_yaw);
  dy(1) = a * (std::log1p(-x_yaw) - digamma(dist.yaw.beta) + psi_yaw);
  const double psi_speed = digamma(dist.speed.alpha + dist.speed.beta);
  dy(2) = a * (std::log(x_speed) - digamma(dist.speed.alpha) + psi_speed);
  dy(3) = a * (std::log1p(-x_speed) - digamma(dist.speed.beta) + psi_speed);
  const int c = arch_.phase_levels;
  double lp = beta_log_density(x_yaw, dist.yaw) + beta_log_density(x_speed, dist.speed);
  for (int e = 0; e < arch_.ris_elements; ++e) {
    const int taken = action.levels[static_cast<std::size_t>(e)] - 1;
    lp += std::log(dist.phase_probs(e, taken));
    dy.segment(4 + e * c, c) = -dist.phase_probs.row(e).transpose();
    dy(4 + e * c + taken) += 1.0;
  }

  // Back through the sigmoid, then the Tanh stack.
  Eigen::VectorXd delta = weight * dy.cwiseProduct(y.cwiseProduct((1.0 - y.array()).matrix()));
  for (int z = arch_.num_layers() - 1; z >= 0; --z) {
    const Eigen::VectorXd& input = pass.activations[static_cast<std::size_t>(z)];
    auto& g = grad.layer(z);
    g.weights.noalias() += delta * input.transpose();
    g.bias += delta;
    if (z > 0) {
      Eigen::VectorXd back = params.layer(z).weights.transpose() * delta;
      delta = back.cwiseProduct((1.0 - input.array().square()).matrix());
    }
  }
  return lp;
}

}  // namespace fedpg
