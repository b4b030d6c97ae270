#include "fedpg/federated.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <tbb/global_control.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

namespace fedpg {

std::string_view to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::kFedPgAp: return "fedpg_ap";
    case Algorithm::kFedPgNp: return "fedpg_np";
    case Algorithm::kFedPgFp: return "fedpg_fp";
    case Algorithm::kSvrpg: return "svrpg";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view tag) {
  if (tag == "fedpg_ap") return Algorithm::kFedPgAp;
  if (tag == "fedpg_np") return Algorithm::kFedPgNp;
  if (tag == "fedpg_fp") return Algorithm::kFedPgFp;
  if (tag == "svrpg") return Algorithm::kSvrpg;
  throw std::invalid_argument("unknown algorithm tag '" + std::string(tag) + "'");
}

int PartitionState::effective(int num_layers) const {
  return std::clamp(e0 + delta_e, 0, num_layers);
}

PolicyParams inherit_params(const PolicyParams& local, const PolicyParams& global, int e) {
  if (!local.same_shape(global)) throw std::invalid_argument("inherit_params: shape mismatch");
  PolicyParams out = global;
  for (int z = 0; z < std::min(e, out.num_layers()); ++z) out.layer(z) = local.layer(z);
  return out;
}

Eigen::MatrixXd pairwise_distances(const std::vector<Eigen::VectorXd>& grads) {
  const auto n = static_cast<Eigen::Index>(grads.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto& a = grads[static_cast<std::size_t>(i)];
      const auto& b = grads[static_cast<std::size_t>(j)];
      if (a.size() != b.size()) throw std::invalid_argument("pairwise_distances: length mismatch");
      d(i, j) = d(j, i) = (a - b).norm();
    }
  }
  return d;
}

int median_node(const Eigen::MatrixXd& distances) {
  const auto n = distances.rows();
  if (n < 2 || distances.cols() != n) {
    throw std::invalid_argument("median_node: need a square matrix for at least two nodes");
  }
  int best = 0;
  double best_median = 0.0;
  std::vector<double> others;
  for (Eigen::Index i = 0; i < n; ++i) {
    others.clear();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) others.push_back(distances(i, j));
    }
    std::sort(others.begin(), others.end());
    const std::size_t k = others.size();
    const double med = k % 2 == 1 ? others[k / 2] : 0.5 * (others[k / 2 - 1] + others[k / 2]);
    if (i == 0 || med < best_median) {
      best = static_cast<int>(i);
      best_median = med;
    }
  }
  return best;
}

std::vector<int> adapt_partition(const Eigen::MatrixXd& distances, int median,
                                 double sigma_close, double sigma_far) {
  if (!(sigma_close < sigma_far)) {
    throw std::invalid_argument("adapt_partition: sigma_close must be below sigma_far");
  }
  std::vector<int> delta(static_cast<std::size_t>(distances.rows()), 0);
  for (Eigen::Index n = 0; n < distances.rows(); ++n) {
    const double d = distances(n, median);
    if (d > sigma_far) delta[static_cast<std::size_t>(n)] = -1;  // global enhance
    if (d < sigma_close) delta[static_cast<std::size_t>(n)] = 1;  // local enhance
  }
  return delta;
}

Eigen::VectorXd aggregate(const std::vector<Eigen::VectorXd>& grads) {
  if (grads.empty()) throw std::invalid_argument("aggregate: no gradients");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(grads.front().size());
  for (const auto& g : grads) {
    if (g.size() != sum.size()) throw std::invalid_argument("aggregate: length mismatch");
    sum += g;
  }
  return sum / static_cast<double>(grads.size());
}

struct FederatedTrainer::Arena {
  explicit Arena(int threads)
      : limit(tbb::global_control::max_allowed_parallelism, static_cast<std::size_t>(threads)),
        arena(threads) {}
  tbb::global_control limit;  // lets the pool exceed the hardware thread count
  tbb::task_arena arena;
};

struct FederatedTrainer::NodeEpoch {
  Eigen::VectorXd mu;
  double surrogate = 0.0;
  double mean_total_reward = 0.0;
};

namespace {

PolicyArchitecture architecture_for(const ScenarioSpec& s, const TrainingConfig& c) {
  PolicyArchitecture a;
  a.input_dim = s.state_dim();
  a.hidden = c.hidden;
  a.ris_elements = s.ris_elements;
  a.phase_levels = s.phase_levels;
  a.beta_scale = c.beta_scale;
  return a;
}

void validate(const TrainingConfig& c, int layers) {
  if (c.batch_min < 1 || c.batch_max < c.batch_min) {
    throw std::invalid_argument("training: invalid batch range");
  }
  if (c.inner_batch < 1) throw std::invalid_argument("training: inner batch must be >= 1");
  if (c.e0 < 0 || c.e0 > layers) throw std::invalid_argument("training: e0 outside [0, Z]");
  if (!(c.sigma_close < c.sigma_far)) {
    throw std::invalid_argument("training: sigma_close must be below sigma_far");
  }
  if (c.inner_loop_cap < 1) throw std::invalid_argument("training: inner loop cap must be >= 1");
  if (!std::isfinite(c.step_size)) throw std::invalid_argument("training: step size must be finite");
}

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

FederatedTrainer::FederatedTrainer(ScenarioTemplate base, ScenarioSpec scenario,
                                   TrainingConfig config, std::uint64_t seed)
    : base_(std::move(base)),
      scenario_(std::move(scenario)),
      config_(std::move(config)),
      net_(architecture_for(scenario_, config_), scenario_.hotspots.at(0).uav_max_step),
      envs_(make_envs(scenario_)),
      stats_(extract_stats(scenario_)) {
  const PolicyArchitecture& arch = net_.architecture();
  validate(config_, arch.num_layers());
  const int n = static_cast<int>(scenario_.hotspots.size());
  const int workers = config_.workers > 0 ? config_.workers : n;
  arena_ = std::make_unique<Arena>(workers);

  state_.algorithm = config_.algorithm;
  state_.architecture = arch;
  state_.seed = seed;
  Rng global_rng = derive_stream(seed, StreamRole::kParamInit, 0);
  state_.global = init_params(arch, global_rng);
  const int e0 = config_.algorithm == Algorithm::kFedPgNp ? 0 : config_.e0;
  for (int i = 0; i < n; ++i) {
    Rng node_rng = derive_stream(seed, StreamRole::kParamInit, static_cast<std::uint64_t>(i) + 1);
    state_.nodes.push_back({i, init_params(arch, node_rng), {e0, 0}});
  }
}

FederatedTrainer::~FederatedTrainer() = default;

void FederatedTrainer::restore(TrainerState state) {
  if (state.architecture != net_.architecture() || state.nodes.size() != state_.nodes.size()) {
    throw std::invalid_argument("restore: architecture or node count mismatch");
  }
  net_.check_params(state.global);
  for (const auto& node : state.nodes) net_.check_params(node.params);
  state_ = std::move(state);
}

bool FederatedTrainer::finished() const {
  if (state_.traces_consumed >= config_.trace_budget) return true;
  return config_.max_epochs > 0 && state_.epoch >= config_.max_epochs;
}

PolicyParams deployed_params(const TrainerState& state, int node) {
  const NodeState& ns = state.nodes.at(static_cast<std::size_t>(node));
  if (state.algorithm == Algorithm::kSvrpg) return ns.params;
  return inherit_params(ns.params, state.global,
                        ns.partition.effective(state.architecture.num_layers()));
}

PolicyParams FederatedTrainer::deployed_params(int node) const {
  return fedpg::deployed_params(state_, node);
}

std::vector<ExperienceTrace> FederatedTrainer::collect(const PolicyParams& params,
                                                       const HotspotEnv& env, StreamRole role,
                                                       std::uint64_t node, int epoch,
                                                       std::uint64_t first_index,
                                                       int count) const {
  std::vector<ExperienceTrace> traces(static_cast<std::size_t>(count));
  tbb::parallel_for(0, count, [&](int i) {
    Rng rng = derive_stream(state_.seed, role, node, static_cast<std::uint64_t>(epoch),
                            first_index + static_cast<std::uint64_t>(i));
    traces[static_cast<std::size_t>(i)] = rollout(net_, params, env, rng);
  });
  return traces;
}

EpochReport FederatedTrainer::run_epoch() {
  const int epoch = state_.epoch + 1;
  Rng schedule = derive_stream(state_.seed, StreamRole::kSchedule, 0,
                               static_cast<std::uint64_t>(epoch));
  std::uniform_int_distribution<int> batch_dist(config_.batch_min, config_.batch_max);
  const int batch = batch_dist(schedule);
  const int inner_len =
      sample_inner_length(batch, config_.inner_batch, schedule, config_.inner_loop_cap);

  EpochReport report;
  try {
    arena_->arena.execute([&] {
      report = config_.algorithm == Algorithm::kSvrpg ? svrpg_epoch(epoch, batch, inner_len)
                                                      : federated_epoch(epoch, batch, inner_len);
    });
  } catch (const std::domain_error& e) {
    throw NumericError(epoch, e.what());
  }
  state_.epoch = epoch;
  report.epoch = epoch;
  report.traces_consumed = state_.traces_consumed;
  report.batch_size = batch;
  report.inner_loop_len = inner_len;
  return report;
}

void FederatedTrainer::finish_report(EpochReport& report,
                                     const std::vector<NodeEpoch>& nodes) const {
  std::vector<Eigen::VectorXd> mus;
  double surrogate = 0.0;
  for (const auto& ne : nodes) {
    mus.push_back(ne.mu);
    report.mean_total_reward.push_back(ne.mean_total_reward);
    report.grad_norm.push_back(ne.mu.norm());
    surrogate += ne.surrogate;
  }
  report.surrogate_loss = -surrogate / static_cast<double>(nodes.size());
  report.distances = pairwise_distances(mus);
  const auto n = report.distances.rows();
  double sum = 0.0;
  int pairs = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      sum += report.distances(i, j);
      ++pairs;
    }
  }
  report.mean_pairwise_distance = pairs > 0 ? sum / pairs : 0.0;
  report.median_node = n >= 2 ? median_node(report.distances) : 0;
}

EpochReport FederatedTrainer::federated_epoch(int epoch, int batch, int inner_len) {
  const int n_nodes = static_cast<int>(state_.nodes.size());
  const int layers = net_.architecture().num_layers();
  const double gamma = scenario_.discount;
  const PolicyParams snapshot = state_.global;

  // Local phase: inherit, roll out B traces, estimate mu_n.
  std::vector<NodeEpoch> node_epochs(static_cast<std::size_t>(n_nodes));
  tbb::parallel_for(0, n_nodes, [&](int n) {
    NodeState& node = state_.nodes[static_cast<std::size_t>(n)];
    node.params = inherit_params(node.params, snapshot, node.partition.effective(layers));
    const auto traces = collect(node.params, envs_[static_cast<std::size_t>(n)],
                                StreamRole::kNodeRollout, static_cast<std::uint64_t>(n), epoch, 0,
                                batch);
    GradientEstimate est = gpomdp_gradient(net_, node.params, traces, gamma);
    NodeEpoch& out = node_epochs[static_cast<std::size_t>(n)];
    out.mu = std::move(est.flat);
    out.surrogate = est.surrogate;
    for (const auto& t : traces) out.mean_total_reward += t.total_reward();
    out.mean_total_reward /= static_cast<double>(traces.size());
  });
  for (int n = 0; n < n_nodes; ++n) {
    if (!all_finite(node_epochs[static_cast<std::size_t>(n)].mu)) {
      throw NumericError(epoch, "non-finite local gradient at node " + std::to_string(n));
    }
  }

  EpochReport report;
  finish_report(report, node_epochs);

  // Adaptive personalization decides the partition used next epoch.
  if (config_.algorithm == Algorithm::kFedPgAp) {
    report.delta_e =
        adapt_partition(report.distances, report.median_node, config_.sigma_close, config_.sigma_far);
  } else {
    report.delta_e.assign(static_cast<std::size_t>(n_nodes), 0);
  }
  for (int n = 0; n < n_nodes; ++n) {
    state_.nodes[static_cast<std::size_t>(n)].partition.delta_e =
        report.delta_e[static_cast<std::size_t>(n)];
  }

  std::vector<Eigen::VectorXd> mus;
  for (auto& ne : node_epochs) mus.push_back(ne.mu);
  const Eigen::VectorXd mu = aggregate(mus);

  // Master inner loop on a freshly sampled virtual environment.
  Rng venv_rng = derive_stream(state_.seed, StreamRole::kVirtualEnv, 0,
                               static_cast<std::uint64_t>(epoch));
  const ScenarioSpec virtual_scenario =
      build_virtual_env(stats_, config_.virtual_env, base_, n_nodes, venv_rng);
  const auto venvs = make_envs(virtual_scenario);

  PolicyParams theta = snapshot;
  const int b = config_.inner_batch;
  for (int m = 0; m < inner_len; ++m) {
    std::vector<ExperienceTrace> traces(static_cast<std::size_t>(b));
    tbb::parallel_for(0, b, [&](int j) {
      Rng rng = derive_stream(state_.seed, StreamRole::kMasterRollout, 0,
                              static_cast<std::uint64_t>(epoch),
                              static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(b) +
                                  static_cast<std::uint64_t>(j));
      traces[static_cast<std::size_t>(j)] =
          rollout(net_, theta, venvs[static_cast<std::size_t>(j) % venvs.size()], rng);
    });
    const Eigen::VectorXd v = svrpg_direction(net_, mu, traces, theta, snapshot, gamma, config_.clip);
    if (!all_finite(v)) throw NumericError(epoch, "non-finite global update direction");
    theta = axpy_update(theta, v, config_.step_size);
    if (!all_finite(theta.flatten())) throw NumericError(epoch, "non-finite global parameters");
  }
  state_.global = std::move(theta);
  state_.traces_consumed += static_cast<std::uint64_t>(n_nodes) * static_cast<std::uint64_t>(batch) +
                            static_cast<std::uint64_t>(inner_len) * static_cast<std::uint64_t>(b);
  return report;
}

EpochReport FederatedTrainer::svrpg_epoch(int epoch, int batch, int inner_len) {
  const int n_nodes = static_cast<int>(state_.nodes.size());
  const double gamma = scenario_.discount;
  const int b = config_.inner_batch;

  std::vector<NodeEpoch> node_epochs(static_cast<std::size_t>(n_nodes));
  std::vector<int> failed(static_cast<std::size_t>(n_nodes), 0);
  tbb::parallel_for(0, n_nodes, [&](int n) {
    NodeState& node = state_.nodes[static_cast<std::size_t>(n)];
    const HotspotEnv& env = envs_[static_cast<std::size_t>(n)];
    const PolicyParams snapshot = node.params;
    const auto traces = collect(snapshot, env, StreamRole::kNodeRollout,
                                static_cast<std::uint64_t>(n), epoch, 0, batch);
    GradientEstimate est = gpomdp_gradient(net_, snapshot, traces, gamma);
    NodeEpoch& out = node_epochs[static_cast<std::size_t>(n)];
    out.mu = est.flat;
    out.surrogate = est.surrogate;
    for (const auto& t : traces) out.mean_total_reward += t.total_reward();
    out.mean_total_reward /= static_cast<double>(traces.size());
    if (!all_finite(out.mu)) {
      failed[static_cast<std::size_t>(n)] = 1;
      return;
    }

    PolicyParams theta = snapshot;
    for (int m = 0; m < inner_len; ++m) {
      const auto inner = collect(theta, env, StreamRole::kMasterRollout,
                                 static_cast<std::uint64_t>(n), epoch,
                                 static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(b), b);
      const Eigen::VectorXd v = svrpg_direction(net_, out.mu, inner, theta, snapshot, gamma,
                                                config_.clip);
      if (!all_finite(v)) {
        failed[static_cast<std::size_t>(n)] = 2;
        return;
      }
      theta = axpy_update(theta, v, config_.step_size);
      if (!all_finite(theta.flatten())) {
        failed[static_cast<std::size_t>(n)] = 3;
        return;
      }
    }
    node.params = std::move(theta);
  });
  for (int n = 0; n < n_nodes; ++n) {
    if (failed[static_cast<std::size_t>(n)] != 0) {
      throw NumericError(epoch, "non-finite gradient or parameters at node " + std::to_string(n));
    }
  }

  EpochReport report;
  finish_report(report, node_epochs);
  report.delta_e.assign(static_cast<std::size_t>(n_nodes), 0);
  state_.traces_consumed +=
      static_cast<std::uint64_t>(n_nodes) *
      (static_cast<std::uint64_t>(batch) +
       static_cast<std::uint64_t>(inner_len) * static_cast<std::uint64_t>(b));
  return report;
}

}  // namespace fedpg
