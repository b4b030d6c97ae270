#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fedpg/env.hpp"
#include "fedpg/estimator.hpp"
#include "fedpg/policy.hpp"

namespace fedpg {

enum class Algorithm { kFedPgAp, kFedPgNp, kFedPgFp, kSvrpg };

std::string_view to_string(Algorithm algo);
/// Accepts "fedpg_ap", "fedpg_np", "fedpg_fp", "svrpg".
Algorithm parse_algorithm(std::string_view tag);

/// Node partition: layers z < effective() keep node-local parameters, the
/// rest are taken from the global policy. delta_e is recomputed every epoch
/// and never accumulates.
struct PartitionState {
  int e0 = 1;
  int delta_e = 0;

  int effective(int num_layers) const;
  friend bool operator==(const PartitionState&, const PartitionState&) = default;
};

/// Layers z < e from `local`, layers z >= e from `global`.
PolicyParams inherit_params(const PolicyParams& local, const PolicyParams& global, int e);

/// Euclidean distances between flattened gradients.
Eigen::MatrixXd pairwise_distances(const std::vector<Eigen::VectorXd>& grads);

/// Node whose median distance to the other nodes is smallest. Even counts
/// use the mean of the two middle values; ties go to the lowest index.
/// Throws for fewer than two nodes.
int median_node(const Eigen::MatrixXd& distances);

/// +1 (keep one more layer local) when a node is within sigma_close of the
/// median node, -1 (one more global layer) beyond sigma_far, else 0.
std::vector<int> adapt_partition(const Eigen::MatrixXd& distances, int median,
                                 double sigma_close, double sigma_far);

/// Arithmetic mean, reduced in node order.
Eigen::VectorXd aggregate(const std::vector<Eigen::VectorXd>& grads);

struct TrainingConfig {
  Algorithm algorithm = Algorithm::kFedPgAp;
  int e0 = 1;
  double sigma_close = 2.5;
  double sigma_far = 3.0;
  double step_size = 1e-3;
  int batch_min = 60;
  int batch_max = 70;
  int inner_batch = 32;
  std::uint64_t trace_budget = 30000;
  int max_epochs = 0;  // 0: stop on the trace budget only
  std::vector<int> hidden = {1024, 512, 256};
  double beta_scale = 5.0;
  WeightClip clip;
  int inner_loop_cap = 50;
  VirtualPerturbation virtual_env;
  int workers = 0;  // 0: one per node
};

struct NodeState {
  int id = 0;
  PolicyParams params;
  PartitionState partition;
};

struct EpochReport {
  int epoch = 0;
  std::uint64_t traces_consumed = 0;
  int batch_size = 0;
  std::vector<double> mean_total_reward;
  double surrogate_loss = 0.0;
  std::vector<double> grad_norm;
  Eigen::MatrixXd distances;
  double mean_pairwise_distance = 0.0;
  int median_node = 0;
  std::vector<int> delta_e;
  int inner_loop_len = 0;
};

/// Raised when a gradient or update turns non-finite.
class NumericError : public std::runtime_error {
 public:
  NumericError(int epoch, const std::string& what)
      : std::runtime_error("epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

/// Snapshot of everything needed to resume or evaluate a run.
struct TrainerState {
  Algorithm algorithm = Algorithm::kFedPgAp;
  PolicyArchitecture architecture;
  PolicyParams global;
  std::vector<NodeState> nodes;
  int epoch = 0;
  std::uint64_t traces_consumed = 0;
  std::uint64_t seed = 0;
};

/// Parameters node n acts with: its own for SVRPG, otherwise the inherited
/// mix of local and global layers.
PolicyParams deployed_params(const TrainerState& state, int node);

/// Local nodes, the master and the per-epoch schedule for one training run.
///
/// Node-local layers are never updated directly: only the global policy takes
/// gradient steps, and nodes keep whatever they inherited in earlier epochs
/// for their local layers.
class FederatedTrainer {
 public:
  FederatedTrainer(ScenarioTemplate base, ScenarioSpec scenario, TrainingConfig config,
                   std::uint64_t seed);
  ~FederatedTrainer();
  FederatedTrainer(const FederatedTrainer&) = delete;
  FederatedTrainer& operator=(const FederatedTrainer&) = delete;

  EpochReport run_epoch();
  /// True when the trace budget or the epoch limit is reached.
  bool finished() const;

  const PolicyNetwork& network() const { return net_; }
  const ScenarioSpec& scenario() const { return scenario_; }
  const TrainingConfig& config() const { return config_; }
  const TrainerState& state() const { return state_; }
  /// Overwrites the trainer state, e.g. from a checkpoint. Shapes must match.
  void restore(TrainerState state);

  /// Parameters node n acts with in the next epoch.
  PolicyParams deployed_params(int node) const;

 private:
  struct NodeEpoch;
  EpochReport federated_epoch(int epoch, int batch, int inner_len);
  EpochReport svrpg_epoch(int epoch, int batch, int inner_len);
  std::vector<ExperienceTrace> collect(const PolicyParams& params, const HotspotEnv& env,
                                       StreamRole role, std::uint64_t node, int epoch,
                                       std::uint64_t first_index, int count) const;
  void finish_report(EpochReport& report, const std::vector<NodeEpoch>& nodes) const;

  ScenarioTemplate base_;
  ScenarioSpec scenario_;
  TrainingConfig config_;
  PolicyNetwork net_;
  std::vector<HotspotEnv> envs_;
  std::vector<HotspotStats> stats_;
  TrainerState state_;
  struct Arena;
  std::unique_ptr<Arena> arena_;
};

/// Runs epochs until finished(); `on_epoch` sees every report.
template <typename Callback>
void run_training(FederatedTrainer& trainer, Callback&& on_epoch) {
  while (!trainer.finished()) on_epoch(trainer.run_epoch());
}

}  // namespace fedpg
