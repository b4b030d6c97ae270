#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "fedpg/action.hpp"
#include "fedpg/channel.hpp"
#include "fedpg/fas.hpp"
#include "fedpg/geometry.hpp"
#include "fedpg/policy.hpp"
#include "fedpg/random.hpp"

namespace fedpg {

struct GroundUser {
  double x = 0.0;
  double y = 0.0;
  bool fas = false;
  double activation_prob = 1.0;
};

struct HotspotSpec {
  HotspotRegion region;
  std::vector<GroundUser> users;
  double uav_altitude = 100.0;
  double uav_max_step = 12.0;
};

struct ScenarioSpec {
  std::vector<HotspotSpec> hotspots;
  OrbitConstants orbit;
  LinkBudget budget;
  RicianParams rician;
  PortGrid ports;
  int ris_elements = 0;
  int phase_levels = 0;
  int horizon = 1;
  double discount = 0.99;

  /// Users per hotspot; identical across hotspots. Throws if they differ.
  int users_per_hotspot() const;
  int state_dim() const { return 3 + 4 * users_per_hotspot(); }
  void validate() const;
};

struct UserState {
  double x = 0.0;
  double y = 0.0;
  bool active = false;
  bool fas = false;
};

struct EnvState {
  int t = 0;
  Vec3 satellite;
  UavState uav;
  std::vector<UserState> users;
};

/// [sat_x/X, uav_x/X, uav_y/Y, then per user (x/X, y/Y, active, fas)].
Eigen::VectorXd encode_state(const EnvState& state, const HotspotRegion& region);

/// Mean rate over active users; zero when nobody is active.
double mean_active_rate(const std::vector<double>& rates, const std::vector<UserState>& users);

struct StepOutcome {
  EnvState next;
  double reward = 0.0;
  std::vector<double> rates;  // zero for inactive users
};

/// One hotspot's relay environment. Immutable; all randomness comes from the
/// caller's stream.
class HotspotEnv {
 public:
  HotspotEnv(const ScenarioSpec& scenario, int hotspot,
             std::shared_ptr<const CorrelatedSampler> sampler);

  const HotspotSpec& hotspot() const { return hotspot_; }
  const OrbitModel& orbit() const { return orbit_; }
  int horizon() const { return horizon_; }
  int ris_elements() const { return ris_elements_; }
  int phase_levels() const { return phase_levels_; }
  int state_dim() const { return 3 + 4 * static_cast<int>(hotspot_.users.size()); }

  /// UAV at (0, 0, altitude), satellite at the start of its arc, activation
  /// drawn for t = 0.
  EnvState reset(Rng& rng) const;

  /// Applies the action, draws fresh channels for the active users and
  /// advances to t + 1 (satellite moves, activation is redrawn). The reward
  /// uses the post-move UAV position and the current satellite position.
  StepOutcome step(const EnvState& state, const ActionValue& action, Rng& rng) const;

  /// Channel realization for one user at the given geometry.
  ChannelDraw draw_channel(const Vec3& uav, const UserState& user,
                           const Eigen::VectorXcd& lr, const Eigen::VectorXcd& phase,
                           Rng& rng) const;

 private:
  void validate_action(const ActionValue& action) const;
  void draw_activation(std::vector<UserState>& users, Rng& rng) const;

  HotspotSpec hotspot_;
  OrbitModel orbit_;
  LinkBudget budget_;
  RicianParams rician_;
  std::shared_ptr<const CorrelatedSampler> sampler_;
  int ris_elements_;
  int phase_levels_;
  int horizon_;
};

/// One environment per hotspot, sharing a single port-correlation sampler.
std::vector<HotspotEnv> make_envs(const ScenarioSpec& scenario);

struct TraceStep {
  Eigen::VectorXd state;
  ActionValue action;
  double reward = 0.0;
  Eigen::VectorXd next_state;
  double log_prob = 0.0;
  std::vector<double> rates;
  std::vector<bool> active;
};

struct ExperienceTrace {
  std::vector<TraceStep> steps;

  double total_reward() const;
  std::vector<double> rewards() const;
};

ExperienceTrace rollout(const PolicyNetwork& net, const PolicyParams& params,
                        const HotspotEnv& env, Rng& rng);

/// Hotspot-level heterogeneity around a common baseline. All-zero jitters and
/// a degenerate cluster-spread range make every hotspot statistically
/// identical.
struct Heterogeneity {
  double fas_ratio = 0.5;
  double fas_ratio_jitter = 0.2;
  double activation_prob = 0.8;
  double activation_jitter = 0.1;
  double center_range = 0.5;  // fraction of the half widths
  double cluster_std_min = 50.0;
  double cluster_std_max = 200.0;
};

/// Everything a scenario needs apart from the user layout.
struct ScenarioTemplate {
  int hotspots = 5;
  int users_per_hotspot = 10;
  HotspotRegion region;
  double uav_altitude = 100.0;
  double uav_max_step = 12.0;
  OrbitConstants orbit;
  LinkBudget budget;
  RicianParams rician;
  PortGrid ports;
  int ris_elements = 120;
  int phase_levels = 50;
  int horizon = 30;
  double discount = 0.99;
};

ScenarioSpec generate_heterogeneous_scenario(const ScenarioTemplate& base,
                                             const Heterogeneity& perturbation, Rng& rng);

struct HotspotStats {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();  // population
  double fas_ratio = 0.0;
  double activation_prob = 0.0;
};

std::vector<HotspotStats> extract_stats(const ScenarioSpec& scenario);

/// Additive noise applied to the fitted hotspot statistics when building the
/// master's virtual environment.
struct VirtualPerturbation {
  double center_jitter = 20.0;      // meters
  double spread_jitter = 0.1;       // relative
  double fas_ratio_jitter = 0.05;
  double activation_jitter = 0.05;
};

/// Virtual hotspots for global training: each picks a source hotspot's
/// statistics uniformly, perturbs them, and samples users from a diagonal
/// Gaussian fit of the coordinates.
ScenarioSpec build_virtual_env(const std::vector<HotspotStats>& stats,
                               const VirtualPerturbation& perturbation,
                               const ScenarioTemplate& base, int virtual_hotspots, Rng& rng);

}  // namespace fedpg
