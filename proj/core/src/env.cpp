#include "fedpg/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace fedpg {

int ScenarioSpec::users_per_hotspot() const {
  if (hotspots.empty()) throw std::invalid_argument("scenario: no hotspots");
  const auto k = hotspots.front().users.size();
  for (const auto& h : hotspots) {
    if (h.users.size() != k) {
      throw std::invalid_argument("scenario: every hotspot needs the same number of users");
    }
  }
  return static_cast<int>(k);
}

void ScenarioSpec::validate() const {
  if (users_per_hotspot() < 1) throw std::invalid_argument("scenario: need at least one user");
  if (horizon < 1) throw std::invalid_argument("scenario: horizon must be >= 1");
  if (!(discount > 0.0 && discount < 1.0)) {
    throw std::invalid_argument("scenario: discount must lie in (0, 1)");
  }
  if (ris_elements < 1 || phase_levels < 1) {
    throw std::invalid_argument("scenario: RIS size and phase levels must be >= 1");
  }
  for (const auto& h : hotspots) {
    if (!(h.region.half_width_x > 0.0 && h.region.half_width_y > 0.0)) {
      throw std::invalid_argument("scenario: region half widths must be positive");
    }
    for (const auto& u : h.users) {
      if (std::abs(u.x) > h.region.half_width_x || std::abs(u.y) > h.region.half_width_y) {
        throw std::invalid_argument("scenario: user outside its hotspot region");
      }
      if (!(u.activation_prob >= 0.0 && u.activation_prob <= 1.0)) {
        throw std::invalid_argument("scenario: activation probability outside [0, 1]");
      }
    }
  }
}

Eigen::VectorXd encode_state(const EnvState& state, const HotspotRegion& region) {
  const auto k = static_cast<Eigen::Index>(state.users.size());
  Eigen::VectorXd s(3 + 4 * k);
  s(0) = state.satellite.x / region.half_width_x;
  s(1) = state.uav.position.x / region.half_width_x;
  s(2) = state.uav.position.y / region.half_width_y;
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& u = state.users[static_cast<std::size_t>(i)];
    s(3 + 4 * i) = u.x / region.half_width_x;
    s(4 + 4 * i) = u.y / region.half_width_y;
    s(5 + 4 * i) = u.active ? 1.0 : 0.0;
    s(6 + 4 * i) = u.fas ? 1.0 : 0.0;
  }
  return s;
}

double mean_active_rate(const std::vector<double>& rates, const std::vector<UserState>& users) {
  double sum = 0.0;
  int active = 0;
  for (std::size_t i = 0; i < users.size(); ++i) {
    if (users[i].active) {
      sum += rates.at(i);
      ++active;
    }
  }
  return active == 0 ? 0.0 : sum / active;
}

HotspotEnv::HotspotEnv(const ScenarioSpec& scenario, int hotspot,
                       std::shared_ptr<const CorrelatedSampler> sampler)
    : hotspot_(scenario.hotspots.at(static_cast<std::size_t>(hotspot))),
      orbit_(make_orbit(scenario.orbit, hotspot_.region)),
      budget_(scenario.budget),
      rician_(scenario.rician),
      sampler_(std::move(sampler)),
      ris_elements_(scenario.ris_elements),
      phase_levels_(scenario.phase_levels),
      horizon_(scenario.horizon) {
  if (!sampler_ || sampler_->dimension() != scenario.ports.ports()) {
    throw std::invalid_argument("HotspotEnv: sampler does not match the port grid");
  }
}

void HotspotEnv::draw_activation(std::vector<UserState>& users, Rng& rng) const {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (std::size_t i = 0; i < users.size(); ++i) {
    users[i].active = u01(rng) < hotspot_.users[i].activation_prob;
  }
}

EnvState HotspotEnv::reset(Rng& rng) const {
  EnvState s;
  s.t = 0;
  s.satellite = satellite_position(orbit_, 0.0);
  s.uav.position = {0.0, 0.0, hotspot_.uav_altitude};
  s.uav.max_step = hotspot_.uav_max_step;
  s.users.reserve(hotspot_.users.size());
  for (const auto& u : hotspot_.users) s.users.push_back({u.x, u.y, false, u.fas});
  draw_activation(s.users, rng);
  return s;
}

void HotspotEnv::validate_action(const ActionValue& action) const {
  if (action.levels.size() != static_cast<std::size_t>(ris_elements_)) {
    throw std::invalid_argument("step: wrong number of phase levels");
  }
  for (int c : action.levels) {
    if (c < 1 || c > phase_levels_) throw std::invalid_argument("step: phase level out of range");
  }
}

ChannelDraw HotspotEnv::draw_channel(const Vec3& uav, const UserState& user,
                                     const Eigen::VectorXcd& lr, const Eigen::VectorXcd& phase,
                                     Rng& rng) const {
  ChannelDraw draw;
  draw.lr = lr;
  const double d_ru = distance(uav, {user.x, user.y, 0.0});
  if (user.fas) {
    Eigen::MatrixXcd ru = ru_channel_fas(rician_, d_ru, *sampler_, ris_elements_, rng);
    const PortSelection sel = select_port(lr, phase, ru);
    draw.equivalent = sel.gain;
    draw.active_port = sel.port;
    draw.ru = std::move(ru);
  } else {
    Eigen::VectorXcd ru = ru_channel_plain(rician_, d_ru, ris_elements_, rng);
    draw.equivalent = equivalent_channel(lr, phase, ru);
    draw.ru = std::move(ru);
  }
  return draw;
}

StepOutcome HotspotEnv::step(const EnvState& state, const ActionValue& action, Rng& rng) const {
  validate_action(action);
  StepOutcome out;
  out.next = state;
  out.next.uav = uav_step(state.uav, action.yaw, action.speed, hotspot_.region);

  const Eigen::VectorXcd phase = phase_matrix({phase_levels_, action.levels});
  const Vec3& uav = out.next.uav.position;
  const Eigen::VectorXcd lr =
      lr_channel(rician_, distance(state.satellite, uav), ris_elements_, rng);

  out.rates.assign(state.users.size(), 0.0);
  for (std::size_t i = 0; i < state.users.size(); ++i) {
    if (!state.users[i].active) continue;
    const ChannelDraw draw = draw_channel(uav, state.users[i], lr, phase, rng);
    out.rates[i] = rate(draw.equivalent, budget_);
  }
  out.reward = mean_active_rate(out.rates, state.users);

  out.next.t = state.t + 1;
  out.next.satellite = satellite_position(orbit_, static_cast<double>(out.next.t));
  draw_activation(out.next.users, rng);
  return out;
}

std::vector<HotspotEnv> make_envs(const ScenarioSpec& scenario) {
  scenario.validate();
  auto sampler = std::make_shared<const CorrelatedSampler>(build_correlation(scenario.ports));
  std::vector<HotspotEnv> envs;
  envs.reserve(scenario.hotspots.size());
  for (std::size_t n = 0; n < scenario.hotspots.size(); ++n) {
    envs.emplace_back(scenario, static_cast<int>(n), sampler);
  }
  return envs;
}

double ExperienceTrace::total_reward() const {
  double sum = 0.0;
  for (const auto& s : steps) sum += s.reward;
  return sum;
}

std::vector<double> ExperienceTrace::rewards() const {
  std::vector<double> r;
  r.reserve(steps.size());
  for (const auto& s : steps) r.push_back(s.reward);
  return r;
}

ExperienceTrace rollout(const PolicyNetwork& net, const PolicyParams& params,
                        const HotspotEnv& env, Rng& rng) {
  const auto& arch = net.architecture();
  if (arch.input_dim != env.state_dim() || arch.ris_elements != env.ris_elements() ||
      arch.phase_levels != env.phase_levels()) {
    throw std::invalid_argument("rollout: policy dimensions do not match the environment");
  }
  ExperienceTrace trace;
  trace.steps.reserve(static_cast<std::size_t>(env.horizon()));
  const HotspotRegion& region = env.hotspot().region;
  EnvState state = env.reset(rng);
  Eigen::VectorXd encoded = encode_state(state, region);
  for (int t = 0; t < env.horizon(); ++t) {
    const SampledAction sampled = net.sample_action(net.forward(params, encoded), rng);
    StepOutcome outcome = env.step(state, sampled.action, rng);
    TraceStep step;
    step.state = encoded;
    step.action = sampled.action;
    step.reward = outcome.reward;
    step.log_prob = sampled.log_prob;
    step.rates = std::move(outcome.rates);
    step.active.reserve(state.users.size());
    for (const auto& u : state.users) step.active.push_back(u.active);
    encoded = encode_state(outcome.next, region);
    step.next_state = encoded;
    trace.steps.push_back(std::move(step));
    state = std::move(outcome.next);
  }
  return trace;
}

namespace {

void assign_fas(std::vector<GroundUser>& users, double ratio, Rng& rng) {
  const auto k = users.size();
  const auto count = static_cast<std::size_t>(std::lround(ratio * static_cast<double>(k)));
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (auto& u : users) u.fas = false;
  for (std::size_t i = 0; i < std::min(count, k); ++i) users[order[i]].fas = true;
}

HotspotSpec make_hotspot(const ScenarioTemplate& base, double cx, double cy, double sx, double sy,
                         double ratio, double activation, Rng& rng) {
  HotspotSpec h;
  h.region = base.region;
  h.uav_altitude = base.uav_altitude;
  h.uav_max_step = base.uav_max_step;
  h.users.resize(static_cast<std::size_t>(base.users_per_hotspot));
  for (auto& u : h.users) {
    u.x = std::clamp(cx + sx * standard_normal(rng), -base.region.half_width_x,
                     base.region.half_width_x);
    u.y = std::clamp(cy + sy * standard_normal(rng), -base.region.half_width_y,
                     base.region.half_width_y);
    u.activation_prob = activation;
  }
  assign_fas(h.users, ratio, rng);
  return h;
}

ScenarioSpec shell_from(const ScenarioTemplate& base) {
  ScenarioSpec s;
  s.orbit = base.orbit;
  s.budget = base.budget;
  s.rician = base.rician;
  s.ports = base.ports;
  s.ris_elements = base.ris_elements;
  s.phase_levels = base.phase_levels;
  s.horizon = base.horizon;
  s.discount = base.discount;
  return s;
}

}  // namespace

ScenarioSpec generate_heterogeneous_scenario(const ScenarioTemplate& base,
                                             const Heterogeneity& p, Rng& rng) {
  if (base.hotspots < 1 || base.users_per_hotspot < 1) {
    throw std::invalid_argument("scenario: need at least one hotspot and one user");
  }
  ScenarioSpec s = shell_from(base);
  const double wx = p.center_range * base.region.half_width_x;
  const double wy = p.center_range * base.region.half_width_y;
  for (int n = 0; n < base.hotspots; ++n) {
    const double cx = uniform(rng, -wx, wx);
    const double cy = uniform(rng, -wy, wy);
    const double spread = uniform(rng, p.cluster_std_min, p.cluster_std_max);
    const double ratio =
        std::clamp(p.fas_ratio + uniform(rng, -p.fas_ratio_jitter, p.fas_ratio_jitter), 0.0, 1.0);
    const double activation = std::clamp(
        p.activation_prob + uniform(rng, -p.activation_jitter, p.activation_jitter), 0.0, 1.0);
    s.hotspots.push_back(make_hotspot(base, cx, cy, spread, spread, ratio, activation, rng));
  }
  s.validate();
  return s;
}

std::vector<HotspotStats> extract_stats(const ScenarioSpec& scenario) {
  std::vector<HotspotStats> out;
  out.reserve(scenario.hotspots.size());
  for (const auto& h : scenario.hotspots) {
    HotspotStats st;
    const double k = static_cast<double>(h.users.size());
    if (h.users.empty()) {
      out.push_back(st);
      continue;
    }
    int fas = 0;
    double activation = 0.0;
    for (const auto& u : h.users) {
      st.mean += Eigen::Vector2d(u.x, u.y);
      fas += u.fas ? 1 : 0;
      activation += u.activation_prob;
    }
    st.mean /= k;
    for (const auto& u : h.users) {
      const Eigen::Vector2d d = Eigen::Vector2d(u.x, u.y) - st.mean;
      st.covariance += d * d.transpose();
    }
    st.covariance /= k;
    st.fas_ratio = fas / k;
    st.activation_prob = activation / k;
    out.push_back(st);
  }
  return out;
}

ScenarioSpec build_virtual_env(const std::vector<HotspotStats>& stats,
                               const VirtualPerturbation& p, const ScenarioTemplate& base,
                               int virtual_hotspots, Rng& rng) {
  if (stats.empty()) throw std::invalid_argument("build_virtual_env: no source statistics");
  if (virtual_hotspots < 1) throw std::invalid_argument("build_virtual_env: need >= 1 hotspot");
  ScenarioSpec s = shell_from(base);
  std::uniform_int_distribution<std::size_t> pick(0, stats.size() - 1);
  for (int n = 0; n < virtual_hotspots; ++n) {
    const HotspotStats& src = stats[pick(rng)];
    const double cx = src.mean.x() + uniform(rng, -p.center_jitter, p.center_jitter);
    const double cy = src.mean.y() + uniform(rng, -p.center_jitter, p.center_jitter);
    const double sx = std::sqrt(std::max(src.covariance(0, 0), 0.0)) *
                      std::max(0.0, 1.0 + uniform(rng, -p.spread_jitter, p.spread_jitter));
    const double sy = std::sqrt(std::max(src.covariance(1, 1), 0.0)) *
                      std::max(0.0, 1.0 + uniform(rng, -p.spread_jitter, p.spread_jitter));
    const double ratio = std::clamp(
        src.fas_ratio + uniform(rng, -p.fas_ratio_jitter, p.fas_ratio_jitter), 0.0, 1.0);
    const double activation = std::clamp(
        src.activation_prob + uniform(rng, -p.activation_jitter, p.activation_jitter), 0.0, 1.0);
    s.hotspots.push_back(make_hotspot(base, cx, cy, sx, sy, ratio, activation, rng));
  }
  s.validate();
  return s;
}

}  // namespace fedpg
