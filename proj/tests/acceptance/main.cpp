// Acceptance driver: one PASS/FAIL line per criterion. Exit status is
// non-zero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedpg/channel.hpp"
#include "fedpg/checkpoint.hpp"
#include "fedpg/commands.hpp"
#include "fedpg/estimator.hpp"
#include "fedpg/evaluation.hpp"
#include "fedpg/fas.hpp"
#include "fedpg/federated.hpp"
#include "fedpg/policy.hpp"
#include "fedpg/report.hpp"

namespace fs = std::filesystem;
using namespace fedpg;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void dump(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary | std::ios::trunc) << text;
}

RunConfig desk_config(std::vector<std::string> overrides) {
  return load_config(FEDPG_DESK_CONFIG, overrides);
}

// Parameter-level artifacts with the algorithm tag neutralized, so runs of
// different algorithms can be compared bit for bit.
std::string comparable_state(const std::string& checkpoint) {
  TrainerState s = deserialize_checkpoint(checkpoint);
  s.algorithm = Algorithm::kFedPgAp;
  return serialize_checkpoint(s);
}

// 1. Analytic log-probability gradient against central differences.
Outcome criterion_gradient() {
  PolicyArchitecture arch;
  arch.input_dim = 8;
  arch.hidden = {8, 8};
  arch.ris_elements = 2;
  arch.phase_levels = 3;
  const PolicyNetwork net(arch, 12.0);
  Rng rng = derive_stream(2024, StreamRole::kParamInit);
  const double h = 1e-5;
  double worst = 0.0;
  const int pairs = 12;
  for (int trial = 0; trial < pairs; ++trial) {
    PolicyParams p = init_params(arch, rng);
    for (int z = 0; z < p.num_layers(); ++z) {
      auto& b = p.layer(z).bias;
      for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = 0.5 * standard_normal(rng);
    }
    Eigen::VectorXd s(8);
    for (int i = 0; i < 8; ++i) s(i) = standard_normal(rng);
    const ActionValue a = net.sample_action(net.forward(p, s), rng).action;
    const Eigen::VectorXd analytic = net.backward_logprob(p, s, a).flatten();
    const Eigen::VectorXd base = p.flatten();
    for (Eigen::Index i = 0; i < base.size(); ++i) {
      Eigen::VectorXd up = base, down = base;
      up(i) += h;
      down(i) -= h;
      const double fd = (net.log_prob(PolicyParams::unflatten(up, arch), s, a) -
                         net.log_prob(PolicyParams::unflatten(down, arch), s, a)) /
                        (2 * h);
      const double scale = std::max({std::abs(fd), std::abs(analytic(i)), 1e-6});
      worst = std::max(worst, std::abs(fd - analytic(i)) / scale);
    }
  }
  return {worst < 1e-4, std::to_string(pairs) + " pairs, max relative error " + fmt(worst)};
}

// 2. Port correlation structure and sampled covariance.
Outcome criterion_fas() {
  const PortGrid grid{5, 5, 3.0, 3.0};
  const Eigen::MatrixXd r = build_correlation(grid);
  const bool symmetric = (r - r.transpose()).cwiseAbs().maxCoeff() == 0.0;
  const bool unit_diag = (r.diagonal().array() == 1.0).all();
  const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(r).eigenvalues().minCoeff();

  const CorrelatedSampler sampler(r);
  Rng rng = derive_stream(2024, StreamRole::kScenario);
  const int draws = 100000;
  const int chunk = 1000;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(r.rows(), r.cols());
  for (int done = 0; done < draws; done += chunk) {
    const Eigen::MatrixXcd rows = sampler.sample_rows(chunk, rng);
    acc += rows.transpose() * rows.conjugate();
  }
  acc /= static_cast<double>(draws);
  const double worst = (acc - r.cast<std::complex<double>>()).cwiseAbs().maxCoeff();
  const bool ok = symmetric && unit_diag && min_eig >= -1e-8 && worst < 0.02;
  return {ok, "min eigenvalue " + fmt(min_eig) + ", max covariance error " + fmt(worst)};
}

// 3. Port selection beats a fixed port.
Outcome criterion_selection() {
  const PortGrid grid{5, 5, 3.0, 3.0};
  const CorrelatedSampler sampler(build_correlation(grid));
  const RicianParams rician = RicianParams::from_db(15.0, 10.0, 1.17e10);
  const int m = 8;
  Rng rng = derive_stream(2024, StreamRole::kNodeRollout);
  double selected = 0.0, fixed = 0.0;
  bool dominates = true;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const Eigen::VectorXcd lr = lr_channel(rician, 550000.0, m, rng);
    const Eigen::MatrixXcd ru = ru_channel_fas(rician, 100.0, sampler, m, rng);
    PhaseControl ctl{8, std::vector<int>(static_cast<std::size_t>(m))};
    for (auto& c : ctl.level) c = 1 + static_cast<int>(uniform(rng, 0.0, 8.0));
    const Eigen::VectorXcd phase = phase_matrix(ctl);
    const double best = std::norm(select_port(lr, phase, ru).gain);
    const Eigen::VectorXcd col = ru.col(0);
    const double one = std::norm(equivalent_channel(lr, phase, col));
    dominates = dominates && best >= one;
    selected += best;
    fixed += one;
  }
  const double gain = selected / fixed - 1.0;
  return {gain > 0.05 && dominates,
          "selection gain " + fmt(100.0 * gain) + "%, pointwise dominance " + (dominates ? "yes" : "no")};
}

// 4. Estimator identities.
Outcome criterion_estimator() {
  const RunConfig c = desk_config({"training.hidden=[16,8]"});
  const ScenarioSpec scenario = training_scenario(c);
  const auto envs = make_envs(scenario);
  PolicyArchitecture arch;
  arch.input_dim = scenario.state_dim();
  arch.hidden = {16, 8};
  arch.ris_elements = scenario.ris_elements;
  arch.phase_levels = scenario.phase_levels;
  const PolicyNetwork net(arch, scenario.hotspots[0].uav_max_step);
  Rng prng = derive_stream(2024, StreamRole::kParamInit);
  const PolicyParams theta = init_params(arch, prng);

  std::vector<ExperienceTrace> traces;
  for (int i = 0; i < 8; ++i) {
    Rng rng = derive_stream(2024, StreamRole::kNodeRollout, 0, 0, static_cast<std::uint64_t>(i));
    traces.push_back(rollout(net, theta, envs[static_cast<std::size_t>(i % 2)], rng));
  }
  bool weights_one = true;
  for (const auto& tr : traces) weights_one = weights_one && importance_weight(net, tr, theta, theta) == 1.0;

  Rng mrng = derive_stream(2024, StreamRole::kSchedule);
  Eigen::VectorXd mu(static_cast<Eigen::Index>(theta.size()));
  for (Eigen::Index i = 0; i < mu.size(); ++i) mu(i) = standard_normal(mrng);
  const bool collapses = svrpg_direction(net, mu, traces, theta, theta, scenario.discount) == mu;

  Rng lrng = derive_stream(2024, StreamRole::kSchedule, 1);
  const int draws = 100000;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) sum += sample_inner_length(64, 32, lrng);
  const double mean = sum / draws;
  const bool mean_ok = std::abs(mean - 1.5) <= 0.015;
  return {weights_one && collapses && mean_ok,
          std::string("unit weights ") + (weights_one ? "yes" : "no") + ", collapse to mu " +
              (collapses ? "yes" : "no") + ", inner length mean " + fmt(mean)};
}

struct EquivalenceRuns {
  TrainingArtifacts ap, fp, fp0, np;
};

EquivalenceRuns equivalence_runs(int workers) {
  const std::vector<std::string> base{"training.max_epochs=5"};
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> o = base;
    o.insert(o.end(), extra.begin(), extra.end());
    return desk_config(o);
  };
  EquivalenceRuns r;
  r.ap = train_to_memory(with({"training.algorithm=fedpg_ap", "training.sigma_close=0",
                               "training.sigma_far=1e9"}),
                         workers);
  r.fp = train_to_memory(with({"training.algorithm=fedpg_fp"}), workers);
  r.fp0 = train_to_memory(with({"training.algorithm=fedpg_fp", "training.e0=0"}), workers);
  r.np = train_to_memory(with({"training.algorithm=fedpg_np"}), workers);
  return r;
}

void store(const fs::path& dir, const std::string& name, const TrainingArtifacts& a) {
  dump(dir / (name + "_report.csv"), a.report_csv);
  dump(dir / (name + "_checkpoint.bin"), a.final_checkpoint);
}

int parallel_workers(const RunConfig& c) { return std::max(2, c.scenario.hotspots); }

// 5. Degenerate configurations reproduce the simpler variants exactly.
Outcome criterion_equivalence(const fs::path& cache) {
  const int workers = parallel_workers(desk_config({}));
  const EquivalenceRuns r = equivalence_runs(workers);
  const fs::path dir = cache / "c5" / ("w" + std::to_string(workers));
  store(dir, "ap_inert", r.ap);
  store(dir, "fp", r.fp);
  store(dir, "fp_e0", r.fp0);
  store(dir, "np", r.np);
  const bool ap_fp = r.ap.report_csv == r.fp.report_csv &&
                     comparable_state(r.ap.final_checkpoint) == comparable_state(r.fp.final_checkpoint);
  const bool fp_np = r.fp0.report_csv == r.np.report_csv &&
                     comparable_state(r.fp0.final_checkpoint) == comparable_state(r.np.final_checkpoint);
  return {ap_fp && fp_np, std::string("AP(inert) == FP: ") + (ap_fp ? "yes" : "no") +
                              ", FP(e0=0) == NP: " + (fp_np ? "yes" : "no")};
}

// 6. Median-node selection and threshold branches.
Outcome criterion_partition() {
  const std::vector<Eigen::VectorXd> g{Eigen::VectorXd::Constant(1, 0.0),
                                       Eigen::VectorXd::Constant(1, 1.0),
                                       Eigen::VectorXd::Constant(1, 10.0)};
  const int median = median_node(pairwise_distances(g));
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
  d(0, 0) = 0.0;
  d(1, 0) = d(0, 1) = 2.7;
  d(2, 0) = d(0, 2) = 5.0;
  const std::vector<int> delta = adapt_partition(d, 0, 2.5, 3.0);
  const bool ok = median == 1 && delta == std::vector<int>{1, 0, -1};
  return {ok, "median node " + std::to_string(median) + ", deltas (" + std::to_string(delta[0]) +
                  ", " + std::to_string(delta[1]) + ", " + std::to_string(delta[2]) + ")"};
}

const std::vector<std::string> kAlgorithms{"fedpg_ap", "fedpg_np", "fedpg_fp", "svrpg"};
constexpr int kSeeds = 5;

TrainingArtifacts learning_run(const std::string& algo, int seed, int workers) {
  return train_to_memory(
      desk_config({"seed=" + std::to_string(seed), "training.algorithm=" + algo}), workers);
}

fs::path learning_dir(const fs::path& cache, int workers) {
  return cache / "c7" / ("w" + std::to_string(workers));
}

double final_reward(const TrainingArtifacts& a) {
  const auto& r = a.reports.back().mean_total_reward;
  double s = 0.0;
  for (double v : r) s += v;
  return s / static_cast<double>(r.size());
}

// 7. Learning ordering at desk scale.
Outcome criterion_learning(const fs::path& cache) {
  const int workers = parallel_workers(desk_config({}));
  const fs::path dir = learning_dir(cache, workers);
  int wins = 0;
  std::ostringstream detail;
  std::ostringstream summary;
  summary << "seed,fedpg_ap,fedpg_np,fedpg_fp,svrpg\n";
  for (int seed = 1; seed <= kSeeds; ++seed) {
    std::vector<double> reward;
    for (const auto& algo : kAlgorithms) {
      const TrainingArtifacts a = learning_run(algo, seed, workers);
      store(dir, algo + "_seed" + std::to_string(seed), a);
      reward.push_back(final_reward(a));
    }
    const bool ok = reward[0] >= std::max(reward[1], reward[2]) && reward[0] > 1.5 * reward[3];
    wins += ok;
    summary << seed << "," << format_number(reward[0]) << "," << format_number(reward[1]) << ","
            << format_number(reward[2]) << "," << format_number(reward[3]) << "\n";
    detail << (seed > 1 ? "; " : "") << "seed " << seed << " AP " << fmt(reward[0]) << " NP "
           << fmt(reward[1]) << " FP " << fmt(reward[2]) << " SVRPG " << fmt(reward[3])
           << (ok ? " ok" : " miss");
  }
  dump(dir / "final_rewards.csv", summary.str());
  return {wins >= 4, std::to_string(wins) + "/" + std::to_string(kSeeds) + " seeds ordered (" +
                         detail.str() + ")"};
}

// 8. Worker count does not change any artifact.
Outcome criterion_determinism(const fs::path& cache) {
  const int workers = parallel_workers(desk_config({}));
  int compared = 0, mismatched = 0;
  auto check = [&](const fs::path& parallel_dir, const std::string& name, const TrainingArtifacts& serial,
                   const std::function<TrainingArtifacts()>& recompute) {
    TrainingArtifacts parallel;
    const fs::path report = parallel_dir / (name + "_report.csv");
    const fs::path ckpt = parallel_dir / (name + "_checkpoint.bin");
    if (fs::exists(report) && fs::exists(ckpt)) {
      parallel.report_csv = slurp(report);
      parallel.final_checkpoint = slurp(ckpt);
    } else {
      parallel = recompute();
      store(parallel_dir, name, parallel);
    }
    compared += 2;
    mismatched += serial.report_csv != parallel.report_csv;
    mismatched += serial.final_checkpoint != parallel.final_checkpoint;
  };

  const fs::path c5 = cache / "c5" / ("w" + std::to_string(workers));
  const EquivalenceRuns serial = equivalence_runs(1);
  std::optional<EquivalenceRuns> parallel5;
  auto par5 = [&]() -> const EquivalenceRuns& {
    if (!parallel5) parallel5 = equivalence_runs(workers);
    return *parallel5;
  };
  check(c5, "ap_inert", serial.ap, [&] { return par5().ap; });
  check(c5, "fp", serial.fp, [&] { return par5().fp; });
  check(c5, "fp_e0", serial.fp0, [&] { return par5().fp0; });
  check(c5, "np", serial.np, [&] { return par5().np; });

  const fs::path c7 = learning_dir(cache, workers);
  for (int seed = 1; seed <= kSeeds; ++seed) {
    for (const auto& algo : kAlgorithms) {
      const TrainingArtifacts s = learning_run(algo, seed, 1);
      check(c7, algo + "_seed" + std::to_string(seed), s,
            [&] { return learning_run(algo, seed, workers); });
    }
  }
  return {mismatched == 0, std::to_string(compared - mismatched) + "/" + std::to_string(compared) +
                               " artifacts identical between 1 and " + std::to_string(workers) +
                               " workers"};
}

// 9. Evaluation metrics on stub curves.
Outcome criterion_metrics() {
  double worst = 0.0;
  const RateSummary flat = summarize_rate_curves(std::vector<std::vector<double>>(5, std::vector<double>(30, 4.2)));
  for (double cv : flat.cv) worst = std::max(worst, std::abs(cv));
  worst = std::max(worst, flat.slope_deviation);
  for (double b : {-1.3, 0.25, 7.0}) {
    std::vector<std::vector<double>> curves;
    for (int r = 0; r < 3; ++r) {
      std::vector<double> y(30);
      for (std::size_t t = 0; t < y.size(); ++t) y[t] = 50.0 + b * static_cast<double>(t);
      curves.push_back(y);
    }
    const RateSummary s = summarize_rate_curves(curves);
    worst = std::max(worst, std::abs(s.slope_deviation - std::abs(b)));
    for (double cv : s.cv) worst = std::max(worst, std::abs(cv));
  }
  return {worst < 1e-10, "max deviation from closed form " + fmt(worst)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int only = 0;
  std::string cache = "acceptance_cache";
  app.add_option("--only", only, "Run a single criterion (1-9)")->check(CLI::Range(1, 9));
  app.add_option("--cache", cache, "Directory for training artifacts");
  CLI11_PARSE(app, argc, argv);

  const fs::path cache_dir(cache);
  const std::vector<std::function<Outcome()>> criteria{
      criterion_gradient,
      criterion_fas,
      criterion_selection,
      criterion_estimator,
      [&] { return criterion_equivalence(cache_dir); },
      criterion_partition,
      [&] { return criterion_learning(cache_dir); },
      [&] { return criterion_determinism(cache_dir); },
      criterion_metrics,
  };

  bool all = true;
  for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) {
    if (only != 0 && only != i) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[static_cast<std::size_t>(i - 1)]();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "criterion " << i << ": " << (out.pass ? "PASS" : "FAIL") << " - " << out.detail
              << " [" << fmt(secs) << " s]" << std::endl;
    all = all && out.pass;
  }
  return all ? 0 : 1;
}
