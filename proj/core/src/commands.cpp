#include "fedpg/commands.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "fedpg/checkpoint.hpp"
#include "fedpg/evaluation.hpp"
#include "fedpg/report.hpp"

namespace fedpg {

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::ios_base::failure("cannot write " + path.string());
  out << text;
  if (!out) throw std::ios_base::failure("failed writing " + path.string());
}

RunConfig read_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  return path.empty() ? parse_config("{}", overrides) : load_config(path, overrides);
}

PolicyArchitecture expected_architecture(const RunConfig& c) {
  PolicyArchitecture a;
  a.input_dim = 3 + 4 * c.scenario.users_per_hotspot;
  a.hidden = c.training.hidden;
  a.ris_elements = c.scenario.ris_elements;
  a.phase_levels = c.scenario.phase_levels;
  a.beta_scale = c.training.beta_scale;
  return a;
}

}  // namespace

ScenarioSpec training_scenario(const RunConfig& config) {
  Rng rng = derive_stream(config.seed, StreamRole::kScenario);
  return generate_heterogeneous_scenario(config.scenario, config.heterogeneity, rng);
}

std::unique_ptr<FederatedTrainer> make_trainer(const RunConfig& config, int workers) {
  TrainingConfig training = config.training;
  training.workers = workers;
  return std::make_unique<FederatedTrainer>(config.scenario, training_scenario(config), training,
                                            config.seed);
}

TrainingArtifacts train_to_memory(const RunConfig& config, int workers) {
  auto trainer = make_trainer(config, workers);
  TrainingArtifacts art;
  art.report_csv = report_header(config.scenario.hotspots);
  run_training(*trainer, [&](const EpochReport& r) {
    art.report_csv += report_row(r);
    art.reports.push_back(r);
  });
  art.final_checkpoint = serialize_checkpoint(trainer->state());
  return art;
}

int cmd_train(const TrainOptions& options, std::ostream& log, std::ostream& err) {
  RunConfig config;
  try {
    config = read_config(options.config, options.overrides);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (options.workers < 0) {
    err << "error: --workers must be >= 0\n";
    return kExitUsage;
  }

  std::unique_ptr<FederatedTrainer> trainer;
  try {
    trainer = make_trainer(config, options.workers);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    std::filesystem::create_directories(options.out);
    write_file(options.out / "resolved_config.json", config.resolved_json);
    std::ofstream report(options.out / "report.csv", std::ios::binary | std::ios::trunc);
    if (!report) throw std::ios_base::failure("cannot write report.csv");
    report << report_header(config.scenario.hotspots) << std::flush;

    bool ran = false;
    run_training(*trainer, [&](const EpochReport& r) {
      ran = true;
      report << report_row(r) << std::flush;
      if (config.checkpoint_every > 0 && r.epoch % config.checkpoint_every == 0) {
        save_checkpoint(trainer->state(),
                        options.out / ("checkpoint_epoch_" + std::to_string(r.epoch) + ".bin"));
      }
      log << "epoch " << r.epoch << " traces " << r.traces_consumed << "\n";
    });
    if (ran) save_checkpoint(trainer->state(), options.out / "checkpoint_final.bin");
  } catch (const NumericError& e) {
    err << "numeric failure at epoch " << e.epoch() << ": " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::domain_error& e) {
    err << "numeric failure at epoch " << trainer->state().epoch + 1 << ": " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

int cmd_eval(const EvalOptions& options, std::ostream& log, std::ostream& err) {
  std::vector<std::string> overrides = options.overrides;
  if (options.runs) overrides.push_back("evaluation.runs=" + std::to_string(*options.runs));
  if (options.seed) overrides.push_back("seed=" + std::to_string(*options.seed));

  RunConfig config;
  TrainerState state;
  try {
    config = read_config(options.config, overrides);
    state = load_checkpoint(options.checkpoint);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (state.architecture != expected_architecture(config)) {
    err << "error: checkpoint architecture does not match the config\n";
    return kExitUsage;
  }
  if (static_cast<int>(state.nodes.size()) != config.scenario.hotspots) {
    err << "error: checkpoint has " << state.nodes.size() << " nodes, config has "
        << config.scenario.hotspots << " hotspots\n";
    return kExitUsage;
  }

  try {
    const PolicyNetwork net(state.architecture, config.scenario.uav_max_step);
    std::vector<PolicyParams> policies;
    for (int n = 0; n < static_cast<int>(state.nodes.size()); ++n) {
      policies.push_back(deployed_params(state, n));
    }
    ScenarioTemplate base = config.scenario;
    base.horizon = config.eval_horizon;
    const EvaluationResult result =
        evaluate(net, policies, base, config.heterogeneity, config.eval_runs, config.seed);

    std::filesystem::create_directories(options.out);
    write_file(options.out / "resolved_config.json", config.resolved_json);
    write_file(options.out / "eval_runs.csv", eval_runs_csv(result));
    write_file(options.out / "eval_aggregate.csv", eval_aggregate_csv(result));
    write_file(options.out / "eval_metrics.csv", eval_metrics_csv(result));
    log << "evaluated " << config.eval_runs << " runs, slope deviation "
        << format_number(result.summary.slope_deviation) << "\n";
  } catch (const std::domain_error& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

std::string inspect_summary(const TrainerState& state) {
  const PolicyArchitecture& a = state.architecture;
  std::ostringstream out;
  out << "format version: " << kCheckpointVersion << "\n";
  out << "algorithm: " << to_string(state.algorithm) << "\n";
  out << "architecture: input " << a.input_dim << ", hidden [";
  for (std::size_t i = 0; i < a.hidden.size(); ++i) out << (i ? ", " : "") << a.hidden[i];
  out << "], ris elements " << a.ris_elements << ", phase levels " << a.phase_levels
      << ", beta scale " << format_number(a.beta_scale) << "\n";
  out << "epoch: " << state.epoch << "\n";
  out << "traces consumed: " << state.traces_consumed << "\n";
  out << "seed: " << state.seed << "\n";
  out << "global params norm: " << format_number(state.global.flatten().norm()) << "\n";
  for (const auto& node : state.nodes) {
    out << "node " << node.id << ": e0 " << node.partition.e0 << ", delta_e "
        << node.partition.delta_e << ", effective e "
        << node.partition.effective(a.num_layers()) << ", params norm "
        << format_number(node.params.flatten().norm()) << "\n";
  }
  return out.str();
}

int cmd_inspect(const std::filesystem::path& checkpoint, std::ostream& out, std::ostream& err) {
  try {
    out << inspect_summary(load_checkpoint(checkpoint));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace fedpg
