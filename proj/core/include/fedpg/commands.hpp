#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fedpg/config.hpp"
#include "fedpg/federated.hpp"

namespace fedpg {

/// Exit codes shared by the command entry points.
enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitNumeric = 3, kExitIo = 4 };

/// The training scenario is a pure function of the config and its seed.
ScenarioSpec training_scenario(const RunConfig& config);
std::unique_ptr<FederatedTrainer> make_trainer(const RunConfig& config, int workers = 0);

struct TrainingArtifacts {
  std::string report_csv;
  std::string final_checkpoint;
  std::vector<EpochReport> reports;
};

/// Runs a whole training job without touching the filesystem.
TrainingArtifacts train_to_memory(const RunConfig& config, int workers = 0);

struct TrainOptions {
  std::filesystem::path config;  // empty: built-in defaults
  std::vector<std::string> overrides;
  std::filesystem::path out;
  int workers = 0;
};

/// Writes report.csv, resolved_config.json, checkpoint_epoch_<n>.bin every
/// `checkpoint_every` epochs and checkpoint_final.bin.
int cmd_train(const TrainOptions& options, std::ostream& log, std::ostream& err);

struct EvalOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path config;
  std::vector<std::string> overrides;
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out;
};

/// Writes eval_runs.csv, eval_aggregate.csv, eval_metrics.csv and
/// resolved_config.json.
int cmd_eval(const EvalOptions& options, std::ostream& log, std::ostream& err);

std::string inspect_summary(const TrainerState& state);
int cmd_inspect(const std::filesystem::path& checkpoint, std::ostream& out, std::ostream& err);

}  // namespace fedpg
