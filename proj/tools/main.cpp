#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedpg/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Federated policy-gradient training for satellite-UAV-RIS relay networks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  std::string algo;
  int workers = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file (defaults when omitted)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", out_dir, "Output directory");
    cmd->add_option("--seed", seed, "Root seed, overrides the config");
    cmd->add_option("--set", overrides, "Dotted override, e.g. training.sigma_far=3.0");
  };

  CLI::App* train = app.add_subcommand("train", "Train one algorithm and write reports");
  add_common(train);
  train->add_option("--algo", algo, "fedpg_ap | fedpg_np | fedpg_fp | svrpg");
  train->add_option("--workers", workers, "Worker threads (0: one per node)")
      ->check(CLI::NonNegativeNumber);

  std::string checkpoint;
  int runs = 0;
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint on fresh scenarios");
  add_common(eval);
  eval->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  eval->add_option("--runs", runs, "Independent evaluation runs")->check(CLI::PositiveNumber);

  CLI::App* inspect = app.add_subcommand("inspect", "Summarize a checkpoint");
  inspect->add_option("checkpoint", checkpoint, "Checkpoint file")->required();

  CLI11_PARSE(app, argc, argv);

  const bool has_seed =
      (train->parsed() && train->count("--seed") > 0) || (eval->parsed() && eval->count("--seed") > 0);

  if (train->parsed()) {
    fedpg::TrainOptions opts;
    opts.config = config_path;
    opts.out = out_dir;
    opts.workers = workers;
    if (has_seed) opts.overrides.push_back("seed=" + std::to_string(seed));
    if (!algo.empty()) opts.overrides.push_back("training.algorithm=" + algo);
    opts.overrides.insert(opts.overrides.end(), overrides.begin(), overrides.end());
    return fedpg::cmd_train(opts, std::cout, std::cerr);
  }
  if (eval->parsed()) {
    fedpg::EvalOptions opts;
    opts.checkpoint = checkpoint;
    opts.config = config_path;
    opts.out = out_dir;
    opts.overrides = overrides;
    if (eval->count("--runs") > 0) opts.runs = runs;
    if (has_seed) opts.seed = seed;
    return fedpg::cmd_eval(opts, std::cout, std::cerr);
  }
  return fedpg::cmd_inspect(checkpoint, std::cout, std::cerr);
}
