#include <benchmark/benchmark.h>

#include "fedpg/channel.hpp"
#include "fedpg/commands.hpp"
#include "fedpg/env.hpp"
#include "fedpg/estimator.hpp"
#include "fedpg/policy.hpp"

namespace {

using namespace fedpg;

PolicyArchitecture arch_for(int users, std::vector<int> hidden, int m, int c) {
  PolicyArchitecture a;
  a.input_dim = 3 + 4 * users;
  a.hidden = std::move(hidden);
  a.ris_elements = m;
  a.phase_levels = c;
  return a;
}

// Args: 0 = desk-scale network, 1 = full-scale network.
PolicyArchitecture bench_arch(int full) {
  return full ? arch_for(10, {1024, 512, 256}, 120, 50) : arch_for(4, {64, 32, 16}, 8, 8);
}

void BM_Forward(benchmark::State& state) {
  const PolicyNetwork net(bench_arch(static_cast<int>(state.range(0))), 12.0);
  Rng rng = derive_stream(1, StreamRole::kParamInit);
  const PolicyParams p = init_params(net.architecture(), rng);
  const Eigen::VectorXd s = Eigen::VectorXd::Constant(net.architecture().input_dim, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(p, s));
}
BENCHMARK(BM_Forward)->Arg(0)->Arg(1);

void BM_Backward(benchmark::State& state) {
  const PolicyNetwork net(bench_arch(static_cast<int>(state.range(0))), 12.0);
  Rng rng = derive_stream(1, StreamRole::kParamInit);
  const PolicyParams p = init_params(net.architecture(), rng);
  const Eigen::VectorXd s = Eigen::VectorXd::Constant(net.architecture().input_dim, 0.3);
  const ActionValue a = net.sample_action(net.forward(p, s), rng).action;
  PolicyParams grad = PolicyParams::zeros(net.architecture());
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.accumulate_logprob_gradient(p, s, a, 1.0, grad));
  }
}
BENCHMARK(BM_Backward)->Arg(0)->Arg(1);

void BM_ChannelDraw(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const CorrelatedSampler sampler(build_correlation(PortGrid{5, 5, 3.0, 3.0}));
  const RicianParams rician = RicianParams::from_db(15.0, 10.0, 1.17e10);
  const Eigen::VectorXcd phase = Eigen::VectorXcd::Ones(m);
  Rng rng = derive_stream(1, StreamRole::kNodeRollout);
  for (auto _ : state) {
    const Eigen::VectorXcd lr = lr_channel(rician, 550000.0, m, rng);
    const Eigen::MatrixXcd ru = ru_channel_fas(rician, 100.0, sampler, m, rng);
    benchmark::DoNotOptimize(select_port(lr, phase, ru));
  }
}
BENCHMARK(BM_ChannelDraw)->Arg(8)->Arg(120);

void BM_DeskRollout(benchmark::State& state) {
  const RunConfig config = parse_config(R"({"scenario":{"hotspots":2,"users_per_hotspot":4,
    "ris_elements":8,"phase_levels":8,"port_rows":2,"port_cols":2,"horizon":10},
    "training":{"hidden":[64,32,16]}})");
  const ScenarioSpec scenario = training_scenario(config);
  const auto envs = make_envs(scenario);
  const PolicyNetwork net(bench_arch(0), 12.0);
  Rng prng = derive_stream(1, StreamRole::kParamInit);
  const PolicyParams p = init_params(net.architecture(), prng);
  std::uint64_t i = 0;
  for (auto _ : state) {
    Rng rng = derive_stream(1, StreamRole::kNodeRollout, 0, 0, i++);
    const ExperienceTrace trace = rollout(net, p, envs[0], rng);
    benchmark::DoNotOptimize(trace_advantages(trace, 0.99));
  }
}
BENCHMARK(BM_DeskRollout);

}  // namespace

BENCHMARK_MAIN();
