#include <benchmark/benchmark.h>

#include "cyber_range/explain.hpp"
#include "cyber_range/harness.hpp"

using namespace cyber_range;

namespace {

RunConfig mixed(std::size_t episodes) {
  RunConfig cfg;
  cfg.seed = 1;
  cfg.episodes = episodes;
  cfg.adversary = {{AdversaryKind::BLine, 0.5}, {AdversaryKind::Meander, 0.5}};
  return cfg;
}

template <bool Parallel>
void BM_Episodes(benchmark::State& state) {
  const RunConfig cfg = mixed(static_cast<std::size_t>(state.range(0)));
  const Network& net = default_topology();
  const DefenderFactory defender(cfg.defender, net, cfg.probs, cfg.bandit_timesteps, cfg.bandit_epsilon, cfg.seed);
  for (auto _ : state) {
    auto batch = Parallel ? run_episodes(cfg, net, defender) : run_episodes_serial(cfg, net, defender);
    benchmark::DoNotOptimize(batch.stats.overall.mean);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_Accuracy(benchmark::State& state) {
  const HeuristicClassifier heuristic;
  const auto episodes = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto t = Parallel ? eval_controller_accuracy(heuristic, episodes, 1, default_topology())
                      : eval_controller_accuracy_serial(heuristic, episodes, 1, default_topology());
    benchmark::DoNotOptimize(t.classes.size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_Graph(benchmark::State& state) {
  RunConfig cfg = mixed(static_cast<std::size_t>(state.range(0)));
  std::vector<EpisodeTrace> traces;
  for (auto& ep : run_episodes(cfg).episodes) traces.push_back(std::move(ep.trace));
  for (auto _ : state) {
    auto g = Parallel ? build_graph(traces) : build_graph_serial(traces);
    benchmark::DoNotOptimize(g.edges().size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Episodes<false>)->Name("episodes/serial")->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Episodes<true>)->Name("episodes/omp")->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Accuracy<false>)->Name("accuracy/serial")->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Accuracy<true>)->Name("accuracy/omp")->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Graph<false>)->Name("graph/serial")->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Graph<true>)->Name("graph/omp")->Arg(512)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
