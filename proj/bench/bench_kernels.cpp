// Serial reference loops against the OpenMP kernels. Each benchmark takes
// the execution mode as its argument: 0 = serial, 1 = parallel.
#include <benchmark/benchmark.h>

#include <numeric>

#include "percodyn/brute.hpp"
#include "percodyn/exact.hpp"
#include "percodyn/gadget.hpp"
#include "percodyn/sim.hpp"

using namespace percodyn;

namespace {

Exec mode(const benchmark::State& state) { return state.range(0) ? Exec::parallel : Exec::serial; }

const TreeProfile& deep_profile() {
  static const TreeProfile p = [] {
    ProfileSpec s;
    s.kind = ProfileSpec::Kind::target_growth;
    s.target = {GrowthFamily::log_power, 2.0, 1.0};
    s.depth = 10000;
    return build_profile(s).profile;
  }();
  return p;
}

void BM_SurvivalSweep(benchmark::State& state) {
  std::vector<int> targets(2000);
  std::iota(targets.begin(), targets.end(), 1);
  for (int& n : targets) n *= 5;
  for (auto _ : state)
    benchmark::DoNotOptimize(exact::survival_sweep(deep_profile(), targets, mode(state)));
}

void BM_MonteCarlo(benchmark::State& state) {
  const TreeProfile profile(std::vector<int>(10, 2), std::vector<double>(10, 0.55));
  const sim::SimConfig cfg{profile, 10, 1.0, 2000, 1, false};
  for (auto _ : state) benchmark::DoNotOptimize(sim::monte_carlo(cfg, mode(state)));
}

void BM_BruteTwoTime(benchmark::State& state) {
  const auto tree = brute::expand(TreeProfile({2, 2, 2}, {0.4, 0.6, 0.5}), 2);
  const auto reach = brute::root_reaches(tree, 2);
  const auto both = [&](brute::Config a, brute::Config b) { return reach(a) && reach(b); };
  for (auto _ : state) benchmark::DoNotOptimize(brute::two_time_prob(tree, 0.7, both, mode(state)));
}

void BM_GadgetPersistence(benchmark::State& state) {
  const auto g = gadget::build_gadget(2, 2, 8);
  for (auto _ : state)
    benchmark::DoNotOptimize(gadget::persistence_estimate(g, 0.5, 0.5, 200, 3, mode(state)));
}

}  // namespace

BENCHMARK(BM_SurvivalSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MonteCarlo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BruteTwoTime)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GadgetPersistence)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
