#include <algorithm>

#include <benchmark/benchmark.h>

#include "riddled/bell.hpp"

using namespace riddled;

namespace {

void bm_rk4_step(benchmark::State& state) {
  const FullField f{SystemParams{}};
  Vec<4> s{0.3, 0.0, 0.2, 0.0};
  double t = 0.0;
  for (auto _ : state) {
    s = rk4_step<4>(f, t, s, 1e-3);
    t += 1e-3;
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(bm_rk4_step);

// Adaptive integration of the coupled system over one forcing period.
void bm_one_period(benchmark::State& state) {
  const SystemParams p;
  const StepControl ctl;
  for (auto _ : state) {
    double t = 0.0;
    Vec<4> s{0.3, 0.0, 0.2, 0.0};
    integrate_field<4>(FullField{p}, t, s, p.period(), ctl);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(bm_one_period);

void bm_poincare_sections(benchmark::State& state) {
  const SystemParams p;
  const StepControl ctl;
  for (auto _ : state) {
    PoincareMap map(PhaseState{0.0, 0.3, 0.0, 0.0, 0.0}, p, ctl);
    for (int i = 0; i < 100; ++i) benchmark::DoNotOptimize(map.next());
  }
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(bm_poincare_sections)->Unit(benchmark::kMillisecond);

// One classification near the stable manifold and one deep in the riddled
// region, where captures take longer.
void bm_classify(benchmark::State& state) {
  const SystemParams p;
  const StepControl ctl;
  const CaptureCriterion cc;
  const double y = state.range(0) * 1e-3;
  double x = -0.9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(classify_rest(x, y, p, ctl, cc));
    x = x > 0.9 ? -0.9 : x + 0.0137;
  }
}
BENCHMARK(bm_classify)->Arg(10)->Arg(1200)->Unit(benchmark::kMillisecond);

void bm_sp_theta(benchmark::State& state) {
  const SpinContext ctx;
  const auto ensemble = generate_ensemble(EnsembleSpec{}, ctx.params, 3);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sp_theta(ensemble[i], Angle::pi_fraction(1, 3), ctx));
    i = (i + 1) % ensemble.size();
  }
}
BENCHMARK(bm_sp_theta)->Unit(benchmark::kMillisecond);

void bm_bell_lhs_brute(benchmark::State& state) {
  for (auto _ : state) {
    double m = -10.0;
    for (int a : {-1, 1})
      for (int b : {-1, 1})
        for (int c : {-1, 1}) m = std::max(m, bell_lhs(-a * b, -a * c, -b * c));
    benchmark::DoNotOptimize(m);
  }
}
BENCHMARK(bm_bell_lhs_brute);

}  // namespace

BENCHMARK_MAIN();
