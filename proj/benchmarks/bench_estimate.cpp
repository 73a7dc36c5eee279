#include <benchmark/benchmark.h>

#include "zoneforge/diagnose.hpp"
#include "zoneforge/estimate.hpp"
#include "zoneforge/overlap.hpp"
#include "zoneforge/panel.hpp"
#include "zoneforge/simgen.hpp"

using namespace zoneforge;

namespace {

struct Fixture {
  panel::RegressionDataset data;
  estimate::ModelSpec spec;
};

// one mid-size synthetic world carried through the whole pipeline
const Fixture& fixture() {
  static Fixture f = [] {
    simgen::DGPConfig cfg;
    cfg.seed = 4242;
    geo::Geography g = simgen::gen_geography(cfg);
    auto micro = simgen::gen_micro_panel(g, cfg);
    auto sel = overlap::select_markets(micro.overlaps,
                                       overlap::SelectionCriterion::named("main"), micro.areas,
                                       g.rlf());
    auto raw = panel::aggregate_panel(micro.spells, micro.markets, sel.kept, micro.areas,
                                      g.agencies, cfg.panel_from, cfg.panel_to);
    auto censored = panel::apply_censoring(raw);
    Fixture fx;
    fx.data = panel::build_regression_dataset(censored.panel, cfg.q, {}, "ue_rate", cfg.est_from,
                                              cfg.est_to);
    fx.spec.outcome = "ue_rate";
    fx.spec.q = cfg.q;
    fx.spec.estimator = estimate::ModelSpec::Estimator::tsls;
    return fx;
  }();
  return f;
}

}  // namespace

static void BM_fit_tsls(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    auto fit = estimate::fit_tsls(f.data, f.spec);
    benchmark::DoNotOptimize(fit.long_run[0]);
  }
}
BENCHMARK(BM_fit_tsls)->Unit(benchmark::kMillisecond);

static void BM_first_stage(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    auto rep = diagnose::first_stage(f.data, f.spec);
    benchmark::DoNotOptimize(rep.entries.front().sw_f);
  }
}
BENCHMARK(BM_first_stage)->Unit(benchmark::kMillisecond);

static void BM_cluster_bootstrap_99(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    diagnose::BootstrapConfig bc;
    bc.replications = 99;
    bc.seed = 7;
    bc.threads = static_cast<int>(state.range(0));
    auto res = diagnose::cluster_bootstrap(f.data, f.spec, bc);
    benchmark::DoNotOptimize(res.stats.front().se);
  }
}
BENCHMARK(BM_cluster_bootstrap_99)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
