#include <benchmark/benchmark.h>

#include "zoneforge/delineate.hpp"
#include "zoneforge/simgen.hpp"

using namespace zoneforge;

namespace {

geo::Geography world(int municipalities) {
  simgen::DGPConfig cfg;
  cfg.seed = 99;
  cfg.municipalities = municipalities;
  cfg.towns = std::max(6, municipalities / 70);
  cfg.agencies = std::max(4, municipalities / 25);
  cfg.stage1_regions = municipalities / 2;
  return simgen::gen_geography(cfg);
}

}  // namespace

static void BM_pre_aggregate(benchmark::State& state) {
  geo::Geography g = world(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto [part, dendro] = delineate::pre_aggregate(g, g.size() / 3);
    benchmark::DoNotOptimize(part.regions());
  }
}
BENCHMARK(BM_pre_aggregate)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_cluster_markets(benchmark::State& state) {
  geo::Geography g = world(static_cast<int>(state.range(0)));
  auto [regions, d1] = delineate::pre_aggregate(g, g.size() / 3);
  SymMatrix s = delineate::commuting_similarity(regions, g.flows);
  for (auto _ : state) {
    auto mc = delineate::cluster_markets(s, delineate::StopRule::threshold(0.95), regions, g);
    benchmark::DoNotOptimize(mc.markets.regions());
  }
}
BENCHMARK(BM_cluster_markets)->Arg(900)->Arg(3000)->Unit(benchmark::kMillisecond);

static void BM_commuting_similarity(benchmark::State& state) {
  geo::Geography g = world(static_cast<int>(state.range(0)));
  auto [regions, d1] = delineate::pre_aggregate(g, g.size() / 2);
  for (auto _ : state) {
    SymMatrix s = delineate::commuting_similarity(regions, g.flows);
    benchmark::DoNotOptimize(s.size());
  }
}
BENCHMARK(BM_commuting_similarity)->Arg(2000)->Unit(benchmark::kMillisecond);
