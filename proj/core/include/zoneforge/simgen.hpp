#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "zoneforge/delineate.hpp"
#include "zoneforge/geography.hpp"
#include "zoneforge/overlap.hpp"
#include "zoneforge/panel.hpp"

namespace zoneforge::simgen {

/// Synthetic-world configuration. The generated world has gravity commuting
/// around town centres, agency maps drawn independently of the commuting
/// structure, and a micro panel whose policy assignment loads on the
/// market's contemporaneous outcome shock (biasing OLS) while agency-wide
/// policy conditions provide instrument-relevant variation outside each
/// market. Defaults are calibrated so the identification study separates
/// OLS from 2SLS cleanly; see README for the full data-generating equations.
struct DGPConfig {
  std::uint64_t seed = 20160630;

  // geography
  int municipalities = 280;
  int towns = 30;
  double plane_km = 240.0;
  double town_scatter_km = 10.0;
  double rural_share = 0.45;    // municipalities scattered between towns
  double size_log_mean = 6.8;  // municipality RLF is lognormal
  double size_log_sd = 0.55;
  std::int64_t min_rlf = 200;
  double seconds_per_km = 55.0;
  double distance_decay_per_km = 0.08;  // gravity decay; 0 = distance-independent flows
  double job_jitter_log_sd = 0.25;       // workplace attractiveness spread
  double home_share_mean = 0.62, home_share_sd = 0.06;
  int commute_destinations = 40;
  int adjacency_neighbours = 6;

  // agencies
  int agencies = 14;
  std::optional<Quarter> reform_quarter;  // re-partitions agencies mid-window
  double reform_share = 0.35;             // share of agencies re-seeded by the reform

  // delineation used by the generator itself (the pipeline reproduces it)
  int stage1_regions = 175;
  double stop_threshold = 0.95;

  // true dynamics
  std::vector<std::string> programs = {"training", "short_measure", "wage_subsidy"};
  double theta = 0.35;
  Eigen::MatrixXd phi;  // programs x (q+1); default has a zero-effect program
  int q = 2;
  int endogenous_program = 0;
  double endogeneity = 2.0;  // loading of the endogenous program on the outcome shock
  double eps_sd = 0.003;     // market structural shock

  // policy-rate components
  std::vector<double> base_rate = {0.12, 0.10, 0.08};
  double agency_style_sd = 0.02;       // constant per (agency, program)
  double condition_rho = 0.8;          // agency-wide policy conditions, AR(1)
  double condition_innov_sd = 0.03;
  double x_noise_sd = 0.01;            // municipality-level noise
  std::vector<double> other_program_share = {0.02, 0.01, 0.015};

  // outcome levels
  double base_unemployment = 0.09;
  double market_fe_sd = 0.005;
  double seasonal_amplitude = 0.006;
  double cycle_rho = 0.9, cycle_innov_sd = 0.0015;  // common cycle, absorbed by time effects
  double base_welfare = 0.08, base_eob = 0.03, out_share = 0.04;
  double control_effect = 0.008;  // workforce-composition effect on the outcome

  // windows (panel burn-in before the estimation window)
  Quarter panel_from = make_quarter(1996, 1);
  Quarter panel_to = make_quarter(2012, 1);
  Quarter est_from = make_quarter(1999, 1);
  Quarter est_to = make_quarter(2012, 1);

  void validate() const;
  Eigen::MatrixXd effective_phi() const;  // defaults filled when phi is empty
};

geo::Geography gen_geography(const DGPConfig& config);

struct TruthRecord {
  std::vector<std::string> programs;
  double theta = 0.0;
  Eigen::MatrixXd phi;
  std::vector<double> long_run;  // sum_j phi / (1 - theta)
  int endogenous_program = 0;
  double endogeneity = 0.0;
};

struct MicroPanelResult {
  std::vector<panel::MicroSpell> spells;
  TruthRecord truth;
  delineate::RegionPartition markets;          // markets the generator evolved
  std::vector<overlap::InstrumentArea> areas;  // one per market
  overlap::OverlapTable overlaps;
};

/// Evolves market outcomes by the autoregressive distributed-lag law in
/// four-quarter differences and draws person-quarter records matching the
/// implied aggregates. Rejects explosive configurations.
MicroPanelResult gen_micro_panel(const geo::Geography& g, const DGPConfig& config);

}  // namespace zoneforge::simgen
