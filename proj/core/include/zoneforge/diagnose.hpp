#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zoneforge/estimate.hpp"
#include "zoneforge/panel.hpp"

namespace zoneforge::diagnose {

struct FirstStageEntry {
  std::string endogenous;
  double sw_f = 0.0, sw_p = 1.0;
  double ap_f = 0.0, ap_p = 1.0;
};

struct FirstStageReport {
  std::vector<FirstStageEntry> entries;
  // reduced-form first-stage coefficients (instruments + exogenous block)
  std::vector<std::string> regressor_names;
  std::vector<std::pair<std::string, std::vector<double>>> coefficients;
  std::size_t n_rows = 0;
  int df2 = 0;  // denominator degrees of freedom, n - p_exog - k_instruments
};

/// Conditional first-stage strength per endogenous column.
///
/// Both statistics partial the included exogenous block out of everything
/// first. The SW statistic residualizes x_k on the other endogenous columns
/// (coefficients estimated by 2SLS on the excluded instruments) and tests
/// the instruments on that residual; the AP statistic replaces the other
/// endogenous columns by their reduced-form fitted values and tests the
/// instruments' increment over them. The numerator degrees of freedom are
/// k_Z - k_endog + 1 (= 1 in the just-identified case); see README.
FirstStageReport first_stage(const panel::RegressionDataset& data,
                             const estimate::ModelSpec& spec);

struct BootstrapConfig {
  int replications = 499;
  std::uint64_t seed = 1;
  int threads = 0;           // 0: ZONEFORGE_THREADS or hardware concurrency
  int irf_horizon = 12;      // cumulative-effect draws are kept up to here
  double max_failure_share = 0.05;
  bool keep_draws = false;
};

struct StatSummary {
  std::string name;
  double estimate = 0.0;  // full-sample value
  double se = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;  // percentile 2.5 / 97.5
  double p = 1.0;                   // 2 * Phi(-|estimate/se|)
};

struct BootstrapResult {
  int requested = 0;
  int completed = 0;
  int failed = 0;
  std::vector<StatSummary> stats;
  std::vector<std::string> stat_names;
  std::vector<std::vector<double>> draws;  // stat x replication when kept
};

/// Cross-sectional bootstrap: each replication resamples whole markets with
/// replacement (duplicates relabelled as distinct clusters), rebuilds the
/// design including time effects, and refits the full model. Replication r
/// depends only on (seed, r); results are reduced in replication order, so
/// output is thread-count invariant.
BootstrapResult cluster_bootstrap(const panel::RegressionDataset& data,
                                  const estimate::ModelSpec& spec, const BootstrapConfig& config);

int thread_count(int requested);  // resolves the thread-count policy

}  // namespace zoneforge::diagnose
