#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zoneforge/panel.hpp"

namespace zoneforge::estimate {

struct ModelSpec {
  std::string outcome;
  int q = 6;
  bool lagged_dependent = true;  // false = distributed-lag variant
  enum class Estimator { ols, tsls } estimator = Estimator::tsls;
  bool time_effects = true;
  std::vector<std::string> controls;  // dataset control columns used as-is when empty
};

struct FitResult {
  ModelSpec spec;
  std::vector<std::string> programs;

  bool has_theta = false;
  double theta = 0.0;                      // coefficient on the lagged differenced outcome
  Eigen::MatrixXd phi;                     // programs x (q+1)
  std::vector<std::pair<std::string, double>> gamma;  // controls
  std::vector<std::pair<std::string, double>> mu;     // time effects (incl. intercept)

  std::vector<double> short_run;  // phi(m, 0)
  std::vector<double> long_run;   // sum_j phi(m,j) / (1 - theta), or the plain sum in DL mode

  Eigen::VectorXd beta;                // full coefficient vector
  std::vector<std::string> colnames;   // design column names, aligned with beta
  Eigen::VectorXd residuals;           // over usable rows, from the original regressors
  std::vector<std::size_t> rows_used;  // dataset row indices of the usable rows

  double condition_number = 0.0;
  std::size_t n_rows = 0;
  std::size_t n_params = 0;
};

/// Least squares via column-pivoted Householder QR. Rank deficiency raises
/// NumericalError naming the collinear columns.
FitResult fit_ols(const panel::RegressionDataset& data, const ModelSpec& spec);

/// Just-identified two-stage least squares: every accommodation-rate lag is
/// instrumented by the matching instrument-area lag; the lagged dependent
/// variable and controls act as included instruments.
FitResult fit_tsls(const panel::RegressionDataset& data, const ModelSpec& spec);

/// Distributed-lag variant (no lagged dependent variable); dispatches on
/// spec.estimator. Long-run effects become plain lag-weight sums.
FitResult fit_dl(const panel::RegressionDataset& data, const ModelSpec& spec);

/// sum_j phi_j / (1 - theta) per program. Throws NumericalError
/// ("non-stationary") for theta >= 1 - 1e-9.
std::vector<double> long_run_effect(std::span<const double> phi_sums, double theta);

struct ImpulseResponse {
  std::vector<double> marginal;    // m_0..m_H
  std::vector<double> cumulative;  // running sums; converges to the long-run effect
};

/// m_0 = phi_0, m_h = phi_h + theta*m_{h-1} while h <= q, then pure
/// autoregressive decay.
ImpulseResponse impulse_response(double theta, std::span<const double> phi, int horizon);

// Design-matrix assembly shared with the diagnostics module.
struct Design {
  Eigen::VectorXd y;
  Eigen::MatrixXd endog;       // accommodation-rate lags (empty for OLS-only uses)
  Eigen::MatrixXd instruments; // matching instrument-area lags
  Eigen::MatrixXd exog;        // lagged dep (if any) + controls + intercept + time dummies
  std::vector<std::string> endog_names, instrument_names, exog_names;
  std::vector<std::size_t> rows;  // dataset rows used
};

Design build_design(const panel::RegressionDataset& data, const ModelSpec& spec);

/// Least-squares solve used everywhere: column-pivoted QR with explicit rank
/// reporting. Returns the coefficient vector; fills cond with
/// |R(0,0)/R(r-1,r-1)|.
Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    const std::vector<std::string>& names, double* cond);

}  // namespace zoneforge::estimate
