#include "zoneforge/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace zoneforge::estimate {

namespace {

std::string join(const std::vector<std::string>& names) {
  std::string s;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) s += ", ";
    s += names[i];
  }
  return s;
}

}  // namespace

Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    const std::vector<std::string>& names, double* cond) {
  if (X.rows() < X.cols() + 1)
    throw NumericalError("not enough usable rows: " + std::to_string(X.rows()) + " rows for " +
                         std::to_string(X.cols()) + " parameters");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  const auto& R = qr.matrixR();
  Eigen::Index rank = qr.rank();
  if (rank < X.cols()) {
    // name the dependent columns and what they collide with
    std::vector<std::string> offenders;
    Eigen::MatrixXd r11 = R.topLeftCorner(rank, rank).triangularView<Eigen::Upper>();
    for (Eigen::Index k = rank; k < X.cols(); ++k) {
      int dep = static_cast<int>(qr.colsPermutation().indices()(k));
      std::set<std::string> with;
      Eigen::VectorXd combo =
          r11.triangularView<Eigen::Upper>().solve(R.block(0, k, rank, 1));
      for (Eigen::Index i = 0; i < rank; ++i)
        if (std::abs(combo(i)) > 1e-6)
          with.insert(names[qr.colsPermutation().indices()(i)]);
      std::string entry = names[dep];
      if (!with.empty()) {
        entry += " (collinear with ";
        bool first = true;
        for (const auto& w : with) {
          if (!first) entry += ", ";
          entry += w;
          first = false;
        }
        entry += ")";
      }
      offenders.push_back(entry);
    }
    throw NumericalError("rank-deficient design: " + join(offenders));
  }
  if (cond) {
    double top = std::abs(R(0, 0));
    double bottom = std::abs(R(rank - 1, rank - 1));
    *cond = bottom > 0.0 ? top / bottom : std::numeric_limits<double>::infinity();
  }
  return qr.solve(y);
}

Design build_design(const panel::RegressionDataset& data, const ModelSpec& spec) {
  Design d;
  std::vector<std::string> controls =
      spec.controls.empty() ? data.control_columns() : spec.controls;

  d.rows.reserve(data.rows());
  for (std::size_t r = 0; r < data.rows(); ++r)
    if (data.usable[r]) d.rows.push_back(r);
  const std::size_t n = d.rows.size();
  if (n == 0) throw NumericalError("no usable rows in the estimation window");

  auto gather = [&](const std::string& name) {
    const auto& src = data.col(name);
    Eigen::VectorXd v(n);
    for (std::size_t i = 0; i < n; ++i) v(i) = src[d.rows[i]];
    return v;
  };

  d.y = gather("dy");

  d.endog_names = data.endogenous_columns();
  d.instrument_names = data.instrument_columns();
  d.endog.resize(n, d.endog_names.size());
  d.instruments.resize(n, d.instrument_names.size());
  for (std::size_t c = 0; c < d.endog_names.size(); ++c) d.endog.col(c) = gather(d.endog_names[c]);
  for (std::size_t c = 0; c < d.instrument_names.size(); ++c)
    d.instruments.col(c) = gather(d.instrument_names[c]);

  if (spec.lagged_dependent) d.exog_names.push_back("dy_lag");
  for (const auto& c : controls) d.exog_names.push_back(c);
  d.exog_names.push_back("const");
  std::vector<Quarter> dummy_quarters;
  if (spec.time_effects) {
    std::set<Quarter> qs;
    for (std::size_t i = 0; i < n; ++i) qs.insert(data.row_quarter[d.rows[i]]);
    bool first = true;
    for (Quarter q : qs) {
      if (first) {  // base quarter dropped
        first = false;
        continue;
      }
      dummy_quarters.push_back(q);
      d.exog_names.push_back("q_" + format_quarter(q));
    }
  }
  d.exog.resize(n, d.exog_names.size());
  Eigen::Index col = 0;
  if (spec.lagged_dependent) d.exog.col(col++) = gather("dy_lag");
  for (const auto& c : controls) d.exog.col(col++) = gather(c);
  d.exog.col(col++).setOnes();
  for (Quarter q : dummy_quarters) {
    for (std::size_t i = 0; i < n; ++i)
      d.exog(i, col) = data.row_quarter[d.rows[i]] == q ? 1.0 : 0.0;
    ++col;
  }
  return d;
}

namespace {

FitResult finalize(const panel::RegressionDataset& data, const ModelSpec& spec, const Design& d,
                   const Eigen::VectorXd& beta, double cond) {
  FitResult f;
  f.spec = spec;
  f.programs = data.programs;
  const int q1 = data.q + 1;
  const std::size_t ne = d.endog_names.size();

  f.beta = beta;
  f.colnames = d.endog_names;
  f.colnames.insert(f.colnames.end(), d.exog_names.begin(), d.exog_names.end());
  f.n_rows = d.rows.size();
  f.n_params = f.colnames.size();
  f.condition_number = cond;

  f.phi.resize(static_cast<Eigen::Index>(data.programs.size()), q1);
  for (std::size_t m = 0; m < data.programs.size(); ++m)
    for (int j = 0; j < q1; ++j) f.phi(m, j) = beta(m * q1 + j);

  f.has_theta = spec.lagged_dependent;
  if (f.has_theta) f.theta = beta(static_cast<Eigen::Index>(ne));
  for (std::size_t c = (spec.lagged_dependent ? 1u : 0u); c < d.exog_names.size(); ++c) {
    const std::string& name = d.exog_names[c];
    double value = beta(static_cast<Eigen::Index>(ne + c));
    if (name == "const" || name.rfind("q_", 0) == 0)
      f.mu.emplace_back(name, value);
    else
      f.gamma.emplace_back(name, value);
  }

  std::vector<double> sums(data.programs.size());
  for (std::size_t m = 0; m < data.programs.size(); ++m) {
    f.short_run.push_back(f.phi(m, 0));
    sums[m] = f.phi.row(m).sum();
  }
  f.long_run = f.has_theta ? long_run_effect(sums, f.theta) : sums;

  Eigen::MatrixXd X(d.rows.size(), f.n_params);
  X.leftCols(d.endog.cols()) = d.endog;
  X.rightCols(d.exog.cols()) = d.exog;
  f.residuals = d.y - X * beta;
  f.rows_used = d.rows;
  return f;
}

}  // namespace

FitResult fit_ols(const panel::RegressionDataset& data, const ModelSpec& spec) {
  Design d = build_design(data, spec);
  Eigen::MatrixXd X(d.rows.size(), d.endog.cols() + d.exog.cols());
  X.leftCols(d.endog.cols()) = d.endog;
  X.rightCols(d.exog.cols()) = d.exog;
  std::vector<std::string> names = d.endog_names;
  names.insert(names.end(), d.exog_names.begin(), d.exog_names.end());
  double cond = 0.0;
  Eigen::VectorXd beta = solve_least_squares(X, d.y, names, &cond);
  return finalize(data, spec, d, beta, cond);
}

FitResult fit_tsls(const panel::RegressionDataset& data, const ModelSpec& spec) {
  Design d = build_design(data, spec);
  if (d.instruments.cols() != d.endog.cols())
    throw ValidationError("instrument count does not match endogenous count");

  Eigen::MatrixXd Z(d.rows.size(), d.instruments.cols() + d.exog.cols());
  Z.leftCols(d.instruments.cols()) = d.instruments;
  Z.rightCols(d.exog.cols()) = d.exog;
  std::vector<std::string> znames = d.instrument_names;
  znames.insert(znames.end(), d.exog_names.begin(), d.exog_names.end());

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> zqr(Z);
  if (zqr.rank() < Z.cols()) {
    std::vector<std::string> bad;
    for (Eigen::Index k = zqr.rank(); k < Z.cols(); ++k)
      bad.push_back(znames[zqr.colsPermutation().indices()(k)]);
    throw NumericalError("first-stage rank deficiency: " + join(bad));
  }
  // first stage: project the endogenous block on the full instrument set
  Eigen::MatrixXd fitted = Z * zqr.solve(d.endog);

  Eigen::MatrixXd Xhat(d.rows.size(), d.endog.cols() + d.exog.cols());
  Xhat.leftCols(fitted.cols()) = fitted;
  Xhat.rightCols(d.exog.cols()) = d.exog;
  std::vector<std::string> names = d.endog_names;
  names.insert(names.end(), d.exog_names.begin(), d.exog_names.end());
  double cond = 0.0;
  Eigen::VectorXd beta = solve_least_squares(Xhat, d.y, names, &cond);
  return finalize(data, spec, d, beta, cond);
}

FitResult fit_dl(const panel::RegressionDataset& data, const ModelSpec& spec) {
  ModelSpec dl = spec;
  dl.lagged_dependent = false;
  return dl.estimator == ModelSpec::Estimator::ols ? fit_ols(data, dl) : fit_tsls(data, dl);
}

std::vector<double> long_run_effect(std::span<const double> phi_sums, double theta) {
  if (theta >= 1.0 - 1e-9)
    throw NumericalError("non-stationary: theta = " + std::to_string(theta));
  std::vector<double> out(phi_sums.size());
  for (std::size_t m = 0; m < phi_sums.size(); ++m) out[m] = phi_sums[m] / (1.0 - theta);
  return out;
}

ImpulseResponse impulse_response(double theta, std::span<const double> phi, int horizon) {
  if (horizon < 0) throw ValidationError("horizon must be non-negative");
  ImpulseResponse r;
  r.marginal.reserve(horizon + 1);
  r.cumulative.reserve(horizon + 1);
  const int q = static_cast<int>(phi.size()) - 1;
  double cum = 0.0;
  for (int h = 0; h <= horizon; ++h) {
    double m = h == 0 ? phi[0] : theta * r.marginal[h - 1] + (h <= q ? phi[h] : 0.0);
    r.marginal.push_back(m);
    cum += m;
    r.cumulative.push_back(cum);
  }
  return r;
}

}  // namespace zoneforge::estimate
