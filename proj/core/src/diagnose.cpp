#include "zoneforge/diagnose.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>

#include "zoneforge/rng.hpp"

namespace zoneforge::diagnose {

namespace {

double f_pvalue(double f, double df1, double df2) {
  if (!(f >= 0.0) || df1 <= 0 || df2 <= 0) return 1.0;
  boost::math::fisher_f dist(df1, df2);
  return boost::math::cdf(boost::math::complement(dist, f));
}

double normal_two_sided_p(double z) {
  boost::math::normal dist;
  return 2.0 * boost::math::cdf(dist, -std::abs(z));
}

// Residual-maker via thin QR: returns v - Q (Q^T v) for each column.
struct Projector {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr;
  Eigen::Index cols;
  explicit Projector(const Eigen::MatrixXd& a) : qr(a), cols(a.cols()) {}
  Eigen::MatrixXd residual(const Eigen::MatrixXd& v) const {
    Eigen::MatrixXd qtv = qr.householderQ().transpose() * v;
    qtv.topRows(cols).setZero();
    return qr.householderQ() * qtv;
  }
  Eigen::MatrixXd fitted(const Eigen::MatrixXd& v) const { return v - residual(v); }
};

}  // namespace

FirstStageReport first_stage(const panel::RegressionDataset& data,
                             const estimate::ModelSpec& spec) {
  estimate::Design d = estimate::build_design(data, spec);
  const Eigen::Index n = static_cast<Eigen::Index>(d.rows.size());
  const Eigen::Index k = d.endog.cols();
  const Eigen::Index kz = d.instruments.cols();
  const Eigen::Index pw = d.exog.cols();
  if (k == 0) throw ValidationError("no endogenous columns in the design");
  if (n <= pw + kz) throw NumericalError("too few rows for first-stage diagnostics");

  FirstStageReport rep;
  rep.n_rows = static_cast<std::size_t>(n);
  rep.df2 = static_cast<int>(n - pw - kz);
  const double df1 = static_cast<double>(kz - k + 1);
  if (df1 <= 0)
    throw ValidationError("fewer instruments than endogenous regressors");

  // include the exogenous block, then work with residualized variables
  Projector pw_proj(d.exog);
  Eigen::MatrixXd X = pw_proj.residual(d.endog);
  Eigen::MatrixXd Z = pw_proj.residual(d.instruments);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> zqr(Z);
  if (zqr.rank() < Z.cols())
    throw NumericalError("rank deficiency in the instrument block");
  Projector z_proj(Z);
  Eigen::MatrixXd Xhat = z_proj.fitted(X);  // reduced-form fitted values

  // reduced-form coefficient table (instruments + exogenous block per column)
  {
    Eigen::MatrixXd full(n, kz + pw);
    full.leftCols(kz) = d.instruments;
    full.rightCols(pw) = d.exog;
    Eigen::HouseholderQR<Eigen::MatrixXd> fqr(full);
    rep.regressor_names = d.instrument_names;
    rep.regressor_names.insert(rep.regressor_names.end(), d.exog_names.begin(),
                               d.exog_names.end());
    for (Eigen::Index c = 0; c < k; ++c) {
      Eigen::VectorXd coef = fqr.solve(d.endog.col(c));
      rep.coefficients.emplace_back(
          d.endog_names[c], std::vector<double>(coef.data(), coef.data() + coef.size()));
    }
  }

  for (Eigen::Index c = 0; c < k; ++c) {
    FirstStageEntry e;
    e.endogenous = d.endog_names[c];

    Eigen::MatrixXd others(n, k - 1), others_hat(n, k - 1);
    Eigen::Index w = 0;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (j == c) continue;
      others.col(w) = X.col(j);
      others_hat.col(w) = Xhat.col(j);
      ++w;
    }
    const Eigen::VectorXd& xk = X.col(c);

    // Sanderson-Windmeijer: partial the other endogenous columns out of x_k
    // with 2SLS coefficients, then test the instruments on the residual.
    Eigen::VectorXd xtil;
    if (k == 1) {
      xtil = xk;
    } else {
      Eigen::HouseholderQR<Eigen::MatrixXd> oh(others_hat);
      Eigen::VectorXd delta = oh.solve(xk);  // regression on fitted values = 2SLS
      xtil = xk - others * delta;
    }
    double explained = z_proj.fitted(xtil).squaredNorm();
    double rss = (xtil - z_proj.fitted(xtil)).squaredNorm();
    e.sw_f = (explained / df1) / (rss / rep.df2);
    e.sw_p = f_pvalue(e.sw_f, df1, rep.df2);

    // Angrist-Pischke: restricted model regresses x_k on the fitted other
    // endogenous columns; unrestricted uses the full instrument span.
    double rss_r;
    if (k == 1) {
      rss_r = xk.squaredNorm();
    } else {
      Projector oh_proj(others_hat);
      rss_r = oh_proj.residual(xk).squaredNorm();
    }
    double rss_u = (xk - z_proj.fitted(xk)).squaredNorm();
    e.ap_f = ((rss_r - rss_u) / df1) / (rss_u / rep.df2);
    e.ap_p = f_pvalue(e.ap_f, df1, rep.df2);

    rep.entries.push_back(std::move(e));
  }
  return rep;
}

int thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ZONEFORGE_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

std::vector<std::string> statistic_names(const panel::RegressionDataset& data,
                                         const estimate::ModelSpec& spec, int horizon) {
  std::vector<std::string> names;
  if (spec.lagged_dependent) names.push_back("theta");
  for (const auto& m : data.programs) {
    names.push_back(m + "_short");
    names.push_back(m + "_long");
    for (int h = 0; h <= horizon; ++h) names.push_back(m + "_cum" + std::to_string(h));
  }
  return names;
}

std::vector<double> extract_statistics(const estimate::FitResult& fit, int horizon) {
  std::vector<double> v;
  if (fit.has_theta) v.push_back(fit.theta);
  for (std::size_t m = 0; m < fit.programs.size(); ++m) {
    v.push_back(fit.short_run[m]);
    v.push_back(fit.long_run[m]);
    std::vector<double> phi(fit.phi.cols());
    for (Eigen::Index j = 0; j < fit.phi.cols(); ++j) phi[j] = fit.phi(m, j);
    auto irf = estimate::impulse_response(fit.has_theta ? fit.theta : 0.0, phi, horizon);
    for (double c : irf.cumulative) v.push_back(c);
  }
  return v;
}

estimate::FitResult fit_once(const panel::RegressionDataset& data,
                             const estimate::ModelSpec& spec) {
  if (!spec.lagged_dependent) return estimate::fit_dl(data, spec);
  return spec.estimator == estimate::ModelSpec::Estimator::ols ? estimate::fit_ols(data, spec)
                                                               : estimate::fit_tsls(data, spec);
}

// Resampled copy of the dataset: drawn markets stacked in draw order, each
// draw relabelled as its own cluster.
panel::RegressionDataset resample(const panel::RegressionDataset& data,
                                  const std::vector<int>& draws) {
  panel::RegressionDataset r;
  r.programs = data.programs;
  r.outcome = data.outcome;
  r.q = data.q;
  r.est_from = data.est_from;
  r.est_to = data.est_to;
  r.columns = data.columns;
  r.column_index = data.column_index;

  const int nq = data.est_to - data.est_from;
  const std::size_t rows = draws.size() * static_cast<std::size_t>(nq);
  r.row_market.resize(rows);
  r.row_quarter.resize(rows);
  r.usable.resize(rows);
  r.data.assign(data.data.size(), std::vector<double>(rows));
  for (std::size_t di = 0; di < draws.size(); ++di) {
    r.market_ids.push_back(data.market_ids[draws[di]] + "#" + std::to_string(di));
    std::size_t src = static_cast<std::size_t>(draws[di]) * nq;
    std::size_t dst = di * nq;
    for (int t = 0; t < nq; ++t) {
      r.row_market[dst + t] = static_cast<int>(di);
      r.row_quarter[dst + t] = data.row_quarter[src + t];
      r.usable[dst + t] = data.usable[src + t];
    }
    for (std::size_t c = 0; c < data.data.size(); ++c)
      std::copy_n(data.data[c].begin() + static_cast<std::ptrdiff_t>(src), nq,
                  r.data[c].begin() + static_cast<std::ptrdiff_t>(dst));
  }
  return r;
}

double percentile(std::vector<double> sorted, double p) {
  // linear interpolation between order statistics
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (sorted.size() == 1) return sorted[0];
  double idx = p * (sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(idx);
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double w = idx - lo;
  return sorted[lo] * (1.0 - w) + sorted[hi] * w;
}

}  // namespace

BootstrapResult cluster_bootstrap(const panel::RegressionDataset& data,
                                  const estimate::ModelSpec& spec,
                                  const BootstrapConfig& config) {
  if (config.replications < 2) throw ValidationError("bootstrap needs at least 2 replications");
  const int n_markets = static_cast<int>(data.market_ids.size());
  if (n_markets < 1) throw ValidationError("bootstrap needs at least one market");

  BootstrapResult out;
  out.requested = config.replications;
  out.stat_names = statistic_names(data, spec, config.irf_horizon);

  estimate::FitResult full = fit_once(data, spec);
  std::vector<double> point = extract_statistics(full, config.irf_horizon);

  const int B = config.replications;
  std::vector<std::vector<double>> rep_stats(B);
  std::vector<char> rep_ok(B, 0);

  // draws address markets through their id ranking, so reordering the input
  // markets cannot change any reported statistic
  std::vector<int> by_id(n_markets);
  for (int i = 0; i < n_markets; ++i) by_id[i] = i;
  std::sort(by_id.begin(), by_id.end(), [&](int a, int b) {
    return data.market_ids[a] < data.market_ids[b];
  });

  const int threads = std::max(1, thread_count(config.threads));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      int r = next.fetch_add(1);
      if (r >= B) return;
      rng::Generator gen(rng::derive_seed(config.seed, static_cast<std::uint64_t>(r)));
      std::vector<int> draws(n_markets);
      for (int i = 0; i < n_markets; ++i)
        draws[i] = by_id[gen.uniform_index(static_cast<std::uint64_t>(n_markets))];
      try {
        panel::RegressionDataset rd = resample(data, draws);
        estimate::FitResult fit = fit_once(rd, spec);
        rep_stats[r] = extract_statistics(fit, config.irf_horizon);
        rep_ok[r] = 1;
      } catch (const std::exception&) {
        rep_ok[r] = 0;  // dropped and counted
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // reduce in replication order
  std::vector<std::vector<double>> by_stat(out.stat_names.size());
  for (int r = 0; r < B; ++r) {
    if (!rep_ok[r]) {
      ++out.failed;
      continue;
    }
    ++out.completed;
    for (std::size_t s = 0; s < out.stat_names.size(); ++s)
      by_stat[s].push_back(rep_stats[r][s]);
  }
  if (out.failed > config.max_failure_share * B)
    throw NumericalError("bootstrap: " + std::to_string(out.failed) + " of " + std::to_string(B) +
                         " replications failed");
  if (out.completed < 2) throw NumericalError("bootstrap: fewer than 2 replications completed");

  for (std::size_t s = 0; s < out.stat_names.size(); ++s) {
    StatSummary sum;
    sum.name = out.stat_names[s];
    sum.estimate = point[s];
    double mean = 0.0;
    for (double v : by_stat[s]) mean += v;
    mean /= by_stat[s].size();
    double ss = 0.0;
    for (double v : by_stat[s]) ss += (v - mean) * (v - mean);
    sum.se = std::sqrt(ss / (by_stat[s].size() - 1));
    std::vector<double> sorted = by_stat[s];
    std::sort(sorted.begin(), sorted.end());
    sum.ci_lo = percentile(sorted, 0.025);
    sum.ci_hi = percentile(sorted, 0.975);
    sum.p = sum.se > 0.0 ? normal_two_sided_p(sum.estimate / sum.se) : (sum.estimate == 0.0 ? 1.0 : 0.0);
    out.stats.push_back(std::move(sum));
  }
  if (config.keep_draws) out.draws = std::move(by_stat);
  return out;
}

}  // namespace zoneforge::diagnose
