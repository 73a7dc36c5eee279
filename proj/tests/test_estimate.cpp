#include <doctest.h>

#include <cmath>
#include <numeric>

#include "zoneforge/estimate.hpp"
#include "zoneforge/rng.hpp"

using namespace zoneforge;

namespace {

// Synthetic regression dataset built directly: N markets x T quarters with
// the canonical column layout, y assembled from known coefficients.
struct SynthSpec {
  int n_markets = 6;
  int n_quarters = 30;
  int q = 1;
  double theta = 0.4;
  std::vector<std::vector<double>> phi = {{0.5, 0.2}, {0.0, 0.0}, {-0.3, 0.1}};
  std::vector<double> gamma = {0.7, -0.2};  // two controls
  double noise_sd = 0.0;
  bool instruments_equal_endogenous = false;
  std::uint64_t seed = 5;
};

panel::RegressionDataset make_synth(const SynthSpec& sp) {
  rng::Generator gen(sp.seed);
  panel::RegressionDataset d;
  d.programs = panel::kProgramNames;
  d.outcome = "ue_rate";
  d.q = sp.q;
  d.est_from = make_quarter(2005, 1);
  d.est_to = d.est_from + sp.n_quarters;

  auto add = [&](const std::string& name) {
    d.column_index.emplace(name, static_cast<int>(d.columns.size()));
    d.columns.push_back(name);
    d.data.emplace_back();
  };
  add("dy");
  add("dy_lag");
  for (const auto& c : d.endogenous_columns()) add(c);
  for (const auto& c : d.instrument_columns()) add(c);
  add("w_c1");
  add("w_c2");

  for (int m = 0; m < sp.n_markets; ++m) {
    d.market_ids.push_back("M" + std::to_string(m));
    std::vector<std::vector<double>> x(3), z(3);
    int total = sp.n_quarters + sp.q + 1;
    for (int p = 0; p < 3; ++p)
      for (int t = 0; t < total; ++t) {
        double zx = gen.normal();
        z[p].push_back(zx);
        x[p].push_back(sp.instruments_equal_endogenous ? zx : zx + 0.5 * gen.normal());
      }
    if (sp.instruments_equal_endogenous) z = x;
    std::vector<double> c1(total), c2(total);
    for (int t = 0; t < total; ++t) {
      c1[t] = gen.normal();
      c2[t] = gen.normal();
    }
    std::vector<double> y(total, 0.0);
    for (int t = 1; t < total; ++t) {
      double acc = sp.theta * y[t - 1];
      for (int p = 0; p < 3; ++p)
        for (int j = 0; j <= sp.q; ++j)
          if (t - j >= 0) acc += sp.phi[p][j] * x[p][t - j];
      acc += sp.gamma[0] * c1[t] + sp.gamma[1] * c2[t];
      if (sp.noise_sd > 0) acc += gen.normal(0.0, sp.noise_sd);
      y[t] = acc;
    }
    int off = sp.q + 1;
    for (int t = off; t < total; ++t) {
      d.row_market.push_back(m);
      d.row_quarter.push_back(d.est_from + (t - off));
      d.usable.push_back(1);
      d.data[d.column_index["dy"]].push_back(y[t]);
      d.data[d.column_index["dy_lag"]].push_back(y[t - 1]);
      for (int p = 0; p < 3; ++p)
        for (int j = 0; j <= sp.q; ++j) {
          d.data[d.column_index["dx_" + d.programs[p] + "_l" + std::to_string(j)]].push_back(
              x[p][t - j]);
          d.data[d.column_index["dz_" + d.programs[p] + "_l" + std::to_string(j)]].push_back(
              z[p][t - j]);
        }
      d.data[d.column_index["w_c1"]].push_back(c1[t]);
      d.data[d.column_index["w_c2"]].push_back(c2[t]);
    }
  }
  return d;
}

estimate::ModelSpec ardl_spec(estimate::ModelSpec::Estimator est, int q) {
  estimate::ModelSpec s;
  s.outcome = "ue_rate";
  s.q = q;
  s.estimator = est;
  return s;
}

}  // namespace

TEST_SUITE("estimate") {

TEST_CASE("noise-free data is recovered to interpolation accuracy") {
  SynthSpec sp;
  auto d = make_synth(sp);
  auto fit = estimate::fit_ols(d, ardl_spec(estimate::ModelSpec::Estimator::ols, sp.q));
  CHECK(fit.theta == doctest::Approx(sp.theta).epsilon(1e-10));
  for (int p = 0; p < 3; ++p)
    for (int j = 0; j <= sp.q; ++j)
      CHECK(fit.phi(p, j) == doctest::Approx(sp.phi[p][j]).epsilon(1e-10));
  for (const auto& [name, v] : fit.gamma) {
    if (name == "w_c1") CHECK(v == doctest::Approx(0.7).epsilon(1e-10));
    if (name == "w_c2") CHECK(v == doctest::Approx(-0.2).epsilon(1e-10));
  }
  CHECK(fit.n_rows == static_cast<std::size_t>(sp.n_markets * sp.n_quarters));
}

TEST_CASE("duplicate regressors raise a rank error naming both columns") {
  SynthSpec sp;
  auto d = make_synth(sp);
  // make one control a copy of the other
  d.data[d.column_index["w_c2"]] = d.data[d.column_index["w_c1"]];
  try {
    estimate::fit_ols(d, ardl_spec(estimate::ModelSpec::Estimator::ols, sp.q));
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    std::string msg = e.what();
    CHECK(msg.find("w_c1") != std::string::npos);
    CHECK(msg.find("w_c2") != std::string::npos);
  }
}

TEST_CASE("2SLS equals OLS when instruments equal the endogenous columns") {
  SynthSpec sp;
  sp.noise_sd = 0.3;
  sp.instruments_equal_endogenous = true;
  auto d = make_synth(sp);
  auto ols = estimate::fit_ols(d, ardl_spec(estimate::ModelSpec::Estimator::ols, sp.q));
  auto tsls = estimate::fit_tsls(d, ardl_spec(estimate::ModelSpec::Estimator::tsls, sp.q));
  CHECK(tsls.theta == doctest::Approx(ols.theta).epsilon(1e-10));
  for (int p = 0; p < 3; ++p)
    for (int j = 0; j <= sp.q; ++j)
      CHECK(tsls.phi(p, j) == doctest::Approx(ols.phi(p, j)).epsilon(1e-10));
}

TEST_CASE("2SLS residuals are orthogonal to all instruments") {
  SynthSpec sp;
  sp.noise_sd = 0.5;
  auto d = make_synth(sp);
  auto fit = estimate::fit_tsls(d, ardl_spec(estimate::ModelSpec::Estimator::tsls, sp.q));
  auto design = estimate::build_design(d, ardl_spec(estimate::ModelSpec::Estimator::tsls, sp.q));
  Eigen::MatrixXd z(design.instruments.rows(),
                    design.instruments.cols() + design.exog.cols());
  z.leftCols(design.instruments.cols()) = design.instruments;
  z.rightCols(design.exog.cols()) = design.exog;
  Eigen::VectorXd dot = z.transpose() * fit.residuals;
  double scale = fit.residuals.norm() * z.norm();
  CHECK(dot.norm() / scale < 1e-8);
}

TEST_CASE("scale equivariance: rescaling one endogenous column and its instrument") {
  SynthSpec sp;
  sp.noise_sd = 0.4;
  auto d = make_synth(sp);
  auto base = estimate::fit_tsls(d, ardl_spec(estimate::ModelSpec::Estimator::tsls, sp.q));
  const double k = 37.0;
  for (int j = 0; j <= sp.q; ++j) {
    for (double& v : d.data[d.column_index["dx_training_l" + std::to_string(j)]]) v *= k;
    for (double& v : d.data[d.column_index["dz_training_l" + std::to_string(j)]]) v *= k;
  }
  auto scaled = estimate::fit_tsls(d, ardl_spec(estimate::ModelSpec::Estimator::tsls, sp.q));
  for (int j = 0; j <= sp.q; ++j)
    CHECK(scaled.phi(0, j) == doctest::Approx(base.phi(0, j) / k).epsilon(1e-8));
  CHECK(scaled.theta == doctest::Approx(base.theta).epsilon(1e-8));
  // fitted values unchanged: residuals identical
  CHECK((scaled.residuals - base.residuals).norm() <
        1e-8 * (1.0 + base.residuals.norm()));
}

TEST_CASE("time effects absorb a constant shift of one quarter") {
  SynthSpec sp;
  sp.noise_sd = 0.4;
  auto d = make_synth(sp);
  auto base = estimate::fit_ols(d, ardl_spec(estimate::ModelSpec::Estimator::ols, sp.q));
  Quarter hit = d.est_from + 7;
  auto& y = d.data[d.column_index["dy"]];
  for (std::size_t r = 0; r < d.rows(); ++r)
    if (d.row_quarter[r] == hit) y[r] += 5.0;
  auto shifted = estimate::fit_ols(d, ardl_spec(estimate::ModelSpec::Estimator::ols, sp.q));
  CHECK(shifted.theta == doctest::Approx(base.theta).epsilon(1e-7));
  for (int p = 0; p < 3; ++p)
    for (int j = 0; j <= sp.q; ++j)
      CHECK(shifted.phi(p, j) == doctest::Approx(base.phi(p, j)).epsilon(1e-7));
  // only the dummy for the shifted quarter moves
  std::string dummy = "q_" + format_quarter(hit);
  double base_mu = 0.0, shifted_mu = 0.0;
  for (const auto& [name, v] : base.mu)
    if (name == dummy) base_mu = v;
  for (const auto& [name, v] : shifted.mu)
    if (name == dummy) shifted_mu = v;
  CHECK(shifted_mu - base_mu == doctest::Approx(5.0).epsilon(1e-7));
}

TEST_CASE("long-run effects follow the geometric-sum formula") {
  std::vector<double> sums = {0.6, -0.3};
  auto lr0 = estimate::long_run_effect(sums, 0.0);
  CHECK(lr0[0] == doctest::Approx(0.6));
  CHECK(lr0[1] == doctest::Approx(-0.3));

  // the published anchor pair: theta = 0.685 with a 0.285 long-run effect
  auto lr = estimate::long_run_effect(std::vector<double>{0.089775}, 0.685);
  CHECK(std::abs(lr[0] - 0.285) < 1e-12);

  CHECK_THROWS_AS(estimate::long_run_effect(sums, 1.0), NumericalError);
  try {
    estimate::long_run_effect(sums, 1.0);
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("non-stationary") != std::string::npos);
  }
}

TEST_CASE("impulse responses: geometric decay and cumulative limit") {
  auto r = estimate::impulse_response(0.5, std::vector<double>{1.0}, 20);
  CHECK(r.marginal[0] == 1.0);
  CHECK(r.marginal[1] == doctest::Approx(0.5));
  CHECK(r.marginal[2] == doctest::Approx(0.25));
  CHECK(r.cumulative[20] == doctest::Approx(2.0).epsilon(1e-5));

  auto flat = estimate::impulse_response(0.0, std::vector<double>{0.3, 0.2, 0.1}, 8);
  CHECK(flat.marginal[0] == 0.3);
  CHECK(flat.marginal[1] == 0.2);
  CHECK(flat.marginal[2] == 0.1);
  CHECK(flat.marginal[3] == 0.0);
  CHECK(flat.cumulative[8] == doctest::Approx(0.6));
}

TEST_CASE("cumulative responses match a direct simulation of the difference equation") {
  rng::Generator gen(12);
  for (int rep = 0; rep < 12; ++rep) {
    double theta = -0.9 + 1.8 * gen.uniform();
    int q = static_cast<int>(gen.uniform_index(7));
    std::vector<double> phi(q + 1);
    for (auto& p : phi) p = gen.normal();
    const int H = 1000;
    auto r = estimate::impulse_response(theta, phi, H);
    // simulate y_t = theta y_{t-1} + sum_j phi_j step(t-j) with a unit step
    double y = 0.0;
    for (int t = 0; t <= H; ++t) {
      double acc = theta * y;
      for (int j = 0; j <= q; ++j)
        if (t - j >= 0) acc += phi[j];
      y = acc;
      if (t == H) CHECK(std::abs(r.cumulative[H] - y) < 1e-10);
    }
    auto lr = estimate::long_run_effect(
        std::vector<double>{std::accumulate(phi.begin(), phi.end(), 0.0)}, theta);
    if (std::abs(theta) < 0.95)
      CHECK(std::abs(r.cumulative[H] - lr[0]) < 1e-8);
  }
}

TEST_CASE("the cumulative path converges geometrically to the long-run effect") {
  double theta = 0.7;
  std::vector<double> phi = {0.4, 0.3, 0.2};
  auto lr = estimate::long_run_effect(std::vector<double>{0.9}, theta)[0];
  auto r = estimate::impulse_response(theta, phi, 60);
  double bound = std::abs(r.cumulative[10] - lr);
  for (int h = 11; h <= 60; ++h) {
    double gap = std::abs(r.cumulative[h] - lr);
    CHECK(gap <= bound * std::pow(theta, h - 10) + 1e-12);
  }
}

TEST_CASE("distributed-lag variant drops theta and sums lag weights") {
  SynthSpec sp;
  sp.theta = 0.0;  // the DL model is correctly specified only without dynamics
  auto d = make_synth(sp);
  estimate::ModelSpec spec = ardl_spec(estimate::ModelSpec::Estimator::ols, sp.q);
  spec.lagged_dependent = false;
  auto fit = estimate::fit_dl(d, spec);
  CHECK_FALSE(fit.has_theta);
  for (int p = 0; p < 3; ++p) {
    double sum = 0.0;
    for (int j = 0; j <= sp.q; ++j) {
      CHECK(fit.phi(p, j) == doctest::Approx(sp.phi[p][j]).epsilon(1e-9));
      sum += fit.phi(p, j);
    }
    CHECK(fit.long_run[p] == doctest::Approx(sum).epsilon(1e-12));
  }
}

TEST_CASE("too few rows for the parameter count is an explicit error") {
  SynthSpec sp;
  sp.n_markets = 1;
  sp.n_quarters = 8;  // far fewer rows than parameters
  auto d = make_synth(sp);
  CHECK_THROWS_AS(estimate::fit_ols(d, ardl_spec(estimate::ModelSpec::Estimator::ols, sp.q)),
                  NumericalError);
}

}  // TEST_SUITE
