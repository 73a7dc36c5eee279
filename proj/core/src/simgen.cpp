#include "zoneforge/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "zoneforge/estimate.hpp"
#include "zoneforge/rng.hpp"

namespace zoneforge::simgen {

namespace {

// sub-stream ids for the documented seed-splitting rule
enum Stream : std::uint64_t {
  kGeoStream = 11,
  kFlowStream = 12,
  kAgencyStream = 14,
  kReformStream = 15,
  kStyleStream = 21,
  kMarketStream = 22,
  kShockStream = 23,
  kNoiseStream = 24,
  kTiltStream = 25,
  kInitStream = 26
};

struct ShareSet {
  std::vector<double> gender, age, edu, skill, industry, nat;
};

ShareSet employed_base() {
  return {{0.47, 0.53}, {0.20, 0.24, 0.28, 0.28}, {0.84, 0.16},
          {0.10, 0.80, 0.10}, {0.26, 0.31, 0.12, 0.31}, {0.92, 0.08}};
}
ShareSet unemployed_base() {
  return {{0.45, 0.55}, {0.23, 0.20, 0.21, 0.36}, {0.85, 0.15},
          {0.20, 0.73, 0.07}, {0.23, 0.39, 0.15, 0.23}, {0.88, 0.12}};
}

std::vector<double> tilted(const std::vector<double>& base, double tilt) {
  std::vector<double> v = base;
  v.front() = std::max(0.02, v.front() - tilt);
  v.back() = std::max(0.02, v.back() + tilt);
  double s = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= s;
  return v;
}

// Largest-remainder apportionment of n into categories with the given
// shares; ties go to the lower category index.
std::vector<std::int64_t> apportion(std::int64_t n, const std::vector<double>& shares) {
  std::vector<std::int64_t> out(shares.size(), 0);
  std::vector<std::pair<double, std::size_t>> rem;
  std::int64_t used = 0;
  for (std::size_t k = 0; k < shares.size(); ++k) {
    double target = static_cast<double>(n) * shares[k];
    out[k] = static_cast<std::int64_t>(target);
    used += out[k];
    rem.emplace_back(-(target - static_cast<double>(out[k])), k);
  }
  std::sort(rem.begin(), rem.end());
  for (std::int64_t i = 0; i < n - used; ++i) ++out[rem[static_cast<std::size_t>(i)].second];
  return out;
}

}  // namespace

void DGPConfig::validate() const {
  if (municipalities < 8) throw ValidationError("too few municipalities");
  if (towns < 1 || agencies < 2) throw ValidationError("need at least one town and two agencies");
  if (!(std::abs(theta) < 1.0))
    throw ValidationError("explosive configuration: |theta| must be < 1");
  if (q < 0) throw ValidationError("lag order must be non-negative");
  if (programs.empty() || base_rate.size() != programs.size())
    throw ValidationError("base_rate must match the program list");
  if (endogenous_program < 0 || endogenous_program >= static_cast<int>(programs.size()))
    throw ValidationError("endogenous_program out of range");
  if (phi.size() != 0 && (phi.rows() != static_cast<Eigen::Index>(programs.size()) ||
                          phi.cols() != q + 1))
    throw ValidationError("phi must be programs x (q+1)");
  if (!(panel_from < panel_to && est_from >= panel_from && est_to <= panel_to &&
        est_from < est_to))
    throw ValidationError("inconsistent panel/estimation windows");
  if (stage1_regions < 1 || stage1_regions > municipalities)
    throw ValidationError("stage1_regions out of range");
}

Eigen::MatrixXd DGPConfig::effective_phi() const {
  if (phi.size() != 0) return phi;
  Eigen::MatrixXd p(programs.size(), q + 1);
  p.setZero();
  // one program with a clear effect, one null program, one moderate effect
  std::vector<std::vector<double>> defaults = {
      {-0.060, -0.036, -0.018}, {0.0, 0.0, 0.0}, {-0.050, -0.030, -0.010}};
  for (Eigen::Index m = 0; m < p.rows(); ++m)
    for (Eigen::Index j = 0; j <= q; ++j)
      p(m, j) = defaults[m % defaults.size()][static_cast<std::size_t>(j) % 3] *
                (j < 3 ? 1.0 : 0.25);
  return p;
}

geo::Geography gen_geography(const DGPConfig& config) {
  config.validate();
  const int n = config.municipalities;
  geo::Geography g;

  rng::Generator geo_rng(rng::derive_seed(config.seed, kGeoStream));
  std::vector<std::array<double, 2>> towns(config.towns);
  std::vector<double> town_weight(config.towns);
  for (int t = 0; t < config.towns; ++t) {
    towns[t] = {config.plane_km * (0.08 + 0.84 * geo_rng.uniform()),
                config.plane_km * (0.08 + 0.84 * geo_rng.uniform())};
    town_weight[t] = geo_rng.lognormal(0.0, 0.8);
  }
  double wsum = std::accumulate(town_weight.begin(), town_weight.end(), 0.0);

  std::vector<std::array<double, 2>> pts(n);
  std::vector<std::int64_t> rlf(n);
  for (int u = 0; u < n; ++u) {
    if (geo_rng.uniform() < config.rural_share) {
      // countryside municipality: anywhere on the plane, commutes into the
      // nearest towns and stretches its market across agency borders
      pts[u] = {config.plane_km * (0.03 + 0.94 * geo_rng.uniform()),
                config.plane_km * (0.03 + 0.94 * geo_rng.uniform())};
    } else {
      double pick = geo_rng.uniform() * wsum;
      int town = 0;
      for (double acc = 0.0; town < config.towns - 1; ++town) {
        acc += town_weight[town];
        if (pick < acc) break;
      }
      pts[u] = {std::clamp(towns[town][0] + geo_rng.normal(0.0, config.town_scatter_km), 0.0,
                           config.plane_km),
                std::clamp(towns[town][1] + geo_rng.normal(0.0, config.town_scatter_km), 0.0,
                           config.plane_km)};
    }
    rlf[u] = std::max<std::int64_t>(
        config.min_rlf,
        static_cast<std::int64_t>(std::llround(
            geo_rng.lognormal(config.size_log_mean, config.size_log_sd))));
    geo::Municipality m;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "m%04d", u);
    m.id = buf;
    m.name = "Municipality " + std::to_string(u);
    g.index_of.emplace(m.id, u);
    g.municipalities.push_back(std::move(m));
  }
  g.distances = geo::DistanceMatrix::from_points(pts, config.seconds_per_km);

  // gravity flows: attractiveness * exp(-decay * distance)
  rng::Generator flow_rng(rng::derive_seed(config.seed, kFlowStream));
  std::vector<double> attract(n);
  for (int u = 0; u < n; ++u)
    attract[u] = static_cast<double>(rlf[u]) * flow_rng.lognormal(0.0, config.job_jitter_log_sd);
  std::vector<std::tuple<int, int, std::int64_t>> cells;
  std::vector<std::pair<double, int>> weights(n);
  for (int u = 0; u < n; ++u) {
    double home_share =
        std::clamp(flow_rng.normal(config.home_share_mean, config.home_share_sd), 0.35, 0.9);
    std::int64_t home = static_cast<std::int64_t>(std::llround(home_share * rlf[u]));
    home = std::clamp<std::int64_t>(home, 0, rlf[u]);
    std::int64_t commuters = rlf[u] - home;
    cells.emplace_back(u, u, home);
    if (commuters == 0) continue;
    for (int j = 0; j < n; ++j) {
      double dx = pts[u][0] - pts[j][0], dy = pts[u][1] - pts[j][1];
      double km = std::sqrt(dx * dx + dy * dy);
      weights[j] = {j == u ? 0.0 : attract[j] * std::exp(-config.distance_decay_per_km * km), j};
    }
    int keep = std::min(config.commute_destinations, n - 1);
    std::partial_sort(weights.begin(), weights.begin() + keep, weights.end(),
                      [](const auto& a, const auto& b) {
                        return a.first > b.first || (a.first == b.first && a.second < b.second);
                      });
    std::vector<double> shares(keep);
    double total = 0.0;
    for (int k = 0; k < keep; ++k) total += weights[k].first;
    if (total <= 0.0) {
      cells.back() = {u, u, rlf[u]};  // nowhere to commute
      continue;
    }
    for (int k = 0; k < keep; ++k) shares[k] = weights[k].first / total;
    std::vector<std::int64_t> alloc = apportion(commuters, shares);
    for (int k = 0; k < keep; ++k)
      if (alloc[k] > 0) cells.emplace_back(u, weights[k].second, alloc[k]);
  }
  g.flows = geo::CommutingMatrix::from_triplets(n, std::move(cells));
  auto [row, col] = geo::derive_labour_forces(g.flows);
  for (int u = 0; u < n; ++u) {
    g.municipalities[u].rlf = row[u];
    g.municipalities[u].llf = col[u];
  }

  // adjacency: symmetrized k-nearest neighbours, components connected by
  // their closest cross pair
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u) {
    std::vector<std::pair<double, int>> near;
    near.reserve(n - 1);
    for (int j = 0; j < n; ++j)
      if (j != u) near.emplace_back(g.distances(u, j), j);
    int k = std::min(config.adjacency_neighbours, n - 1);
    std::partial_sort(near.begin(), near.begin() + k, near.end());
    for (int i = 0; i < k; ++i) edges.emplace_back(u, near[i].second);
  }
  g.adjacency = geo::AdjacencyGraph::from_edges(n, edges);
  {
    std::vector<int> comp(n, -1);
    auto label = [&]() {
      std::fill(comp.begin(), comp.end(), -1);
      int c = 0;
      for (int s = 0; s < n; ++s) {
        if (comp[s] != -1) continue;
        std::vector<int> stack{s};
        comp[s] = c;
        while (!stack.empty()) {
          int u = stack.back();
          stack.pop_back();
          for (int v : g.adjacency.neighbours[u])
            if (comp[v] == -1) {
              comp[v] = c;
              stack.push_back(v);
            }
        }
        ++c;
      }
      return c;
    };
    int ncomp = label();
    while (ncomp > 1) {
      double best = std::numeric_limits<double>::infinity();
      std::pair<int, int> pick{-1, -1};
      for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
          if (comp[u] == comp[0] && comp[v] != comp[0]) {
            double d = g.distances(u, v);
            if (d < best || (d == best && std::make_pair(u, v) < pick)) {
              best = d;
              pick = {u, v};
            }
          }
      edges.push_back(pick);
      g.adjacency = geo::AdjacencyGraph::from_edges(n, edges);
      ncomp = label();
    }
  }

  // Agencies: driving-time cells around random seed municipalities, drawn
  // independently of the commuting structure. The reform re-seeds a share of
  // the agencies (those get fresh identities); the rest keep their borders
  // anchored and their ids.
  auto draw_seeds = [&](rng::Generator& r, int count) {
    std::vector<int> seeds;
    while (static_cast<int>(seeds.size()) < count) {
      int cand = static_cast<int>(r.uniform_index(static_cast<std::uint64_t>(n)));
      if (std::find(seeds.begin(), seeds.end(), cand) == seeds.end()) seeds.push_back(cand);
    }
    return seeds;
  };
  auto assign_cells = [&](const std::vector<int>& seeds, const std::vector<int>& ids) {
    std::vector<int> assign(n);
    for (int u = 0; u < n; ++u) {
      int best = 0;
      for (int a = 1; a < static_cast<int>(seeds.size()); ++a)
        if (g.distances(u, seeds[a]) < g.distances(u, seeds[best])) best = a;
      assign[u] = ids[best];
    }
    return assign;
  };
  g.agencies.window_from = config.panel_from;
  g.agencies.window_to = config.panel_to;
  rng::Generator agency_rng(rng::derive_seed(config.seed, kAgencyStream));
  for (int a = 0; a < config.agencies; ++a) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "A%02d", a);
    g.agencies.agency_ids.push_back(buf);
  }
  std::vector<int> seeds = draw_seeds(agency_rng, config.agencies);
  std::vector<int> ids(config.agencies);
  for (int a = 0; a < config.agencies; ++a) ids[a] = a;
  if (config.reform_quarter && *config.reform_quarter > config.panel_from &&
      *config.reform_quarter < config.panel_to) {
    geo::AgencySegment s1;
    s1.from = config.panel_from;
    s1.to = *config.reform_quarter;
    s1.agency_of = assign_cells(seeds, ids);
    // re-seed a share of the agencies; the reorganised ones are new entities
    rng::Generator reform_rng(rng::derive_seed(config.seed, kReformStream));
    std::vector<int> seeds2 = seeds;
    std::vector<int> ids2 = ids;
    for (int a = 0; a < config.agencies; ++a) {
      if (reform_rng.uniform() >= config.reform_share) continue;
      int cand;
      do {
        cand = static_cast<int>(reform_rng.uniform_index(static_cast<std::uint64_t>(n)));
      } while (std::find(seeds2.begin(), seeds2.end(), cand) != seeds2.end());
      seeds2[a] = cand;
      char buf[16];
      std::snprintf(buf, sizeof(buf), "A%02zu", g.agencies.agency_ids.size());
      ids2[a] = static_cast<int>(g.agencies.agency_ids.size());
      g.agencies.agency_ids.push_back(buf);
    }
    geo::AgencySegment s2;
    s2.from = *config.reform_quarter;
    s2.to = config.panel_to;
    s2.agency_of = assign_cells(seeds2, ids2);
    g.agencies.segments = {std::move(s1), std::move(s2)};
  } else {
    geo::AgencySegment s;
    s.from = config.panel_from;
    s.to = config.panel_to;
    s.agency_of = assign_cells(seeds, ids);
    g.agencies.segments = {std::move(s)};
  }
  g.agencies.validate(n);
  return g;
}

MicroPanelResult gen_micro_panel(const geo::Geography& g, const DGPConfig& config) {
  config.validate();
  const int n = g.size();
  const int n_prog = static_cast<int>(config.programs.size());
  const Eigen::MatrixXd phi = config.effective_phi();

  MicroPanelResult out;
  out.truth.programs = config.programs;
  out.truth.theta = config.theta;
  out.truth.phi = phi;
  out.truth.endogenous_program = config.endogenous_program;
  out.truth.endogeneity = config.endogeneity;
  std::vector<double> sums(n_prog);
  for (int m = 0; m < n_prog; ++m) sums[m] = phi.row(m).sum();
  out.truth.long_run = estimate::long_run_effect(sums, config.theta);

  // the generator's own delineation; the pipeline reproduces it bit for bit
  auto [regions, dendro1] = delineate::pre_aggregate(g, config.stage1_regions);
  SymMatrix sim = delineate::commuting_similarity(regions, g.flows);
  delineate::MarketClustering mc = delineate::cluster_markets(
      sim, delineate::StopRule::threshold(config.stop_threshold), regions, g);
  out.markets = std::move(mc.markets);
  out.overlaps = overlap::compute_overlaps(out.markets, g.agencies, g.rlf());
  out.areas = overlap::instrument_areas(out.markets, out.overlaps, g.agencies);

  const int n_markets = out.markets.regions();
  const Quarter sim_from = config.panel_from - 16;
  const int T = config.panel_to - sim_from;
  auto ti = [&](Quarter q) { return q - sim_from; };

  const int n_agencies = static_cast<int>(g.agencies.agency_ids.size());
  rng::Generator style_rng(rng::derive_seed(config.seed, kStyleStream));
  std::vector<std::vector<double>> style(n_agencies, std::vector<double>(n_prog));
  for (int a = 0; a < n_agencies; ++a)
    for (int m = 0; m < n_prog; ++m) style[a][m] = style_rng.normal(0.0, config.agency_style_sd);
  // agency-wide policy conditions, AR(1) started at the stationary spread
  const double cond_stat_sd =
      config.condition_innov_sd / std::sqrt(1.0 - config.condition_rho * config.condition_rho);
  std::vector<std::vector<std::vector<double>>> cond(
      n_agencies, std::vector<std::vector<double>>(n_prog, std::vector<double>(T)));
  for (int a = 0; a < n_agencies; ++a)
    for (int m = 0; m < n_prog; ++m) {
      cond[a][m][0] = style_rng.normal(0.0, cond_stat_sd);
      for (int t = 1; t < T; ++t)
        cond[a][m][t] = config.condition_rho * cond[a][m][t - 1] +
                        style_rng.normal(0.0, config.condition_innov_sd);
    }

  rng::Generator market_rng(rng::derive_seed(config.seed, kMarketStream));
  std::vector<double> fe_ue(n_markets), fe_wf(n_markets), fe_eob(n_markets);
  for (int i = 0; i < n_markets; ++i) {
    fe_ue[i] = market_rng.normal(0.0, config.market_fe_sd);
    fe_wf[i] = market_rng.normal(0.0, 0.01);
    fe_eob[i] = market_rng.normal(0.0, 0.004);
  }
  std::vector<double> cycle(T, 0.0);
  for (int t = 1; t < T; ++t)
    cycle[t] = config.cycle_rho * cycle[t - 1] + market_rng.normal(0.0, config.cycle_innov_sd);
  std::vector<std::vector<double>> welfare(n_markets, std::vector<double>(T));
  std::vector<std::vector<double>> eobr(n_markets, std::vector<double>(T));
  for (int i = 0; i < n_markets; ++i) {
    welfare[i][0] = config.base_welfare + fe_wf[i];
    eobr[i][0] = config.base_eob + fe_eob[i];
    for (int t = 1; t < T; ++t) {
      welfare[i][t] = config.base_welfare + fe_wf[i] +
                      0.9 * (welfare[i][t - 1] - config.base_welfare - fe_wf[i]) +
                      market_rng.normal(0.0, 0.0015);
      eobr[i][t] = config.base_eob + fe_eob[i] +
                   0.9 * (eobr[i][t - 1] - config.base_eob - fe_eob[i]) +
                   market_rng.normal(0.0, 0.0008);
    }
  }

  rng::Generator shock_rng(rng::derive_seed(config.seed, kShockStream));
  std::vector<std::vector<double>> eps(n_markets, std::vector<double>(T));
  for (int i = 0; i < n_markets; ++i)
    for (int t = 0; t < T; ++t) eps[i][t] = shock_rng.normal(0.0, config.eps_sd);

  // workforce-composition tilts per (market, context emp/ue, dimension)
  rng::Generator tilt_rng(rng::derive_seed(config.seed, kTiltStream));
  constexpr int kDims = 6;
  const double tilt_stat = 0.01 / std::sqrt(1.0 - 0.95 * 0.95);
  std::vector<std::vector<std::vector<double>>> tilt(
      n_markets, std::vector<std::vector<double>>(2 * kDims, std::vector<double>(T)));
  for (int i = 0; i < n_markets; ++i)
    for (int d = 0; d < 2 * kDims; ++d) {
      tilt[i][d][0] = tilt_rng.normal(0.0, tilt_stat);
      for (int t = 1; t < T; ++t)
        tilt[i][d][t] = 0.95 * tilt[i][d][t - 1] + tilt_rng.normal(0.0, 0.01);
    }
  const ShareSet emp_base = employed_base();
  const ShareSet ue_base = unemployed_base();

  // municipality policy rates
  rng::Generator noise_rng(rng::derive_seed(config.seed, kNoiseStream));
  std::vector<double> rlf(n);
  std::vector<double> market_rlf(n_markets, 0.0);
  for (int u = 0; u < n; ++u) {
    rlf[u] = static_cast<double>(g.municipalities[u].rlf);
    market_rlf[out.markets.region_of[u]] += rlf[u];
  }
  // X[t][u][m], and the RLF-weighted market aggregate driving the outcome law
  std::vector<std::vector<std::vector<double>>> x_mun(
      T, std::vector<std::vector<double>>(n, std::vector<double>(n_prog)));
  std::vector<std::vector<std::vector<double>>> x_market(
      T, std::vector<std::vector<double>>(n_markets, std::vector<double>(n_prog, 0.0)));
  for (int t = 0; t < T; ++t) {
    Quarter q = sim_from + t;
    int seg = g.agencies.segment_index(std::clamp(q, g.agencies.window_from,
                                                  g.agencies.window_to - 1));
    const auto& agency_of = g.agencies.segments[seg].agency_of;
    for (int u = 0; u < n; ++u) {
      int market = out.markets.region_of[u];
      int agency = agency_of[u];
      for (int m = 0; m < n_prog; ++m) {
        double lambda = m == config.endogenous_program ? config.endogeneity : 0.0;
        double v = config.base_rate[m] + style[agency][m] + cond[agency][m][t] +
                   lambda * eps[market][t] + noise_rng.normal(0.0, config.x_noise_sd);
        v = std::max(v, 0.001);
        x_mun[t][u][m] = v;
        x_market[t][market][m] += v * rlf[u] / market_rlf[market];
      }
    }
  }

  // other-program shares (controls), market level
  std::vector<std::vector<std::vector<double>>> other(
      n_markets, std::vector<std::vector<double>>(3, std::vector<double>(T)));
  for (int i = 0; i < n_markets; ++i)
    for (int k = 0; k < 3; ++k) {
      other[i][k][0] = config.other_program_share[k];
      for (int t = 1; t < T; ++t)
        other[i][k][t] = std::max(0.0, config.other_program_share[k] +
                                           0.9 * (other[i][k][t - 1] -
                                                  config.other_program_share[k]) +
                                           market_rng.normal(0.0, 0.001));
    }

  // outcome law in four-quarter differences
  const double seasonal[4] = {1.0, -0.2, -0.6, -0.2};
  std::vector<std::vector<double>> y(n_markets, std::vector<double>(T));
  std::vector<std::vector<double>> dy(n_markets, std::vector<double>(T, 0.0));
  rng::Generator init_rng(rng::derive_seed(config.seed, kInitStream));
  auto ue_share_female = [&](int i, int t) {
    return tilted(ue_base.gender, tilt[i][kDims + 0][t]).front();
  };
  auto emp_share_acad = [&](int i, int t) {
    return tilted(emp_base.skill, tilt[i][3][t]).back();
  };
  for (int i = 0; i < n_markets; ++i) {
    for (int t = 0; t < 4; ++t)
      y[i][t] = config.base_unemployment + fe_ue[i] +
                config.seasonal_amplitude * seasonal[(sim_from + t) % 4 < 0
                                                         ? ((sim_from + t) % 4 + 4) % 4
                                                         : (sim_from + t) % 4] +
                init_rng.normal(0.0, 0.002);
    for (int t = 4; t < T; ++t) {
      double acc = config.theta * dy[i][t - 1];
      for (int m = 0; m < n_prog; ++m)
        for (int j = 0; j <= config.q; ++j) {
          int s = t - j;
          if (s - 4 < 0) continue;
          acc += phi(m, j) * (x_market[s][i][m] - x_market[s - 4][i][m]);
        }
      double e_now = eps[i][t] + cycle[t];
      double e_then = eps[i][t - 4] + cycle[t - 4];
      acc += e_now - e_then;
      int tq = std::max(0, t - config.q);
      acc += config.control_effect * ((ue_share_female(i, tq) - ue_base.gender.front()) -
                                      (emp_share_acad(i, tq) - emp_base.skill.back()));
      dy[i][t] = acc;
      y[i][t] = y[i][t - 4] + acc;
      if (!(y[i][t] > 0.001 && y[i][t] < 0.6))
        throw NumericalError("outcome rate left (0.001, 0.6); adjust the configuration");
    }
  }

  // person-quarter records matching the implied aggregates
  out.spells.reserve(static_cast<std::size_t>(config.panel_to - config.panel_from) *
                     static_cast<std::size_t>(std::accumulate(
                         g.municipalities.begin(), g.municipalities.end(), std::int64_t{0},
                         [](std::int64_t a, const geo::Municipality& m) { return a + m.rlf; }) /
                     1));
  auto rnd = [](double v) { return static_cast<std::int64_t>(std::llround(v)); };

  for (Quarter q = config.panel_from; q < config.panel_to; ++q) {
    const int t = ti(q);
    for (int u = 0; u < n; ++u) {
      const int market = out.markets.region_of[u];
      const std::int64_t lf = g.municipalities[u].rlf;
      std::int64_t ui = std::clamp<std::int64_t>(rnd(y[market][t] * lf), 0, lf);
      std::int64_t wf = std::clamp<std::int64_t>(rnd(welfare[market][t] * lf), 0, lf - ui);
      std::int64_t eob = std::clamp<std::int64_t>(rnd(eobr[market][t] * lf), 0, lf - ui - wf);
      std::int64_t ws = std::clamp<std::int64_t>(
          rnd(x_mun[t][u][2 % n_prog] * ui), 0, lf - ui - wf - eob);
      std::int64_t unsub = lf - ui - wf - eob - ws;
      std::int64_t outp = rnd(config.out_share / (1.0 - config.out_share) * lf);

      std::int64_t tr = std::clamp<std::int64_t>(rnd(x_mun[t][u][0] * ui), 0, ui);
      std::int64_t sm =
          std::clamp<std::int64_t>(rnd(x_mun[t][u][1 % n_prog] * ui), 0, ui - tr);
      std::int64_t o1 = std::clamp<std::int64_t>(rnd(other[market][0][t] * ui), 0, ui - tr - sm);
      std::int64_t o2 =
          std::clamp<std::int64_t>(rnd(other[market][1][t] * ui), 0, ui - tr - sm - o1);
      std::int64_t o3 = std::clamp<std::int64_t>(rnd(other[market][2][t] * ui), 0,
                                                 ui - tr - sm - o1 - o2);

      struct Bucket {
        panel::LabourState state;
        std::int64_t count;
        bool unemployed_shares;
      };
      std::vector<Bucket> buckets = {
          {panel::LabourState::unsub_employed, unsub, false},
          {panel::LabourState::sub_employed, ws, false},
          {panel::LabourState::ui_unemployed, ui, true},
          {panel::LabourState::welfare_unemployed, wf, true},
          {panel::LabourState::employed_on_benefits, eob, false},
          {panel::LabourState::out, outp, false},
      };

      for (const Bucket& b : buckets) {
        if (b.count == 0) continue;
        const ShareSet& base = b.unemployed_shares ? ue_base : emp_base;
        const int tilt_off = b.unemployed_shares ? kDims : 0;
        auto labels = [&](const std::vector<double>& base_shares, int dim) {
          std::vector<std::int64_t> cnt =
              apportion(b.count, tilted(base_shares, tilt[market][tilt_off + dim][t]));
          std::vector<std::uint8_t> lab(b.count);
          std::int64_t pos = 0;
          for (std::size_t k = 0; k < cnt.size(); ++k)
            for (std::int64_t c = 0; c < cnt[k]; ++c) lab[pos++] = static_cast<std::uint8_t>(k);
          // rotate so attribute dimensions do not align mechanically
          std::rotate(lab.begin(),
                      lab.begin() + static_cast<std::ptrdiff_t>(
                                        (static_cast<std::int64_t>(dim) * 131 + t * 17 + u) %
                                        b.count),
                      lab.end());
          return lab;
        };
        auto gl = labels(base.gender, 0);
        auto al = labels(base.age, 1);
        auto el = labels(base.edu, 2);
        auto sl = labels(base.skill, 3);
        auto il = labels(base.industry, 4);
        auto nl = labels(base.nat, 5);

        for (std::int64_t pidx = 0; pidx < b.count; ++pidx) {
          panel::MicroSpell s;
          s.municipality = u;
          s.quarter = q;
          s.state = b.state;
          s.program = panel::Program::none;
          if (b.state == panel::LabourState::sub_employed)
            s.program = panel::Program::wage_subsidy;
          if (b.state == panel::LabourState::ui_unemployed) {
            if (pidx < tr)
              s.program = panel::Program::training;
            else if (pidx < tr + sm)
              s.program = panel::Program::short_measure;
            else if (pidx < tr + sm + o1)
              s.program = panel::Program::other_ltu;
            else if (pidx < tr + sm + o1 + o2)
              s.program = panel::Program::other_young;
            else if (pidx < tr + sm + o1 + o2 + o3)
              s.program = panel::Program::other;
          }
          s.gender = static_cast<panel::Gender>(gl[pidx]);
          s.age = static_cast<panel::AgeBand>(al[pidx]);
          s.education = static_cast<panel::Education>(el[pidx]);
          s.skill = static_cast<panel::Skill>(sl[pidx]);
          s.industry = static_cast<panel::Industry>(il[pidx]);
          s.nationality = static_cast<panel::Nationality>(nl[pidx]);
          out.spells.push_back(s);
        }
      }
    }
  }
  return out;
}

}  // namespace zoneforge::simgen
