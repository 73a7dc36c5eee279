#include "zoneforge/pipeline.hpp"

#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "zoneforge/csv.hpp"
#include "zoneforge/delineate.hpp"
#include "zoneforge/diagnose.hpp"
#include "zoneforge/estimate.hpp"
#include "zoneforge/geography.hpp"
#include "zoneforge/overlap.hpp"
#include "zoneforge/panel.hpp"
#include "zoneforge/simgen.hpp"

namespace zoneforge::cli {

using json = nlohmann::ordered_json;

namespace {

json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ValidationError("cannot open file: " + p.string());
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ValidationError(p.string() + ": " + e.what());
  }
  return j;
}

void write_json(const std::filesystem::path& p, const json& j) {
  std::ofstream out(p);
  if (!out) throw ValidationError("cannot write file: " + p.string());
  out << j.dump(2) << '\n';
}

template <class T>
T get_or(const nlohmann::json& j, const std::string& key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

Quarter get_quarter(const nlohmann::json& j, const std::string& key, Quarter fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return parse_quarter(j.at(key).get<std::string>());
}

simgen::DGPConfig dgp_from_config(const RunConfig& config) {
  simgen::DGPConfig d;
  d.seed = config.require_seed("simulate");
  const auto& s = config.section("simulate");
  d.municipalities = get_or(s, "municipalities", d.municipalities);
  d.towns = get_or(s, "towns", d.towns);
  d.plane_km = get_or(s, "plane_km", d.plane_km);
  d.town_scatter_km = get_or(s, "town_scatter_km", d.town_scatter_km);
  d.size_log_mean = get_or(s, "size_log_mean", d.size_log_mean);
  d.size_log_sd = get_or(s, "size_log_sd", d.size_log_sd);
  d.min_rlf = get_or<std::int64_t>(s, "min_rlf", d.min_rlf);
  d.seconds_per_km = get_or(s, "seconds_per_km", d.seconds_per_km);
  d.distance_decay_per_km = get_or(s, "distance_decay_per_km", d.distance_decay_per_km);
  d.home_share_mean = get_or(s, "home_share_mean", d.home_share_mean);
  d.home_share_sd = get_or(s, "home_share_sd", d.home_share_sd);
  d.commute_destinations = get_or(s, "commute_destinations", d.commute_destinations);
  d.adjacency_neighbours = get_or(s, "adjacency_neighbours", d.adjacency_neighbours);
  d.agencies = get_or(s, "agencies", d.agencies);
  if (s.is_object() && s.contains("reform_quarter"))
    d.reform_quarter = parse_quarter(s.at("reform_quarter").get<std::string>());
  d.theta = get_or(s, "theta", d.theta);
  d.q = get_or(s, "q", d.q);
  d.endogenous_program = get_or(s, "endogenous_program", d.endogenous_program);
  d.endogeneity = get_or(s, "endogeneity", d.endogeneity);
  d.eps_sd = get_or(s, "eps_sd", d.eps_sd);
  d.agency_style_sd = get_or(s, "agency_style_sd", d.agency_style_sd);
  d.condition_rho = get_or(s, "condition_rho", d.condition_rho);
  d.condition_innov_sd = get_or(s, "condition_innov_sd", d.condition_innov_sd);
  d.x_noise_sd = get_or(s, "x_noise_sd", d.x_noise_sd);
  d.base_unemployment = get_or(s, "base_unemployment", d.base_unemployment);
  d.out_share = get_or(s, "out_share", d.out_share);
  if (s.is_object() && s.contains("phi")) {
    auto rows = s.at("phi").get<std::vector<std::vector<double>>>();
    Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    d.phi = m;
  }
  d.panel_from = get_quarter(config.section("panel"), "from", d.panel_from);
  d.panel_to = get_quarter(config.section("panel"), "to", d.panel_to);
  // estimation window defaults to the panel window minus a burn-in
  Quarter burn = std::min(12, (d.panel_to - d.panel_from) / 2);
  d.est_from = get_quarter(config.section("estimate"), "from", d.panel_from + burn);
  d.est_to = get_quarter(config.section("estimate"), "to", d.panel_to);
  const auto& del = config.section("delineate");
  d.stage1_regions = get_or(del, "stage1_regions", d.stage1_regions);
  d.stop_threshold = get_or(del, "stop_threshold", d.stop_threshold);
  return d;
}

geo::Geography load_world(const RunConfig& config) {
  geo::GeoConfig gc;
  gc.window_from = get_quarter(config.section("panel"), "from", 0);
  gc.window_to = get_quarter(config.section("panel"), "to", 0);
  return geo::load_geography(geo::GeoPaths::in_directory(config.world_dir), gc);
}

delineate::RegionPartition load_partition(const std::filesystem::path& file,
                                          const geo::Geography& g, const std::string& label) {
  csv::Reader r(file);
  int c_m = r.require_column("municipality_id");
  int c_r = r.require_column("region_id");
  std::vector<int> assign(g.size(), -1);
  std::unordered_map<std::string, int> region_key;
  r.for_each_row([&](const std::vector<std::string>& f, long) {
    int u = g.require_index(f[c_m]);
    auto [it, fresh] = region_key.emplace(f[c_r], static_cast<int>(region_key.size()));
    assign[u] = it->second;
  });
  for (int u = 0; u < g.size(); ++u)
    if (assign[u] < 0)
      throw ValidationError(file.string() + ": municipality '" + g.municipalities[u].id +
                            "' missing from the partition");
  return delineate::RegionPartition::from_assignment(assign, g, label);
}

void write_partition(const std::filesystem::path& file, const delineate::RegionPartition& p,
                     const geo::Geography& g) {
  csv::Writer w(file, {"municipality_id", "region_id"});
  for (int u = 0; u < p.n_units; ++u)
    w.row({g.municipalities[u].id, p.region_ids[p.region_of[u]]});
}

void write_dendrogram(const std::filesystem::path& file, const delineate::Dendrogram& d,
                      const std::vector<std::string>& leaf_ids) {
  csv::Writer w(file, {"step", "left", "right", "height"});
  for (const auto& m : d.merges)
    w.row({std::to_string(m.step), leaf_ids[m.left], leaf_ids[m.right],
           csv::format_double(m.height)});
}

json fit_to_json(const estimate::FitResult& f) {
  json j;
  j["outcome"] = f.spec.outcome;
  j["model"] = f.spec.lagged_dependent ? "ardl" : "dl";
  j["estimator"] = f.spec.estimator == estimate::ModelSpec::Estimator::ols ? "ols" : "tsls";
  j["q"] = f.spec.q;
  j["rows"] = f.n_rows;
  j["parameters"] = f.n_params;
  j["condition_number"] = f.condition_number;
  if (f.has_theta) j["theta"] = f.theta;
  json phi = json::object();
  for (std::size_t m = 0; m < f.programs.size(); ++m) {
    std::vector<double> row(f.phi.cols());
    for (Eigen::Index c = 0; c < f.phi.cols(); ++c) row[c] = f.phi(m, c);
    phi[f.programs[m]] = row;
  }
  j["phi"] = phi;
  json effects = json::object();
  for (std::size_t m = 0; m < f.programs.size(); ++m)
    effects[f.programs[m]] = {{"short_run", f.short_run[m]}, {"long_run", f.long_run[m]}};
  j["effects"] = effects;
  json gamma = json::object();
  for (const auto& [name, v] : f.gamma) gamma[name] = v;
  j["controls"] = gamma;
  json mu = json::object();
  for (const auto& [name, v] : f.mu) mu[name] = v;
  j["time_effects"] = mu;
  return j;
}

estimate::ModelSpec spec_from_config(const RunConfig& config, const std::string& outcome) {
  const auto& e = config.section("estimate");
  estimate::ModelSpec spec;
  spec.outcome = outcome;
  spec.q = get_or(e, "q", 6);
  spec.lagged_dependent = get_or<std::string>(e, "model", "ardl") != "dl";
  spec.estimator = get_or<std::string>(e, "estimator", "tsls") == "ols"
                       ? estimate::ModelSpec::Estimator::ols
                       : estimate::ModelSpec::Estimator::tsls;
  return spec;
}

}  // namespace

RunConfig RunConfig::load(const std::filesystem::path& config_file,
                          std::optional<std::uint64_t> seed_override,
                          std::optional<std::filesystem::path> out_override) {
  RunConfig c;
  c.config_path = config_file;
  c.doc = std::make_shared<nlohmann::json>(read_json(config_file));
  const auto& j = *c.doc;
  if (!j.is_object()) throw ValidationError(config_file.string() + ": config must be an object");
  if (j.contains("seed")) {
    c.seed = j.at("seed").get<std::uint64_t>();
    c.has_seed = true;
  }
  if (seed_override) {
    c.seed = *seed_override;
    c.has_seed = true;
  }
  std::filesystem::path base = config_file.parent_path();
  auto resolve = [&](std::filesystem::path p) { return p.is_absolute() ? p : base / p; };
  c.out_dir = resolve(get_or<std::string>(j, "out", "out"));
  if (out_override) c.out_dir = *out_override;
  c.world_dir = j.contains("world") ? resolve(j.at("world").get<std::string>())
                                    : c.out_dir / "world";
  c.threads = get_or(j, "threads", 0);
  return c;
}

const nlohmann::json& RunConfig::section(const std::string& name) const {
  static const nlohmann::json empty = nlohmann::json::object();
  if (doc && doc->is_object() && doc->contains(name)) return doc->at(name);
  return empty;
}

std::uint64_t RunConfig::require_seed(const std::string& for_what) const {
  if (!has_seed) throw ValidationError("a seed is required for " + for_what +
                                       " (config key \"seed\" or --seed)");
  return seed;
}

int cmd_simulate(const RunConfig& config) {
  simgen::DGPConfig dgp = dgp_from_config(config);
  geo::Geography g = simgen::gen_geography(dgp);
  simgen::MicroPanelResult micro = simgen::gen_micro_panel(g, dgp);

  std::filesystem::create_directories(config.world_dir);
  geo::write_geography(g, config.world_dir);
  panel::write_micro(config.world_dir / "micro.csv", micro.spells, g);

  json truth;
  truth["programs"] = micro.truth.programs;
  truth["theta"] = micro.truth.theta;
  json phi = json::object();
  for (std::size_t m = 0; m < micro.truth.programs.size(); ++m) {
    std::vector<double> row(micro.truth.phi.cols());
    for (Eigen::Index c = 0; c < micro.truth.phi.cols(); ++c) row[c] = micro.truth.phi(m, c);
    phi[micro.truth.programs[m]] = row;
  }
  truth["phi"] = phi;
  json lr = json::object();
  for (std::size_t m = 0; m < micro.truth.programs.size(); ++m)
    lr[micro.truth.programs[m]] = micro.truth.long_run[m];
  truth["long_run"] = lr;
  truth["endogenous_program"] = micro.truth.programs[micro.truth.endogenous_program];
  truth["endogeneity"] = micro.truth.endogeneity;
  write_json(config.world_dir / "truth.json", truth);
  std::cout << "world written to " << config.world_dir.string() << " (" << g.size()
            << " municipalities, " << micro.markets.regions() << " markets, "
            << micro.spells.size() << " spells)\n";
  return 0;
}

int cmd_delineate(const RunConfig& config) {
  geo::Geography g = load_world(config);
  const auto& del = config.section("delineate");
  int stage1 = get_or(del, "stage1_regions", 90);
  auto [regions, dendro1] = delineate::pre_aggregate(g, stage1);
  std::vector<std::string> warnings = g.warnings;
  SymMatrix sim = delineate::commuting_similarity(regions, g.flows, &warnings);

  delineate::StopRule stop = del.contains("stop_count")
                                 ? delineate::StopRule::count(del.at("stop_count").get<int>())
                                 : delineate::StopRule::threshold(
                                       get_or(del, "stop_threshold", 0.992));
  delineate::MarketClustering mc = delineate::cluster_markets(sim, stop, regions, g);

  std::filesystem::create_directories(config.out_dir);
  write_partition(config.out_dir / "partition.csv", mc.markets, g);
  write_partition(config.out_dir / "stage1_partition.csv", regions, g);
  write_dendrogram(config.out_dir / "dendrogram.csv", mc.dendrogram, regions.region_ids);

  delineate::SelfContainment sc = delineate::esc_stats(mc.markets, g.flows);
  json metrics;
  metrics["stage1_regions"] = regions.regions();
  metrics["markets"] = mc.markets.regions();
  if (stop.kind == delineate::StopRule::Kind::threshold)
    metrics["stop_threshold"] = stop.c;
  else
    metrics["stop_count"] = stop.k;
  metrics["cr"] = sc.cr;
  metrics["esc"] = {{"mean", sc.mean}, {"sd", sc.sd}, {"min", sc.min}, {"max", sc.max}};
  metrics["warnings"] = warnings;
  write_json(config.out_dir / "metrics.json", metrics);

  if (del.contains("definition_stops")) {
    std::vector<double> stops = del.at("definition_stops").get<std::vector<double>>();
    std::vector<int> counts = get_or(del, "definition_stage1", std::vector<int>{stage1});
    auto rows = delineate::definition_table(g, counts, stops);
    csv::Writer w(config.out_dir / "definition_table.csv",
                  {"stage1_regions", "cutoff", "markets", "mean_rlf", "cr", "esc_mean", "esc_sd",
                   "esc_min", "esc_max"});
    for (const auto& r : rows)
      w.row({std::to_string(r.stage1_regions), csv::format_double(r.cutoff),
             std::to_string(r.markets), csv::format_double(r.mean_rlf), csv::format_double(r.cr),
             csv::format_double(r.esc_mean), csv::format_double(r.esc_sd),
             csv::format_double(r.esc_min), csv::format_double(r.esc_max)});
  }
  std::cout << "delineated " << mc.markets.regions() << " markets from " << regions.regions()
            << " regions (CR " << sc.cr << ", mean ESC " << sc.mean << ")\n";
  return 0;
}

int cmd_overlap(const RunConfig& config) {
  geo::Geography g = load_world(config);
  delineate::RegionPartition markets =
      load_partition(config.out_dir / "partition.csv", g, "markets");
  std::vector<std::int64_t> rlf = g.rlf();
  overlap::OverlapTable table = overlap::compute_overlaps(markets, g.agencies, rlf);
  std::vector<overlap::InstrumentArea> areas =
      overlap::instrument_areas(markets, table, g.agencies);

  {
    csv::Writer w(config.out_dir / "overlaps.csv",
                  {"market", "agency", "segment", "overlap_rlf", "agency_rlf", "market_rlf",
                   "s_lea", "enclosed"});
    for (const auto& c : table.cells)
      w.row({markets.region_ids[c.market], g.agencies.agency_ids[c.agency],
             format_quarter(g.agencies.segments[c.segment].from), std::to_string(c.overlap_rlf),
             std::to_string(c.agency_rlf), std::to_string(c.market_rlf),
             csv::format_double(c.s_lea), c.enclosed ? "1" : "0"});
  }

  overlap::SelectionCriterion crit = overlap::SelectionCriterion::named(
      get_or<std::string>(config.section("overlap"), "criterion", "main"));
  overlap::Selection sel = overlap::select_markets(table, crit, areas, rlf);
  json j;
  j["criterion"] = sel.criterion;
  std::vector<std::string> kept;
  for (int m : sel.kept) kept.push_back(markets.region_ids[m]);
  j["kept"] = kept;
  json audits = json::array();
  for (const auto& a : sel.audits) {
    json row;
    row["market"] = markets.region_ids[a.market];
    row["kept"] = a.kept;
    row["s_tot"] = a.s_tot;
    row["partial_agencies"] = a.partial_agencies;
    if (!a.kept) {
      row["failed_segment"] =
          format_quarter(g.agencies.segments[a.failed_segment].from);
      row["reason"] = a.reason;
    }
    audits.push_back(row);
  }
  j["audits"] = audits;
  write_json(config.out_dir / "selection.json", j);
  std::cout << "kept " << sel.kept.size() << " of " << table.n_markets << " markets under '"
            << sel.criterion << "'\n";
  return 0;
}

int cmd_build_panel(const RunConfig& config) {
  geo::Geography g = load_world(config);
  delineate::RegionPartition markets =
      load_partition(config.out_dir / "partition.csv", g, "markets");
  json sel = read_json(config.out_dir / "selection.json");
  std::vector<int> kept;
  std::unordered_map<std::string, int> region_index;
  for (int r = 0; r < markets.regions(); ++r) region_index[markets.region_ids[r]] = r;
  for (const auto& id : sel.at("kept").get<std::vector<std::string>>())
    kept.push_back(region_index.at(id));

  overlap::OverlapTable table = overlap::compute_overlaps(markets, g.agencies, g.rlf());
  std::vector<overlap::InstrumentArea> areas =
      overlap::instrument_areas(markets, table, g.agencies);

  std::vector<panel::MicroSpell> spells = panel::load_micro(config.world_dir / "micro.csv", g);
  Quarter from = get_quarter(config.section("panel"), "from", g.agencies.window_from);
  Quarter to = get_quarter(config.section("panel"), "to", g.agencies.window_to);
  panel::QuarterPanel raw =
      panel::aggregate_panel(spells, markets, kept, areas, g.agencies, from, to);
  panel::CensorResult censored = panel::apply_censoring(raw);
  for (const auto& note : censored.excluded_markets)
    std::cout << "excluded market " << note << "\n";
  panel::write_panel(config.out_dir / "panel.csv", censored.panel);
  std::cout << "panel: " << censored.panel.markets() << " markets x "
            << censored.panel.quarters() << " quarters\n";
  return 0;
}

int cmd_estimate(const RunConfig& config) {
  panel::QuarterPanel p = panel::load_panel(config.out_dir / "panel.csv");
  const auto& e = config.section("estimate");
  std::vector<std::string> outcomes =
      get_or(e, "outcomes", std::vector<std::string>{"ue_rate"});
  Quarter est_from = get_quarter(e, "from", p.from + std::max(get_or(e, "q", 6) + 4, 5));
  Quarter est_to = get_quarter(e, "to", p.to);
  int irf_horizon = get_or(e, "irf_horizon", 12);

  json fits, firststages, bootstraps;
  csv::Writer effects(config.out_dir / "effects.csv",
                      {"outcome", "program", "horizon", "marginal", "cumulative"});
  for (const auto& outcome : outcomes) {
    estimate::ModelSpec spec = spec_from_config(config, outcome);
    panel::RegressionDataset data = panel::build_regression_dataset(
        p, spec.q, std::vector<std::string>{}, outcome, est_from, est_to);
    // default controls: every w_* column the panel carries
    estimate::FitResult fit = spec.lagged_dependent
                                  ? (spec.estimator == estimate::ModelSpec::Estimator::ols
                                         ? estimate::fit_ols(data, spec)
                                         : estimate::fit_tsls(data, spec))
                                  : estimate::fit_dl(data, spec);
    fits[outcome] = fit_to_json(fit);

    for (std::size_t m = 0; m < fit.programs.size(); ++m) {
      std::vector<double> phi(fit.phi.cols());
      for (Eigen::Index c = 0; c < fit.phi.cols(); ++c) phi[c] = fit.phi(m, c);
      auto irf = estimate::impulse_response(fit.has_theta ? fit.theta : 0.0, phi, irf_horizon);
      for (int h = 0; h <= irf_horizon; ++h)
        effects.row({outcome, fit.programs[m], std::to_string(h),
                     csv::format_double(irf.marginal[h]), csv::format_double(irf.cumulative[h])});
    }

    if (spec.estimator == estimate::ModelSpec::Estimator::tsls) {
      diagnose::FirstStageReport fs = diagnose::first_stage(data, spec);
      json fj;
      fj["rows"] = fs.n_rows;
      fj["df2"] = fs.df2;
      json entries = json::array();
      for (const auto& en : fs.entries)
        entries.push_back({{"endogenous", en.endogenous},
                           {"sw_f", en.sw_f},
                           {"sw_p", en.sw_p},
                           {"ap_f", en.ap_f},
                           {"ap_p", en.ap_p}});
      fj["entries"] = entries;
      firststages[outcome] = fj;
    }

    int B = get_or(e, "bootstrap_replications", 499);
    if (B > 0) {
      diagnose::BootstrapConfig bc;
      bc.replications = B;
      bc.seed = config.require_seed("the bootstrap");
      bc.threads = config.threads;
      bc.irf_horizon = irf_horizon;
      diagnose::BootstrapResult br = diagnose::cluster_bootstrap(data, spec, bc);
      json bj;
      bj["replications"] = br.requested;
      bj["completed"] = br.completed;
      bj["failed"] = br.failed;
      json stats = json::object();
      for (const auto& s : br.stats)
        stats[s.name] = {{"estimate", s.estimate},
                         {"se", s.se},
                         {"ci_lo", s.ci_lo},
                         {"ci_hi", s.ci_hi},
                         {"p", s.p}};
      bj["stats"] = stats;
      bootstraps[outcome] = bj;
    }
  }
  effects.close();
  write_json(config.out_dir / "fit.json", fits);
  if (!firststages.is_null()) write_json(config.out_dir / "firststage.json", firststages);
  if (!bootstraps.is_null()) write_json(config.out_dir / "bootstrap.json", bootstraps);
  std::cout << "estimated " << outcomes.size() << " outcome(s)\n";
  return 0;
}

int cmd_report(const RunConfig& config) {
  json fits = read_json(config.out_dir / "fit.json");
  std::filesystem::path bpath = config.out_dir / "bootstrap.json";
  json boots = std::filesystem::exists(bpath) ? read_json(bpath) : json::object();

  std::ofstream txt(config.out_dir / "summary.txt");
  if (!txt) throw ValidationError("cannot write summary.txt");
  csv::Writer curves(config.out_dir / "cumulative_effects.csv",
                     {"outcome", "program", "horizon", "cumulative", "se", "ci_lo", "ci_hi"});

  char line[256];
  for (auto& [outcome, fit] : fits.items()) {
    const json* b = boots.contains(outcome) ? &boots.at(outcome).at("stats") : nullptr;
    txt << "Outcome: " << outcome << "  (" << fit.at("estimator").get<std::string>() << ", "
        << fit.at("model").get<std::string>() << ", q=" << fit.at("q").get<int>() << ")\n";
    std::snprintf(line, sizeof(line), "  %-28s %10s %10s %8s\n", "", "effect", "se", "p-val");
    txt << line;
    auto emit = [&](const std::string& label, double est, const std::string& stat) {
      double se = 0.0, p = std::numeric_limits<double>::quiet_NaN();
      if (b && b->contains(stat)) {
        se = b->at(stat).at("se").get<double>();
        p = b->at(stat).at("p").get<double>();
      }
      std::snprintf(line, sizeof(line), "  %-28s %10.4f %10.4f %8.3f\n", label.c_str(), est, se,
                    p);
      txt << line;
    };
    if (fit.contains("theta"))
      emit("Lagged dependent variable", fit.at("theta").get<double>(), "theta");
    for (auto& [program, eff] : fit.at("effects").items()) {
      emit(program + " (st)", eff.at("short_run").get<double>(), program + "_short");
      emit(program + " (lt)", eff.at("long_run").get<double>(), program + "_long");
    }
    txt << "\n";

    if (b) {
      for (auto& [program, eff] : fit.at("effects").items()) {
        for (int h = 0;; ++h) {
          std::string stat = program + "_cum" + std::to_string(h);
          if (!b->contains(stat)) break;
          const json& s = b->at(stat);
          curves.row({outcome, program, std::to_string(h),
                      csv::format_double(s.at("estimate").get<double>()),
                      csv::format_double(s.at("se").get<double>()),
                      csv::format_double(s.at("ci_lo").get<double>()),
                      csv::format_double(s.at("ci_hi").get<double>())});
        }
      }
    }
  }
  std::cout << "report written to " << (config.out_dir / "summary.txt").string() << "\n";
  return 0;
}

int run_command(const std::string& command, const RunConfig& config) {
  try {
    if (command == "simulate") return cmd_simulate(config);
    if (command == "delineate") return cmd_delineate(config);
    if (command == "overlap") return cmd_overlap(config);
    if (command == "build-panel") return cmd_build_panel(config);
    if (command == "estimate") return cmd_estimate(config);
    if (command == "report") return cmd_report(config);
    std::cerr << "unknown command '" << command << "'\n";
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace zoneforge::cli
