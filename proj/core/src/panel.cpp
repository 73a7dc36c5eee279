#include "zoneforge/panel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "zoneforge/csv.hpp"

namespace zoneforge::panel {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* kStateNames[] = {"unsub_employed", "sub_employed",        "ui_unemployed",
                             "welfare_unemployed", "employed_on_benefits", "out"};
const char* kProgNames[] = {"none",      "training",    "short_measure", "wage_subsidy",
                            "other_ltu", "other_young", "other"};

const std::vector<std::string> kEmpAttr = {"female",    "age3039",  "age4049",   "age5064",
                                           "edu_high",  "skill_voc", "skill_acad", "ind_manuf",
                                           "ind_ctt",   "ind_serv", "native"};
const std::vector<std::string> kUeAttr = {"female",   "age3039",   "age4049",    "age5064",
                                          "edu_high", "skill_voc", "skill_acad", "ind_manuf",
                                          "ind_ctt",  "ind_serv"};
const std::vector<std::string> kSubgroups = {"female",  "male",     "under30",
                                             "over50",  "lowskill", "highskill"};

int attr_hits(const MicroSpell& s, bool employed, int idx) {
  // order must match kEmpAttr / kUeAttr above
  switch (idx) {
    case 0: return s.gender == Gender::female;
    case 1: return s.age == AgeBand::a30_39;
    case 2: return s.age == AgeBand::a40_49;
    case 3: return s.age == AgeBand::a50_64;
    case 4: return s.education == Education::highschool;
    case 5: return s.skill == Skill::vocational;
    case 6: return s.skill == Skill::academic;
    case 7: return s.industry == Industry::manufacturing;
    case 8: return s.industry == Industry::construction_trade_transport;
    case 9: return s.industry == Industry::services_communication;
    case 10: return employed && s.nationality == Nationality::native;
  }
  return 0;
}

int subgroup_hits(const MicroSpell& s, int idx) {
  switch (idx) {
    case 0: return s.gender == Gender::female;
    case 1: return s.gender == Gender::male;
    case 2: return s.age == AgeBand::a20_29;
    case 3: return s.age == AgeBand::a50_64;
    case 4: return s.skill == Skill::low;
    case 5: return s.skill == Skill::academic;
  }
  return 0;
}

struct Tally {
  std::int64_t lf = 0, ui = 0, unsub = 0, sub = 0, welfare = 0, eob = 0, out = 0;
  std::int64_t prog[6] = {};  // training, short_measure, wage_subsidy, other_ltu, other_young, other
  std::int64_t ia_ui = 0, ia_prog[3] = {};
  std::int64_t emp_attr[11] = {};
  std::int64_t ue_attr[10] = {};
  std::int64_t sub_ui[6] = {}, sub_unsub[6] = {}, sub_lf[6] = {};
  std::int64_t employed() const { return unsub + sub + eob; }
};

}  // namespace

void validate_spell(const MicroSpell& s) {
  if (s.program == Program::none) return;
  bool ok = s.program == Program::wage_subsidy ? s.state == LabourState::sub_employed
                                               : s.state == LabourState::ui_unemployed;
  if (!ok)
    throw ValidationError(std::string("program '") + to_string(s.program) +
                          "' is not valid for state '" + to_string(s.state) + "'");
}

const char* to_string(LabourState s) { return kStateNames[static_cast<int>(s)]; }
const char* to_string(Program p) { return kProgNames[static_cast<int>(p)]; }

LabourState state_from_string(const std::string& s) {
  for (int i = 0; i < 6; ++i)
    if (s == kStateNames[i]) return static_cast<LabourState>(i);
  throw ValidationError("unknown labour state '" + s + "'");
}

Program program_from_string(const std::string& s) {
  for (int i = 0; i < 7; ++i)
    if (s == kProgNames[i]) return static_cast<Program>(i);
  throw ValidationError("unknown program '" + s + "'");
}

const std::vector<std::string> kOutcomeColumns = {"ue_rate", "emp_rate", "welfare_rate",
                                                  "benefits_emp_rate"};
const std::vector<std::string> kProgramNames = {"training", "short_measure", "wage_subsidy"};

namespace {
std::vector<std::string> make_subgroup_columns() {
  std::vector<std::string> v;
  for (const char* base : {"ue_rate", "emp_rate"})
    for (const auto& g : kSubgroups) v.push_back(std::string(base) + "_" + g);
  return v;
}
std::vector<std::string> make_control_columns() {
  std::vector<std::string> v;
  for (const auto& a : kEmpAttr) v.push_back("w_emp_" + a);
  for (const auto& a : kUeAttr) v.push_back("w_ue_" + a);
  v.push_back("w_other_ltu");
  v.push_back("w_other_young");
  v.push_back("w_other");
  v.push_back("w_welfare");
  return v;
}
}  // namespace

const std::vector<std::string> kSubgroupColumns = make_subgroup_columns();
const std::vector<std::string> kControlColumns = make_control_columns();

const std::vector<double>& QuarterPanel::col(const std::string& name) const {
  auto it = column_index.find(name);
  if (it == column_index.end()) throw ValidationError("panel has no column '" + name + "'");
  return data[it->second];
}
std::vector<double>& QuarterPanel::col(const std::string& name) {
  auto it = column_index.find(name);
  if (it == column_index.end()) throw ValidationError("panel has no column '" + name + "'");
  return data[it->second];
}
const std::vector<std::int64_t>& QuarterPanel::count(const std::string& name) const {
  auto it = count_index.find(name);
  if (it == count_index.end()) throw ValidationError("panel has no count '" + name + "'");
  return counts[it->second];
}
std::vector<std::int64_t>& QuarterPanel::count(const std::string& name) {
  auto it = count_index.find(name);
  if (it == count_index.end()) throw ValidationError("panel has no count '" + name + "'");
  return counts[it->second];
}
void QuarterPanel::add_column(const std::string& name) {
  column_index.emplace(name, static_cast<int>(columns.size()));
  columns.push_back(name);
  data.emplace_back(static_cast<std::size_t>(markets()) * quarters(), kNaN);
}
void QuarterPanel::add_count(const std::string& name) {
  count_index.emplace(name, static_cast<int>(count_names.size()));
  count_names.push_back(name);
  counts.emplace_back(static_cast<std::size_t>(markets()) * quarters(), 0);
}

namespace {

std::vector<std::string> panel_flag_columns() {
  std::vector<std::string> v;
  for (const auto& p : kProgramNames) v.push_back("x_" + p + "_cens");
  for (const auto& p : kProgramNames) v.push_back("z_" + p + "_cens");
  for (const auto& a : kEmpAttr) v.push_back("w_emp_" + a + "_cens");
  for (const auto& a : kUeAttr) v.push_back("w_ue_" + a + "_cens");
  v.push_back("w_other_ltu_cens");
  v.push_back("w_other_young_cens");
  v.push_back("w_other_cens");
  for (const auto& s : kSubgroupColumns) v.push_back(s + "_cens");
  return v;
}

void init_panel_columns(QuarterPanel& p) {
  for (const auto& c : kOutcomeColumns) p.add_column(c);
  for (const auto& c : kSubgroupColumns) p.add_column(c);
  for (const auto& m : kProgramNames) p.add_column("x_" + m);
  for (const auto& m : kProgramNames) p.add_column("z_" + m);
  for (const auto& c : kControlColumns) p.add_column(c);
  for (const auto& c : panel_flag_columns()) p.add_column(c);
}

void init_panel_counts(QuarterPanel& p) {
  for (const char* c : {"rlf", "ui", "unsub", "sub", "welfare", "eob", "out"}) p.add_count(c);
  for (int i = 1; i <= 6; ++i) p.add_count(std::string("p_") + kProgNames[i]);
  p.add_count("ia_ui");
  for (const auto& m : kProgramNames) p.add_count("ia_" + m);
  for (const auto& a : kEmpAttr) p.add_count("cemp_" + a);
  for (const auto& a : kUeAttr) p.add_count("cue_" + a);
  for (const auto& g : kSubgroups) p.add_count("cui_" + g);
  for (const auto& g : kSubgroups) p.add_count("cunsub_" + g);
  for (const auto& g : kSubgroups) p.add_count("clf_" + g);
}

double ratio(std::int64_t num, std::int64_t den) {
  return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : kNaN;
}

// Rates derived from (possibly imputed) counts. Shared by aggregation and
// censoring so imputation feeds through identically.
void compute_rates(QuarterPanel& p) {
  const std::size_t cells = static_cast<std::size_t>(p.markets()) * p.quarters();
  for (std::size_t c = 0; c < cells; ++c) {
    std::int64_t lf = p.count("rlf")[c];
    std::int64_t ui = p.count("ui")[c];
    p.col("ue_rate")[c] = ratio(p.count("ui")[c], lf);
    p.col("emp_rate")[c] = ratio(p.count("unsub")[c], lf);
    p.col("welfare_rate")[c] = ratio(p.count("welfare")[c], lf);
    p.col("benefits_emp_rate")[c] = ratio(p.count("eob")[c], lf);
    for (std::size_t g = 0; g < kSubgroups.size(); ++g) {
      std::int64_t slf = p.count("clf_" + kSubgroups[g])[c];
      if (std::isnan(p.col("ue_rate_" + kSubgroups[g])[c]) &&
          p.col(("ue_rate_" + kSubgroups[g]) + "_cens")[c] == 1.0) {
        // censored subgroup stays missing
      } else {
        p.col("ue_rate_" + kSubgroups[g])[c] = ratio(p.count("cui_" + kSubgroups[g])[c], slf);
      }
      if (std::isnan(p.col("emp_rate_" + kSubgroups[g])[c]) &&
          p.col(("emp_rate_" + kSubgroups[g]) + "_cens")[c] == 1.0) {
      } else {
        p.col("emp_rate_" + kSubgroups[g])[c] = ratio(p.count("cunsub_" + kSubgroups[g])[c], slf);
      }
    }
    for (std::size_t m = 0; m < kProgramNames.size(); ++m) {
      p.col("x_" + kProgramNames[m])[c] = ratio(p.count("p_" + kProgramNames[m])[c], ui);
      p.col("z_" + kProgramNames[m])[c] =
          ratio(p.count("ia_" + kProgramNames[m])[c], p.count("ia_ui")[c]);
    }
    std::int64_t emp = p.count("unsub")[c] + p.count("sub")[c] + p.count("eob")[c];
    for (const auto& a : kEmpAttr) {
      if (p.col("w_emp_" + a + "_cens")[c] == 1.0) continue;  // zeroed by censoring
      p.col("w_emp_" + a)[c] = ratio(p.count("cemp_" + a)[c], emp);
    }
    for (const auto& a : kUeAttr) {
      if (p.col("w_ue_" + a + "_cens")[c] == 1.0) continue;
      p.col("w_ue_" + a)[c] = ratio(p.count("cue_" + a)[c], ui);
    }
    p.col("w_other_ltu")[c] = ratio(p.count("p_other_ltu")[c], ui);
    p.col("w_other_young")[c] = ratio(p.count("p_other_young")[c], ui);
    p.col("w_other")[c] = ratio(p.count("p_other")[c], ui);
    p.col("w_welfare")[c] = ratio(p.count("welfare")[c], lf);
  }
}

}  // namespace

QuarterPanel aggregate_panel(std::span<const MicroSpell> spells,
                             const delineate::RegionPartition& markets,
                             const std::vector<int>& kept_markets,
                             const std::vector<overlap::InstrumentArea>& areas,
                             const geo::AgencyTimeline& timeline, Quarter from, Quarter to) {
  if (to <= from) throw ValidationError("empty panel window");
  if (kept_markets.empty()) throw ValidationError("no markets kept for the panel");
  for (Quarter q = from; q < to; ++q)
    if (timeline.segment_index(q) < 0)
      throw ValidationError("panel window leaves the agency timeline at " + format_quarter(q));

  QuarterPanel p;
  p.from = from;
  p.to = to;
  for (int m : kept_markets) p.market_ids.push_back(markets.region_ids[m]);
  const int nm = p.markets();
  const int nq = p.quarters();

  std::vector<int> slot_of_market(markets.regions(), -1);
  for (int i = 0; i < nm; ++i) slot_of_market[kept_markets[i]] = i;

  // per (segment, municipality): slots of kept markets whose instrument area
  // contains the municipality
  std::vector<std::vector<std::vector<int>>> area_slots(timeline.segment_count());
  for (auto& seg : area_slots) seg.assign(markets.n_units, {});
  for (int i = 0; i < nm; ++i) {
    const auto& area = areas[kept_markets[i]];
    for (int s = 0; s < timeline.segment_count(); ++s)
      for (int u : area.per_segment[s]) area_slots[s][u].push_back(i);
  }

  std::vector<Tally> tallies(static_cast<std::size_t>(nm) * nq);
  std::vector<int> seg_of_quarter(nq);
  for (Quarter q = from; q < to; ++q) seg_of_quarter[q - from] = timeline.segment_index(q);

  for (const MicroSpell& s : spells) {
    if (s.quarter < from || s.quarter >= to) continue;
    if (s.municipality < 0 || s.municipality >= markets.n_units)
      throw ValidationError("spell references municipality outside the partition");
    const int qi = s.quarter - from;
    const int seg = seg_of_quarter[qi];
    // instrument-area tallies (a municipality can serve several markets)
    bool is_ui = s.state == LabourState::ui_unemployed;
    int prog3 = -1;
    if (s.program == Program::training) prog3 = 0;
    if (s.program == Program::short_measure) prog3 = 1;
    if (s.program == Program::wage_subsidy) prog3 = 2;
    for (int slot : area_slots[seg][s.municipality]) {
      Tally& t = tallies[static_cast<std::size_t>(slot) * nq + qi];
      if (is_ui) ++t.ia_ui;
      if (prog3 >= 0) ++t.ia_prog[prog3];
    }
    int slot = slot_of_market[markets.region_of[s.municipality]];
    if (slot < 0) continue;
    Tally& t = tallies[static_cast<std::size_t>(slot) * nq + qi];
    bool employed = false;
    switch (s.state) {
      case LabourState::unsub_employed: ++t.unsub; employed = true; break;
      case LabourState::sub_employed: ++t.sub; employed = true; break;
      case LabourState::ui_unemployed: ++t.ui; break;
      case LabourState::welfare_unemployed: ++t.welfare; break;
      case LabourState::employed_on_benefits: ++t.eob; employed = true; break;
      case LabourState::out: ++t.out; break;
    }
    if (s.state != LabourState::out) ++t.lf;
    if (s.program != Program::none) ++t.prog[static_cast<int>(s.program) - 1];
    if (employed)
      for (int a = 0; a < 11; ++a) t.emp_attr[a] += attr_hits(s, true, a);
    if (is_ui)
      for (int a = 0; a < 10; ++a) t.ue_attr[a] += attr_hits(s, false, a);
    for (int g = 0; g < 6; ++g) {
      int hit = subgroup_hits(s, g);
      if (!hit) continue;
      if (s.state != LabourState::out) ++t.sub_lf[g];
      if (is_ui) ++t.sub_ui[g];
      if (s.state == LabourState::unsub_employed) ++t.sub_unsub[g];
    }
  }

  init_panel_columns(p);
  init_panel_counts(p);
  for (auto& flag : panel_flag_columns()) std::fill(p.col(flag).begin(), p.col(flag).end(), 0.0);

  for (int i = 0; i < nm; ++i)
    for (int qi = 0; qi < nq; ++qi) {
      const Tally& t = tallies[static_cast<std::size_t>(i) * nq + qi];
      if (t.lf == 0)
        throw ValidationError("market " + p.market_ids[i] + " has zero labour force in " +
                              format_quarter(from + qi));
      std::size_t c = p.cell(i, from + qi);
      p.count("rlf")[c] = t.lf;
      p.count("ui")[c] = t.ui;
      p.count("unsub")[c] = t.unsub;
      p.count("sub")[c] = t.sub;
      p.count("welfare")[c] = t.welfare;
      p.count("eob")[c] = t.eob;
      p.count("out")[c] = t.out;
      for (int k = 0; k < 6; ++k) p.count(std::string("p_") + kProgNames[k + 1])[c] = t.prog[k];
      p.count("ia_ui")[c] = t.ia_ui;
      for (std::size_t m = 0; m < 3; ++m) p.count("ia_" + kProgramNames[m])[c] = t.ia_prog[m];
      for (std::size_t a = 0; a < kEmpAttr.size(); ++a)
        p.count("cemp_" + kEmpAttr[a])[c] = t.emp_attr[a];
      for (std::size_t a = 0; a < kUeAttr.size(); ++a)
        p.count("cue_" + kUeAttr[a])[c] = t.ue_attr[a];
      for (std::size_t g = 0; g < kSubgroups.size(); ++g) {
        p.count("cui_" + kSubgroups[g])[c] = t.sub_ui[g];
        p.count("cunsub_" + kSubgroups[g])[c] = t.sub_unsub[g];
        p.count("clf_" + kSubgroups[g])[c] = t.sub_lf[g];
      }
    }
  compute_rates(p);
  return p;
}

CensorResult apply_censoring(const QuarterPanel& panel, const CensorPolicy& policy) {
  if (panel.counts.empty())
    throw ValidationError("apply_censoring needs a panel with raw counts");
  const auto lo = std::int64_t{1};
  const auto hi = policy.min_publishable;  // counts in [1, hi) are censored

  // pass 1: find markets with censored outcome counts
  std::vector<int> keep;
  CensorResult out;
  for (int i = 0; i < panel.markets(); ++i) {
    std::string why;
    for (Quarter q = panel.from; q < panel.to && why.empty(); ++q) {
      std::size_t c = panel.cell(i, q);
      for (const char* name : {"rlf", "ui", "unsub", "welfare", "eob"}) {
        std::int64_t v = panel.count(name)[c];
        if (v >= lo && v < hi) {
          why = std::string("outcome count '") + name + "' censored in " + format_quarter(q);
          break;
        }
      }
    }
    if (why.empty())
      keep.push_back(i);
    else
      out.excluded_markets.push_back(panel.market_ids[i] + ": " + why);
  }
  if (keep.empty()) throw ValidationError("censoring excluded every market");

  // pass 2: copy kept slices
  QuarterPanel& cp = out.panel;
  cp.from = panel.from;
  cp.to = panel.to;
  cp.censored = true;
  for (int i : keep) cp.market_ids.push_back(panel.market_ids[i]);
  const int nq = panel.quarters();
  for (const auto& name : panel.columns) {
    cp.add_column(name);
    auto& dst = cp.data.back();
    const auto& src = panel.col(name);
    for (std::size_t s = 0; s < keep.size(); ++s)
      std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(keep[s]) * nq, nq,
                  dst.begin() + static_cast<std::ptrdiff_t>(s) * nq);
  }
  for (const auto& name : panel.count_names) {
    cp.add_count(name);
    auto& dst = cp.counts.back();
    const auto& src = panel.count(name);
    for (std::size_t s = 0; s < keep.size(); ++s)
      std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(keep[s]) * nq, nq,
                  dst.begin() + static_cast<std::ptrdiff_t>(s) * nq);
  }

  // pass 3: impute program counts, zero censored composition shares, flag
  const std::size_t cells = static_cast<std::size_t>(cp.markets()) * nq;
  auto censored_count = [&](std::int64_t v) { return v >= lo && v < hi; };
  for (std::size_t c = 0; c < cells; ++c) {
    for (std::size_t m = 0; m < kProgramNames.size(); ++m) {
      auto& pc = cp.count("p_" + kProgramNames[m])[c];
      if (censored_count(pc)) {
        pc = policy.imputed_value;
        cp.col("x_" + kProgramNames[m] + "_cens")[c] = 1.0;
      }
      auto& ic = cp.count("ia_" + kProgramNames[m])[c];
      if (censored_count(ic)) {
        ic = policy.imputed_value;
        cp.col("z_" + kProgramNames[m] + "_cens")[c] = 1.0;
      }
    }
    for (const char* other : {"p_other_ltu", "p_other_young", "p_other"}) {
      auto& oc = cp.count(other)[c];
      if (censored_count(oc)) {
        oc = policy.imputed_value;
        cp.col(std::string("w_") + (other + 2) + "_cens")[c] = 1.0;
      }
    }
    for (const auto& a : kEmpAttr)
      if (censored_count(cp.count("cemp_" + a)[c])) cp.col("w_emp_" + a + "_cens")[c] = 1.0;
    for (const auto& a : kUeAttr)
      if (censored_count(cp.count("cue_" + a)[c])) cp.col("w_ue_" + a + "_cens")[c] = 1.0;
    for (const auto& g : kSubgroups) {
      if (censored_count(cp.count("cui_" + g)[c])) {
        cp.col("ue_rate_" + g + "_cens")[c] = 1.0;
        cp.col("ue_rate_" + g)[c] = kNaN;
      }
      if (censored_count(cp.count("cunsub_" + g)[c])) {
        cp.col("emp_rate_" + g + "_cens")[c] = 1.0;
        cp.col("emp_rate_" + g)[c] = kNaN;
      }
    }
  }
  compute_rates(cp);
  // censored composition shares are reported as 0, not missing
  for (std::size_t c = 0; c < cells; ++c) {
    for (const auto& a : kEmpAttr)
      if (cp.col("w_emp_" + a + "_cens")[c] == 1.0) cp.col("w_emp_" + a)[c] = 0.0;
    for (const auto& a : kUeAttr)
      if (cp.col("w_ue_" + a + "_cens")[c] == 1.0) cp.col("w_ue_" + a)[c] = 0.0;
  }
  return out;
}

const std::vector<double>& RegressionDataset::col(const std::string& name) const {
  auto it = column_index.find(name);
  if (it == column_index.end()) throw ValidationError("dataset has no column '" + name + "'");
  return data[it->second];
}

std::vector<std::string> RegressionDataset::endogenous_columns() const {
  std::vector<std::string> v;
  for (const auto& m : programs)
    for (int j = 0; j <= q; ++j) v.push_back("dx_" + m + "_l" + std::to_string(j));
  return v;
}

std::vector<std::string> RegressionDataset::instrument_columns() const {
  std::vector<std::string> v;
  for (const auto& m : programs)
    for (int j = 0; j <= q; ++j) v.push_back("dz_" + m + "_l" + std::to_string(j));
  return v;
}

std::vector<std::string> RegressionDataset::control_columns() const {
  std::vector<std::string> v;
  for (const auto& c : columns)
    if (c.rfind("w_", 0) == 0) v.push_back(c);
  return v;
}

std::size_t RegressionDataset::usable_rows() const {
  std::size_t n = 0;
  for (auto u : usable) n += u;
  return n;
}

RegressionDataset build_regression_dataset(const QuarterPanel& panel, int q,
                                           const std::vector<std::string>& controls_arg,
                                           const std::string& outcome, Quarter est_from,
                                           Quarter est_to) {
  std::vector<std::string> controls = controls_arg;
  if (controls.empty())
    for (const auto& c : kControlColumns)
      if (panel.has_column(c)) controls.push_back(c);
  if (q < 0) throw ValidationError("lag order must be non-negative");
  if (est_to <= est_from) throw ValidationError("empty estimation window");
  if (est_from < panel.from || est_to > panel.to)
    throw ValidationError("estimation window outside the panel window");
  const int depth = std::max(q + 4, 5);
  if (est_from - depth < panel.from)
    throw ValidationError("insufficient burn-in for lag order " + std::to_string(q) +
                          "; earliest usable quarter is " + format_quarter(panel.from + depth));
  if (!panel.has_column(outcome)) throw ValidationError("unknown outcome column '" + outcome + "'");

  RegressionDataset d;
  d.market_ids = panel.market_ids;
  d.programs = kProgramNames;
  d.outcome = outcome;
  d.q = q;
  d.est_from = est_from;
  d.est_to = est_to;

  const int nm = panel.markets();
  const int nq = est_to - est_from;
  d.row_market.resize(static_cast<std::size_t>(nm) * nq);
  d.row_quarter.resize(d.row_market.size());
  d.usable.assign(d.row_market.size(), 1);

  auto add = [&](const std::string& name) {
    d.column_index.emplace(name, static_cast<int>(d.columns.size()));
    d.columns.push_back(name);
    d.data.emplace_back(d.row_market.size(), kNaN);
  };
  add("dy");
  add("dy_lag");
  for (const auto& c : d.endogenous_columns()) add(c);
  for (const auto& c : d.instrument_columns()) add(c);
  for (const auto& c : controls) add(c);

  const auto& y = panel.col(outcome);
  auto d4 = [&](const std::vector<double>& v, int m, Quarter t) {
    return v[panel.cell(m, t)] - v[panel.cell(m, t - 4)];
  };

  for (int m = 0; m < nm; ++m)
    for (Quarter t = est_from; t < est_to; ++t) {
      std::size_t row = static_cast<std::size_t>(m) * nq + (t - est_from);
      d.row_market[row] = m;
      d.row_quarter[row] = t;
      double dy = d4(y, m, t);
      double dyl = d4(y, m, t - 1);
      d.data[d.column_index["dy"]][row] = dy;
      d.data[d.column_index["dy_lag"]][row] = dyl;
      bool ok = std::isfinite(dy) && std::isfinite(dyl);
      for (std::size_t p = 0; p < d.programs.size(); ++p) {
        const auto& x = panel.col("x_" + d.programs[p]);
        const auto& z = panel.col("z_" + d.programs[p]);
        for (int j = 0; j <= q; ++j) {
          double dx = d4(x, m, t - j);
          double dz = d4(z, m, t - j);
          d.data[d.column_index["dx_" + d.programs[p] + "_l" + std::to_string(j)]][row] = dx;
          d.data[d.column_index["dz_" + d.programs[p] + "_l" + std::to_string(j)]][row] = dz;
          ok = ok && std::isfinite(dx) && std::isfinite(dz);
        }
      }
      for (const auto& c : controls) {
        double w = panel.col(c)[panel.cell(m, t - q)];
        d.data[d.column_index[c]][row] = w;
        ok = ok && std::isfinite(w);
      }
      d.usable[row] = ok ? 1 : 0;
    }
  return d;
}

std::vector<MicroSpell> load_micro(const std::filesystem::path& file, const geo::Geography& g) {
  csv::Reader r(file);
  int c_mun = r.require_column("municipality_id");
  int c_q = r.require_column("quarter");
  int c_state = r.require_column("state");
  int c_prog = r.require_column("program");
  int c_gender = r.require_column("gender");
  int c_age = r.require_column("age_band");
  int c_edu = r.require_column("education");
  int c_skill = r.require_column("skill");
  int c_ind = r.require_column("industry");
  int c_nat = r.require_column("nationality");
  std::vector<MicroSpell> spells;
  r.for_each_row([&](const std::vector<std::string>& f, long line) {
    MicroSpell s;
    s.municipality = g.require_index(f[c_mun]);
    s.quarter = parse_quarter(f[c_q]);
    s.state = state_from_string(f[c_state]);
    s.program = program_from_string(f[c_prog]);
    auto pick = [&](const std::string& v, std::initializer_list<const char*> names) {
      int i = 0;
      for (const char* n : names) {
        if (v == n) return i;
        ++i;
      }
      throw ValidationError(file.string() + ":" + std::to_string(line) + ": unknown value '" + v +
                            "'");
    };
    s.gender = static_cast<Gender>(pick(f[c_gender], {"female", "male"}));
    s.age = static_cast<AgeBand>(pick(f[c_age], {"20-29", "30-39", "40-49", "50-64"}));
    s.education = static_cast<Education>(pick(f[c_edu], {"basic", "highschool"}));
    s.skill = static_cast<Skill>(pick(f[c_skill], {"low", "vocational", "academic"}));
    s.industry = static_cast<Industry>(pick(
        f[c_ind], {"manufacturing", "construction_trade_transport", "services_communication",
                   "public_education"}));
    s.nationality = static_cast<Nationality>(pick(f[c_nat], {"native", "foreign"}));
    try {
      validate_spell(s);
    } catch (const ValidationError& e) {
      throw ValidationError(file.string() + ":" + std::to_string(line) + ": " + e.what());
    }
    spells.push_back(s);
  });
  return spells;
}

void write_micro(const std::filesystem::path& file, std::span<const MicroSpell> spells,
                 const geo::Geography& g) {
  static const char* kAge[] = {"20-29", "30-39", "40-49", "50-64"};
  static const char* kEdu[] = {"basic", "highschool"};
  static const char* kSkill[] = {"low", "vocational", "academic"};
  static const char* kInd[] = {"manufacturing", "construction_trade_transport",
                               "services_communication", "public_education"};
  csv::Writer w(file, {"person_id", "municipality_id", "quarter", "state", "program", "gender",
                       "age_band", "education", "skill", "industry", "nationality"});
  long pid = 0;
  for (const auto& s : spells) {
    w.row({"p" + std::to_string(++pid), g.municipalities[s.municipality].id,
           format_quarter(s.quarter), to_string(s.state), to_string(s.program),
           s.gender == Gender::female ? "female" : "male", kAge[static_cast<int>(s.age)],
           kEdu[static_cast<int>(s.education)], kSkill[static_cast<int>(s.skill)],
           kInd[static_cast<int>(s.industry)],
           s.nationality == Nationality::native ? "native" : "foreign"});
  }
}

void write_panel(const std::filesystem::path& file, const QuarterPanel& panel) {
  std::vector<std::string> header = {"market", "quarter"};
  for (const auto& c : panel.columns) header.push_back(c);
  csv::Writer w(file, header);
  std::vector<std::string> row(header.size());
  for (int m = 0; m < panel.markets(); ++m)
    for (Quarter q = panel.from; q < panel.to; ++q) {
      row[0] = panel.market_ids[m];
      row[1] = format_quarter(q);
      std::size_t c = panel.cell(m, q);
      for (std::size_t k = 0; k < panel.columns.size(); ++k) {
        double v = panel.data[k][c];
        row[2 + k] = std::isnan(v) ? std::string() : csv::format_double(v);
      }
      w.row(row);
    }
}

QuarterPanel load_panel(const std::filesystem::path& file) {
  csv::Reader r(file);
  int c_m = r.require_column("market");
  int c_q = r.require_column("quarter");
  struct Rec {
    std::string market;
    Quarter q;
    std::vector<double> values;
  };
  std::vector<Rec> recs;
  std::vector<std::string> value_cols;
  for (std::size_t k = 0; k < r.header().size(); ++k)
    if (static_cast<int>(k) != c_m && static_cast<int>(k) != c_q)
      value_cols.push_back(r.header()[k]);
  r.for_each_row([&](const std::vector<std::string>& f, long line) {
    Rec rec;
    rec.market = f[c_m];
    rec.q = parse_quarter(f[c_q]);
    for (std::size_t k = 0; k < f.size(); ++k) {
      if (static_cast<int>(k) == c_m || static_cast<int>(k) == c_q) continue;
      rec.values.push_back(f[k].empty() ? kNaN : csv::parse_double(f[k], file, line));
    }
    recs.push_back(std::move(rec));
  });
  if (recs.empty()) throw ValidationError(file.string() + ": no rows");

  QuarterPanel p;
  p.censored = true;
  p.from = recs.front().q;
  p.to = recs.front().q + 1;
  for (const auto& rec : recs) {
    p.from = std::min(p.from, rec.q);
    p.to = std::max(p.to, rec.q + 1);
  }
  for (const auto& rec : recs)
    if (p.market_ids.empty() || p.market_ids.back() != rec.market)
      if (std::find(p.market_ids.begin(), p.market_ids.end(), rec.market) == p.market_ids.end())
        p.market_ids.push_back(rec.market);
  for (const auto& c : value_cols) p.add_column(c);
  std::unordered_map<std::string, int> midx;
  for (int i = 0; i < p.markets(); ++i) midx[p.market_ids[i]] = i;
  for (const auto& rec : recs) {
    std::size_t c = p.cell(midx[rec.market], rec.q);
    for (std::size_t k = 0; k < value_cols.size(); ++k) p.data[k][c] = rec.values[k];
  }
  return p;
}

}  // namespace zoneforge::panel
