#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "zoneforge/delineate.hpp"
#include "zoneforge/geography.hpp"
#include "zoneforge/overlap.hpp"

namespace zoneforge::panel {

enum class LabourState : std::uint8_t {
  unsub_employed,
  sub_employed,
  ui_unemployed,
  welfare_unemployed,
  employed_on_benefits,
  out
};

enum class Program : std::uint8_t {
  none,
  training,
  short_measure,
  wage_subsidy,
  other_ltu,
  other_young,
  other
};

enum class Gender : std::uint8_t { female, male };
enum class AgeBand : std::uint8_t { a20_29, a30_39, a40_49, a50_64 };
enum class Education : std::uint8_t { basic, highschool };
enum class Skill : std::uint8_t { low, vocational, academic };
enum class Industry : std::uint8_t { manufacturing, construction_trade_transport,
                                     services_communication, public_education };
enum class Nationality : std::uint8_t { native, foreign };

/// One person-quarter record. Program participation is only valid for UI
/// recipients (training-type programs) and the subsidised employed (wage
/// subsidies).
struct MicroSpell {
  std::int32_t municipality = 0;
  Quarter quarter = 0;
  LabourState state = LabourState::out;
  Program program = Program::none;
  Gender gender = Gender::female;
  AgeBand age = AgeBand::a20_29;
  Education education = Education::basic;
  Skill skill = Skill::low;
  Industry industry = Industry::manufacturing;
  Nationality nationality = Nationality::native;
};

void validate_spell(const MicroSpell& s);  // throws ValidationError

const char* to_string(LabourState);
const char* to_string(Program);
LabourState state_from_string(const std::string&);
Program program_from_string(const std::string&);

// Canonical column groups. The panel is column-major over a dense
// (market, quarter) grid; missing values are NaN.
extern const std::vector<std::string> kOutcomeColumns;   // main outcome rates
extern const std::vector<std::string> kSubgroupColumns;  // subgroup outcome rates
extern const std::vector<std::string> kProgramNames;     // training, short_measure, wage_subsidy
extern const std::vector<std::string> kControlColumns;   // w_* (levels in [0,1])

struct QuarterPanel {
  std::vector<std::string> market_ids;
  Quarter from = 0, to = 0;  // [from, to)
  bool censored = false;

  std::vector<std::string> columns;  // emission order
  std::unordered_map<std::string, int> column_index;
  std::vector<std::vector<double>> data;  // per column, size markets * quarters

  // raw counts (internal; dropped on CSV round trips)
  std::vector<std::string> count_names;
  std::unordered_map<std::string, int> count_index;
  std::vector<std::vector<std::int64_t>> counts;

  int markets() const { return static_cast<int>(market_ids.size()); }
  int quarters() const { return to - from; }
  std::size_t cell(int market, Quarter q) const {
    return static_cast<std::size_t>(market) * quarters() + (q - from);
  }
  bool has_column(const std::string& name) const { return column_index.count(name) > 0; }
  const std::vector<double>& col(const std::string& name) const;
  std::vector<double>& col(const std::string& name);
  const std::vector<std::int64_t>& count(const std::string& name) const;
  std::vector<std::int64_t>& count(const std::string& name);
  void add_column(const std::string& name);
  void add_count(const std::string& name);
};

/// Aggregates spells into the market x quarter panel with raw counts and
/// uncensored rates. Outcome denominators are the spell-based resident
/// labour force (non-'out' residents); accommodation rates divide program
/// participants by the market's UI stock, instrument rates do the same over
/// the market's instrument area. Throws on a market-quarter with zero labour
/// force inside the window.
QuarterPanel aggregate_panel(std::span<const MicroSpell> spells,
                             const delineate::RegionPartition& markets,
                             const std::vector<int>& kept_markets,
                             const std::vector<overlap::InstrumentArea>& areas,
                             const geo::AgencyTimeline& timeline, Quarter from, Quarter to);

struct CensorPolicy {
  std::int64_t min_publishable = 3;  // counts 1..min_publishable-1 are censored
  std::int64_t imputed_value = 1;    // program counts are imputed with this
};

struct CensorResult {
  QuarterPanel panel;                         // censored, markets with censored outcomes dropped
  std::vector<std::string> excluded_markets;  // market id + reason
};

/// Provider-style censoring: program participation counts in {1,2} are
/// imputed with 1 (flag column "<x>_cens"), censored workforce-composition
/// shares are set to 0 and flagged, zero counts are untouched. A market
/// whose main outcome counts are censored anywhere in the window is dropped.
/// Idempotent.
CensorResult apply_censoring(const QuarterPanel& panel, const CensorPolicy& policy = {});

struct RegressionDataset {
  std::vector<std::string> market_ids;
  std::vector<std::string> programs;
  std::string outcome;
  int q = 0;
  Quarter est_from = 0, est_to = 0;

  // dense grid over kept markets x estimation quarters, row-major by market
  std::vector<int> row_market;
  std::vector<Quarter> row_quarter;
  std::vector<std::uint8_t> usable;

  std::vector<std::string> columns;  // dy, dy_lag, dx_*, dz_*, w_*
  std::unordered_map<std::string, int> column_index;
  std::vector<std::vector<double>> data;

  std::size_t rows() const { return row_market.size(); }
  const std::vector<double>& col(const std::string& name) const;
  std::vector<std::string> endogenous_columns() const;   // dx_<m>_l<j>, program-major
  std::vector<std::string> instrument_columns() const;   // dz_<m>_l<j>
  std::vector<std::string> control_columns() const;      // w_* in stored order
  std::size_t usable_rows() const;
};

/// Four-quarter differences, lags 0..q of the accommodation and instrument
/// rates, controls at t-q, and the usable-row mask. Throws when the panel's
/// burn-in cannot supply the deepest referenced lag and names the earliest
/// usable quarter.
RegressionDataset build_regression_dataset(const QuarterPanel& panel, int q,
                                           const std::vector<std::string>& controls,
                                           const std::string& outcome, Quarter est_from,
                                           Quarter est_to);

// CSV interfaces
std::vector<MicroSpell> load_micro(const std::filesystem::path& file, const geo::Geography& g);
void write_micro(const std::filesystem::path& file, std::span<const MicroSpell> spells,
                 const geo::Geography& g);
void write_panel(const std::filesystem::path& file, const QuarterPanel& panel);
QuarterPanel load_panel(const std::filesystem::path& file);

}  // namespace zoneforge::panel
