#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zoneforge/delineate.hpp"
#include "zoneforge/geography.hpp"

namespace zoneforge::overlap {

/// One (market, agency, time segment) intersection with positive overlap.
/// RLF is the municipality-level resident labour force summed over the
/// overlap. s_lea = overlap_rlf / agency_rlf; an agency is enclosed when the
/// whole agency lies inside the market (s_lea = 1).
struct OverlapCell {
  int market = 0;
  int agency = 0;
  int segment = 0;
  std::int64_t overlap_rlf = 0;
  std::int64_t agency_rlf = 0;
  std::int64_t market_rlf = 0;
  double s_lea = 0.0;
  bool enclosed = false;
};

/// Per (market, segment) aggregate. s_tot = market_rlf divided by the summed
/// RLF of the partially overlapping agencies (enclosed and disjoint agencies
/// are excluded from the denominator); 0 when no partial overlap exists.
struct MarketSegment {
  std::int64_t market_rlf = 0;
  double s_tot = 0.0;
  int partial_agencies = 0;
  std::int64_t partial_agency_rlf = 0;
  std::int64_t enclosed_rlf = 0;  // summed RLF of enclosed agencies
};

struct OverlapTable {
  int n_markets = 0;
  int n_segments = 0;
  std::vector<OverlapCell> cells;            // market-major, then agency
  std::vector<MarketSegment> market_segments;  // index = market * n_segments + segment

  const MarketSegment& at(int market, int segment) const {
    return market_segments[static_cast<std::size_t>(market) * n_segments + segment];
  }
};

OverlapTable compute_overlaps(const delineate::RegionPartition& markets,
                              const geo::AgencyTimeline& timeline,
                              const std::vector<std::int64_t>& rlf);

/// Municipalities outside the market that belong to agencies partially
/// overlapping it, per time segment. Enclosed and disjoint agencies
/// contribute nothing.
struct InstrumentArea {
  int market = 0;
  std::vector<std::vector<int>> per_segment;  // sorted municipality indices
};

InstrumentArea instrument_area(int market, const delineate::RegionPartition& markets,
                               const OverlapTable& overlaps, const geo::AgencyTimeline& timeline);

std::vector<InstrumentArea> instrument_areas(const delineate::RegionPartition& markets,
                                             const OverlapTable& overlaps,
                                             const geo::AgencyTimeline& timeline);

/// Named sample-selection criteria. `main` keeps markets with at least two
/// partially overlapping agencies and s_tot < 0.5 in every segment; the
/// alternatives tighten or relax that rule. rel1..rel5 apply on top of main.
struct SelectionCriterion {
  std::string name = "main";

  bool require_two_agencies = true;
  double s_tot_below = 0.5;    // strict upper bound; NaN disables
  double s_tot_at_least = 0.0; // weak lower bound (rel2/rel3)
  bool enclosed_cap = false;   // rel1: enclosed agency RLF <= half of market RLF
  bool large_overlap_share_cap = false;  // exo3
  int min_agencies_with_s_lea = 0;       // rel4/rel5: count of agencies above...
  double s_lea_above = 0.0;              // ...this strict threshold
  bool on_top_of_main = false;

  static SelectionCriterion named(const std::string& name);
};

struct MarketAudit {
  int market = 0;
  bool kept = false;
  int failed_segment = -1;      // first segment violating the criterion
  std::string reason;           // empty when kept
  std::vector<double> s_tot;    // per segment
  std::vector<int> partial_agencies;
};

struct Selection {
  std::string criterion;
  std::vector<int> kept;        // market indices, ascending
  std::vector<MarketAudit> audits;
};

/// A market is kept only if the criterion holds in every time segment.
Selection select_markets(const OverlapTable& overlaps, const SelectionCriterion& criterion,
                         const std::vector<InstrumentArea>& areas,
                         const std::vector<std::int64_t>& rlf);

}  // namespace zoneforge::overlap
