#include "zoneforge/overlap.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace zoneforge::overlap {

OverlapTable compute_overlaps(const delineate::RegionPartition& markets,
                              const geo::AgencyTimeline& timeline,
                              const std::vector<std::int64_t>& rlf) {
  if (static_cast<int>(rlf.size()) != markets.n_units)
    throw ValidationError("rlf length does not match partition");
  OverlapTable t;
  t.n_markets = markets.regions();
  t.n_segments = timeline.segment_count();
  t.market_segments.resize(static_cast<std::size_t>(t.n_markets) * t.n_segments);

  std::vector<std::int64_t> market_rlf(t.n_markets, 0);
  for (int u = 0; u < markets.n_units; ++u) market_rlf[markets.region_of[u]] += rlf[u];

  const int n_agencies = static_cast<int>(timeline.agency_ids.size());
  for (int s = 0; s < t.n_segments; ++s) {
    const auto& seg = timeline.segments[s];
    if (static_cast<int>(seg.agency_of.size()) != markets.n_units)
      throw ValidationError("agency segment does not cover the partition's municipalities");
    std::vector<std::int64_t> agency_rlf(n_agencies, 0);
    for (int u = 0; u < markets.n_units; ++u) agency_rlf[seg.agency_of[u]] += rlf[u];

    // overlap RLF per (market, agency); ordered map keeps cell emission stable
    std::map<std::pair<int, int>, std::int64_t> inter;
    for (int u = 0; u < markets.n_units; ++u)
      inter[{markets.region_of[u], seg.agency_of[u]}] += rlf[u];

    for (const auto& [key, orlf] : inter) {
      auto [m, a] = key;
      if (orlf == 0) continue;
      OverlapCell cell;
      cell.market = m;
      cell.agency = a;
      cell.segment = s;
      cell.overlap_rlf = orlf;
      cell.agency_rlf = agency_rlf[a];
      cell.market_rlf = market_rlf[m];
      cell.s_lea = static_cast<double>(orlf) / static_cast<double>(agency_rlf[a]);
      cell.enclosed = (orlf == agency_rlf[a]);
      t.cells.push_back(cell);

      MarketSegment& ms = t.market_segments[static_cast<std::size_t>(m) * t.n_segments + s];
      ms.market_rlf = market_rlf[m];
      if (cell.enclosed) {
        ms.enclosed_rlf += agency_rlf[a];
      } else {
        ++ms.partial_agencies;
        ms.partial_agency_rlf += agency_rlf[a];
      }
    }
    for (int m = 0; m < t.n_markets; ++m) {
      MarketSegment& ms = t.market_segments[static_cast<std::size_t>(m) * t.n_segments + s];
      ms.market_rlf = market_rlf[m];
      if (ms.partial_agency_rlf > 0)
        ms.s_tot = static_cast<double>(ms.market_rlf) / static_cast<double>(ms.partial_agency_rlf);
    }
  }
  return t;
}

InstrumentArea instrument_area(int market, const delineate::RegionPartition& markets,
                               const OverlapTable& overlaps, const geo::AgencyTimeline& timeline) {
  InstrumentArea area;
  area.market = market;
  area.per_segment.resize(overlaps.n_segments);
  for (int s = 0; s < overlaps.n_segments; ++s) {
    std::vector<char> partial(timeline.agency_ids.size(), 0);
    for (const auto& cell : overlaps.cells)
      if (cell.market == market && cell.segment == s && !cell.enclosed)
        partial[cell.agency] = 1;
    const auto& seg = timeline.segments[s];
    auto& munis = area.per_segment[s];
    for (int u = 0; u < markets.n_units; ++u)
      if (partial[seg.agency_of[u]] && markets.region_of[u] != market) munis.push_back(u);
  }
  return area;
}

std::vector<InstrumentArea> instrument_areas(const delineate::RegionPartition& markets,
                                             const OverlapTable& overlaps,
                                             const geo::AgencyTimeline& timeline) {
  std::vector<InstrumentArea> out;
  out.reserve(overlaps.n_markets);
  for (int m = 0; m < overlaps.n_markets; ++m)
    out.push_back(instrument_area(m, markets, overlaps, timeline));
  return out;
}

SelectionCriterion SelectionCriterion::named(const std::string& name) {
  SelectionCriterion c;
  c.name = name;
  if (name == "main") {
  } else if (name == "exo1") {
    c.s_tot_below = 0.4;
  } else if (name == "exo2") {
    c.s_tot_below = 0.6;
  } else if (name == "exo3") {
    c.s_tot_below = std::numeric_limits<double>::quiet_NaN();
    c.large_overlap_share_cap = true;
  } else if (name == "rel1") {
    c.enclosed_cap = true;
    c.on_top_of_main = true;
  } else if (name == "rel2") {
    c.s_tot_at_least = 0.05;
    c.on_top_of_main = true;
  } else if (name == "rel3") {
    c.s_tot_at_least = 0.10;
    c.on_top_of_main = true;
  } else if (name == "rel4") {
    c.min_agencies_with_s_lea = 1;
    c.s_lea_above = 0.20;
    c.on_top_of_main = true;
  } else if (name == "rel5") {
    c.min_agencies_with_s_lea = 2;
    c.s_lea_above = 0.10;
    c.on_top_of_main = true;
  } else {
    throw ValidationError("unknown selection criterion '" + name + "'");
  }
  return c;
}

Selection select_markets(const OverlapTable& overlaps, const SelectionCriterion& criterion,
                         const std::vector<InstrumentArea>& areas,
                         const std::vector<std::int64_t>& rlf) {
  Selection sel;
  sel.criterion = criterion.name;
  const double main_cap = 0.5;

  for (int m = 0; m < overlaps.n_markets; ++m) {
    MarketAudit audit;
    audit.market = m;
    audit.kept = true;
    for (int s = 0; s < overlaps.n_segments && audit.kept; ++s) {
      const MarketSegment& ms = overlaps.at(m, s);
      audit.s_tot.push_back(ms.s_tot);
      audit.partial_agencies.push_back(ms.partial_agencies);
      auto fail = [&](const std::string& why) {
        audit.kept = false;
        audit.failed_segment = s;
        audit.reason = why;
      };
      if (criterion.require_two_agencies && ms.partial_agencies < 2) {
        fail("fewer than two partially overlapping agencies");
        continue;
      }
      if (criterion.on_top_of_main && !(ms.s_tot < main_cap)) {
        fail("s_tot >= 0.5 (main)");
        continue;
      }
      if (!std::isnan(criterion.s_tot_below) && !(ms.s_tot < criterion.s_tot_below)) {
        fail("s_tot >= " + std::to_string(criterion.s_tot_below));
        continue;
      }
      if (criterion.s_tot_at_least > 0.0 && !(ms.s_tot >= criterion.s_tot_at_least)) {
        fail("s_tot below " + std::to_string(criterion.s_tot_at_least));
        continue;
      }
      if (criterion.enclosed_cap &&
          !(2 * ms.enclosed_rlf <= ms.market_rlf)) {
        fail("enclosed agencies exceed half of market RLF");
        continue;
      }
      if (criterion.min_agencies_with_s_lea > 0) {
        int hits = 0;
        for (const auto& cell : overlaps.cells)
          if (cell.market == m && cell.segment == s && !cell.enclosed &&
              cell.s_lea > criterion.s_lea_above)
            ++hits;
        if (hits < criterion.min_agencies_with_s_lea) {
          fail("fewer than " + std::to_string(criterion.min_agencies_with_s_lea) +
               " agencies with s_lea > " + std::to_string(criterion.s_lea_above));
          continue;
        }
      }
      if (criterion.large_overlap_share_cap) {
        // agencies whose overlap takes at least half of their RLF must hold
        // less than half of the instrument-area labour force
        std::int64_t area_rlf = 0;
        for (int u : areas[m].per_segment[s]) area_rlf += rlf[u];
        std::int64_t violating_outside_rlf = 0;
        for (const auto& cell : overlaps.cells)
          if (cell.market == m && cell.segment == s && !cell.enclosed && cell.s_lea >= 0.5)
            violating_outside_rlf += cell.agency_rlf - cell.overlap_rlf;
        if (!(2 * violating_outside_rlf < area_rlf)) {
          fail("agencies with s_lea >= 0.5 hold at least half of the instrument area");
          continue;
        }
      }
    }
    if (audit.kept) sel.kept.push_back(m);
    sel.audits.push_back(std::move(audit));
  }
  return sel;
}

}  // namespace zoneforge::overlap
