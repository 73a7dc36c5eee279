#pragma once

// Small hand-built worlds for unit tests.

#include <string>
#include <vector>

#include "zoneforge/delineate.hpp"
#include "zoneforge/geography.hpp"

namespace testsupport {

struct ToyWorld {
  int n = 0;
  std::vector<std::int64_t> rlf;                        // per municipality
  std::vector<std::tuple<int, int, std::int64_t>> flows;  // defaults to diagonal rlf
  std::vector<double> dist_triangle;                     // i<j order; defaults to |i-j|
  std::vector<std::pair<int, int>> adjacency;            // defaults to a chain
  std::vector<std::vector<int>> agency_munis;            // one entry per agency
  zoneforge::Quarter from = zoneforge::make_quarter(2005, 1);
  zoneforge::Quarter to = zoneforge::make_quarter(2010, 1);
};

inline zoneforge::geo::Geography make_geography(ToyWorld w) {
  using namespace zoneforge;
  geo::Geography g;
  for (int i = 0; i < w.n; ++i) {
    geo::Municipality m;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "m%03d", i);
    m.id = buf;
    g.index_of.emplace(m.id, i);
    g.municipalities.push_back(std::move(m));
  }
  if (w.flows.empty())
    for (int i = 0; i < w.n; ++i)
      w.flows.emplace_back(i, i, w.rlf.empty() ? 100 : w.rlf[i]);
  g.flows = geo::CommutingMatrix::from_triplets(w.n, w.flows);
  auto [rlf, llf] = geo::derive_labour_forces(g.flows);
  for (int i = 0; i < w.n; ++i) {
    g.municipalities[i].rlf = rlf[i];
    g.municipalities[i].llf = llf[i];
  }
  if (w.dist_triangle.empty())
    for (int i = 0; i < w.n; ++i)
      for (int j = i + 1; j < w.n; ++j) w.dist_triangle.push_back(static_cast<double>(j - i));
  // from_dense expects the (i<j) triangle in the library's row-major order
  {
    std::vector<double> tri(static_cast<std::size_t>(w.n) * (w.n - 1) / 2);
    std::size_t k = 0;
    for (int i = 0; i < w.n; ++i)
      for (int j = i + 1; j < w.n; ++j) {
        std::size_t a = static_cast<std::size_t>(j);
        tri[a * (a - 1) / 2 + i] = w.dist_triangle[k++];
      }
    g.distances = geo::DistanceMatrix::from_dense(w.n, std::move(tri));
  }
  if (w.adjacency.empty())
    for (int i = 0; i + 1 < w.n; ++i) w.adjacency.emplace_back(i, i + 1);
  g.adjacency = geo::AdjacencyGraph::from_edges(w.n, w.adjacency);

  if (w.agency_munis.empty()) {
    w.agency_munis.resize(1);
    for (int i = 0; i < w.n; ++i) w.agency_munis[0].push_back(i);
  }
  geo::AgencySegment seg;
  seg.from = w.from;
  seg.to = w.to;
  seg.agency_of.assign(w.n, -1);
  for (std::size_t a = 0; a < w.agency_munis.size(); ++a) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "A%02zu", a);
    g.agencies.agency_ids.push_back(buf);
    for (int u : w.agency_munis[a]) seg.agency_of[u] = static_cast<int>(a);
  }
  g.agencies.window_from = w.from;
  g.agencies.window_to = w.to;
  g.agencies.segments.push_back(std::move(seg));
  g.agencies.validate(w.n);
  return g;
}

inline zoneforge::delineate::RegionPartition make_partition(
    const zoneforge::geo::Geography& g, const std::vector<int>& assignment,
    const std::string& label = "markets") {
  return zoneforge::delineate::RegionPartition::from_assignment(assignment, g, label);
}

}  // namespace testsupport
