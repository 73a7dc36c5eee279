#include "zoneforge/geography.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "zoneforge/csv.hpp"

namespace zoneforge::geo {

CommutingMatrix CommutingMatrix::from_triplets(
    int n, std::vector<std::tuple<int, int, std::int64_t>> cells) {
  for (auto& [i, j, c] : cells) {
    if (i < 0 || i >= n || j < 0 || j >= n)
      throw ValidationError("flow cell out of range");
    if (c < 0) throw ValidationError("negative commuting count");
  }
  std::sort(cells.begin(), cells.end());
  CommutingMatrix m;
  m.n_ = n;
  m.row_start_.assign(n + 1, 0);
  m.row_sums_.assign(n, 0);
  m.col_sums_.assign(n, 0);
  for (std::size_t k = 0; k < cells.size();) {
    auto [i, j, c] = cells[k];
    std::int64_t sum = 0;
    while (k < cells.size() && std::get<0>(cells[k]) == i && std::get<1>(cells[k]) == j) {
      sum += std::get<2>(cells[k]);  // duplicates are summed
      ++k;
    }
    if (sum == 0) continue;
    m.cols_.push_back(j);
    m.counts_.push_back(sum);
    m.row_start_[i + 1] = m.cols_.size();
    m.row_sums_[i] += sum;
    m.col_sums_[j] += sum;
    m.total_ += sum;
  }
  for (int i = 0; i < n; ++i)
    m.row_start_[i + 1] = std::max(m.row_start_[i + 1], m.row_start_[i]);
  return m;
}

std::int64_t CommutingMatrix::at(int i, int j) const {
  auto lo = cols_.begin() + static_cast<std::ptrdiff_t>(row_start_[i]);
  auto hi = cols_.begin() + static_cast<std::ptrdiff_t>(row_start_[i + 1]);
  auto it = std::lower_bound(lo, hi, j);
  if (it == hi || *it != j) return 0;
  return counts_[static_cast<std::size_t>(it - cols_.begin())];
}

std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> derive_labour_forces(
    const CommutingMatrix& flows) {
  return {flows.row_sums(), flows.col_sums()};
}

DistanceMatrix DistanceMatrix::from_dense(int n, std::vector<double> upper_triangle) {
  if (upper_triangle.size() != static_cast<std::size_t>(n) * (n - 1) / 2)
    throw ValidationError("distance triangle has wrong length");
  for (double v : upper_triangle)
    if (!(v >= 0.0)) throw ValidationError("negative or non-finite driving time");
  DistanceMatrix d;
  d.n_ = n;
  d.tri_ = std::move(upper_triangle);
  return d;
}

DistanceMatrix DistanceMatrix::from_points(std::vector<std::array<double, 2>> points_km,
                                           double seconds_per_km) {
  DistanceMatrix d;
  d.n_ = static_cast<int>(points_km.size());
  d.points_ = std::move(points_km);
  d.seconds_per_km_ = seconds_per_km;
  return d;
}

bool AdjacencyGraph::adjacent(int i, int j) const {
  const auto& ni = neighbours[i];
  return std::binary_search(ni.begin(), ni.end(), j);
}

AdjacencyGraph AdjacencyGraph::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  AdjacencyGraph g;
  g.neighbours.assign(n, {});
  for (auto [a, b] : edges) {
    if (a == b) continue;  // simple graph
    g.neighbours[a].push_back(b);
    g.neighbours[b].push_back(a);
  }
  for (auto& v : g.neighbours) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return g;
}

AdjacencyGraph AdjacencyGraph::from_distances(const DistanceMatrix& d, double threshold_seconds) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < d.size(); ++i)
    for (int j = i + 1; j < d.size(); ++j)
      if (d(i, j) < threshold_seconds) edges.emplace_back(i, j);
  return from_edges(d.size(), edges);
}

int AgencyTimeline::segment_index(Quarter q) const {
  for (int s = 0; s < static_cast<int>(segments.size()); ++s)
    if (q >= segments[s].from && q < segments[s].to) return s;
  return -1;
}

void AgencyTimeline::validate(int n_municipalities) const {
  if (segments.empty()) throw ValidationError("agency timeline has no segments");
  if (segments.front().from != window_from)
    throw ValidationError("timeline gap: coverage starts at " +
                          format_quarter(segments.front().from) + " but window starts at " +
                          format_quarter(window_from));
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (segments[s].to <= segments[s].from)
      throw ValidationError("empty agency timeline segment");
    if (s + 1 < segments.size() && segments[s].to != segments[s + 1].from)
      throw ValidationError("timeline gap between " + format_quarter(segments[s].to) + " and " +
                            format_quarter(segments[s + 1].from));
    if (static_cast<int>(segments[s].agency_of.size()) != n_municipalities)
      throw ValidationError("agency segment does not cover every municipality");
    for (int a : segments[s].agency_of)
      if (a < 0 || a >= static_cast<int>(agency_ids.size()))
        throw ValidationError("agency segment references unknown agency");
  }
  if (segments.back().to != window_to)
    throw ValidationError("timeline gap: coverage ends at " +
                          format_quarter(segments.back().to) + " but window ends at " +
                          format_quarter(window_to));
}

std::vector<std::int64_t> Geography::rlf() const {
  std::vector<std::int64_t> v(municipalities.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = municipalities[i].rlf;
  return v;
}

std::vector<std::int64_t> Geography::llf() const {
  std::vector<std::int64_t> v(municipalities.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = municipalities[i].llf;
  return v;
}

int Geography::require_index(const std::string& municipality_id) const {
  auto it = index_of.find(municipality_id);
  if (it == index_of.end())
    throw ValidationError("unknown municipality id '" + municipality_id + "'");
  return it->second;
}

GeoPaths GeoPaths::in_directory(const std::filesystem::path& dir) {
  GeoPaths p;
  p.municipalities = dir / "municipalities.csv";
  p.flows = dir / "flows.csv";
  p.distances = dir / "distances.csv";
  p.adjacency = dir / "adjacency.csv";
  p.agencies = dir / "agencies.csv";
  return p;
}

namespace {

void require_exists(const std::filesystem::path& p, const char* what) {
  if (p.empty() || !std::filesystem::exists(p))
    throw ValidationError(std::string(what) + " file missing: " +
                          (p.empty() ? std::string("<unset>") : p.string()));
}

}  // namespace

Geography load_geography(const GeoPaths& paths, const GeoConfig& config) {
  Geography g;
  require_exists(paths.municipalities, "municipalities");
  require_exists(paths.flows, "flows");
  require_exists(paths.distances, "distances");
  require_exists(paths.agencies, "agencies");

  // municipalities.csv: id,name[,rlf,llf]
  bool has_rlf = false, has_llf = false;
  {
    csv::Reader r(paths.municipalities);
    int c_id = r.require_column("id");
    int c_name = r.column("name");
    int c_rlf = r.column("rlf");
    int c_llf = r.column("llf");
    has_rlf = c_rlf >= 0;
    has_llf = c_llf >= 0;
    r.for_each_row([&](const std::vector<std::string>& f, long line) {
      Municipality m;
      m.id = f[c_id];
      if (m.id.empty())
        throw ValidationError(paths.municipalities.string() + ":" + std::to_string(line) +
                              ": empty municipality id");
      if (c_name >= 0) m.name = f[c_name];
      if (has_rlf) m.rlf = csv::parse_count(f[c_rlf], paths.municipalities, line);
      if (has_llf) m.llf = csv::parse_count(f[c_llf], paths.municipalities, line);
      if (m.rlf < 0 || m.llf < 0)
        throw ValidationError(paths.municipalities.string() + ":" + std::to_string(line) +
                              ": negative labour force");
      if (!g.index_of.emplace(m.id, static_cast<int>(g.municipalities.size())).second)
        throw ValidationError(paths.municipalities.string() + ":" + std::to_string(line) +
                              ": duplicate municipality id '" + m.id + "'");
      g.municipalities.push_back(std::move(m));
    });
  }
  const int n = g.size();
  if (n == 0) throw ValidationError("no municipalities loaded");

  // flows.csv: origin_id,dest_id,count. Unknown ids (cross-border) dropped.
  {
    csv::Reader r(paths.flows);
    int c_o = r.require_column("origin_id");
    int c_d = r.require_column("dest_id");
    int c_c = r.require_column("count");
    std::vector<std::tuple<int, int, std::int64_t>> cells;
    long dropped = 0;
    r.for_each_row([&](const std::vector<std::string>& f, long line) {
      long cnt = csv::parse_count(f[c_c], paths.flows, line);
      if (cnt < 0)
        throw ValidationError(paths.flows.string() + ":" + std::to_string(line) +
                              ": negative flow count");
      auto io = g.index_of.find(f[c_o]);
      auto id = g.index_of.find(f[c_d]);
      if (io == g.index_of.end() || id == g.index_of.end()) {
        ++dropped;
        return;
      }
      cells.emplace_back(io->second, id->second, cnt);
    });
    if (dropped > 0)
      g.warnings.push_back("flows: dropped " + std::to_string(dropped) +
                           " records with unknown municipality ids (cross-border)");
    g.flows = CommutingMatrix::from_triplets(n, std::move(cells));
  }

  // derived labour forces; supplied values must agree exactly
  auto [rlf, llf] = derive_labour_forces(g.flows);
  for (int i = 0; i < n; ++i) {
    if (has_rlf && g.municipalities[i].rlf != rlf[i])
      throw ValidationError("municipality '" + g.municipalities[i].id + "': supplied rlf " +
                            std::to_string(g.municipalities[i].rlf) +
                            " does not match flow row sum " + std::to_string(rlf[i]));
    if (has_llf && g.municipalities[i].llf != llf[i])
      throw ValidationError("municipality '" + g.municipalities[i].id + "': supplied llf " +
                            std::to_string(g.municipalities[i].llf) +
                            " does not match flow column sum " + std::to_string(llf[i]));
    g.municipalities[i].rlf = rlf[i];
    g.municipalities[i].llf = llf[i];
  }

  // distances.csv: id_a,id_b,seconds (once per unordered pair)
  {
    csv::Reader r(paths.distances);
    int c_a = r.require_column("id_a");
    int c_b = r.require_column("id_b");
    int c_s = r.require_column("seconds");
    std::vector<double> tri(static_cast<std::size_t>(n) * (n - 1) / 2,
                            std::numeric_limits<double>::quiet_NaN());
    auto index = [&](int i, int j) {
      std::size_t a = static_cast<std::size_t>(i < j ? j : i);
      std::size_t b = static_cast<std::size_t>(i < j ? i : j);
      return a * (a - 1) / 2 + b;
    };
    r.for_each_row([&](const std::vector<std::string>& f, long line) {
      int a = g.require_index(f[c_a]);
      int b = g.require_index(f[c_b]);
      double s = csv::parse_double(f[c_s], paths.distances, line);
      if (a == b) {
        if (s != 0.0)
          throw ValidationError(paths.distances.string() + ":" + std::to_string(line) +
                                ": nonzero self-distance");
        return;
      }
      if (!(s >= 0.0))
        throw ValidationError(paths.distances.string() + ":" + std::to_string(line) +
                              ": negative driving time");
      double& slot = tri[index(a, b)];
      if (!std::isnan(slot) && std::abs(slot - s) > 1e-9)
        throw ValidationError(paths.distances.string() + ":" + std::to_string(line) +
                              ": conflicting distance for pair (" + f[c_a] + "," + f[c_b] + ")");
      slot = s;
    });
    for (double v : tri)
      if (std::isnan(v)) throw ValidationError("distances.csv does not cover every pair");
    g.distances = DistanceMatrix::from_dense(n, std::move(tri));
  }

  // adjacency.csv: id_a,id_b; synthesized from distances when absent
  if (!paths.adjacency.empty() && std::filesystem::exists(paths.adjacency)) {
    csv::Reader r(paths.adjacency);
    int c_a = r.require_column("id_a");
    int c_b = r.require_column("id_b");
    std::vector<std::pair<int, int>> edges;
    r.for_each_row([&](const std::vector<std::string>& f, long) {
      edges.emplace_back(g.require_index(f[c_a]), g.require_index(f[c_b]));
    });
    g.adjacency = AdjacencyGraph::from_edges(n, edges);
  } else {
    g.adjacency = AdjacencyGraph::from_distances(g.distances, config.adjacency_threshold_seconds);
    g.warnings.push_back("adjacency synthesized: driving time below " +
                         csv::format_double(config.adjacency_threshold_seconds) + " s");
  }

  // agencies.csv: municipality_id,agency_id,from_quarter,to_quarter
  {
    csv::Reader r(paths.agencies);
    int c_m = r.require_column("municipality_id");
    int c_a = r.require_column("agency_id");
    int c_f = r.require_column("from_quarter");
    int c_t = r.require_column("to_quarter");
    std::unordered_map<std::string, int> agency_index;
    struct Rec {
      int mun, agency;
      Quarter from, to;
    };
    std::vector<Rec> recs;
    std::vector<Quarter> cuts;
    r.for_each_row([&](const std::vector<std::string>& f, long) {
      Rec rec;
      rec.mun = g.require_index(f[c_m]);
      auto [it, fresh] =
          agency_index.emplace(f[c_a], static_cast<int>(g.agencies.agency_ids.size()));
      if (fresh) g.agencies.agency_ids.push_back(f[c_a]);
      rec.agency = it->second;
      rec.from = parse_quarter(f[c_f]);
      rec.to = parse_quarter(f[c_t]);
      if (rec.to <= rec.from) throw ValidationError("agency record with empty quarter interval");
      recs.push_back(rec);
      cuts.push_back(rec.from);
      cuts.push_back(rec.to);
    });
    if (recs.empty()) throw ValidationError("agencies.csv has no records");
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    g.agencies.window_from = config.window_from != 0 ? config.window_from : cuts.front();
    g.agencies.window_to = config.window_to != 0 ? config.window_to : cuts.back();
    // segment boundaries: every distinct cut inside the window
    std::vector<Quarter> bounds{g.agencies.window_from};
    for (Quarter c : cuts)
      if (c > g.agencies.window_from && c < g.agencies.window_to) bounds.push_back(c);
    bounds.push_back(g.agencies.window_to);
    for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
      AgencySegment seg;
      seg.from = bounds[s];
      seg.to = bounds[s + 1];
      seg.agency_of.assign(n, -1);
      for (const Rec& rec : recs)
        if (rec.from <= seg.from && rec.to >= seg.to) {
          if (seg.agency_of[rec.mun] != -1 && seg.agency_of[rec.mun] != rec.agency)
            throw ValidationError("municipality '" + g.municipalities[rec.mun].id +
                                  "' assigned to two agencies in " + format_quarter(seg.from));
          seg.agency_of[rec.mun] = rec.agency;
        }
      for (int i = 0; i < n; ++i)
        if (seg.agency_of[i] == -1)
          throw ValidationError("timeline gap: municipality '" + g.municipalities[i].id +
                                "' has no agency in " + format_quarter(seg.from));
      g.agencies.segments.push_back(std::move(seg));
    }
    g.agencies.validate(n);
  }

  return g;
}

void write_geography(const Geography& g, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    csv::Writer w(dir / "municipalities.csv", {"id", "name", "rlf", "llf"});
    for (const auto& m : g.municipalities)
      w.row({m.id, m.name, std::to_string(m.rlf), std::to_string(m.llf)});
  }
  {
    csv::Writer w(dir / "flows.csv", {"origin_id", "dest_id", "count"});
    g.flows.for_each([&](int i, int j, std::int64_t c) {
      w.row({g.municipalities[i].id, g.municipalities[j].id, std::to_string(c)});
    });
  }
  {
    csv::Writer w(dir / "distances.csv", {"id_a", "id_b", "seconds"});
    for (int i = 0; i < g.size(); ++i)
      for (int j = i + 1; j < g.size(); ++j)
        w.row({g.municipalities[i].id, g.municipalities[j].id,
               csv::format_double(g.distances(i, j))});
  }
  {
    csv::Writer w(dir / "adjacency.csv", {"id_a", "id_b"});
    for (int i = 0; i < g.size(); ++i)
      for (int j : g.adjacency.neighbours[i])
        if (j > i) w.row({g.municipalities[i].id, g.municipalities[j].id});
  }
  {
    csv::Writer w(dir / "agencies.csv",
                  {"municipality_id", "agency_id", "from_quarter", "to_quarter"});
    for (const auto& seg : g.agencies.segments)
      for (int i = 0; i < g.size(); ++i)
        w.row({g.municipalities[i].id, g.agencies.agency_ids[seg.agency_of[i]],
               format_quarter(seg.from), format_quarter(seg.to)});
  }
}

}  // namespace zoneforge::geo
