#include "zoneforge/delineate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace zoneforge::delineate {

namespace {

// Heap entry (height, smaller rep, larger rep). Ties among equal heights are
// resolved lexicographically by the pair, which is the documented merge rule.
using HeapEntry = std::tuple<double, int, int>;
using MinHeap = std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<HeapEntry>>;

std::uint64_t pair_key(int a, int b) {
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

std::vector<int> merge_sorted(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

void RegionPartition::validate() const {
  if (static_cast<int>(region_of.size()) != n_units)
    throw ValidationError("partition does not map every municipality");
  std::vector<char> seen(n_units, 0);
  for (int r = 0; r < regions(); ++r) {
    if (members[r].empty()) throw ValidationError("empty region in partition");
    for (int u : members[r]) {
      if (u < 0 || u >= n_units || seen[u] || region_of[u] != r)
        throw ValidationError("partition rosters are inconsistent");
      seen[u] = 1;
    }
  }
  for (char s : seen)
    if (!s) throw ValidationError("partition does not cover every municipality");
}

RegionPartition RegionPartition::identity(const geo::Geography& g) {
  std::vector<int> assign(g.size());
  for (int i = 0; i < g.size(); ++i) assign[i] = i;
  return from_assignment(assign, g, "identity");
}

RegionPartition RegionPartition::from_assignment(const std::vector<int>& unit_region,
                                                 const geo::Geography& g, std::string label) {
  RegionPartition p;
  p.label = std::move(label);
  p.n_units = static_cast<int>(unit_region.size());
  if (p.n_units != g.size())
    throw ValidationError("assignment length does not match municipality count");
  // group members, then renumber regions by ascending smallest member
  std::unordered_map<int, std::vector<int>> groups;
  for (int u = 0; u < p.n_units; ++u) groups[unit_region[u]].push_back(u);
  std::vector<std::vector<int>> rosters;
  rosters.reserve(groups.size());
  for (auto& [key, m] : groups) {
    std::sort(m.begin(), m.end());
    rosters.push_back(std::move(m));
  }
  std::sort(rosters.begin(), rosters.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  p.members = std::move(rosters);
  p.region_of.assign(p.n_units, -1);
  p.region_ids.resize(p.members.size());
  for (int r = 0; r < p.regions(); ++r) {
    for (int u : p.members[r]) p.region_of[u] = r;
    p.region_ids[r] = g.municipalities[p.members[r].front()].id;
  }
  p.validate();
  return p;
}

SymMatrix fusion_coefficients(const geo::DistanceMatrix& distances,
                              const std::vector<std::int64_t>& rlf) {
  const int n = distances.size();
  if (static_cast<int>(rlf.size()) != n)
    throw ValidationError("rlf length does not match distance matrix");
  SymMatrix f(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double d = distances(i, j);
      f.set(i, j, d * d * static_cast<double>(rlf[i] + rlf[j]));
    }
  return f;
}

namespace {

// Constrained complete linkage. Cluster pair distances are tracked for
// adjacent pairs only; when a merge makes a new pair adjacent, the missing
// side is recomputed as the exact maximum over member cross pairs (max is
// order-independent, so values match a from-scratch evaluation bit for bit).
struct Stage1Engine {
  const geo::Geography& g;
  std::vector<std::int64_t> rlf;
  std::vector<char> alive;
  std::vector<std::vector<int>> members;
  std::vector<std::unordered_set<int>> nbrs;
  std::unordered_map<std::uint64_t, double> dist;
  MinHeap heap;

  explicit Stage1Engine(const geo::Geography& geo) : g(geo), rlf(geo.rlf()) {
    const int n = g.size();
    alive.assign(n, 1);
    members.resize(n);
    nbrs.resize(n);
    for (int i = 0; i < n; ++i) members[i] = {i};
    for (int i = 0; i < n; ++i)
      for (int j : g.adjacency.neighbours[i]) {
        nbrs[i].insert(j);
        if (j > i) {
          double h = fuse(i, j);
          dist.emplace(pair_key(i, j), h);
          heap.emplace(h, i, j);
        }
      }
  }

  double fuse(int i, int j) const {
    double d = g.distances(i, j);
    return d * d * static_cast<double>(rlf[i] + rlf[j]);
  }

  double max_fuse(int a, int c) const {
    double m = -std::numeric_limits<double>::infinity();
    for (int i : members[a])
      for (int j : members[c]) m = std::max(m, fuse(i, j));
    return m;
  }

  double tracked_or_fresh(int a, int c) const {
    auto it = dist.find(pair_key(std::min(a, c), std::max(a, c)));
    return it != dist.end() ? it->second : max_fuse(a, c);
  }

  // Pops the minimal valid candidate; returns false when none remains.
  bool next(Merge& out) {
    while (!heap.empty()) {
      auto [h, a, b] = heap.top();
      heap.pop();
      if (!alive[a] || !alive[b]) continue;
      auto it = dist.find(pair_key(a, b));
      if (it == dist.end() || it->second != h) continue;
      out.left = a;
      out.right = b;
      out.height = h;
      apply(a, b);
      return true;
    }
    return false;
  }

  void apply(int a, int b) {  // a < b; a survives
    std::unordered_set<int> affected;
    for (int c : nbrs[a])
      if (c != b) affected.insert(c);
    for (int c : nbrs[b])
      if (c != a) affected.insert(c);
    for (int c : affected) {
      double h = std::max(tracked_or_fresh(a, c), tracked_or_fresh(b, c));
      dist[pair_key(std::min(a, c), std::max(a, c))] = h;
      heap.emplace(h, std::min(a, c), std::max(a, c));
    }
    for (int c : nbrs[b]) {
      nbrs[c].erase(b);
      dist.erase(pair_key(std::min(b, c), std::max(b, c)));
      if (c != a) nbrs[c].insert(a);
    }
    for (int c : nbrs[b])
      if (c != a) nbrs[a].insert(c);
    nbrs[a].erase(b);
    nbrs[b].clear();
    members[a] = merge_sorted(members[a], members[b]);
    members[b].clear();
    alive[b] = 0;
  }
};

}  // namespace

std::pair<RegionPartition, Dendrogram> pre_aggregate(const geo::Geography& g, int target_regions) {
  const int n = g.size();
  if (target_regions < 1 || target_regions > n)
    throw ValidationError("target_regions must be in [1, n]");
  Stage1Engine engine(g);
  Dendrogram dendro;
  dendro.leaves = n;
  int clusters = n;
  while (clusters > target_regions) {
    Merge m;
    if (!engine.next(m))
      throw NumericalError("no adjacent merge available: " + std::to_string(clusters) +
                           " clusters remain, target " + std::to_string(target_regions));
    m.step = static_cast<int>(dendro.merges.size());
    dendro.merges.push_back(m);
    --clusters;
  }
  std::vector<int> assign(n, -1);
  for (int rep = 0; rep < n; ++rep)
    if (engine.alive[rep])
      for (int u : engine.members[rep]) assign[u] = rep;
  auto part = RegionPartition::from_assignment(assign, g, "stage1");
  return {std::move(part), std::move(dendro)};
}

SymMatrix commuting_similarity(const RegionPartition& regions, const geo::CommutingMatrix& flows,
                               std::vector<std::string>* warnings) {
  if (flows.size() != regions.n_units)
    throw ValidationError("flow matrix does not match partition");
  const int r = regions.regions();
  std::vector<std::int64_t> region_rlf(r, 0);
  for (int u = 0; u < regions.n_units; ++u)
    region_rlf[regions.region_of[u]] += flows.row_sums()[u];

  std::unordered_map<std::uint64_t, std::int64_t> cross;  // (a<b) -> P_ab + P_ba
  flows.for_each([&](int i, int j, std::int64_t c) {
    int a = regions.region_of[i], b = regions.region_of[j];
    if (a == b) return;
    cross[pair_key(std::min(a, b), std::max(a, b))] += c;
  });

  SymMatrix s(r);
  for (const auto& [key, p] : cross) {
    int a = static_cast<int>(key >> 32);
    int b = static_cast<int>(key & 0xffffffffu);
    std::int64_t m = std::min(region_rlf[a], region_rlf[b]);
    if (m <= 0) continue;  // zero-RLF regions keep S = 0
    double v = static_cast<double>(p) / static_cast<double>(m);
    s.set(a, b, std::min(1.0, v));
  }
  if (warnings)
    for (int a = 0; a < r; ++a)
      if (region_rlf[a] == 0)
        warnings->push_back("region " + regions.region_ids[a] +
                            " has zero RLF; similarity forced to 0");
  return s;
}

StopRule StopRule::threshold(double c) {
  if (!(c > 0.0 && c <= 1.0)) throw ValidationError("stop threshold must be in (0, 1]");
  StopRule s;
  s.kind = Kind::threshold;
  s.c = c;
  return s;
}

StopRule StopRule::count(int k) {
  if (k < 1) throw ValidationError("stop count must be >= 1");
  StopRule s;
  s.kind = Kind::count;
  s.k = k;
  return s;
}

namespace {

// Unconstrained average linkage (UPGMA), run to a single cluster. Pair sums
// of leaf dissimilarities are carried through merges (S(A+B,C) =
// S(A,C)+S(B,C)); a cluster-pair height is sum / (|A|*|B|).
Dendrogram agglomerate_average(const SymMatrix& d) {
  const int n = d.size();
  Dendrogram out;
  out.leaves = n;
  if (n <= 1) return out;

  std::vector<char> alive(n, 1);
  std::vector<std::int64_t> size(n, 1);
  std::vector<double> sums(static_cast<std::size_t>(n) * (n - 1) / 2);
  auto idx = [](int i, int j) {
    std::size_t a = static_cast<std::size_t>(i < j ? j : i);
    std::size_t b = static_cast<std::size_t>(i < j ? i : j);
    return a * (a - 1) / 2 + b;
  };
  MinHeap heap;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      sums[idx(i, j)] = d(i, j);
      heap.emplace(d(i, j), i, j);
    }

  auto height = [&](int a, int b) {
    return sums[idx(a, b)] / (static_cast<double>(size[a]) * static_cast<double>(size[b]));
  };

  int clusters = n;
  while (clusters > 1) {
    double h = 0.0;
    int a = -1, b = -1;
    while (!heap.empty()) {
      auto [eh, ea, eb] = heap.top();
      heap.pop();
      if (!alive[ea] || !alive[eb]) continue;
      if (height(ea, eb) != eh) continue;  // stale value
      h = eh;
      a = ea;
      b = eb;
      break;
    }
    if (a < 0) throw NumericalError("average-linkage heap exhausted");  // unreachable
    Merge m;
    m.step = static_cast<int>(out.merges.size());
    m.left = a;
    m.right = b;
    m.height = h;
    out.merges.push_back(m);
    for (int c = 0; c < n; ++c) {
      if (!alive[c] || c == a || c == b) continue;
      sums[idx(a, c)] += sums[idx(b, c)];
    }
    size[a] += size[b];
    alive[b] = 0;
    for (int c = 0; c < n; ++c) {
      if (!alive[c] || c == a) continue;
      heap.emplace(height(a, c), std::min(a, c), std::max(a, c));
    }
    --clusters;
  }
  return out;
}

}  // namespace

std::vector<int> cut_dendrogram(const Dendrogram& d, const StopRule& stop) {
  std::size_t applied = 0;
  if (stop.kind == StopRule::Kind::threshold) {
    while (applied < d.merges.size() && d.merges[applied].height < stop.c) ++applied;
  } else {
    if (stop.k > d.leaves) throw ValidationError("cut count exceeds leaf count");
    applied = static_cast<std::size_t>(d.leaves - stop.k);
    if (applied > d.merges.size())
      throw ValidationError("dendrogram has too few merges for requested count");
  }
  // union-find with the smaller representative as root
  std::vector<int> root(d.leaves);
  for (int i = 0; i < d.leaves; ++i) root[i] = i;
  std::function<int(int)> find = [&](int x) {
    while (root[x] != x) {
      root[x] = root[root[x]];
      x = root[x];
    }
    return x;
  };
  for (std::size_t s = 0; s < applied; ++s) root[find(d.merges[s].right)] = find(d.merges[s].left);
  std::vector<int> assign(d.leaves);
  for (int i = 0; i < d.leaves; ++i) assign[i] = find(i);
  return assign;
}

MarketClustering cluster_markets(const SymMatrix& similarity, const StopRule& stop,
                                 const RegionPartition& regions, const geo::Geography& g) {
  if (similarity.size() != regions.regions())
    throw ValidationError("similarity matrix does not match region count");
  if (stop.kind == StopRule::Kind::count && stop.k > regions.regions())
    throw ValidationError("stop count exceeds region count");

  const int r = regions.regions();
  SymMatrix dissim(r);
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j) dissim.set(i, j, 1.0 - similarity(i, j));

  MarketClustering out;
  out.dendrogram = agglomerate_average(dissim);
  std::vector<int> region_cluster = cut_dendrogram(out.dendrogram, stop);

  std::vector<int> mun_assign(regions.n_units);
  for (int u = 0; u < regions.n_units; ++u)
    mun_assign[u] = region_cluster[regions.region_of[u]];
  out.markets = RegionPartition::from_assignment(mun_assign, g, "markets");
  out.region_market.assign(r, -1);
  for (int reg = 0; reg < r; ++reg)
    out.region_market[reg] = out.markets.region_of[regions.members[reg].front()];
  return out;
}

double commuter_ratio(const RegionPartition& p, const geo::CommutingMatrix& flows) {
  if (flows.size() != p.n_units) throw ValidationError("flow matrix does not match partition");
  if (flows.total() == 0) throw NumericalError("total labour force is zero");
  std::int64_t cross = 0;
  flows.for_each([&](int i, int j, std::int64_t c) {
    if (p.region_of[i] != p.region_of[j]) cross += c;
  });
  return 100.0 * static_cast<double>(cross) / static_cast<double>(flows.total());
}

SelfContainment esc_stats(const RegionPartition& p, const geo::CommutingMatrix& flows,
                          bool rlf_weighted_mean) {
  SelfContainment out;
  out.cr = commuter_ratio(p, flows);
  const int r = p.regions();
  std::vector<std::int64_t> within(r, 0), rlf(r, 0);
  for (int u = 0; u < p.n_units; ++u) rlf[p.region_of[u]] += flows.row_sums()[u];
  flows.for_each([&](int i, int j, std::int64_t c) {
    if (p.region_of[i] == p.region_of[j]) within[p.region_of[i]] += c;
  });
  out.esc.assign(r, std::numeric_limits<double>::quiet_NaN());
  double wsum = 0.0, sum = 0.0;
  int counted = 0;
  for (int a = 0; a < r; ++a) {
    if (rlf[a] == 0) {
      out.zero_rlf_regions.push_back(a);
      continue;
    }
    out.esc[a] = 100.0 * static_cast<double>(within[a]) / static_cast<double>(rlf[a]);
    double w = rlf_weighted_mean ? static_cast<double>(rlf[a]) : 1.0;
    sum += w * out.esc[a];
    wsum += w;
    ++counted;
  }
  if (counted == 0) throw NumericalError("no region with positive RLF");
  out.mean = sum / wsum;
  double ss = 0.0;
  out.min = std::numeric_limits<double>::infinity();
  out.max = -std::numeric_limits<double>::infinity();
  double plain_mean = 0.0;
  for (int a = 0; a < r; ++a)
    if (!std::isnan(out.esc[a])) plain_mean += out.esc[a];
  plain_mean /= counted;
  for (int a = 0; a < r; ++a) {
    if (std::isnan(out.esc[a])) continue;
    ss += (out.esc[a] - plain_mean) * (out.esc[a] - plain_mean);
    out.min = std::min(out.min, out.esc[a]);
    out.max = std::max(out.max, out.esc[a]);
  }
  out.sd = counted > 1 ? std::sqrt(ss / (counted - 1)) : 0.0;
  return out;
}

ConsistencyResult temporal_consistency(const RegionPartition& p_t, const RegionPartition& p_t2,
                                       const ConsistencyOptions& opts) {
  if (p_t.n_units != p_t2.n_units)
    throw ValidationError("partitions cover different municipality sets");
  const int n = p_t.n_units;
  // cross-tab |region_t2 x region_t|
  std::unordered_map<std::uint64_t, int> cross;
  for (int u = 0; u < n; ++u)
    ++cross[pair_key(p_t2.region_of[u], p_t.region_of[u])];

  std::vector<char> include(n, 1);
  if (opts.centers_only) {
    if (!opts.weights) throw ValidationError("centers scope requires weights");
    include.assign(n, 0);
    for (const auto& m : p_t2.members) {
      int best = m.front();
      for (int u : m)
        if ((*opts.weights)[u] > (*opts.weights)[best]) best = u;
      include[best] = 1;
    }
  }

  ConsistencyResult out;
  double sum = 0.0, wsum = 0.0;
  for (int u = 0; u < n; ++u) {
    if (!include[u]) continue;
    int b = static_cast<int>(p_t2.members[p_t2.region_of[u]].size()) - 1;
    if (b == 0) {  // 0/0 convention: singleton in p_t2 is excluded
      ++out.excluded;
      continue;
    }
    int shared = cross[pair_key(p_t2.region_of[u], p_t.region_of[u])] - 1;
    double w = opts.weights ? static_cast<double>((*opts.weights)[u]) : 1.0;
    sum += w * (static_cast<double>(shared) / static_cast<double>(b));
    wsum += w;
  }
  out.score = wsum > 0.0 ? sum / wsum : 0.0;
  return out;
}

std::vector<DefinitionRow> definition_table(const geo::Geography& g,
                                            const std::vector<int>& stage1_counts,
                                            const std::vector<double>& stops) {
  if (stage1_counts.empty() || stops.empty())
    throw ValidationError("definition table needs stage-1 counts and stops");
  std::vector<DefinitionRow> rows;
  std::vector<int> stored_counts;  // market counts per stop from the first stage-1 size
  for (std::size_t si = 0; si < stage1_counts.size(); ++si) {
    auto [regions, dendro1] = pre_aggregate(g, stage1_counts[si]);
    SymMatrix s = commuting_similarity(regions, g.flows);
    // full dendrogram once per stage-1 size, re-cut per stop
    MarketClustering base = cluster_markets(s, StopRule::threshold(stops.front()), regions, g);
    for (std::size_t ci = 0; ci < stops.size(); ++ci) {
      StopRule rule = si == 0 ? StopRule::threshold(stops[ci]) : StopRule::count(stored_counts[ci]);
      std::vector<int> region_cluster = cut_dendrogram(base.dendrogram, rule);
      std::vector<int> assign(g.size());
      for (int u = 0; u < g.size(); ++u) assign[u] = region_cluster[regions.region_of[u]];
      RegionPartition markets = RegionPartition::from_assignment(assign, g, "markets");
      if (si == 0) stored_counts.push_back(markets.regions());

      SelfContainment sc = esc_stats(markets, g.flows);
      DefinitionRow row;
      row.stage1_regions = stage1_counts[si];
      row.cutoff = stops[ci];
      row.markets = markets.regions();
      std::int64_t total_rlf = 0;
      for (const auto& m : g.municipalities) total_rlf += m.rlf;
      row.mean_rlf = static_cast<double>(total_rlf) / markets.regions();
      row.cr = sc.cr;
      row.esc_mean = sc.mean;
      row.esc_sd = sc.sd;
      row.esc_min = sc.min;
      row.esc_max = sc.max;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace zoneforge::delineate
