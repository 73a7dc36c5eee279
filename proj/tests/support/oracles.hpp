#pragma once

// Brute-force agglomerative implementations used as test oracles. They stay
// independent of the library engine: no heap, no incremental distance cache;
// every step scans all active cluster pairs and picks the minimum under the
// (height, smaller rep, larger rep) tie rule.

#include <algorithm>
#include <functional>
#include <limits>
#include <vector>

#include "zoneforge/sym_matrix.hpp"

namespace testsupport {

struct OracleMerge {
  int left = 0, right = 0;
  double height = 0.0;
};

struct OracleRun {
  std::vector<OracleMerge> merges;
  bool blocked = false;  // constrained run could not reach the target
};

// Complete linkage under a leaf-pair score, merges restricted to cluster
// pairs with at least one adjacent member pair. Distances are recomputed
// from the leaves at every step (max is order-independent).
inline OracleRun complete_linkage_oracle(int n,
                                         const std::function<double(int, int)>& leaf_dist,
                                         const std::vector<std::vector<int>>& neighbours,
                                         int target_clusters) {
  OracleRun run;
  std::vector<std::vector<int>> members(n);
  for (int i = 0; i < n; ++i) members[i] = {i};
  std::vector<char> alive(n, 1);
  int clusters = n;
  auto adjacent = [&](const std::vector<int>& a, const std::vector<int>& b) {
    for (int u : a)
      for (int v : b)
        if (std::binary_search(neighbours[u].begin(), neighbours[u].end(), v)) return true;
    return false;
  };
  while (clusters > target_clusters) {
    double best = std::numeric_limits<double>::infinity();
    int ba = -1, bb = -1;
    for (int a = 0; a < n; ++a) {
      if (!alive[a]) continue;
      for (int b = a + 1; b < n; ++b) {
        if (!alive[b]) continue;
        if (!adjacent(members[a], members[b])) continue;
        double d = -std::numeric_limits<double>::infinity();
        for (int u : members[a])
          for (int v : members[b]) d = std::max(d, leaf_dist(u, v));
        if (d < best) {
          best = d;
          ba = a;
          bb = b;
        }
      }
    }
    if (ba < 0) {
      run.blocked = true;
      return run;
    }
    run.merges.push_back({ba, bb, best});
    members[ba].insert(members[ba].end(), members[bb].begin(), members[bb].end());
    std::sort(members[ba].begin(), members[ba].end());
    members[bb].clear();
    alive[bb] = 0;
    --clusters;
  }
  return run;
}

// Average linkage (UPGMA) on a dissimilarity matrix, run to one cluster.
// Cluster-pair sums follow the same left-plus-right convention the library
// documents, so heights are comparable bit for bit.
inline OracleRun average_linkage_oracle(const zoneforge::SymMatrix& d) {
  const int n = d.size();
  OracleRun run;
  if (n <= 1) return run;
  std::vector<std::vector<double>> sums(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sums[i][j] = d(i, j);
  std::vector<long long> size(n, 1);
  std::vector<char> alive(n, 1);
  int clusters = n;
  while (clusters > 1) {
    double best = std::numeric_limits<double>::infinity();
    int ba = -1, bb = -1;
    for (int a = 0; a < n; ++a) {
      if (!alive[a]) continue;
      for (int b = a + 1; b < n; ++b) {
        if (!alive[b]) continue;
        double h = sums[a][b] / (static_cast<double>(size[a]) * static_cast<double>(size[b]));
        if (h < best) {
          best = h;
          ba = a;
          bb = b;
        }
      }
    }
    run.merges.push_back({ba, bb, best});
    for (int c = 0; c < n; ++c) {
      if (!alive[c] || c == ba || c == bb) continue;
      sums[ba][c] += sums[bb][c];
      sums[c][ba] = sums[ba][c];
    }
    size[ba] += size[bb];
    alive[bb] = 0;
    --clusters;
  }
  return run;
}

}  // namespace testsupport
