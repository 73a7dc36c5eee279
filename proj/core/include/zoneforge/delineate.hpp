#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zoneforge/geography.hpp"
#include "zoneforge/sym_matrix.hpp"

namespace zoneforge::delineate {

/// One agglomeration step. Clusters are named by their canonical
/// representative: the smallest leaf index among members. `left` is always
/// the smaller representative; it is also the representative of the merged
/// cluster. Heights are non-decreasing within a run.
struct Merge {
  int step = 0;
  int left = 0;
  int right = 0;
  double height = 0.0;
};

struct Dendrogram {
  int leaves = 0;
  std::vector<Merge> merges;
};

/// Mapping municipality -> region, with the region roster. Regions are
/// numbered by ascending representative (smallest member index) and named
/// after the representative's municipality id.
struct RegionPartition {
  std::string label;  // provenance: "identity", "stage1", "markets", ...
  int n_units = 0;
  std::vector<int> region_of;
  std::vector<std::vector<int>> members;  // sorted member indices per region
  std::vector<std::string> region_ids;

  int regions() const { return static_cast<int>(members.size()); }
  void validate() const;

  static RegionPartition identity(const geo::Geography& g);
  /// Builds rosters/names from an assignment vector (region numbering is
  /// normalized to ascending representative order).
  static RegionPartition from_assignment(const std::vector<int>& unit_region,
                                         const geo::Geography& g, std::string label);
};

/// F(i,j) = d(i,j)^2 * (rlf_i + rlf_j).
SymMatrix fusion_coefficients(const geo::DistanceMatrix& distances,
                              const std::vector<std::int64_t>& rlf);

/// Stage 1: complete-linkage agglomeration of municipalities under the
/// fusion coefficient, restricted to merges of adjacency-connected clusters,
/// stopped at exactly `target_regions` clusters. Throws NumericalError
/// ("no adjacent merge available") if adjacency blocks the target.
std::pair<RegionPartition, Dendrogram> pre_aggregate(const geo::Geography& g, int target_regions);

/// S(a,b) = (P_ab + P_ba) / min(RLF_a, RLF_b) over region-block flow sums,
/// clamped to [0,1], zero diagonal. Regions with zero RLF get S = 0 against
/// all others and are reported in `warnings`.
SymMatrix commuting_similarity(const RegionPartition& regions, const geo::CommutingMatrix& flows,
                               std::vector<std::string>* warnings = nullptr);

struct StopRule {
  enum class Kind { threshold, count };
  Kind kind = Kind::threshold;
  double c = 0.995;  // merge while min average distance < c (strict)
  int k = 1;         // or: stop once k clusters remain

  static StopRule threshold(double c);
  static StopRule count(int k);
};

struct MarketClustering {
  RegionPartition markets;       // over municipalities
  Dendrogram dendrogram;         // over stage-1 regions, run to completion
  std::vector<int> region_market;  // stage-1 region -> market index
};

/// Stage 2: average-linkage (UPGMA) agglomeration of regions on D = 1 - S.
/// The dendrogram is always computed to a single cluster so it can be re-cut
/// at any k without re-running; `stop` only selects the emitted partition.
MarketClustering cluster_markets(const SymMatrix& similarity, const StopRule& stop,
                                 const RegionPartition& regions, const geo::Geography& g);

/// Cuts a completed dendrogram: threshold mode applies merges while
/// height < c; count mode applies the first (leaves - k) merges. Returns a
/// leaf -> cluster assignment with clusters numbered by ascending
/// representative.
std::vector<int> cut_dendrogram(const Dendrogram& d, const StopRule& stop);

/// Share of all commuters crossing region borders, in percent of the total
/// labour force. Throws NumericalError when the total labour force is zero.
double commuter_ratio(const RegionPartition& p, const geo::CommutingMatrix& flows);

struct SelfContainment {
  double cr = 0.0;                 // commuter ratio, percent
  std::vector<double> esc;         // per region, percent; NaN for zero-RLF regions
  double mean = 0.0, sd = 0.0, min = 0.0, max = 0.0;
  std::vector<int> zero_rlf_regions;  // excluded from the summary
};

/// Employment self-containment per region plus an unweighted summary
/// (optionally RLF-weighted mean). sd is the sample standard deviation.
SelfContainment esc_stats(const RegionPartition& p, const geo::CommutingMatrix& flows,
                          bool rlf_weighted_mean = false);

struct ConsistencyOptions {
  const std::vector<std::int64_t>* weights = nullptr;  // e.g. local labour force
  bool centers_only = false;  // restrict to each market's largest municipality (by weight)
};

struct ConsistencyResult {
  double score = 0.0;  // in [0,1]
  int excluded = 0;    // municipalities with no co-members in p_t2 (0/0 convention)
};

/// For each municipality, the share of its co-members in p_t2 that were
/// already co-members in p_t, averaged (optionally weighted).
ConsistencyResult temporal_consistency(const RegionPartition& p_t, const RegionPartition& p_t2,
                                       const ConsistencyOptions& opts = {});

struct DefinitionRow {
  int stage1_regions = 0;
  double cutoff = 0.0;
  int markets = 0;
  double mean_rlf = 0.0;
  double cr = 0.0;
  double esc_mean = 0.0, esc_sd = 0.0, esc_min = 0.0, esc_max = 0.0;
};

/// One row per (stage-1 size, stop value). The stops are applied as
/// thresholds for the first stage-1 count; the resulting market counts are
/// then reused as count-stops for the remaining stage-1 sizes, so every
/// stage-1 variant yields the same number of markets per stop.
std::vector<DefinitionRow> definition_table(const geo::Geography& g,
                                            const std::vector<int>& stage1_counts,
                                            const std::vector<double>& stops);

}  // namespace zoneforge::delineate
