#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "zoneforge/common.hpp"

namespace zoneforge::geo {

struct Municipality {
  std::string id;
  std::string name;
  std::int64_t rlf = 0;  // resident labour force (row sum of the flow matrix)
  std::int64_t llf = 0;  // local labour force (column sum)
};

/// Sparse square matrix of commuting counts. P(i,j) = workers residing in i
/// and working in j; the diagonal holds non-commuters. Duplicate input
/// records for the same (i,j) are summed.
class CommutingMatrix {
 public:
  CommutingMatrix() = default;
  static CommutingMatrix from_triplets(int n,
                                       std::vector<std::tuple<int, int, std::int64_t>> cells);

  int size() const { return n_; }
  std::int64_t total() const { return total_; }
  std::int64_t at(int i, int j) const;

  const std::vector<std::int64_t>& row_sums() const { return row_sums_; }
  const std::vector<std::int64_t>& col_sums() const { return col_sums_; }

  template <class F>
  void for_each(F&& f) const {  // f(i, j, count)
    for (int i = 0; i < n_; ++i)
      for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k)
        f(i, cols_[k], counts_[k]);
  }

 private:
  int n_ = 0;
  std::int64_t total_ = 0;
  std::vector<std::size_t> row_start_;  // n+1
  std::vector<std::int32_t> cols_;
  std::vector<std::int64_t> counts_;
  std::vector<std::int64_t> row_sums_, col_sums_;
};

/// rlf[i] = sum_j P(i,j), llf[j] = sum_i P(i,j). Total labour force is
/// conserved exactly (integer arithmetic).
std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> derive_labour_forces(
    const CommutingMatrix& flows);

/// Driving times in seconds. Symmetric with zero diagonal by construction.
/// Two backends: an explicit triangle (loaded from file) or plane coordinates
/// with a constant speed factor (synthetic worlds), evaluated on demand.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  static DistanceMatrix from_dense(int n, std::vector<double> upper_triangle);
  static DistanceMatrix from_points(std::vector<std::array<double, 2>> points_km,
                                    double seconds_per_km);

  int size() const { return n_; }
  bool point_backed() const { return !points_.empty(); }
  const std::vector<std::array<double, 2>>& points() const { return points_; }

  double operator()(int i, int j) const {
    if (i == j) return 0.0;
    if (!points_.empty()) {
      double dx = points_[i][0] - points_[j][0];
      double dy = points_[i][1] - points_[j][1];
      return std::sqrt(dx * dx + dy * dy) * seconds_per_km_;
    }
    return tri_[index(i, j)];
  }

 private:
  std::size_t index(int i, int j) const {
    std::size_t a = static_cast<std::size_t>(i < j ? j : i);
    std::size_t b = static_cast<std::size_t>(i < j ? i : j);
    return a * (a - 1) / 2 + b;
  }

  int n_ = 0;
  std::vector<double> tri_;
  std::vector<std::array<double, 2>> points_;
  double seconds_per_km_ = 0.0;
};

struct AdjacencyGraph {
  std::vector<std::vector<int>> neighbours;  // sorted, simple graph
  int size() const { return static_cast<int>(neighbours.size()); }
  bool adjacent(int i, int j) const;
  static AdjacencyGraph from_edges(int n, const std::vector<std::pair<int, int>>& edges);
  /// Synthesized adjacency: driving time below a threshold.
  static AdjacencyGraph from_distances(const DistanceMatrix& d, double threshold_seconds);
};

struct AgencySegment {
  Quarter from = 0, to = 0;        // [from, to)
  std::vector<int> agency_of;      // municipality index -> agency index (total)
};

struct AgencyTimeline {
  std::vector<std::string> agency_ids;
  std::vector<AgencySegment> segments;  // contiguous, covering the window
  Quarter window_from = 0, window_to = 0;

  int segment_index(Quarter q) const;  // -1 outside the window
  int segment_count() const { return static_cast<int>(segments.size()); }
  void validate(int n_municipalities) const;
};

struct Geography {
  std::vector<Municipality> municipalities;
  std::unordered_map<std::string, int> index_of;
  CommutingMatrix flows;
  DistanceMatrix distances;
  AdjacencyGraph adjacency;
  AgencyTimeline agencies;
  std::vector<std::string> warnings;

  int size() const { return static_cast<int>(municipalities.size()); }
  std::vector<std::int64_t> rlf() const;
  std::vector<std::int64_t> llf() const;
  int require_index(const std::string& municipality_id) const;
};

struct GeoPaths {
  std::filesystem::path municipalities;
  std::filesystem::path flows;
  std::filesystem::path distances;
  std::filesystem::path adjacency;  // optional; empty -> synthesized
  std::filesystem::path agencies;

  static GeoPaths in_directory(const std::filesystem::path& dir);
};

struct GeoConfig {
  double adjacency_threshold_seconds = 900.0;
  // expected agency-timeline coverage; zeros mean "take from the file"
  Quarter window_from = 0, window_to = 0;
};

/// Loads and cross-validates all geographic inputs. rlf/llf are derived from
/// the flow matrix; if the municipalities file also carries them they must
/// match exactly. Flow records whose ids are unknown are dropped with a
/// warning (cross-border commuting).
Geography load_geography(const GeoPaths& paths, const GeoConfig& config = {});

/// Emits the same CSV schemas load_geography ingests. Reloading round-trips
/// bit-exactly.
void write_geography(const Geography& g, const std::filesystem::path& dir);

}  // namespace zoneforge::geo
