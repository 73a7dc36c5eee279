#pragma once

#include <cstddef>
#include <vector>

namespace zoneforge {

/// Symmetric double matrix with zero diagonal, stored as the strict lower
/// triangle. Used for pairwise scores (fusion coefficients, commuting
/// similarity, dissimilarity).
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int n, double fill = 0.0)
      : n_(n), data_(static_cast<std::size_t>(n) * (n - 1) / 2, fill) {}

  int size() const { return n_; }

  double operator()(int i, int j) const {
    if (i == j) return 0.0;
    return data_[index(i, j)];
  }

  void set(int i, int j, double v) {
    if (i != j) data_[index(i, j)] = v;
  }

  const std::vector<double>& raw() const { return data_; }

 private:
  static std::size_t tri(std::size_t k) { return k * (k - 1) / 2; }
  std::size_t index(int i, int j) const {
    std::size_t a = static_cast<std::size_t>(i < j ? j : i);
    std::size_t b = static_cast<std::size_t>(i < j ? i : j);
    return tri(a) + b;
  }

  int n_ = 0;
  std::vector<double> data_;
};

}  // namespace zoneforge
