#pragma once

#include <cstddef>
#include <vector>

namespace evac {

/// Complete binary tree of partial sums over non-negative weights:
/// O(log n) point update and O(log n) sampling proportional to weight.
class SumTree {
public:
  SumTree() = default;
  explicit SumTree(std::size_t n);

  std::size_t size() const { return n_; }
  double total() const { return nodes_.empty() ? 0.0 : nodes_[1]; }
  double value(std::size_t k) const { return nodes_[leaves_ + k]; }

  void set(std::size_t k, double w);

  /// Leaf whose cumulative range contains `target` in [0, total()). Never
  /// returns a zero-weight leaf while total() > 0.
  std::size_t find(double target) const;

  /// Sum of the leaves recomputed from scratch.
  double recompute_total() const;

  /// Leaf-by-leaf equality.
  bool same_leaves(const SumTree& o) const;

private:
  std::size_t n_ = 0;
  std::size_t leaves_ = 1;  // first leaf slot; power of two
  std::vector<double> nodes_;
};

}  // namespace evac
