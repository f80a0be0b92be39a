#include "evac/sum_tree.hpp"

#include <algorithm>

namespace evac {

SumTree::SumTree(std::size_t n) : n_(n) {
  while (leaves_ < n) leaves_ <<= 1;
  nodes_.assign(2 * leaves_, 0.0);
}

void SumTree::set(std::size_t k, double w) {
  std::size_t node = leaves_ + k;
  nodes_[node] = w;
  for (node >>= 1; node >= 1; node >>= 1) {
    nodes_[node] = nodes_[2 * node] + nodes_[2 * node + 1];
  }
}

std::size_t SumTree::find(double target) const {
  std::size_t node = 1;
  while (node < leaves_) {
    const std::size_t left = 2 * node;
    const double lw = nodes_[left];
    if ((target < lw && lw > 0.0) || nodes_[left + 1] <= 0.0) {
      node = left;
    } else {
      target -= lw;
      node = left + 1;
    }
  }
  return node - leaves_;
}

double SumTree::recompute_total() const {
  double sum = 0.0;
  for (std::size_t k = 0; k < n_; ++k) sum += nodes_[leaves_ + k];
  return sum;
}

bool SumTree::same_leaves(const SumTree& o) const {
  return n_ == o.n_ && std::equal(nodes_.begin() + static_cast<std::ptrdiff_t>(leaves_),
                                  nodes_.begin() + static_cast<std::ptrdiff_t>(leaves_ + n_),
                                  o.nodes_.begin() + static_cast<std::ptrdiff_t>(o.leaves_));
}

}  // namespace evac
