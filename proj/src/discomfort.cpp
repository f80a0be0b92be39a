#include <algorithm>
#include <cmath>
#include <vector>

#include "evac/crowd.hpp"

namespace evac {

ScalarField discomfort_field(std::span<const Vec2> positions, double delta,
                             const GridMask& grid) {
  const int nx = grid.nx();
  const int ny = grid.ny();
  const double h = grid.h();
  ScalarField p = grid.make_field(0.0);
  if (positions.empty()) return p;

  // Agents bucketed by containing cell (CSR layout).
  std::vector<std::size_t> start(grid.size() + 1, 0);
  std::vector<std::size_t> cell_of(positions.size());
  for (std::size_t a = 0; a < positions.size(); ++a) {
    auto [i, j] = grid.cell_of(positions[a]);
    cell_of[a] = grid.index(i, j);
    ++start[cell_of[a] + 1];
  }
  for (std::size_t k = 0; k < grid.size(); ++k) start[k + 1] += start[k];
  std::vector<std::size_t> fill(start.begin(), start.end() - 1);
  std::vector<Vec2> sorted(positions.size());
  for (std::size_t a = 0; a < positions.size(); ++a) sorted[fill[cell_of[a]]++] = positions[a];

  const int reach = static_cast<int>(std::ceil(delta / h)) + 1;
  const double d2 = delta * delta;

#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Vec2 c = grid.center(i, j);
      int count = 0;
      for (int jj = std::max(0, j - reach); jj <= std::min(ny - 1, j + reach); ++jj) {
        for (int ii = std::max(0, i - reach); ii <= std::min(nx - 1, i + reach); ++ii) {
          const std::size_t b = grid.index(ii, jj);
          for (std::size_t a = start[b]; a < start[b + 1]; ++a) {
            if (norm2(sorted[a] - c) <= d2) ++count;
          }
        }
      }
      p(i, j) = count;
    }
  }
  return p;
}

namespace serial {

ScalarField discomfort_field(std::span<const Vec2> positions, double delta,
                             const GridMask& grid) {
  ScalarField p = grid.make_field(0.0);
  const double d2 = delta * delta;
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      const Vec2 c = grid.center(i, j);
      for (const Vec2 x : positions) {
        if (norm2(x - c) <= d2) p(i, j) += 1.0;
      }
    }
  }
  return p;
}

}  // namespace serial
}  // namespace evac
