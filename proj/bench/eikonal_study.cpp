// Convergence study behind the Dijkstra tolerance used by the tests:
// worst |Phi_fmm - Phi_dijkstra| / h over random cost fields, per grid
// size, plus the point-exit cone error against the analytic distance.
#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "../tests/oracles.hpp"
#include "evac/potential.hpp"

int main() {
  fmt::print("{:>5} {:>14} {:>14} {:>14}\n", "n", "dijkstra/h", "cone/h", "cone_unit");
  for (int n : {8, 16, 32, 64, 128}) {
    const double h = 0.5;
    double worst = 0.0;
    for (unsigned seed = 1; seed <= 50; ++seed) {
      std::mt19937 gen(seed);
      std::uniform_real_distribution<double> cost(0.5, 2.0);
      evac::ScalarField u(n, n, h);
      for (double& v : u.values()) v = cost(gen);
      const std::vector<std::size_t> exits{u.index(static_cast<int>(gen() % n), 0)};
      const auto phi = evac::solve_eikonal(u, exits);
      const std::vector<double> uv(u.values().begin(), u.values().end());
      const auto ref = oracle::dijkstra8(n, n, h, uv, exits);
      for (std::size_t k = 0; k < ref.size(); ++k) worst = std::max(worst, std::abs(phi[k] - ref[k]));
    }
    evac::ScalarField one(n, n, h, 1.0);
    const std::vector<std::size_t> corner{0};
    const auto phi = evac::solve_eikonal(one, corner);
    double cone = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) cone = std::max(cone, std::abs(phi(i, j) - h * std::hypot(i, j)));
    const double hu = 1.0 / n;
    evac::ScalarField unit(n, n, hu, 1.0);
    const auto phu = evac::solve_eikonal(unit, corner);
    double cu = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) cu = std::max(cu, std::abs(phu(i, j) - hu * std::hypot(i, j)));
    fmt::print("{:>5} {:>14.4f} {:>14.4f} {:>14.6f}\n", n, worst / h, cone / h, cu);
  }
}
