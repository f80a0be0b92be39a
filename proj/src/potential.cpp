#include "evac/potential.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <utility>

#include "evac/error.hpp"

namespace evac {

ScalarField obstacle_cost(const ScalarField& distance, double r_G) {
  ScalarField out(distance.nx(), distance.ny(), distance.h());
  for (std::size_t k = 0; k < distance.size(); ++k) {
    const double d = distance[k];
    if (d == 0.0) {
      out[k] = kInf;
    } else if (d <= r_G) {
      out[k] = 1.0 / d;
    } else {
      out[k] = 0.0;
    }
  }
  return out;
}

ScalarField marginal_cost(const CostParams& p, const ScalarField& u_obs,
                          const ScalarField& fire) {
  if (!u_obs.same_shape(fire)) {
    throw DimensionMismatch("marginal_cost: obstacle and fire fields differ in shape");
  }
  const double w = p.fire_aware ? 1.0 : 0.0;
  ScalarField u(u_obs.nx(), u_obs.ny(), u_obs.h());
  for (std::size_t k = 0; k < u.size(); ++k) {
    u[k] = std::isinf(u_obs[k]) ? kInf : p.alpha + u_obs[k] + w * fire[k];
  }
  return u;
}

namespace {

// Solves (phi - a)^2 + (phi - b)^2 = (u h)^2 with the one-sided fallback.
double upwind_solve(double a, double b, double cost) {
  if (a > b) std::swap(a, b);
  if (!std::isfinite(a)) return kInf;
  if (b - a >= cost) return a + cost;
  const double diff = a - b;
  return 0.5 * (a + b + std::sqrt(2.0 * cost * cost - diff * diff));
}

template <class Value>
double axis_min(const ScalarField& phi, int i, int j, int di, int dj, Value&& value) {
  double m = kInf;
  for (int s : {-1, 1}) {
    const int ii = i + s * di;
    const int jj = j + s * dj;
    if (phi.contains(ii, jj)) m = std::min(m, value(ii, jj));
  }
  return m;
}

}  // namespace

double eikonal_local_update(const ScalarField& phi, const ScalarField& u, int i, int j) {
  auto value = [&](int ii, int jj) { return phi(ii, jj); };
  const double a = axis_min(phi, i, j, 1, 0, value);
  const double b = axis_min(phi, i, j, 0, 1, value);
  return upwind_solve(a, b, u(i, j) * u.h());
}

ScalarField solve_eikonal(const ScalarField& u, std::span<const std::size_t> exits) {
  if (exits.empty()) throw NoExit();
  const int nx = u.nx();
  const int ny = u.ny();
  ScalarField phi(nx, ny, u.h(), kInf);
  std::vector<std::uint8_t> known(u.size(), 0);

  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> band;
  for (std::size_t e : exits) {
    phi[e] = 0.0;
    band.emplace(0.0, e);
  }

  auto known_value = [&](int ii, int jj) {
    const std::size_t k = phi.index(ii, jj);
    return known[k] ? phi[k] : kInf;
  };

  while (!band.empty()) {
    const auto [value, k] = band.top();
    band.pop();
    if (known[k] || value != phi[k]) continue;
    known[k] = 1;
    const int i = static_cast<int>(k % static_cast<std::size_t>(nx));
    const int j = static_cast<int>(k / static_cast<std::size_t>(nx));
    constexpr int di[4] = {1, -1, 0, 0};
    constexpr int dj[4] = {0, 0, 1, -1};
    for (int n = 0; n < 4; ++n) {
      const int ii = i + di[n];
      const int jj = j + dj[n];
      if (!phi.contains(ii, jj)) continue;
      const std::size_t kk = phi.index(ii, jj);
      if (known[kk] || !std::isfinite(u[kk])) continue;
      const double a = axis_min(phi, ii, jj, 1, 0, known_value);
      const double b = axis_min(phi, ii, jj, 0, 1, known_value);
      const double candidate = upwind_solve(a, b, u[kk] * u.h());
      if (candidate < phi[kk]) {
        phi[kk] = candidate;
        band.emplace(candidate, kk);
      }
    }
  }

  std::vector<std::uint8_t> is_exit(u.size(), 0);
  for (std::size_t e : exits) is_exit[e] = 1;
  bool any_walkable = false;
  bool any_reached = false;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (is_exit[k] || !std::isfinite(u[k])) continue;
    any_walkable = true;
    if (std::isfinite(phi[k])) {
      any_reached = true;
      break;
    }
  }
  if (any_walkable && !any_reached) throw AllUnreachable();
  return phi;
}

Potentials build_potentials(const Scenario& s, const GridMask& mask, const ScalarField& fire) {
  const auto u_obs = obstacle_cost(distance_to_obstacles(mask), s.physics.r_G);
  const auto exits = mask.cells_of(CellType::Exit);
  CostParams params{s.physics.alpha, false, s.physics.r_G};
  Potentials out;
  out.unaware = solve_eikonal(marginal_cost(params, u_obs, fire), exits);
  params.fire_aware = true;
  out.aware = solve_eikonal(marginal_cost(params, u_obs, fire), exits);
  return out;
}

}  // namespace evac
