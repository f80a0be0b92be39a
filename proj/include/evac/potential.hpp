#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "evac/field.hpp"
#include "evac/geometry.hpp"

namespace evac {

struct CostParams {
  double alpha = 1.0;       // base walking effort [1/m]
  bool fire_aware = false;  // w
  double r_G = 0.5;         // obstacle repulsion range [m]
};

/// +inf where d = 0, 1/d for 0 < d <= r_G, 0 beyond.
ScalarField obstacle_cost(const ScalarField& distance, double r_G);

/// alpha + u_obs + w H, cellwise. Throws DimensionMismatch.
ScalarField marginal_cost(const CostParams& p, const ScalarField& u_obs,
                          const ScalarField& fire);

/// Fast marching solution of |grad Phi| = u with Phi = 0 on `exits`.
///
/// First-order upwind stencil; cells with u = +inf are never entered and
/// keep Phi = +inf, as do cells with no path to an exit. The narrow band is
/// a binary heap ordered by (value, cell index).
ScalarField solve_eikonal(const ScalarField& u, std::span<const std::size_t> exits);

/// Upwind local solve at (i, j) from the current neighbour values of `phi`.
/// The fast-marching output is a fixed point of this update on every
/// reachable non-exit cell.
double eikonal_local_update(const ScalarField& phi, const ScalarField& u, int i, int j);

/// Potentials for fire-unaware (w = 0) and fire-aware (w = 1) agents.
struct Potentials {
  ScalarField unaware;
  ScalarField aware;
};

/// Builds both potentials once from the static geometry and fire field.
Potentials build_potentials(const Scenario& s, const GridMask& mask, const ScalarField& fire);

}  // namespace evac
