#pragma once

#include <vector>

#include "evac/field.hpp"
#include "evac/geometry.hpp"

namespace evac {

/// H(x): R inside the fire disc (optionally R exp(-kappa |x - x0| / L)), 0 outside.
ScalarField fire_field(const Scenario& s, const GridMask& grid);

/// Gaussian smoothing with standard deviation `eps` (truncated at 3 eps).
/// Each cell spreads its value over the in-grid part of the kernel with
/// weights renormalised to 1, so the integral is preserved. eps = 0 is the
/// identity.
ScalarField mollify(const ScalarField& H, double eps);

/// Static coefficients of the smoke transport problem.
struct SmokeModel {
  GridMask mask;
  ScalarField diffusivity;  // per cell [m^2/s]; faces use the harmonic mean
  ScalarField source;       // y_s * H_eps, zero on obstacle cells
  Vec2 drift;               // [m/s]
  double lambda = 0.0;      // Robin exchange on exit faces [m/s]
  std::vector<std::uint8_t> exit_faces;  // exit face count per cell

  /// Uniform D, drift and lambda from the scenario physics.
  static SmokeModel from_scenario(const Scenario& s, const GridMask& mask,
                                  const ScalarField& H_eps);
  static SmokeModel make(const GridMask& mask, ScalarField diffusivity, ScalarField source,
                         Vec2 drift, double lambda);
};

struct SmokeState {
  ScalarField s;
  double t = 0.0;
};

SmokeState initial_smoke(const SmokeModel& m);

/// Largest dt keeping every update coefficient non-negative, with a 0.9
/// safety factor: 0.9 / (4 D_max / h^2 + (|v_x| + |v_y|) / h + 2 lambda / h).
double max_stable_dt(const SmokeModel& m);

/// One forward-Euler finite-volume step: harmonic-mean diffusion, first-order
/// upwind drift, source, zero flux on walls/obstacles and lambda s outflow
/// through exit faces. Cells are updated independently (OpenMP).
/// Throws UnstableTimestep, NegativeDensity.
SmokeState step_smoke(const SmokeModel& m, const SmokeState& st, double dt);

/// Total smoke sum(s) h^2.
double smoke_mass(const SmokeState& st);
/// Instantaneous exit outflow sum over exit faces of lambda s h.
double exit_outflow(const SmokeModel& m, const SmokeState& st);
/// Production rate sum(source) h^2.
double source_rate(const SmokeModel& m);

/// Bilinear sample of s at x, never negative. Throws OutOfDomain.
double smoke_at(const SmokeState& st, Vec2 x);

namespace serial {
/// Face-by-face flux accumulation; reference for step_smoke.
SmokeState step_smoke(const SmokeModel& m, const SmokeState& st, double dt);
}  // namespace serial

}  // namespace evac
