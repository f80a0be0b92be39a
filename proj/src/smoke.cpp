#include "evac/smoke.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "evac/error.hpp"

namespace evac {

ScalarField fire_field(const Scenario& s, const GridMask& grid) {
  ScalarField H = grid.make_field(0.0);
  if (!s.fire.present) return H;
  const auto& f = s.fire;
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      const double r = norm(grid.center(i, j) - f.center);
      if (r >= f.radius) continue;
      H(i, j) = f.kappa > 0.0 ? f.amplitude * std::exp(-f.kappa * r / f.length) : f.amplitude;
    }
  }
  return H;
}

ScalarField mollify(const ScalarField& H, double eps) {
  if (eps <= 0.0) return H;
  const double h = H.h();
  const double cutoff = 3.0 * eps / h;  // in cells
  const int reach = static_cast<int>(std::floor(cutoff));
  if (reach == 0) return H;

  std::vector<double> kernel;
  for (int dj = -reach; dj <= reach; ++dj) {
    for (int di = -reach; di <= reach; ++di) {
      const double r2 = double(di) * di + double(dj) * dj;
      kernel.push_back(r2 <= cutoff * cutoff ? std::exp(-r2 * h * h / (2.0 * eps * eps)) : 0.0);
    }
  }
  const int side = 2 * reach + 1;

  ScalarField out(H.nx(), H.ny(), h, 0.0);
  for (int j = 0; j < H.ny(); ++j) {
    for (int i = 0; i < H.nx(); ++i) {
      const double v = H(i, j);
      if (v == 0.0) continue;
      double wsum = 0.0;
      for (int dj = -reach; dj <= reach; ++dj) {
        for (int di = -reach; di <= reach; ++di) {
          if (H.contains(i + di, j + dj)) wsum += kernel[(dj + reach) * side + di + reach];
        }
      }
      for (int dj = -reach; dj <= reach; ++dj) {
        for (int di = -reach; di <= reach; ++di) {
          if (!H.contains(i + di, j + dj)) continue;
          out(i + di, j + dj) += v * kernel[(dj + reach) * side + di + reach] / wsum;
        }
      }
    }
  }
  return out;
}

SmokeModel SmokeModel::make(const GridMask& mask, ScalarField diffusivity, ScalarField source,
                            Vec2 drift, double lambda) {
  SmokeModel m;
  m.mask = mask;
  m.diffusivity = std::move(diffusivity);
  m.source = std::move(source);
  m.drift = drift;
  m.lambda = lambda;
  m.exit_faces.assign(mask.size(), 0);
  for (const auto& f : mask.exit_faces()) ++m.exit_faces[f.cell];
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (mask[k] == CellType::Obstacle) m.source[k] = 0.0;
  }
  return m;
}

SmokeModel SmokeModel::from_scenario(const Scenario& s, const GridMask& mask,
                                     const ScalarField& H_eps) {
  ScalarField source = H_eps;
  for (std::size_t k = 0; k < source.size(); ++k) source[k] *= s.physics.y_s;
  return make(mask, mask.make_field(s.physics.D), std::move(source), s.physics.drift,
              s.physics.lambda);
}

SmokeState initial_smoke(const SmokeModel& m) { return {m.mask.make_field(0.0), 0.0}; }

double max_stable_dt(const SmokeModel& m) {
  double d_max = 0.0;
  for (std::size_t k = 0; k < m.diffusivity.size(); ++k) {
    if (m.mask[k] != CellType::Obstacle) d_max = std::max(d_max, m.diffusivity[k]);
  }
  const double h = m.mask.h();
  const double rate = 4.0 * d_max / (h * h) + (std::abs(m.drift.x) + std::abs(m.drift.y)) / h +
                      2.0 * m.lambda / h;
  return rate > 0.0 ? 0.9 / rate : kInf;
}

namespace {

double face_diffusivity(double a, double b) { return a + b > 0.0 ? 2.0 * a * b / (a + b) : 0.0; }

void check_dt(const SmokeModel& m, double dt) {
  const double bound = max_stable_dt(m);
  if (!(dt > 0.0) || dt > bound * (1.0 + 1e-12)) {
    throw UnstableTimestep(fmt::format("smoke dt {} outside (0, {}]", dt, bound));
  }
}

void finish(SmokeState& out) {
  for (std::size_t k = 0; k < out.s.size(); ++k) {
    const double v = out.s[k];
    if (v < -1e-14) {
      throw NegativeDensity(fmt::format("smoke density {} at cell {} after step", v, k));
    }
    if (v < 0.0) out.s[k] = 0.0;
  }
}

}  // namespace

SmokeState step_smoke(const SmokeModel& m, const SmokeState& st, double dt) {
  check_dt(m, dt);
  const auto& mask = m.mask;
  const int nx = mask.nx();
  const int ny = mask.ny();
  const double h = mask.h();
  const auto& s = st.s;
  SmokeState out{ScalarField(nx, ny, h, 0.0), st.t + dt};

  constexpr int di[4] = {1, -1, 0, 0};
  constexpr int dj[4] = {0, 0, 1, -1};
  const double vn[4] = {m.drift.x, -m.drift.x, m.drift.y, -m.drift.y};

#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t c = mask.index(i, j);
      if (mask[c] == CellType::Obstacle) continue;
      const double sc = s[c];
      double inflow = 0.0;  // net flux into c per unit face length
      for (int f = 0; f < 4; ++f) {
        const int ii = i + di[f];
        const int jj = j + dj[f];
        if (!mask.walkable(ii, jj)) continue;
        const std::size_t n = mask.index(ii, jj);
        const double sn = s[n];
        const double D = face_diffusivity(m.diffusivity[c], m.diffusivity[n]);
        inflow += D * (sn - sc) / h;
        inflow -= vn[f] > 0.0 ? vn[f] * sc : vn[f] * sn;
      }
      inflow -= m.exit_faces[c] * m.lambda * sc;
      out.s[c] = sc + dt * (inflow / h + m.source[c]);
    }
  }
  finish(out);
  return out;
}

namespace serial {

SmokeState step_smoke(const SmokeModel& m, const SmokeState& st, double dt) {
  check_dt(m, dt);
  const auto& mask = m.mask;
  const double h = mask.h();
  const auto& s = st.s;
  SmokeState out{s, st.t + dt};
  std::vector<double> change(s.size(), 0.0);

  // East and north faces; each interior face visited once.
  for (int j = 0; j < mask.ny(); ++j) {
    for (int i = 0; i < mask.nx(); ++i) {
      if (!mask.walkable(i, j)) continue;
      const std::size_t c = mask.index(i, j);
      const std::pair<int, int> neighbours[2] = {{i + 1, j}, {i, j + 1}};
      const double vel[2] = {m.drift.x, m.drift.y};
      for (int f = 0; f < 2; ++f) {
        auto [ii, jj] = neighbours[f];
        if (!mask.walkable(ii, jj)) continue;
        const std::size_t n = mask.index(ii, jj);
        const double D = face_diffusivity(m.diffusivity[c], m.diffusivity[n]);
        const double flux = -D * (s[n] - s[c]) / h + (vel[f] > 0.0 ? vel[f] * s[c] : vel[f] * s[n]);
        change[c] -= flux;
        change[n] += flux;
      }
    }
  }
  for (const auto& face : mask.exit_faces()) change[face.cell] -= m.lambda * s[face.cell];

  for (std::size_t k = 0; k < s.size(); ++k) {
    if (mask[k] == CellType::Obstacle) continue;
    out.s[k] = s[k] + dt * (change[k] / h + m.source[k]);
  }
  finish(out);
  return out;
}

}  // namespace serial

double smoke_mass(const SmokeState& st) { return st.s.integral(); }

double exit_outflow(const SmokeModel& m, const SmokeState& st) {
  double sum = 0.0;
  for (const auto& face : m.mask.exit_faces()) sum += m.lambda * st.s[face.cell];
  return sum * m.mask.h();
}

double source_rate(const SmokeModel& m) { return m.source.integral(); }

double smoke_at(const SmokeState& st, Vec2 x) { return std::max(0.0, interpolate(st.s, x)); }

}  // namespace evac
