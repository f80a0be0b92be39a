#include "evac/geometry.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "evac/error.hpp"

namespace evac {
namespace {

Rect read_rect(const std::string& text, const std::string& what) {
  auto v = parse_numbers(text, what);
  if (v.size() != 4) throw ConfigError(what + ": expected 'x0 y0 x1 y1'");
  return {v[0], v[1], v[2], v[3]};
}

ExitSegment read_exit(const std::string& text, double width, double height) {
  auto v = parse_numbers(text, "exits.segment");
  if (v.size() != 4) throw ConfigError("exits.segment: expected 'x0 y0 x1 y1'");
  const double x0 = v[0], y0 = v[1], x1 = v[2], y1 = v[3];
  const double tol = 1e-9 * std::max(width, height);
  auto near = [tol](double a, double b) { return std::abs(a - b) <= tol; };
  ExitSegment e;
  if (near(x0, x1) && (near(x0, 0.0) || near(x0, width))) {
    e.side = near(x0, 0.0) ? Side::Left : Side::Right;
    e.lo = std::min(y0, y1);
    e.hi = std::max(y0, y1);
    if (e.lo < -tol || e.hi > height + tol) {
      throw GeometryViolation("exit segment extends past the domain edge");
    }
  } else if (near(y0, y1) && (near(y0, 0.0) || near(y0, height))) {
    e.side = near(y0, 0.0) ? Side::Bottom : Side::Top;
    e.lo = std::min(x0, x1);
    e.hi = std::max(x0, x1);
    if (e.lo < -tol || e.hi > width + tol) {
      throw GeometryViolation("exit segment extends past the domain edge");
    }
  } else {
    throw GeometryViolation(
        fmt::format("exit segment ({} {} {} {}) does not lie on the domain boundary", x0, y0,
                    x1, y1));
  }
  if (e.hi <= e.lo) throw GeometryViolation("exit segment has zero length");
  return e;
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw NonPositiveParameter(name);
}

// Endpoints of an exit in world coordinates.
std::pair<Vec2, Vec2> exit_endpoints(const ExitSegment& e, double width, double height) {
  switch (e.side) {
    case Side::Left: return {{0.0, e.lo}, {0.0, e.hi}};
    case Side::Right: return {{width, e.lo}, {width, e.hi}};
    case Side::Bottom: return {{e.lo, 0.0}, {e.hi, 0.0}};
    case Side::Top: return {{e.lo, height}, {e.hi, height}};
  }
  return {};
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double t = std::clamp(dot(p - a, ab) / norm2(ab), 0.0, 1.0);
  return norm(p - (a + t * ab));
}

}  // namespace

void validate(const Scenario& s) {
  require_positive(s.width, "domain.width");
  require_positive(s.height, "domain.height");
  require_positive(s.h, "domain.h");
  for (const auto& r : s.obstacles) {
    if (!(r.x1 > r.x0 && r.y1 > r.y0)) {
      throw GeometryViolation("obstacle rectangle must have x1 > x0 and y1 > y0");
    }
    if (r.x0 < 0.0 || r.y0 < 0.0 || r.x1 > s.width || r.y1 > s.height) {
      throw GeometryViolation(fmt::format("obstacle ({} {} {} {}) extends outside the domain",
                                          r.x0, r.y0, r.x1, r.y1));
    }
  }
  if (s.exits.empty()) throw MissingKey("exits.segment");
  if (s.population.active < 0 || s.population.passive < 0) {
    throw ConfigError("population counts must be non-negative");
  }
  if (s.population.spawn) {
    const auto& r = *s.population.spawn;
    if (!(r.x1 > r.x0 && r.y1 > r.y0) || r.x0 < 0.0 || r.y0 < 0.0 || r.x1 > s.width ||
        r.y1 > s.height) {
      throw GeometryViolation("population.spawn must be a non-empty rectangle inside the domain");
    }
  }
  if (s.fire.present) {
    require_positive(s.fire.radius, "fire.radius");
    if (s.fire.amplitude < 0.0) throw ConfigError("fire.amplitude must be non-negative");
    if (s.fire.mollify < 0.0) throw ConfigError("fire.mollify must be non-negative");
    if (s.fire.kappa < 0.0) throw ConfigError("fire.kappa must be non-negative");
    require_positive(s.fire.length, "fire.length");
    const Vec2 c = s.fire.center;
    if (c.x < 0.0 || c.y < 0.0 || c.x > s.width || c.y > s.height) {
      throw GeometryViolation("fire centre lies outside the domain");
    }
    for (const auto& e : s.exits) {
      auto [a, b] = exit_endpoints(e, s.width, s.height);
      if (point_segment_distance(c, a, b) < s.fire.radius) {
        throw GeometryViolation("fire disc intersects an exit");
      }
    }
  }
  const auto& p = s.physics;
  require_positive(p.alpha, "physics.alpha");
  require_positive(p.r_G, "physics.r_G");
  require_positive(p.v_s, "physics.v_s");
  require_positive(p.r_s0, "physics.r_s0");
  require_positive(p.D, "physics.D");
  require_positive(p.b, "physics.b");
  require_positive(p.delta, "physics.delta");
  require_positive(p.awareness_radius, "physics.awareness_radius");
  require_positive(p.passive_speed_cap, "physics.passive_speed_cap");
  if (p.a < 0.0) throw ConfigError("physics.a must be non-negative");
  if (p.y_s < 0.0) throw ConfigError("physics.y_s must be non-negative");
  if (p.lambda < 0.0) throw ConfigError("physics.lambda must be non-negative");
  if (p.p_max < 0.0) throw ConfigError("physics.p_max must be non-negative");
  for (double d : {p.D_tilde.a11, p.D_tilde.a12, p.D_tilde.a21, p.D_tilde.a22}) {
    if (!std::isfinite(d)) throw ConfigError("physics.D_tilde entries must be finite");
  }
}

Scenario build_scenario(const ConfigDocument& doc) {
  Scenario s;
  s.width = doc.get_double("domain", "width");
  s.height = doc.get_double("domain", "height");
  s.h = doc.get_double("domain", "h");
  require_positive(s.width, "domain.width");
  require_positive(s.height, "domain.height");
  require_positive(s.h, "domain.h");

  for (const auto& r : doc.all("obstacles", "rect")) {
    s.obstacles.push_back(read_rect(r, "obstacles.rect"));
  }
  for (const auto& e : doc.all("exits", "segment")) {
    s.exits.push_back(read_exit(e, s.width, s.height));
  }
  if (s.exits.empty()) throw MissingKey("exits.segment");

  if (doc.has_section("fire")) {
    auto c = doc.get_numbers("fire", "center", 2);
    s.fire.present = true;
    s.fire.center = {c[0], c[1]};
    s.fire.radius = doc.get_double("fire", "radius");
    s.fire.amplitude = doc.get_double("fire", "amplitude");
    s.fire.mollify = doc.get_double("fire", "mollify", 0.0);
    s.fire.kappa = doc.get_double("fire", "kappa", 0.0);
    s.fire.length = doc.get_double("fire", "length", 1.0);
  }

  s.population.active = static_cast<int>(doc.get_int("population", "active", 0));
  s.population.passive = static_cast<int>(doc.get_int("population", "passive", 0));
  if (doc.has("population", "spawn")) {
    s.population.spawn = read_rect(doc.get("population", "spawn"), "population.spawn");
  }

  auto& p = s.physics;
  const std::string ph = "physics";
  p.alpha = doc.get_double(ph, "alpha", p.alpha);
  p.r_G = doc.get_double(ph, "r_G", p.r_G);
  p.v_s = doc.get_double(ph, "v_s", p.v_s);
  p.r_s0 = doc.get_double(ph, "r_s0", p.r_s0);
  p.D = doc.get_double(ph, "D", p.D);
  if (doc.has(ph, "drift")) {
    auto v = doc.get_numbers(ph, "drift", 2);
    p.drift = {v[0], v[1]};
  }
  p.y_s = doc.get_double(ph, "y_s", p.y_s);
  p.lambda = doc.get_double(ph, "lambda", p.lambda);
  p.a = doc.get_double(ph, "a", p.a);
  p.b = doc.get_double(ph, "b", p.b);
  if (doc.has(ph, "D_tilde")) {
    auto v = parse_numbers(doc.get(ph, "D_tilde"), "physics.D_tilde");
    if (v.size() == 1) {
      p.D_tilde = {v[0], 0.0, 0.0, v[0]};
    } else if (v.size() == 4) {
      p.D_tilde = {v[0], v[1], v[2], v[3]};
    } else {
      throw ConfigError("physics.D_tilde: expected 1 or 4 numbers");
    }
  }
  p.delta = doc.get_double(ph, "delta", p.delta);
  p.awareness_radius = doc.get_double(ph, "awareness_radius", p.awareness_radius);
  const auto mode = doc.get_string(ph, "mode", "second_order");
  if (mode == "second_order") {
    p.mode = DynamicsMode::SecondOrderPassive;
  } else if (mode == "overdamped") {
    p.mode = DynamicsMode::OverdampedBoth;
  } else {
    throw ConfigError("physics.mode must be 'second_order' or 'overdamped'");
  }
  p.upsilon_scaling = doc.get_bool(ph, "upsilon_scaling", p.upsilon_scaling);
  p.passive_speed_cap = doc.get_double(ph, "passive_speed_cap", p.passive_speed_cap);
  p.p_max = doc.get_double(ph, "p_max", p.p_max);

  validate(s);
  return s;
}

GridMask::GridMask(int nx, int ny, double h)
    : nx_(nx), ny_(ny), h_(h),
      cells_(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), CellType::Free) {}

std::pair<int, int> GridMask::cell_of(Vec2 p) const {
  int i = static_cast<int>(std::floor(p.x / h_));
  int j = static_cast<int>(std::floor(p.y / h_));
  return {std::clamp(i, 0, nx_ - 1), std::clamp(j, 0, ny_ - 1)};
}

std::vector<std::size_t> GridMask::cells_of(CellType t) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < cells_.size(); ++k) {
    if (cells_[k] == t) out.push_back(k);
  }
  return out;
}

bool operator==(const GridMask& a, const GridMask& b) {
  if (a.nx_ != b.nx_ || a.ny_ != b.ny_ || a.h_ != b.h_ || a.cells_ != b.cells_) return false;
  if (a.exit_faces_.size() != b.exit_faces_.size()) return false;
  for (std::size_t k = 0; k < a.exit_faces_.size(); ++k) {
    if (a.exit_faces_[k].cell != b.exit_faces_[k].cell ||
        a.exit_faces_[k].side != b.exit_faces_[k].side) {
      return false;
    }
  }
  return true;
}

GridMask rasterize(const Scenario& s) {
  const int nx = std::max(1, static_cast<int>(std::ceil(s.width / s.h - 1e-9)));
  const int ny = std::max(1, static_cast<int>(std::ceil(s.height / s.h - 1e-9)));
  GridMask m(nx, ny, s.h);

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Vec2 c = m.center(i, j);
      if (std::any_of(s.obstacles.begin(), s.obstacles.end(),
                      [c](const Rect& r) { return r.contains(c); })) {
        m(i, j) = CellType::Obstacle;
      }
    }
  }

  for (const auto& e : s.exits) {
    const bool vertical = e.side == Side::Left || e.side == Side::Right;
    const int n = vertical ? ny : nx;
    for (int k = 0; k < n; ++k) {
      const double along = (k + 0.5) * s.h;
      if (along < e.lo || along > e.hi) continue;
      int i = 0, j = 0;
      switch (e.side) {
        case Side::Left: i = 0; j = k; break;
        case Side::Right: i = nx - 1; j = k; break;
        case Side::Bottom: i = k; j = 0; break;
        case Side::Top: i = k; j = ny - 1; break;
      }
      if (m(i, j) == CellType::Obstacle) continue;
      m(i, j) = CellType::Exit;
      m.add_exit_face({m.index(i, j), e.side});
    }
  }

  if (s.fire.present) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        if (m(i, j) != CellType::Free) continue;
        if (norm(m.center(i, j) - s.fire.center) < s.fire.radius) m(i, j) = CellType::Fire;
      }
    }
  }
  return m;
}

namespace {

// One-dimensional squared distance transform of sampled function f
// (lower envelope of parabolas), in cell units.
void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
            std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    auto intersect = [&](int p) {
      return ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
    };
    double s = intersect(v[k]);
    while (s <= z[k]) {
      --k;
      s = intersect(v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

ScalarField distance_to_obstacles(const GridMask& m) {
  const int nx = m.nx();
  const int ny = m.ny();
  ScalarField out = m.make_field(kInf);
  if (m.cells_of(CellType::Obstacle).empty()) return out;

  // Large finite stand-in for "no site" keeps the parabola algebra finite.
  const double far = 1e30;
  ScalarField sq = m.make_field(far);
  const int n = std::max(nx, ny);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);

  for (int i = 0; i < nx; ++i) {
    f.resize(ny);
    d.resize(ny);
    for (int j = 0; j < ny; ++j) f[j] = m(i, j) == CellType::Obstacle ? 0.0 : far;
    edt_1d(f, d, v, z);
    for (int j = 0; j < ny; ++j) sq(i, j) = d[j];
  }
  for (int j = 0; j < ny; ++j) {
    f.resize(nx);
    d.resize(nx);
    for (int i = 0; i < nx; ++i) f[i] = sq(i, j);
    edt_1d(f, d, v, z);
    for (int i = 0; i < nx; ++i) out(i, j) = std::sqrt(d[i]) * m.h();
  }
  return out;
}

}  // namespace evac
