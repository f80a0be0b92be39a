#include "evac/field.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "evac/error.hpp"

namespace evac {

ScalarField::ScalarField(int nx, int ny, double h, double fill)
    : nx_(nx), ny_(ny), h_(h),
      values_(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), fill) {}

double ScalarField::integral() const {
  double sum = 0.0;
  for (double v : values_) {
    if (std::isfinite(v)) sum += v;
  }
  return sum * h_ * h_;
}

double ScalarField::max_finite() const {
  double m = 0.0;
  for (double v : values_) {
    if (std::isfinite(v)) m = std::max(m, v);
  }
  return m;
}

namespace {

struct Stencil {
  int i0, j0, i1, j1;
  double tx, ty;
};

// Surrounding cell centres of x, clamped to the grid.
Stencil locate(const ScalarField& f, Vec2 x) {
  auto axis = [](double coord, double h, int n, int& lo, int& hi, double& t) {
    double g = coord / h - 0.5;
    if (n == 1 || g <= 0.0) {
      lo = hi = 0;
      t = 0.0;
      return;
    }
    if (g >= n - 1) {
      lo = hi = n - 1;
      t = 0.0;
      return;
    }
    lo = static_cast<int>(std::floor(g));
    hi = lo + 1;
    t = g - lo;
  };
  Stencil s{};
  axis(x.x, f.h(), f.nx(), s.i0, s.i1, s.tx);
  axis(x.y, f.h(), f.ny(), s.j0, s.j1, s.ty);
  return s;
}

void check_inside(const ScalarField& f, Vec2 x) {
  const double tol = 1e-9 * f.h();
  if (!(x.x >= -tol && x.y >= -tol && x.x <= f.width() + tol && x.y <= f.height() + tol)) {
    throw OutOfDomain(fmt::format("point ({}, {}) outside [0, {}] x [0, {}]", x.x, x.y,
                                  f.width(), f.height()));
  }
}

template <class Sample>
auto blend(const Stencil& s, Sample&& sample) {
  const int is[4] = {s.i0, s.i1, s.i0, s.i1};
  const int js[4] = {s.j0, s.j0, s.j1, s.j1};
  const double ws[4] = {(1 - s.tx) * (1 - s.ty), s.tx * (1 - s.ty), (1 - s.tx) * s.ty,
                        s.tx * s.ty};
  using Value = decltype(sample(0, 0).value);
  Value acc{};
  double wsum = 0.0;
  for (int k = 0; k < 4; ++k) {
    if (ws[k] == 0.0) continue;
    auto r = sample(is[k], js[k]);
    if (!r.ok) continue;
    acc += ws[k] * r.value;
    wsum += ws[k];
  }
  return std::pair{acc, wsum};
}

}  // namespace

double interpolate(const ScalarField& f, Vec2 x) {
  check_inside(f, x);
  auto s = locate(f, x);
  struct R { double value; bool ok; };
  auto [acc, wsum] = blend(s, [&](int i, int j) {
    double v = f(i, j);
    return R{v, std::isfinite(v)};
  });
  if (wsum == 0.0) {
    // All weighted corners infinite (or the point sits exactly on one).
    double v = f(s.tx < 0.5 ? s.i0 : s.i1, s.ty < 0.5 ? s.j0 : s.j1);
    return std::isfinite(v) ? v : kInf;
  }
  return acc / wsum;
}

Vec2 cell_gradient(const ScalarField& f, int i, int j) {
  const double c = f(i, j);
  const double h = f.h();
  auto axis = [&](int di, int dj) {
    const bool has_lo = f.contains(i - di, j - dj) && std::isfinite(f(i - di, j - dj));
    const bool has_hi = f.contains(i + di, j + dj) && std::isfinite(f(i + di, j + dj));
    if (has_lo && has_hi) return (f(i + di, j + dj) - f(i - di, j - dj)) / (2.0 * h);
    if (has_hi) return (f(i + di, j + dj) - c) / h;
    if (has_lo) return (c - f(i - di, j - dj)) / h;
    return 0.0;
  };
  return {axis(1, 0), axis(0, 1)};
}

Vec2 gradient_at(const ScalarField& f, Vec2 x) {
  check_inside(f, x);
  auto s = locate(f, x);
  struct R { Vec2 value; bool ok; };
  auto [acc, wsum] = blend(s, [&](int i, int j) {
    if (!std::isfinite(f(i, j))) return R{{}, false};
    return R{cell_gradient(f, i, j), true};
  });
  if (wsum == 0.0) return {};
  return acc * (1.0 / wsum);
}

void write_matrix(std::ostream& out, const ScalarField& f,
                  std::span<const std::string> comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "nx " << f.nx() << '\n' << "ny " << f.ny() << '\n' << fmt::format("h {:.17g}\n", f.h());
  std::string line;
  for (int j = 0; j < f.ny(); ++j) {
    line.clear();
    for (int i = 0; i < f.nx(); ++i) {
      if (i) line += ' ';
      line += fmt::format("{:.17g}", f(i, j));
    }
    line += '\n';
    out << line;
  }
}

ScalarField read_matrix(std::istream& in) {
  std::string line;
  auto next_line = [&]() -> std::string {
    while (std::getline(in, line)) {
      if (!line.empty() && line[0] == '#') continue;
      return line;
    }
    throw Error("matrix: unexpected end of input");
  };
  auto header = [&](const char* name) {
    std::istringstream s(next_line());
    std::string key;
    std::string value;
    s >> key >> value;
    if (key != name) throw Error(fmt::format("matrix: expected '{}' header", name));
    return value;
  };
  const int nx = std::stoi(header("nx"));
  const int ny = std::stoi(header("ny"));
  const double h = std::strtod(header("h").c_str(), nullptr);
  ScalarField f(nx, ny, h);
  for (int j = 0; j < ny; ++j) {
    std::istringstream row(next_line());
    std::string tok;
    for (int i = 0; i < nx; ++i) {
      if (!(row >> tok)) throw Error(fmt::format("matrix: row {} too short", j));
      f(i, j) = std::strtod(tok.c_str(), nullptr);
    }
  }
  return f;
}

void save_matrix(const std::string& path, const ScalarField& f,
                 std::span<const std::string> comments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  write_matrix(out, f, comments);
}

ScalarField load_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  return read_matrix(in);
}

}  // namespace evac
