#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evac/config.hpp"
#include "evac/field.hpp"
#include "evac/vec2.hpp"

namespace evac {

/// Axis-aligned rectangle [x0, x1] x [y0, y1].
struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  bool contains(Vec2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
};

enum class Side : std::uint8_t { Left, Right, Bottom, Top };

/// Exit opening on one side of the domain boundary, spanning [lo, hi]
/// along that side.
struct ExitSegment {
  Side side = Side::Right;
  double lo = 0.0;
  double hi = 0.0;
};

struct FireSpec {
  bool present = false;
  Vec2 center;
  double radius = 0.0;     // r0 [m]
  double amplitude = 0.0;  // R [1/s]
  double mollify = 0.0;    // Gaussian width of H_eps [m]; 0 keeps the flat disc
  double kappa = 0.0;      // optional exponential profile R exp(-kappa |x - x0| / L)
  double length = 1.0;     // L [m]
};

struct Population {
  int active = 0;
  int passive = 0;
  std::optional<Rect> spawn;  // defaults to the whole domain
};

enum class DynamicsMode : std::uint8_t { SecondOrderPassive, OverdampedBoth };

struct PhysicsParams {
  double alpha = 1.0;             // base walking effort [1/m]
  double r_G = 0.5;               // obstacle repulsion range [m]
  double v_s = 1.3;               // active walking speed [m/s]
  double r_s0 = 2.0;              // base sight radius [m]
  double D = 0.05;                // smoke diffusivity [m^2/s]
  Vec2 drift;                     // smoke drift [m/s]
  double y_s = 1.0;               // smoke production coefficient
  double lambda = 1.0;            // exit exchange coefficient [m/s]
  double a = 0.5;                 // Upsilon(s) = max(0, b - a s)
  double b = 1.0;
  Mat2 D_tilde{0.3, 0.0, 0.0, 0.3};  // passive noise matrix
  double delta = 0.5;             // discomfort ball radius [m]
  double awareness_radius = 3.0;  // [m]
  DynamicsMode mode = DynamicsMode::SecondOrderPassive;
  bool upsilon_scaling = false;   // scale v_s by Upsilon(s) for active agents
  double passive_speed_cap = 2.0; // [m/s], second-order mode only
  double p_max = 0.0;             // 0: use N |Omega|
};

/// Geometry, physics and population of one continuous run.
struct Scenario {
  double width = 0.0;
  double height = 0.0;
  double h = 0.0;
  std::vector<Rect> obstacles;
  std::vector<ExitSegment> exits;
  FireSpec fire;
  Population population;
  PhysicsParams physics;
};

/// Reads [domain], [obstacles], [exits], [fire], [population] and
/// [physics]; applies defaults for optional keys and validates.
Scenario build_scenario(const ConfigDocument& doc);

/// Throws on any invariant violation of an already-built scenario.
void validate(const Scenario& s);

enum class CellType : std::uint8_t { Free, Obstacle, Exit, Fire };

struct ExitFace {
  std::size_t cell = 0;
  Side side = Side::Right;
};

/// Cell classification of a scenario on its computational grid.
class GridMask {
public:
  GridMask() = default;
  GridMask(int nx, int ny, double h);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double h() const { return h_; }
  std::size_t size() const { return cells_.size(); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) +
           static_cast<std::size_t>(i);
  }
  bool contains(int i, int j) const { return i >= 0 && j >= 0 && i < nx_ && j < ny_; }

  CellType operator()(int i, int j) const { return cells_[index(i, j)]; }
  CellType& operator()(int i, int j) { return cells_[index(i, j)]; }
  CellType operator[](std::size_t k) const { return cells_[k]; }

  bool walkable(int i, int j) const {
    return contains(i, j) && cells_[index(i, j)] != CellType::Obstacle;
  }

  /// Cell containing point p (clamped to the grid).
  std::pair<int, int> cell_of(Vec2 p) const;
  Vec2 center(int i, int j) const { return {(i + 0.5) * h_, (j + 0.5) * h_}; }

  ScalarField make_field(double fill = 0.0) const { return ScalarField(nx_, ny_, h_, fill); }

  std::vector<std::size_t> cells_of(CellType t) const;
  const std::vector<ExitFace>& exit_faces() const { return exit_faces_; }
  void add_exit_face(ExitFace f) { exit_faces_.push_back(f); }

  friend bool operator==(const GridMask&, const GridMask&);

private:
  int nx_ = 0;
  int ny_ = 0;
  double h_ = 1.0;
  std::vector<CellType> cells_;
  std::vector<ExitFace> exit_faces_;
};

bool operator==(const GridMask& a, const GridMask& b);

/// Classifies every cell by the position of its centre: Obstacle, then Exit
/// (boundary cells facing an exit segment), then Fire, else Free.
GridMask rasterize(const Scenario& s);

/// Exact Euclidean distance from each cell centre to the nearest Obstacle
/// cell centre (0 on obstacles, +inf everywhere when there are none).
ScalarField distance_to_obstacles(const GridMask& m);

}  // namespace evac
