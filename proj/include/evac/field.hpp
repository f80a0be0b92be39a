#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "evac/vec2.hpp"

namespace evac {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Uniform cell-centred grid of doubles over [0, nx*h] x [0, ny*h].
///
/// Cell (i, j) has centre ((i + 0.5) h, (j + 0.5) h); storage is row-major
/// with `i` fastest. Values may hold the +inf sentinel (obstacles,
/// unreachable cells).
class ScalarField {
public:
  ScalarField() = default;
  ScalarField(int nx, int ny, double h, double fill = 0.0);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double h() const { return h_; }
  std::size_t size() const { return values_.size(); }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) +
           static_cast<std::size_t>(i);
  }
  bool contains(int i, int j) const { return i >= 0 && j >= 0 && i < nx_ && j < ny_; }

  double& operator()(int i, int j) { return values_[index(i, j)]; }
  double operator()(int i, int j) const { return values_[index(i, j)]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  Vec2 center(int i, int j) const { return {(i + 0.5) * h_, (j + 0.5) * h_}; }
  double width() const { return nx_ * h_; }
  double height() const { return ny_ * h_; }

  bool same_shape(const ScalarField& o) const {
    return nx_ == o.nx_ && ny_ == o.ny_ && h_ == o.h_;
  }

  /// Sum of finite values times the cell area.
  double integral() const;
  double max_finite() const;

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

private:
  int nx_ = 0;
  int ny_ = 0;
  double h_ = 1.0;
  std::vector<double> values_;
};

/// Bilinear interpolation between cell centres. Points within half a cell
/// of the boundary are clamped onto the outermost centres; +inf corners are
/// dropped and the remaining weights renormalised.
double interpolate(const ScalarField& f, Vec2 x);

/// Central-difference gradient at cell centres, bilinearly interpolated to
/// `x`. Next to +inf cells (and at the grid edge) the difference is taken
/// one-sided, away from the missing value. Throws OutOfDomain.
Vec2 gradient_at(const ScalarField& f, Vec2 x);

/// Gradient at the centre of cell (i, j), using the same stencil rules.
Vec2 cell_gradient(const ScalarField& f, int i, int j);

// Shared heat-map format: optional `#` comment lines, then
//   nx <int>
//   ny <int>
//   h <real>
// followed by ny rows (j = 0 first) of nx whitespace separated values.
void write_matrix(std::ostream& out, const ScalarField& f,
                  std::span<const std::string> comments = {});
ScalarField read_matrix(std::istream& in);
void save_matrix(const std::string& path, const ScalarField& f,
                 std::span<const std::string> comments = {});
ScalarField load_matrix(const std::string& path);

}  // namespace evac
