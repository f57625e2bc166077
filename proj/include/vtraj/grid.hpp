#pragma once

#include <cmath>
#include <cstddef>
#include <optional>

#include <Eigen/Core>

namespace vtraj {

/// Row-major (time-major) dense grid of values, nt rows by nx columns.
template <typename Scalar>
using FieldArrayT = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using FieldArray = FieldArrayT<double>;

struct CellIndex {
  Eigen::Index it{0};
  Eigen::Index ix{0};

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Sheared space-time discretization.
///
/// Cells are rectangles in (t, x') with x' = x - cwave * (t - t0), which makes
/// them parallelograms in (t, x) whose slanted edges follow the wave speed.
/// cwave = 0 gives ordinary rectangular cells.
struct GridSpec {
  double t0{0.0};
  double dt{4.0};
  Eigen::Index nt{1};
  double x0{0.0};
  double dx{32.18688};
  Eigen::Index nx{1};
  double cwave{-5.36};

  /// Throws ConfigError when an invariant is violated.
  void validate() const;

  double t_end() const { return t0 + dt * static_cast<double>(nt); }
  double x_end() const { return x0 + dx * static_cast<double>(nx); }

  /// Center time of row it.
  double t_center(Eigen::Index it) const { return t0 + (static_cast<double>(it) + 0.5) * dt; }
  /// Sheared center coordinate of column ix.
  double xs_center(Eigen::Index ix) const { return x0 + (static_cast<double>(ix) + 0.5) * dx; }
  /// Real-space center position of cell (it, ix).
  double x_center(Eigen::Index it, Eigen::Index ix) const {
    return xs_center(ix) + cwave * (t_center(it) - t0);
  }

  bool same_as(const GridSpec& other) const {
    return t0 == other.t0 && dt == other.dt && nt == other.nt && x0 == other.x0 &&
           dx == other.dx && nx == other.nx && cwave == other.cwave;
  }
};

/// x' = x - cwave * (t - t0).
template <typename Scalar>
Scalar shear_coordinate(Scalar t, Scalar x, const GridSpec& grid) {
  return x - static_cast<Scalar>(grid.cwave) * (t - static_cast<Scalar>(grid.t0));
}

/// Unbounded cell index of (t, x); may lie outside [0, nt) x [0, nx).
inline CellIndex raw_cell_of(double t, double x, const GridSpec& grid) {
  const double xs = shear_coordinate(t, x, grid);
  return {static_cast<Eigen::Index>(std::floor((t - grid.t0) / grid.dt)),
          static_cast<Eigen::Index>(std::floor((xs - grid.x0) / grid.dx))};
}

inline bool contains(const GridSpec& grid, CellIndex c) {
  return c.it >= 0 && c.it < grid.nt && c.ix >= 0 && c.ix < grid.nx;
}

inline std::optional<CellIndex> cell_of(double t, double x, const GridSpec& grid) {
  const CellIndex c = raw_cell_of(t, x, grid);
  if (!contains(grid, c)) return std::nullopt;
  return c;
}

}  // namespace vtraj
