#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "vtraj/grid.hpp"
#include "vtraj/trajio.hpp"

namespace vtraj {

/// Total travel time (s) and total travel distance (m) per grid cell.
struct MacroField {
  GridSpec grid;
  FieldArray ttt;
  FieldArray ttd;

  MacroField() = default;
  explicit MacroField(const GridSpec& g);
};

/// Edie speed, density and flow per cell. Empty cells hold NaN in all three.
struct RawSpeedField {
  GridSpec grid;
  FieldArray v;    // m/s
  FieldArray rho;  // veh/m
  FieldArray q;    // veh/s
  /// Exposure (TTT) of each cell, used as the data weight when smoothing.
  FieldArray ttt;

  bool empty_at(Eigen::Index it, Eigen::Index ix) const { return std::isnan(v(it, ix)); }
  Eigen::Index nonempty_count() const { return (v == v).count(); }
};

/// Portion of a segment lying inside one cell.
struct CellPiece {
  CellIndex cell;
  double dt_in;
  double dx_in;
};

inline constexpr double kDefaultMinTtt = 0.5;

/// Visits the pieces of the straight segment p1 -> p2 (in (t, x)) cut at every
/// cell boundary of the sheared grid. Pieces outside the grid are skipped.
/// Piece durations and distances are fractions of the full segment, so they sum
/// to (t2 - t1, x2 - x1) over a fully covered segment.
template <typename Visitor>
void for_each_piece(Fragment::Point p1, Fragment::Point p2, const GridSpec& grid, Visitor&& visit);

std::vector<CellPiece> clip_segment(Fragment::Point p1, Fragment::Point p2, const GridSpec& grid);

/// Single-writer accumulator of TTT/TTD.
class EdieAccumulator {
public:
  explicit EdieAccumulator(const GridSpec& grid);

  void add_segment(Fragment::Point p1, Fragment::Point p2);
  void add(const Fragment& fragment);

  const MacroField& field() const { return m_field; }
  MacroField take() { return std::move(m_field); }

private:
  MacroField m_field;
};

MacroField accumulate(const std::vector<Fragment>& fragments, const GridSpec& grid);
MacroField accumulate(FragmentReader& reader, const GridSpec& grid);

/// Elementwise sum; throws DataError when the grids differ.
MacroField merge(const MacroField& a, const MacroField& b);
/// In-place variant of merge.
void merge_into(MacroField& into, const MacroField& other);

/// Per-lane accumulation of a trajectory file split into `jobs` shards, each
/// shard accumulated by its own worker and merged afterwards.
std::map<int, MacroField> accumulate_file(const std::filesystem::path& file, const UnitConvention& conv,
                                          const GridSpec& grid, const std::optional<std::set<int>>& lanes,
                                          int jobs = 1, ReaderStats* stats = nullptr);

/// Edie density/flow/speed for cells with ttt >= min_ttt.
RawSpeedField speed_field(const MacroField& m, double min_ttt = kDefaultMinTtt);

// ---------------------------------------------------------------------------

template <typename Visitor>
void for_each_piece(Fragment::Point p1, Fragment::Point p2, const GridSpec& grid, Visitor&& visit) {
  const double seg_t = p2.t - p1.t;
  if (!(seg_t > 0.0)) return;
  const double seg_x = p2.x - p1.x;

  // Everything happens in (t, x'), where the cell edges are axis aligned.
  const double u1 = (p1.t - grid.t0) / grid.dt;
  const double u2 = (p2.t - grid.t0) / grid.dt;
  const double w1 = (shear_coordinate(p1.t, p1.x, grid) - grid.x0) / grid.dx;
  const double w2 = (shear_coordinate(p2.t, p2.x, grid) - grid.x0) / grid.dx;

  // Fast path: both ends in the same cell.
  const double fu1 = std::floor(u1), fw1 = std::floor(w1);
  if (fu1 == std::floor(u2) && fw1 == std::floor(w2)) {
    const CellIndex c{static_cast<Eigen::Index>(fu1), static_cast<Eigen::Index>(fw1)};
    if (contains(grid, c)) visit(CellPiece{c, seg_t, seg_x});
    return;
  }

  // Segment parameters s in (0, 1) where a grid line is crossed, restricted to
  // lines bounding the grid so far-away segments stay cheap.
  thread_local std::vector<double> cuts;
  cuts.clear();
  cuts.push_back(0.0);
  auto add_crossings = [](double a, double b, Eigen::Index n_lines) {
    if (a == b) return;
    const double lo = std::min(a, b), hi = std::max(a, b);
    const double first = std::max(std::ceil(lo), 0.0);
    const double last = std::min(std::floor(hi), static_cast<double>(n_lines));
    for (double k = first; k <= last; k += 1.0) {
      const double s = (k - a) / (b - a);
      if (s > 0.0 && s < 1.0) cuts.push_back(s);
    }
  };
  add_crossings(u1, u2, grid.nt);
  add_crossings(w1, w2, grid.nx);
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());

  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double frac = cuts[i + 1] - cuts[i];
    if (!(frac > 0.0)) continue;
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    const CellIndex c{static_cast<Eigen::Index>(std::floor(u1 + mid * (u2 - u1))),
                      static_cast<Eigen::Index>(std::floor(w1 + mid * (w2 - w1)))};
    if (contains(grid, c)) visit(CellPiece{c, frac * seg_t, frac * seg_x});
  }
}

}  // namespace vtraj
