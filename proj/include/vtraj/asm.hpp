#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "vtraj/edie.hpp"
#include "vtraj/grid.hpp"

namespace vtraj {

/// Adaptive smoothing parameters. Speeds in m/s, widths in m and s.
struct AsmParams {
  double c_free{22.2};
  double c_cong{-4.17};
  double v_crit{16.7};
  double dv{5.56};
  double sigma{200.0};
  double tau{20.0};
  /// Kernel support in multiples of (sigma, tau).
  double cutoff{3.0};

  void validate() const;
};

/// Gap-free smoothed speed field and the congestion weight w used to build it.
struct SmoothedField {
  GridSpec grid;
  FieldArray v;
  AsmParams params;
  FieldArray w;
};

/// exp(-|dx|/sigma - |dt|/tau), truncated to zero outside cutoff*(sigma, tau).
template <typename Scalar>
Scalar kernel_weight(Scalar dt, Scalar dx, Scalar sigma, Scalar tau, Scalar cutoff = Scalar(3)) {
  using std::abs;
  using std::exp;
  if (abs(dx) > cutoff * sigma || abs(dt) > cutoff * tau) return Scalar(0);
  return exp(-abs(dx) / sigma - abs(dt) / tau);
}

/// Kernel-weighted average of the raw field along characteristics of speed c.
struct DirectionalPass {
  /// Smoothed speeds; NaN where no data falls inside the kernel support.
  FieldArray z;
  /// Normalization sum of data weight times kernel weight.
  FieldArray n;
};

/// Throws DataError("no data") when the raw field has no nonempty cell.
DirectionalPass directional_pass(const RawSpeedField& raw, double c, const AsmParams& params, int jobs = 1);

/// tanh congestion weight w = (1 + tanh((v_crit - v*) / dv)) / 2.
template <typename Derived>
auto congestion_weight(const Eigen::ArrayBase<Derived>& v_star, const AsmParams& params) {
  using Scalar = typename Derived::Scalar;
  return Scalar(0.5) * (Scalar(1) + ((Scalar(params.v_crit) - v_star) / Scalar(params.dv)).tanh());
}

/// Blends the two passes. Where one pass has no support the other is used for
/// both; where neither has support the result stays NaN (filled by smooth()).
SmoothedField blend(const FieldArray& z_free, const FieldArray& z_cong, const FieldArray& n_free,
                    const FieldArray& n_cong, const GridSpec& grid, const AsmParams& params);

/// Free and congested passes, blend, then nearest-data fallback for cells out
/// of reach of every kernel. Output is clamped to the data range.
SmoothedField smooth(const RawSpeedField& raw, const AsmParams& params, int jobs = 1);

/// Header note recording the parameters, and its inverse.
std::string format_asm_params(const AsmParams& params);
bool parse_asm_params(const std::string& note, AsmParams& params);

}  // namespace vtraj
