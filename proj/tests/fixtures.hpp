#pragma once

#include <cmath>

#include "vtraj/asm.hpp"
#include "vtraj/edie.hpp"
#include "vtraj/synth.hpp"

namespace fixtures {

inline vtraj::AnalyticFieldSpec dip_spec(double t_max = 600) {
  vtraj::AnalyticFieldSpec spec;
  spec.kind = vtraj::AnalyticFieldSpec::Kind::traveling_gaussian_dip;
  spec.v0 = 30;
  spec.amplitude = 20;
  spec.center = 2500;
  spec.width = 200;
  spec.wave_speed = -5;
  spec.t_max = t_max;
  spec.x_max = 4000;
  return spec;
}

// Sheared grid wide enough to hold the 4 km road over the whole window.
inline vtraj::GridSpec dip_grid(double cwave, double t_max = 600) {
  const double dx = 32.18688;
  return {0.0, 4.0, static_cast<Eigen::Index>(t_max / 4), -10 * dx, dx,
          140 + static_cast<Eigen::Index>(std::abs(cwave) * t_max / dx), cwave};
}

inline vtraj::RawSpeedField dip_raw(double cwave, double t_max = 600) {
  vtraj::EdieAccumulator acc(dip_grid(cwave, t_max));
  vtraj::generate_fleet(dip_spec(t_max), 2.0, 1, 0.02, [&](vtraj::Fragment&& f) { acc.add(f); });
  return vtraj::speed_field(acc.field());
}

inline vtraj::SmoothedField constant_smoothed(const vtraj::GridSpec& g, double v) {
  vtraj::SmoothedField s;
  s.grid = g;
  s.v = vtraj::FieldArray::Constant(g.nt, g.nx, v);
  s.w = vtraj::FieldArray::Zero(g.nt, g.nx);
  return s;
}

}  // namespace fixtures
