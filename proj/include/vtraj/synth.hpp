#pragma once

#include <cmath>
#include <functional>
#include <string_view>
#include <vector>

#include "vtraj/trajectory.hpp"
#include "vtraj/trajio.hpp"

namespace vtraj {

/// Ground-truth speed field used to verify the pipeline end to end.
struct AnalyticFieldSpec {
  enum class Kind { constant, traveling_gaussian_dip };

  Kind kind{Kind::constant};
  double v0{25.0};
  double amplitude{0.0};
  double center{0.0};
  double width{200.0};
  /// Propagation speed of the dip; negative moves upstream.
  double wave_speed{0.0};
  double t_min{0.0};
  double t_max{1200.0};
  double x_min{0.0};
  double x_max{4000.0};

  /// Throws ConfigError unless 0 <= amplitude < v0, width > 0 and the domain is nondegenerate.
  void validate() const;
};

AnalyticFieldSpec::Kind parse_field_kind(std::string_view name);

inline double analytic_speed(const AnalyticFieldSpec& spec, double t, double x) {
  if (spec.kind == AnalyticFieldSpec::Kind::constant) return spec.v0;
  const double u = x - spec.center - spec.wave_speed * t;
  return spec.v0 - spec.amplitude * std::exp(-u * u / (2.0 * spec.width * spec.width));
}

/// Output rate of generated fleets.
inline constexpr double kFleetSampleInterval = 0.04;

/// Streams one fragment per spawned vehicle to `sink`. Vehicles depart x_min
/// every `spawn_interval` seconds from t_min and follow dp/dt = v(t, p)
/// (classical RK4 at `fine_step`), sampled at 25 Hz until p >= x_max or t >= t_max.
void generate_fleet(const AnalyticFieldSpec& spec, double spawn_interval, int lane, double fine_step,
                    const std::function<void(Fragment&&)>& sink);

std::vector<Fragment> generate_fleet(const AnalyticFieldSpec& spec, double spawn_interval, int lane,
                                     double fine_step = 0.01);

/// High-accuracy single trajectory through the analytic field, recorded at
/// every fine step, ending at x_max (complete) or t_max (incomplete).
VirtualTrajectory reference_trajectory(const AnalyticFieldSpec& spec, double t0, double x0,
                                       double fine_step = 0.01);

/// RK4 integration of dp/dt = speed(t, p) from (t0, x0), recorded at every
/// step. Stops at x_end (crossing located on the cubic Hermite step
/// interpolant) or at t_max.
VirtualTrajectory integrate_rk4(const std::function<double(double, double)>& speed, double t0,
                                double x0, double step, double x_end, double t_max);

}  // namespace vtraj
