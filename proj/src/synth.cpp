#include "vtraj/synth.hpp"

#include <cmath>
#include <string>

#include "vtraj/errors.hpp"

namespace vtraj {

void AnalyticFieldSpec::validate() const {
  if (!(v0 > 0.0) || !std::isfinite(v0)) throw ConfigError("v0 must be positive");
  if (kind == Kind::traveling_gaussian_dip) {
    if (!(amplitude >= 0.0 && amplitude < v0)) throw ConfigError("dip amplitude must satisfy 0 <= A < v0");
    if (!(width > 0.0)) throw ConfigError("dip width must be positive");
    if (!std::isfinite(center) || !std::isfinite(wave_speed)) throw ConfigError("dip center and wave speed must be finite");
  }
  if (!(t_max > t_min) || !(x_max > x_min)) throw ConfigError("synthetic domain is degenerate");
}

AnalyticFieldSpec::Kind parse_field_kind(std::string_view name) {
  if (name == "constant") return AnalyticFieldSpec::Kind::constant;
  if (name == "traveling_gaussian_dip" || name == "dip") return AnalyticFieldSpec::Kind::traveling_gaussian_dip;
  throw ConfigError("unknown synthetic field kind '" + std::string(name) + "'");
}

namespace {

template <typename F>
double rk4_step(const F& f, double t, double p, double h) {
  const double k1 = f(t, p);
  const double k2 = f(t + 0.5 * h, p + 0.5 * h * k1);
  const double k3 = f(t + 0.5 * h, p + 0.5 * h * k2);
  const double k4 = f(t + h, p + h * k3);
  return p + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

void generate_fleet(const AnalyticFieldSpec& spec, double spawn_interval, int lane, double fine_step,
                    const std::function<void(Fragment&&)>& sink) {
  spec.validate();
  if (!(spawn_interval > 0.0)) throw ConfigError("spawn interval must be positive");
  if (!(fine_step > 0.0) || fine_step > 0.05) throw ConfigError("fine step must be in (0, 0.05] s");

  const int substeps = static_cast<int>(std::ceil(kFleetSampleInterval / fine_step - 1e-9));
  const double h = kFleetSampleInterval / substeps;
  const auto speed = [&spec](double t, double x) { return analytic_speed(spec, t, x); };
  // Guard against round-off when a sample lands exactly on the boundary.
  const double x_stop = spec.x_max - 1e-9;

  for (long k = 0;; ++k) {
    const double t_depart = spec.t_min + static_cast<double>(k) * spawn_interval;
    if (t_depart >= spec.t_max) break;
    Fragment fragment;
    fragment.vehicle_id = "synth-L" + std::to_string(lane) + "-" + std::to_string(k);
    fragment.lane = lane;
    double p = spec.x_min;
    fragment.points.push_back({t_depart, p});
    for (long n = 0;; ++n) {
      const double t_sample = t_depart + static_cast<double>(n) * kFleetSampleInterval;
      if (p >= x_stop || t_sample >= spec.t_max) break;
      for (int s = 0; s < substeps; ++s) p = rk4_step(speed, t_sample + s * h, p, h);
      fragment.points.push_back({t_depart + static_cast<double>(n + 1) * kFleetSampleInterval, p});
    }
    sink(std::move(fragment));
  }
}

std::vector<Fragment> generate_fleet(const AnalyticFieldSpec& spec, double spawn_interval, int lane,
                                     double fine_step) {
  std::vector<Fragment> out;
  generate_fleet(spec, spawn_interval, lane, fine_step, [&out](Fragment&& f) { out.push_back(std::move(f)); });
  return out;
}

VirtualTrajectory integrate_rk4(const std::function<double(double, double)>& speed, double t0,
                                double x0, double step, double x_end, double t_max) {
  if (!(step > 0.0)) throw ConfigError("step must be positive");
  VirtualTrajectory vt;
  vt.departure_time = t0;
  vt.origin = x0;
  vt.step = step;
  double p = x0;
  double v = speed(t0, p);
  vt.points.push_back({t0, p, v});
  for (long k = 0;; ++k) {
    const double t = t0 + static_cast<double>(k) * step;
    if (p >= x_end) {
      vt.complete = true;
      break;
    }
    if (t >= t_max) break;
    const double t_next = t0 + static_cast<double>(k + 1) * step;
    const double p_next = rk4_step(speed, t, p, step);
    const double v_next = speed(t_next, p_next);
    if (p_next >= x_end) {
      // Cubic Hermite on [t, t_next] with derivatives v, v_next; bisect for x_end.
      const auto hermite = [&](double s) {
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * p + (s3 - 2 * s2 + s) * step * v + (-2 * s3 + 3 * s2) * p_next +
               (s3 - s2) * step * v_next;
      };
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (hermite(mid) < x_end ? lo : hi) = mid;
      }
      const double t_cross = t + hi * step;
      vt.points.push_back({t_cross, x_end, speed(t_cross, x_end)});
      vt.complete = true;
      break;
    }
    p = p_next;
    v = v_next;
    vt.points.push_back({t_next, p, v});
  }
  vt.finalize();
  return vt;
}

VirtualTrajectory reference_trajectory(const AnalyticFieldSpec& spec, double t0, double x0, double fine_step) {
  spec.validate();
  return integrate_rk4([&spec](double t, double x) { return analytic_speed(spec, t, x); }, t0, x0, fine_step,
                       spec.x_max, spec.t_max);
}

}  // namespace vtraj
