#include "vtraj/vtgen.hpp"

#include <array>
#include <cmath>

#include "vtraj/errors.hpp"
#include "vtraj/parallel.hpp"
#include "vtraj/pchip.hpp"

namespace vtraj {

namespace {

// Stencil [first, first + count) of up to four nodes around the interval
// containing coordinate u (in node units).
std::pair<Eigen::Index, Eigen::Index> stencil(double u, Eigen::Index n) {
  if (n <= 4) return {0, n};
  const Eigen::Index k = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(u)), 0, n - 2);
  const Eigen::Index first = std::max<Eigen::Index>(k - 1, 0);
  const Eigen::Index last = std::min<Eigen::Index>(k + 2, n - 1);
  return {first, last - first + 1};
}

}  // namespace

FieldSampler::FieldSampler(const SmoothedField& field) : m_field{&field} {
  if (field.v.rows() != field.grid.nt || field.v.cols() != field.grid.nx)
    throw DataError("smoothed field does not match its grid");
  if (!field.v.allFinite()) throw DataError("smoothed field has non-finite cells");
  m_vmax = field.v.maxCoeff();
}

double FieldSampler::row_value(Eigen::Index row, double x) const {
  const GridSpec& g = m_field->grid;
  const double first_center = g.x_center(row, 0);
  const double u = (x - first_center) / g.dx;
  const auto [first, count] = stencil(u, g.nx);
  std::array<double, 4> xs{}, ys{};
  for (Eigen::Index k = 0; k < count; ++k) {
    xs[k] = g.x_center(row, first + k);
    ys[k] = m_field->v(row, first + k);
  }
  const auto n = static_cast<std::size_t>(count);
  return pchip_eval<double>(std::span(xs.data(), n), std::span(ys.data(), n), x);
}

double FieldSampler::operator()(double t, double x) const {
  const GridSpec& g = m_field->grid;
  const double u = (t - g.t_center(0)) / g.dt;
  const auto [first, count] = stencil(u, g.nt);
  std::array<double, 4> ts{}, vs{};
  for (Eigen::Index k = 0; k < count; ++k) {
    ts[k] = g.t_center(first + k);
    vs[k] = row_value(first + k, x);
  }
  const auto n = static_cast<std::size_t>(count);
  const double v = pchip_eval<double>(std::span(ts.data(), n), std::span(vs.data(), n), t);
  return std::clamp(v, 0.0, m_vmax);
}

double sample_speed(const SmoothedField& field, double t, double x) { return FieldSampler(field)(t, x); }

VirtualTrajectory integrate(const FieldSampler& sampler, double t0, double x0, double step, double x_end,
                            double t_max, int lane) {
  if (!(step > 0.0)) throw ConfigError("integration step must be positive");
  if (!std::isfinite(t_max)) throw ConfigError("t_max must be finite");
  if (!(x0 < x_end)) throw DataError("degenerate route");

  VirtualTrajectory vt;
  vt.lane = lane;
  vt.departure_time = t0;
  vt.origin = x0;
  vt.step = step;

  double p = x0;
  double v = sampler(t0, p);
  vt.points.push_back({t0, p, v});
  for (long k = 0;; ++k) {
    const double t = t0 + static_cast<double>(k) * step;
    if (t >= t_max) break;
    const double p_next = p + step * std::max(0.0, v);
    if (p_next >= x_end) {
      const double frac = (x_end - p) / (p_next - p);
      const double t_cross = t + frac * step;
      vt.points.push_back({t_cross, x_end, sampler(t_cross, x_end)});
      vt.complete = true;
      break;
    }
    const double t_next = t0 + static_cast<double>(k + 1) * step;
    p = p_next;
    v = sampler(t_next, p);
    vt.points.push_back({t_next, p, v});
  }
  vt.finalize();
  return vt;
}

VirtualTrajectory integrate(const SmoothedField& field, double t0, double x0, double step, double x_end,
                            double t_max, int lane) {
  return integrate(FieldSampler(field), t0, x0, step, x_end, t_max, lane);
}

std::size_t departure_count(double t_start, double t_end, double interval) {
  if (!(interval > 0.0)) throw ConfigError("departure interval must be positive");
  if (t_end < t_start) return 0;
  return static_cast<std::size_t>(std::floor((t_end - t_start) / interval + 1e-9)) + 1;
}

std::vector<VirtualTrajectory> departure_sweep(const SmoothedField& field, const SweepParams& sweep, int jobs) {
  const std::size_t count = departure_count(sweep.t_start, sweep.t_end, sweep.interval);
  const FieldSampler sampler(field);
  std::vector<VirtualTrajectory> out(count);
  parallel_for(count, jobs, [&](std::size_t k) {
    const double t0 = sweep.t_start + static_cast<double>(k) * sweep.interval;
    out[k] = integrate(sampler, t0, sweep.origin, sweep.step, sweep.destination, sweep.t_max, sweep.lane);
  });
  return out;
}

}  // namespace vtraj
