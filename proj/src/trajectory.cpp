#include "vtraj/trajectory.hpp"

#include <algorithm>
#include <cmath>

namespace vtraj {

void VirtualTrajectory::finalize() {
  travel_time = points.empty() ? 0.0 : points.back().t - departure_time;
  if (points.empty()) {
    speed_mean = speed_std = 0.0;
    return;
  }
  double sum = 0.0;
  for (const auto& pt : points) sum += pt.v;
  speed_mean = sum / static_cast<double>(points.size());
  double ss = 0.0;
  for (const auto& pt : points) ss += (pt.v - speed_mean) * (pt.v - speed_mean);
  speed_std = std::sqrt(ss / static_cast<double>(points.size()));
}

double position_at(const VirtualTrajectory& vt, double t) {
  const auto& pts = vt.points;
  if (pts.empty()) return vt.origin;
  if (t <= pts.front().t) return pts.front().p;
  if (t >= pts.back().t) return pts.back().p;
  const auto hi = std::lower_bound(pts.begin(), pts.end(), t,
                                   [](const VirtualTrajectory::Point& a, double v) { return a.t < v; });
  const auto lo = hi - 1;
  const double f = (t - lo->t) / (hi->t - lo->t);
  return lo->p + f * (hi->p - lo->p);
}

}  // namespace vtraj
