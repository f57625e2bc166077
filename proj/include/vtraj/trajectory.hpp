#pragma once

#include <vector>

namespace vtraj {

/// Path of one virtual vehicle: (t, p, v) per integration step.
struct VirtualTrajectory {
  struct Point {
    double t;
    double p;
    double v;
  };

  int lane{1};
  double departure_time{0.0};
  double origin{0.0};
  double step{0.1};
  std::vector<Point> points;
  /// True when the destination was reached before the time bound.
  bool complete{false};
  /// Elapsed time of the last point (full route time when complete).
  double travel_time{0.0};
  double speed_mean{0.0};
  double speed_std{0.0};

  /// Recomputes travel_time and the speed summary from `points`.
  void finalize();
};

/// Position at time t by linear interpolation between recorded points,
/// clamped to the first/last point.
double position_at(const VirtualTrajectory& vt, double t);

}  // namespace vtraj
