#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vtraj/trajectory.hpp"

namespace vtraj {

inline constexpr double kMphPerMps = 3600.0 / 1609.344;

inline double mps_to_mph(double v) { return v * kMphPerMps; }
inline double seconds_to_minutes(double s) { return s / 60.0; }

/// Travel time of a complete trajectory, in minutes. Throws DataError("truncated trajectory").
double travel_time(const VirtualTrajectory& vt);

struct SpeedStats {
  double mean;
  double std;
};

/// Arithmetic mean and population standard deviation of the per-step speeds
/// (m/s). Throws DataError with fewer than two points.
SpeedStats speed_stats(const VirtualTrajectory& vt);

/// Per-lane aggregate over complete trajectories. Statistics are empty when
/// no trajectory of the lane completed.
struct LaneSummary {
  int lane{1};
  std::size_t n{0};
  std::size_t excluded{0};
  std::optional<double> mean_travel_time;  // min
  std::optional<double> std_travel_time;   // min
  std::optional<double> mean_speed_std;    // mph
};

std::vector<LaneSummary> lane_summary(const std::map<int, std::vector<VirtualTrajectory>>& by_lane);

struct CurvePoint {
  int lane;
  double departure_time;  // s
  double travel_time;     // min
};

/// One point per complete trajectory, sorted by departure time (then lane).
std::vector<CurvePoint> travel_time_curve(const std::vector<VirtualTrajectory>& vts);

/// "HOV" for lane 1, "Lane k" otherwise.
std::string lane_label(int lane);

/// Rows = statistics, columns = lanes; full-precision numbers, empty for missing.
void write_summary_table_csv(std::ostream& out, const std::vector<LaneSummary>& summaries);
/// Same layout with two decimals, for terminals and reports.
void write_summary_table_text(std::ostream& out, const std::vector<LaneSummary>& summaries);
void write_summary_json(std::ostream& out, const std::vector<LaneSummary>& summaries);
void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve);

}  // namespace vtraj
