#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vtraj/trajectory.hpp"

namespace vtraj {

inline constexpr const char* kTrajectoryCsvHeader = "lane,departure_s,t_s,position_m,speed_ms";

/// One row per recorded point.
void write_trajectories_csv(std::ostream& out, const std::vector<VirtualTrajectory>& vts, bool header = true);

/// One JSON object per trajectory:
/// {"lane","t0","travel_time_s","speed_std_ms","complete","origin_m","step_s","points"}.
void write_summaries_jsonl(std::ostream& out, const std::vector<VirtualTrajectory>& vts);

/// Rebuilds trajectories from the point CSV and the JSON-lines summaries
/// (which carry completeness, origin and step). Summary statistics are
/// recomputed from the points. Throws DataError naming `source` and line.
std::vector<VirtualTrajectory> read_trajectories(std::istream& csv, std::istream& summaries,
                                                 const std::string& source = "<stream>");

}  // namespace vtraj
