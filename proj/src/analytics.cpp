#include "vtraj/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include <json.hpp>

#include "vtraj/errors.hpp"
#include "vtraj/format.hpp"

namespace vtraj {

namespace {

struct MeanStd {
  double mean;
  double std;
};

MeanStd population(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size()))};
}

}  // namespace

double travel_time(const VirtualTrajectory& vt) {
  if (!vt.complete || vt.points.empty()) throw DataError("truncated trajectory");
  return seconds_to_minutes(vt.points.back().t - vt.departure_time);
}

SpeedStats speed_stats(const VirtualTrajectory& vt) {
  if (vt.points.size() < 2) throw DataError("speed statistics need at least two points");
  std::vector<double> v;
  v.reserve(vt.points.size());
  for (const auto& p : vt.points) v.push_back(p.v);
  const auto s = population(v);
  return {s.mean, s.std};
}

std::vector<LaneSummary> lane_summary(const std::map<int, std::vector<VirtualTrajectory>>& by_lane) {
  std::vector<LaneSummary> out;
  for (const auto& [lane, vts] : by_lane) {
    LaneSummary s;
    s.lane = lane;
    std::vector<double> times, stds;
    for (const auto& vt : vts) {
      if (!vt.complete || vt.points.size() < 2) {
        ++s.excluded;
        continue;
      }
      times.push_back(travel_time(vt));
      stds.push_back(mps_to_mph(speed_stats(vt).std));
    }
    s.n = times.size();
    if (s.n > 0) {
      const auto tt = population(times);
      s.mean_travel_time = tt.mean;
      s.std_travel_time = tt.std;
      s.mean_speed_std = population(stds).mean;
    }
    out.push_back(s);
  }
  return out;
}

std::vector<CurvePoint> travel_time_curve(const std::vector<VirtualTrajectory>& vts) {
  std::vector<CurvePoint> out;
  for (const auto& vt : vts)
    if (vt.complete && !vt.points.empty()) out.push_back({vt.lane, vt.departure_time, travel_time(vt)});
  std::stable_sort(out.begin(), out.end(), [](const CurvePoint& a, const CurvePoint& b) {
    return a.departure_time < b.departure_time || (a.departure_time == b.departure_time && a.lane < b.lane);
  });
  return out;
}

std::string lane_label(int lane) { return lane == 1 ? "HOV" : "Lane " + std::to_string(lane); }

namespace {

struct StatRow {
  const char* name;
  std::optional<double> LaneSummary::*field;
};

constexpr StatRow kRows[] = {
    {"mean travel time (min)", &LaneSummary::mean_travel_time},
    {"st.d. travel time (min)", &LaneSummary::std_travel_time},
    {"mean speed st.d. (mph)", &LaneSummary::mean_speed_std},
};

}  // namespace

void write_summary_table_csv(std::ostream& out, const std::vector<LaneSummary>& summaries) {
  out << "statistic";
  for (const auto& s : summaries) out << ',' << lane_label(s.lane);
  out << '\n';
  for (const auto& row : kRows) {
    out << row.name;
    for (const auto& s : summaries) {
      out << ',';
      if (const auto& v = s.*row.field) out << format_number(*v);
    }
    out << '\n';
  }
  out << "n";
  for (const auto& s : summaries) out << ',' << s.n;
  out << '\n';
  out << "excluded";
  for (const auto& s : summaries) out << ',' << s.excluded;
  out << '\n';
}

void write_summary_table_text(std::ostream& out, const std::vector<LaneSummary>& summaries) {
  out << std::left << std::setw(26) << "";
  for (const auto& s : summaries) out << std::right << std::setw(9) << lane_label(s.lane);
  out << '\n';
  for (const auto& row : kRows) {
    out << std::left << std::setw(26) << row.name;
    for (const auto& s : summaries) {
      const auto& v = s.*row.field;
      out << std::right << std::setw(9) << (v ? format_fixed(*v, 2) : std::string("-"));
    }
    out << '\n';
  }
}

void write_summary_json(std::ostream& out, const std::vector<LaneSummary>& summaries) {
  nlohmann::ordered_json lanes = nlohmann::ordered_json::array();
  for (const auto& s : summaries) {
    nlohmann::ordered_json j;
    j["lane"] = s.lane;
    j["label"] = lane_label(s.lane);
    j["n"] = s.n;
    j["excluded"] = s.excluded;
    const auto put = [&j](const char* key, const std::optional<double>& v) {
      if (v) j[key] = *v;
      else j[key] = nullptr;
    };
    put("mean_travel_time_min", s.mean_travel_time);
    put("std_travel_time_min", s.std_travel_time);
    put("mean_speed_std_mph", s.mean_speed_std);
    lanes.push_back(std::move(j));
  }
  nlohmann::ordered_json root;
  root["lanes"] = std::move(lanes);
  out << root.dump(2) << '\n';
}

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve) {
  out << "lane,departure_s,travel_time_min\n";
  for (const auto& p : curve) out << p.lane << ',' << format_number(p.departure_time) << ',' << format_number(p.travel_time) << '\n';
}

}  // namespace vtraj
