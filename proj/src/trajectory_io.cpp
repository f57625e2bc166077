#include "vtraj/trajectory_io.hpp"

#include <istream>
#include <map>
#include <ostream>

#include <json.hpp>

#include "vtraj/errors.hpp"
#include "vtraj/format.hpp"

namespace vtraj {

void write_trajectories_csv(std::ostream& out, const std::vector<VirtualTrajectory>& vts, bool header) {
  if (header) out << kTrajectoryCsvHeader << '\n';
  std::string row;
  for (const auto& vt : vts) {
    for (const auto& p : vt.points) {
      row.clear();
      row += std::to_string(vt.lane);
      row += ',';
      append_number(row, vt.departure_time);
      row += ',';
      append_number(row, p.t);
      row += ',';
      append_number(row, p.p);
      row += ',';
      append_number(row, p.v);
      row += '\n';
      out << row;
    }
  }
}

void write_summaries_jsonl(std::ostream& out, const std::vector<VirtualTrajectory>& vts) {
  for (const auto& vt : vts) {
    nlohmann::ordered_json j;
    j["lane"] = vt.lane;
    j["t0"] = vt.departure_time;
    j["travel_time_s"] = vt.travel_time;
    j["speed_std_ms"] = vt.speed_std;
    j["complete"] = vt.complete;
    j["origin_m"] = vt.origin;
    j["step_s"] = vt.step;
    j["points"] = vt.points.size();
    out << j.dump() << '\n';
  }
}

std::vector<VirtualTrajectory> read_trajectories(std::istream& csv, std::istream& summaries,
                                                 const std::string& source) {
  std::vector<VirtualTrajectory> out;
  std::map<std::pair<int, double>, std::size_t> index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(summaries, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      VirtualTrajectory vt;
      vt.lane = j.at("lane").get<int>();
      vt.departure_time = j.at("t0").get<double>();
      vt.complete = j.at("complete").get<bool>();
      vt.origin = j.value("origin_m", 0.0);
      vt.step = j.value("step_s", 0.1);
      index[{vt.lane, vt.departure_time}] = out.size();
      out.push_back(std::move(vt));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(source + " summary line " + std::to_string(line_no) + ": " + e.what());
    }
  }

  line_no = 0;
  while (std::getline(csv, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.rfind("lane,", 0) == 0) continue;
    double fields[5];
    std::string_view view(line);
    int n = 0;
    while (n < 5) {
      const auto comma = view.find(',');
      if (!parse_number(view.substr(0, comma), fields[n]))
        throw DataError(source + ":" + std::to_string(line_no) + ": malformed trajectory row");
      ++n;
      if (comma == std::string_view::npos) break;
      view.remove_prefix(comma + 1);
    }
    if (n != 5) throw DataError(source + ":" + std::to_string(line_no) + ": expected 5 columns");
    const auto key = std::make_pair(static_cast<int>(fields[0]), fields[1]);
    const auto it = index.find(key);
    if (it == index.end())
      throw DataError(source + ":" + std::to_string(line_no) + ": trajectory without summary");
    out[it->second].points.push_back({fields[2], fields[3], fields[4]});
  }
  for (auto& vt : out) vt.finalize();
  return out;
}

}  // namespace vtraj
