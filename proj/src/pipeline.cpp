#include "vtraj/pipeline.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "vtraj/analytics.hpp"
#include "vtraj/edie.hpp"
#include "vtraj/errors.hpp"
#include "vtraj/field_io.hpp"
#include "vtraj/format.hpp"
#include "vtraj/trajectory_io.hpp"
#include "vtraj/vtgen.hpp"

namespace fs = std::filesystem;

namespace vtraj {

namespace {

/// Files are written as `<name>.partial` and renamed only once the whole stage
/// succeeded; otherwise the partial files are removed.
class StageOutputs {
public:
  explicit StageOutputs(fs::path dir) : m_dir{std::move(dir)} { fs::create_directories(m_dir); }
  StageOutputs(const StageOutputs&) = delete;
  StageOutputs& operator=(const StageOutputs&) = delete;
  ~StageOutputs() {
    if (m_committed) return;
    std::error_code ec;
    for (const auto& f : m_files) fs::remove(partial(f), ec);
  }

  fs::path add(const fs::path& final_path) {
    m_files.push_back(final_path);
    return partial(final_path);
  }

  std::vector<fs::path> commit() {
    for (const auto& f : m_files) fs::rename(partial(f), f);
    m_committed = true;
    return m_files;
  }

private:
  static fs::path partial(const fs::path& f) { return fs::path(f.string() + ".partial"); }

  fs::path m_dir;
  std::vector<fs::path> m_files;
  bool m_committed{false};
};

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

/// Lanes with a `lane<N><suffix>` file in dir, ascending.
std::vector<int> lanes_with(const fs::path& dir, const std::string& suffix) {
  std::vector<int> lanes;
  if (!fs::is_directory(dir)) return lanes;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("lane", 0) != 0 || name.size() <= 4 + suffix.size()) continue;
    if (name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) continue;
    const std::string digits = name.substr(4, name.size() - 4 - suffix.size());
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) continue;
    lanes.push_back(std::stoi(digits));
  }
  std::sort(lanes.begin(), lanes.end());
  return lanes;
}

std::vector<int> selected_lanes(const PipelineConfig& config, const std::string& suffix) {
  std::vector<int> lanes;
  for (int lane : lanes_with(config.output_dir, suffix))
    if (!config.lanes || config.lanes->contains(lane)) lanes.push_back(lane);
  if (lanes.empty())
    throw DataError("no lane*" + suffix + " files in " + config.output_dir.string());
  return lanes;
}

std::optional<Extent> extent_of(const FieldFile& f) {
  for (const auto& note : f.notes)
    if (auto e = parse_extent(note)) return e;
  return std::nullopt;
}

Extent scan_extent(const PipelineConfig& config) {
  Extent e{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& path : config.inputs) {
    auto in = open_in(path);
    ReaderOptions options;
    options.lanes = config.lanes;
    FragmentReader reader(in, config.units, options);
    try {
      while (auto f = reader.next()) {
        for (const auto& p : f->points) {
          e.t_min = std::min(e.t_min, p.t);
          e.t_max = std::max(e.t_max, p.t);
          e.x_min = std::min(e.x_min, p.x);
          e.x_max = std::max(e.x_max, p.x);
        }
      }
    } catch (const ParseError& err) {
      throw DataError(path.string() + ": " + err.what());
    }
  }
  if (!(e.t_max > e.t_min) || !(e.x_max > e.x_min)) throw DataError("input trajectories span no area");
  return e;
}

}  // namespace

std::string format_extent(const Extent& e) {
  std::string s = "extent tmin=";
  append_number(s, e.t_min);
  s += " tmax=";
  append_number(s, e.t_max);
  s += " xmin=";
  append_number(s, e.x_min);
  s += " xmax=";
  append_number(s, e.x_max);
  return s;
}

std::optional<Extent> parse_extent(const std::string& note) {
  std::istringstream ss(note);
  std::string token;
  if (!(ss >> token) || token != "extent") return std::nullopt;
  Extent e{};
  int seen = 0;
  while (ss >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) return std::nullopt;
    double v = 0.0;
    if (!parse_number(token.substr(eq + 1), v)) return std::nullopt;
    const std::string key = token.substr(0, eq);
    if (key == "tmin") e.t_min = v, seen |= 1;
    else if (key == "tmax") e.t_max = v, seen |= 2;
    else if (key == "xmin") e.x_min = v, seen |= 4;
    else if (key == "xmax") e.x_max = v, seen |= 8;
  }
  if (seen != 15) return std::nullopt;
  return e;
}

GridSpec grid_for_extent(const Extent& e, double dt, double dx, double cwave) {
  GridSpec g;
  g.t0 = e.t_min;
  g.dt = dt;
  g.dx = dx;
  g.cwave = cwave;
  g.nt = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::ceil((e.t_max - e.t_min) / dt - 1e-9)));
  // Sheared columns must cover the road over the whole window.
  const double drift = cwave * (static_cast<double>(g.nt) * dt);
  g.x0 = e.x_min - std::max(0.0, drift);
  const double xs_max = e.x_max - std::min(0.0, drift);
  g.nx = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::ceil((xs_max - g.x0) / dx - 1e-9)));
  g.validate();
  return g;
}

fs::path lane_file(const fs::path& dir, int lane, const std::string& suffix) {
  return dir / ("lane" + std::to_string(lane) + suffix);
}

StageReport run_aggregate(const PipelineConfig& config) {
  if (config.inputs.empty()) throw ConfigError("aggregate needs at least one --input");
  for (const auto& in : config.inputs)
    if (!fs::exists(in)) throw ConfigError("input not found: " + in.string());

  Extent extent{};
  if (config.t_begin && config.t_finish && config.x_begin && config.x_finish) {
    extent = {*config.t_begin, *config.t_finish, std::min(*config.x_begin, *config.x_finish),
              std::max(*config.x_begin, *config.x_finish)};
  } else {
    const Extent scanned = scan_extent(config);
    extent = {config.t_begin.value_or(scanned.t_min), config.t_finish.value_or(scanned.t_max),
              config.x_begin.value_or(scanned.x_min), config.x_finish.value_or(scanned.x_max)};
    if (extent.x_min > extent.x_max) std::swap(extent.x_min, extent.x_max);
  }
  if (!(extent.t_max > extent.t_min) || !(extent.x_max > extent.x_min))
    throw ConfigError("aggregation window is empty");
  const GridSpec grid = grid_for_extent(extent, config.dt, config.dx, config.cwave);

  static const char* kinds[] = {field_kind::ttt, field_kind::ttd, field_kind::raw, field_kind::density,
                                field_kind::flow};
  for (const char* kind : kinds) {
    for (int lane : lanes_with(config.output_dir, std::string(".") + kind + ".field")) {
      const auto path = lane_file(config.output_dir, lane, std::string(".") + kind + ".field");
      if (!read_field_grid(path).same_as(grid))
        throw ConfigError("grid mismatch with existing " + path.string() +
                          "; use a fresh output directory or matching --dt/--dx/--cwave");
    }
  }

  std::map<int, MacroField> fields;
  ReaderStats stats;
  for (const auto& input : config.inputs) {
    for (auto& [lane, field] : accumulate_file(input, config.units, grid, config.lanes, config.jobs, &stats)) {
      auto it = fields.find(lane);
      if (it == fields.end()) fields.emplace(lane, std::move(field));
      else merge_into(it->second, field);
    }
  }
  if (config.lanes)
    for (int lane : *config.lanes) fields.try_emplace(lane, MacroField(grid));
  if (fields.empty()) throw DataError("no trajectories found in input");

  StageOutputs outputs(config.output_dir);
  const std::string extent_note = format_extent(extent);
  for (const auto& [lane, macro] : fields) {
    const RawSpeedField raw = speed_field(macro, config.min_ttt);
    const std::pair<const char*, const FieldArray*> arrays[] = {
        {field_kind::ttt, &macro.ttt}, {field_kind::ttd, &macro.ttd}, {field_kind::raw, &raw.v},
        {field_kind::density, &raw.rho}, {field_kind::flow, &raw.q}};
    for (const auto& [kind, values] : arrays) {
      const auto path = lane_file(config.output_dir, lane, std::string(".") + kind + ".field");
      write_field(outputs.add(path), FieldFile{grid, kind, *values, {extent_note}});
    }
  }
  StageReport report;
  report.files = outputs.commit();
  report.messages.push_back("rows " + std::to_string(stats.rows) + ", fragments " + std::to_string(stats.fragments) +
                            ", duplicate timestamps " + std::to_string(stats.duplicate_timestamps) +
                            ", decreasing timestamps skipped " + std::to_string(stats.decreasing_timestamps));
  report.messages.push_back("grid nt=" + std::to_string(grid.nt) + " nx=" + std::to_string(grid.nx) + ", lanes " +
                            std::to_string(fields.size()));
  return report;
}

StageReport run_smooth(const PipelineConfig& config) {
  config.asm_params.validate();
  StageOutputs outputs(config.output_dir);
  StageReport report;
  for (int lane : selected_lanes(config, ".raw.field")) {
    const FieldFile raw_file = read_field(lane_file(config.output_dir, lane, ".raw.field"));
    const FieldFile ttt_file = read_field(lane_file(config.output_dir, lane, ".ttt.field"));
    if (!raw_file.grid.same_as(ttt_file.grid)) throw DataError("lane " + std::to_string(lane) + ": raw and ttt grids differ");
    RawSpeedField raw;
    raw.grid = raw_file.grid;
    raw.v = raw_file.values;
    raw.ttt = ttt_file.values;
    if (raw.nonempty_count() == 0) {
      report.messages.push_back("lane " + std::to_string(lane) + ": no data, skipped");
      continue;
    }
    const SmoothedField smoothed = smooth(raw, config.asm_params, config.jobs);
    std::vector<std::string> notes{format_asm_params(smoothed.params)};
    if (auto e = extent_of(raw_file)) notes.push_back(format_extent(*e));
    write_field(outputs.add(lane_file(config.output_dir, lane, ".smoothed.field")),
                FieldFile{smoothed.grid, field_kind::smoothed, smoothed.v, notes});
    write_field(outputs.add(lane_file(config.output_dir, lane, ".weight.field")),
                FieldFile{smoothed.grid, field_kind::weight, smoothed.w, notes});
  }
  report.files = outputs.commit();
  return report;
}

StageReport run_generate(const PipelineConfig& config) {
  StageOutputs outputs(config.output_dir);
  StageReport report;
  for (int lane : selected_lanes(config, ".smoothed.field")) {
    const FieldFile file = read_field(lane_file(config.output_dir, lane, ".smoothed.field"));
    if (file.kind != field_kind::smoothed) throw DataError("expected a smoothed field in lane " + std::to_string(lane));
    SmoothedField field;
    field.grid = file.grid;
    field.v = file.values;
    for (const auto& note : file.notes) parse_asm_params(note, field.params);
    const auto extent = extent_of(file);

    SweepParams sweep;
    sweep.lane = lane;
    sweep.t_start = config.depart_start.value_or(field.grid.t0);
    sweep.t_end = config.depart_end.value_or(extent ? extent->t_max : field.grid.t_end());
    sweep.interval = config.interval;
    sweep.step = config.step;
    sweep.origin = config.origin.value_or(extent ? extent->x_min : field.grid.x0);
    sweep.destination = config.destination.value_or(extent ? extent->x_max : field.grid.x_end());
    sweep.t_max = config.t_max.value_or(field.grid.t_end());
    if (!(sweep.origin < sweep.destination)) throw ConfigError("degenerate route: origin must lie upstream of destination");

    const auto vts = departure_sweep(field, sweep, config.jobs);
    std::size_t complete = 0;
    for (const auto& vt : vts) complete += vt.complete ? 1 : 0;
    {
      auto out = open_out(outputs.add(lane_file(config.output_dir, lane, ".trajectories.csv")));
      write_trajectories_csv(out, vts);
    }
    {
      auto out = open_out(outputs.add(lane_file(config.output_dir, lane, ".summary.jsonl")));
      write_summaries_jsonl(out, vts);
    }
    report.messages.push_back("lane " + std::to_string(lane) + ": " + std::to_string(vts.size()) + " departures, " +
                              std::to_string(complete) + " complete");
  }
  report.files = outputs.commit();
  return report;
}

StageReport run_stats(const PipelineConfig& config) {
  std::map<int, std::vector<VirtualTrajectory>> by_lane;
  std::vector<VirtualTrajectory> all;
  for (int lane : selected_lanes(config, ".summary.jsonl")) {
    const auto csv_path = lane_file(config.output_dir, lane, ".trajectories.csv");
    auto csv = open_in(csv_path);
    auto summaries = open_in(lane_file(config.output_dir, lane, ".summary.jsonl"));
    auto vts = read_trajectories(csv, summaries, csv_path.string());
    all.insert(all.end(), vts.begin(), vts.end());
    by_lane[lane] = std::move(vts);
  }
  const auto summaries = lane_summary(by_lane);
  const auto curve = travel_time_curve(all);

  StageOutputs outputs(config.output_dir);
  {
    auto out = open_out(outputs.add(config.output_dir / "stats.csv"));
    write_summary_table_csv(out, summaries);
  }
  {
    auto out = open_out(outputs.add(config.output_dir / "stats.json"));
    write_summary_json(out, summaries);
  }
  {
    auto out = open_out(outputs.add(config.output_dir / "travel_time_curve.csv"));
    write_curve_csv(out, curve);
  }
  StageReport report;
  report.files = outputs.commit();
  std::ostringstream table;
  write_summary_table_text(table, summaries);
  report.messages.push_back(table.str());
  return report;
}

namespace {

std::vector<std::vector<std::pair<double, double>>> read_overlay(const fs::path& path) {
  auto in = open_in(path);
  std::map<std::pair<int, double>, std::vector<std::pair<double, double>>> lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.rfind("lane,", 0) == 0) continue;
    double f[5];
    std::string_view view(line);
    for (int k = 0; k < 5; ++k) {
      const auto comma = view.find(',');
      if (!parse_number(view.substr(0, comma), f[k]) || (k < 4 && comma == std::string_view::npos))
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed trajectory row");
      if (comma != std::string_view::npos) view.remove_prefix(comma + 1);
    }
    lines[{static_cast<int>(f[0]), f[1]}].emplace_back(f[2], f[3]);
  }
  std::vector<std::vector<std::pair<double, double>>> out;
  for (auto& [key, pts] : lines) out.push_back(std::move(pts));
  return out;
}

}  // namespace

StageReport run_render(const PipelineConfig& config) {
  std::vector<fs::path> fields;
  if (config.field) {
    fields.push_back(*config.field);
  } else {
    for (const char* kind : {".raw.field", ".smoothed.field"})
      for (int lane : lanes_with(config.output_dir, kind))
        if (!config.lanes || config.lanes->contains(lane)) fields.push_back(lane_file(config.output_dir, lane, kind));
  }
  if (fields.empty()) throw DataError("no field files to render in " + config.output_dir.string());
  const auto overlays = config.overlay ? read_overlay(*config.overlay) : decltype(read_overlay({})){};

  StageOutputs outputs(config.output_dir);
  for (const auto& path : fields) {
    const FieldFile file = read_field(path);
    RenderOptions options = config.render;
    if (const auto e = extent_of(file); e && !options.x_lo && !options.x_hi) {
      options.x_lo = e->x_min;
      options.x_hi = e->x_max;
    }
    const Image img = render_heatmap(file, options, overlays);
    const std::string stem = path.filename().replace_extension().string();
    write_ppm(outputs.add(config.output_dir / (stem + ".ppm")), img);
    auto legend = open_out(outputs.add(config.output_dir / (stem + ".legend.txt")));
    legend << legend_text(file, options);
  }
  StageReport report;
  report.files = outputs.commit();
  return report;
}

StageReport run_synth(const PipelineConfig& config) {
  if (config.synth_lanes.empty()) throw ConfigError("synth needs at least one lane");
  if (!config.synth_v0.empty() && config.synth_v0.size() != 1 && config.synth_v0.size() != config.synth_lanes.size())
    throw ConfigError("give one --v0 or one per lane");
  StageOutputs outputs(config.output_dir);
  std::size_t fragments = 0;
  {
    auto out = open_out(outputs.add(config.output_dir / "synth.csv"));
    out << kTrajectoryHeader << '\n';
    for (std::size_t k = 0; k < config.synth_lanes.size(); ++k) {
      AnalyticFieldSpec spec = config.synth;
      if (!config.synth_v0.empty()) spec.v0 = config.synth_v0[config.synth_v0.size() == 1 ? 0 : k];
      generate_fleet(spec, config.spawn_interval, config.synth_lanes[k], config.fine_step, [&](Fragment&& f) {
        write_fragment_rows(out, f, config.units);
        ++fragments;
      });
    }
    if (!out) throw DataError("write failed for synth.csv");
  }
  StageReport report;
  report.files = outputs.commit();
  report.messages.push_back(std::to_string(fragments) + " fragments");
  return report;
}

}  // namespace vtraj
