#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vtraj/asm.hpp"
#include "vtraj/grid.hpp"
#include "vtraj/render.hpp"
#include "vtraj/synth.hpp"
#include "vtraj/trajio.hpp"

namespace vtraj {

/// Everything a pipeline run needs. All values are internal SI units; the CLI
/// converts user-facing units before filling this in.
struct PipelineConfig {
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path output_dir{"out"};
  UnitConvention units;
  int jobs{1};

  // aggregate
  double dt{4.0};
  double dx{0.02 * kMetersPerMile};
  double cwave{-5.36};
  std::optional<double> t_begin;
  std::optional<double> t_finish;
  /// Road extent in forward meters.
  std::optional<double> x_begin;
  std::optional<double> x_finish;
  double min_ttt{0.5};
  std::optional<std::set<int>> lanes;

  // smooth
  AsmParams asm_params;

  // generate
  std::optional<double> depart_start;
  std::optional<double> depart_end;
  double interval{15.0};
  double step{0.1};
  std::optional<double> origin;
  std::optional<double> destination;
  std::optional<double> t_max;

  // render
  std::optional<std::filesystem::path> field;
  std::optional<std::filesystem::path> overlay;
  RenderOptions render;

  // synth
  AnalyticFieldSpec synth;
  std::vector<int> synth_lanes{1};
  /// Free speed per synthetic lane; a single value applies to every lane.
  std::vector<double> synth_v0;
  double spawn_interval{2.0};
  double fine_step{0.01};
};

struct StageReport {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> messages;
};

/// Road extent and observation window recorded in field files.
struct Extent {
  double t_min, t_max, x_min, x_max;
};
std::string format_extent(const Extent& e);
std::optional<Extent> parse_extent(const std::string& note);

/// Grid covering [t_min, t_max] x [x_min, x_max] for the given sheared cells.
GridSpec grid_for_extent(const Extent& extent, double dt, double dx, double cwave);

std::filesystem::path lane_file(const std::filesystem::path& dir, int lane, const std::string& suffix);

StageReport run_aggregate(const PipelineConfig& config);
StageReport run_smooth(const PipelineConfig& config);
StageReport run_generate(const PipelineConfig& config);
StageReport run_stats(const PipelineConfig& config);
StageReport run_render(const PipelineConfig& config);
StageReport run_synth(const PipelineConfig& config);

}  // namespace vtraj
