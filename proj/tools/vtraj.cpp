// Command-line driver: aggregate | smooth | generate | stats | render | synth.
//
// Every option can also be set in a config file (--config) using the option
// name as key, e.g. `dx = 0.02`. Exit codes: 0 success, 1 usage or
// configuration error, 2 data error.

#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vtraj/errors.hpp"
#include "vtraj/pipeline.hpp"

namespace {

struct Flags {
  std::vector<std::string> inputs;
  std::string output{"out"};
  int jobs{1};
  std::string units{"meters"};
  std::string speed_units{"m/s"};
  std::string direction{"increasing"};
  double reference{0.0};

  double dt{4.0};
  double dx{32.18688};
  double cwave{-5.36};
  double t0{0}, t1{0}, x0{0}, x1{0};
  double min_ttt{0.5};
  std::vector<int> lanes;

  double cfree{22.2}, ccong{-4.17}, vc{16.7}, dv{5.56}, sigma{200.0}, tau{20.0}, cutoff{3.0};

  double depart_start{0}, depart_end{0}, interval{15.0}, step{0.1}, origin{0}, destination{0}, t_max{0};

  std::string field, overlay;
  int px_t{2}, px_x{2};
  double vmin{0.0}, vmax{35.0};
  bool downstream_down{false};

  std::string kind{"constant"};
  std::vector<double> v0;
  double amplitude{0}, center{0}, width{200}, wave_speed{0};
  double domain_t0{0}, domain_t1{1200}, domain_x0{0}, domain_x1{4000};
  double spawn{2.0}, fine_step{0.01};
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edie speed fields, adaptive smoothing and virtual trajectories from trajectory files"};
  app.require_subcommand(1, 1);
  app.set_config("--config", "", "Config file (key = value, keys are option names)");
  Flags f;

  app.add_option("--input", f.inputs, "Trajectory CSV / JSON-lines files");
  app.add_option("--output", f.output, "Output directory shared by all stages")->capture_default_str();
  app.add_option("--jobs", f.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--units", f.units, "Distance unit of positions and lengths: miles|feet|meters")->capture_default_str();
  app.add_option("--speed-units", f.speed_units, "Unit of speed-valued options: mph|m/s")->capture_default_str();
  app.add_option("--direction", f.direction, "Mile marker direction of travel: decreasing|increasing")->capture_default_str();
  app.add_option("--reference", f.reference, "Marker (miles) mapped to position 0")->capture_default_str();

  app.add_option("--dt", f.dt, "Cell duration (s)")->capture_default_str();
  auto* dx = app.add_option("--dx", f.dx, "Cell length (distance units; default 0.02 mi)");
  auto* cwave = app.add_option("--cwave", f.cwave, "Shear wave speed (speed units; default -12 mph)");
  auto* t0 = app.add_option("--t0", f.t0, "Window start (s)");
  auto* t1 = app.add_option("--t1", f.t1, "Window end (s)");
  auto* x0 = app.add_option("--x0", f.x0, "Road start position (file position units)");
  auto* x1 = app.add_option("--x1", f.x1, "Road end position (file position units)");
  app.add_option("--min-ttt", f.min_ttt, "Minimum cell travel time for a speed value (s)")->capture_default_str();
  app.add_option("--lane", f.lanes, "Lanes to process (repeatable)");

  auto* cfree = app.add_option("--cfree", f.cfree, "Free-flow characteristic speed");
  auto* ccong = app.add_option("--ccong", f.ccong, "Congested characteristic speed");
  auto* vc = app.add_option("--vc", f.vc, "Crossover speed of the congestion weight");
  auto* dvopt = app.add_option("--dv", f.dv, "Width of the congestion weight transition");
  auto* sigma = app.add_option("--sigma", f.sigma, "Spatial kernel width (distance units; default 200 m)");
  app.add_option("--tau", f.tau, "Temporal kernel width (s)")->capture_default_str();
  app.add_option("--cutoff", f.cutoff, "Kernel support in widths")->capture_default_str();

  auto* depart_start = app.add_option("--depart-start", f.depart_start, "First departure (s)");
  auto* depart_end = app.add_option("--depart-end", f.depart_end, "Last departure (s)");
  app.add_option("--interval", f.interval, "Departure spacing (s)")->capture_default_str();
  app.add_option("--step", f.step, "Euler step (s)")->capture_default_str();
  auto* origin = app.add_option("--origin", f.origin, "Start position (file position units)");
  auto* destination = app.add_option("--destination", f.destination, "End position (file position units)");
  auto* t_max = app.add_option("--t-max", f.t_max, "Integration time bound (s)");

  auto* field = app.add_option("--field", f.field, "Render only this field file");
  auto* overlay = app.add_option("--overlay", f.overlay, "Trajectory CSV drawn over the heatmap");
  app.add_option("--px-t", f.px_t, "Pixels per time cell")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--px-x", f.px_x, "Pixels per cell length")->capture_default_str()->check(CLI::PositiveNumber);
  auto* vmin = app.add_option("--vmin", f.vmin, "Speed at the red end of the colormap");
  auto* vmax = app.add_option("--vmax", f.vmax, "Speed at the green end of the colormap");
  app.add_flag("--downstream-down", f.downstream_down, "Draw downstream at the bottom");

  app.add_option("--kind", f.kind, "Synthetic field: constant|dip")->capture_default_str();
  app.add_option("--v0", f.v0, "Synthetic free speed, m/s (one, or one per lane)");
  app.add_option("--amplitude", f.amplitude, "Dip depth, m/s")->capture_default_str();
  app.add_option("--center", f.center, "Dip center at t=0, m")->capture_default_str();
  app.add_option("--width", f.width, "Dip width, m")->capture_default_str();
  app.add_option("--wave-speed", f.wave_speed, "Dip propagation speed, m/s")->capture_default_str();
  app.add_option("--domain-t0", f.domain_t0, "Synthetic window start, s")->capture_default_str();
  app.add_option("--domain-t1", f.domain_t1, "Synthetic window end, s")->capture_default_str();
  app.add_option("--domain-x0", f.domain_x0, "Synthetic road start, m")->capture_default_str();
  app.add_option("--domain-x1", f.domain_x1, "Synthetic road end, m")->capture_default_str();
  app.add_option("--spawn", f.spawn, "Synthetic spawn interval, s")->capture_default_str();
  app.add_option("--fine-step", f.fine_step, "Synthetic RK4 step, s")->capture_default_str();

  const char* names[] = {"aggregate", "smooth", "generate", "stats", "render", "synth"};
  const char* help[] = {"Edie TTT/TTD and speed fields per lane", "Adaptive smoothing of raw speed fields",
                        "Virtual trajectory departure sweep", "Travel time and speed variability table",
                        "Time-space diagram images", "Synthetic oracle trajectories"};
  std::vector<CLI::App*> subs;
  for (int i = 0; i < 6; ++i) subs.push_back(app.add_subcommand(names[i], help[i])->fallthrough());

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  vtraj::PipelineConfig config;
  try {
    config.output_dir = f.output;
    for (const auto& in : f.inputs) config.inputs.emplace_back(in);
    config.jobs = f.jobs;
    config.units.distance_in = vtraj::parse_distance_unit(f.units);
    config.units.speed_in = vtraj::parse_speed_unit(f.speed_units);
    config.units.mile_marker_direction = vtraj::parse_marker_direction(f.direction);
    config.units.reference_marker = f.reference;
    config.units.validate();

    const double length = vtraj::meters_per_unit(config.units.distance_in);
    const double speed = config.units.speed_in == vtraj::SpeedUnit::mph ? vtraj::kMetersPerMile / 3600.0 : 1.0;
    const auto pos = [&](double p) { return vtraj::to_forward_meters(p, config.units); };

    config.dt = f.dt;
    if (*dx) config.dx = f.dx * length;
    if (*cwave) config.cwave = f.cwave * speed;
    if (*t0) config.t_begin = f.t0;
    if (*t1) config.t_finish = f.t1;
    if (*x0) config.x_begin = pos(f.x0);
    if (*x1) config.x_finish = pos(f.x1);
    config.min_ttt = f.min_ttt;
    if (!f.lanes.empty()) config.lanes = std::set<int>(f.lanes.begin(), f.lanes.end());

    auto& a = config.asm_params;
    if (*cfree) a.c_free = f.cfree * speed;
    if (*ccong) a.c_cong = f.ccong * speed;
    if (*vc) a.v_crit = f.vc * speed;
    if (*dvopt) a.dv = f.dv * speed;
    if (*sigma) a.sigma = f.sigma * length;
    a.tau = f.tau;
    a.cutoff = f.cutoff;

    if (*depart_start) config.depart_start = f.depart_start;
    if (*depart_end) config.depart_end = f.depart_end;
    config.interval = f.interval;
    config.step = f.step;
    if (*origin) config.origin = pos(f.origin);
    if (*destination) config.destination = pos(f.destination);
    if (*t_max) config.t_max = f.t_max;

    if (*field) config.field = f.field;
    if (*overlay) config.overlay = f.overlay;
    config.render.px_per_dt = f.px_t;
    config.render.px_per_dx = f.px_x;
    if (*vmin) config.render.v_min = f.vmin * speed;
    if (*vmax) config.render.v_max = f.vmax * speed;
    config.render.downstream_up = !f.downstream_down;

    auto& s = config.synth;
    s.kind = vtraj::parse_field_kind(f.kind);
    s.amplitude = f.amplitude;
    s.center = f.center;
    s.width = f.width;
    s.wave_speed = f.wave_speed;
    s.t_min = f.domain_t0;
    s.t_max = f.domain_t1;
    s.x_min = f.domain_x0;
    s.x_max = f.domain_x1;
    if (f.lanes.empty()) config.synth_lanes = {1};
    else config.synth_lanes = f.lanes;
    config.synth_v0 = f.v0;
    config.spawn_interval = f.spawn;
    config.fine_step = f.fine_step;
  } catch (const vtraj::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    vtraj::StageReport report;
    if (subs[0]->parsed()) report = vtraj::run_aggregate(config);
    else if (subs[1]->parsed()) report = vtraj::run_smooth(config);
    else if (subs[2]->parsed()) report = vtraj::run_generate(config);
    else if (subs[3]->parsed()) report = vtraj::run_stats(config);
    else if (subs[4]->parsed()) report = vtraj::run_render(config);
    else report = vtraj::run_synth(config);
    for (const auto& m : report.messages) std::cout << m << '\n';
    for (const auto& file : report.files) std::cout << "wrote " << file.string() << '\n';
  } catch (const vtraj::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const vtraj::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const vtraj::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
