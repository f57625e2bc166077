#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "vtraj/analytics.hpp"
#include "vtraj/asm.hpp"
#include "vtraj/edie.hpp"
#include "vtraj/field_io.hpp"
#include "vtraj/format.hpp"
#include "vtraj/pipeline.hpp"
#include "vtraj/trajio.hpp"
#include "vtraj/vtgen.hpp"

namespace fs = std::filesystem;
using namespace vtraj;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("vtraj_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "cli.log";
  const std::string cmd = std::string(VTRAJ_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream s;
  s << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, s.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Two lanes of constant-speed traffic over 600 s and 4 km.
void synth_constant(const fs::path& out) {
  const auto r = run("synth --output " + out.string() +
                         " --kind constant --v0 25 --v0 20 --lane 1 --lane 2 --domain-t1 600 --spawn 10 --fine-step 0.05",
                     out);
  REQUIRE_MESSAGE(r.code == 0, r.out);
}

const char* kStages[] = {"aggregate --input {in} --t0 0 --t1 600 --x0 0 --x1 4000", "smooth",
                         "generate --depart-start 0 --depart-end 300 --interval 60 --origin 0 --destination 4000 --t-max 600",
                         "stats", "render"};

std::string stage_args(const std::string& stage, const fs::path& dir) {
  std::string s = stage;
  if (const auto at = s.find("{in}"); at != std::string::npos) s.replace(at, 4, (dir / "synth.csv").string());
  return s + " --output " + dir.string();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("full pipeline on a constant field") {
    TempDir tmp("constant");
    synth_constant(tmp.path);
    for (const char* stage : kStages) {
      const auto r = run(stage_args(stage, tmp.path), tmp.path);
      REQUIRE_MESSAGE(r.code == 0, stage << ": " << r.out);
    }
    for (const char* f : {"lane1.ttt.field", "lane1.raw.field", "lane2.smoothed.field", "lane2.weight.field",
                          "lane1.trajectories.csv", "lane2.summary.jsonl", "stats.csv", "stats.json",
                          "travel_time_curve.csv", "lane1.raw.ppm", "lane2.smoothed.ppm", "lane2.smoothed.legend.txt"})
      CHECK_MESSAGE(fs::exists(tmp.path / f), f);
    for (const auto& entry : fs::directory_iterator(tmp.path)) CHECK(entry.path().extension() != ".partial");

    const auto j = nlohmann::json::parse(slurp(tmp.path / "stats.json"));
    REQUIRE(j["lanes"].size() == 2);
    CHECK(j["lanes"][0]["label"] == "HOV");
    CHECK(j["lanes"][0]["n"] == 6);
    CHECK(j["lanes"][0]["std_travel_time_min"].get<double>() == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(j["lanes"][0]["mean_speed_std_mph"].get<double>() == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(j["lanes"][0]["mean_travel_time_min"].get<double>() == doctest::Approx(160.0 / 60.0).epsilon(1e-9));
    CHECK(j["lanes"][1]["mean_travel_time_min"].get<double>() == doctest::Approx(200.0 / 60.0).epsilon(1e-9));
    CHECK(slurp(tmp.path / "stats.csv").rfind("statistic,HOV,Lane 2\n", 0) == 0);
  }

  TEST_CASE("stages are idempotent") {
    TempDir tmp("idempotent");
    synth_constant(tmp.path);
    for (const char* stage : kStages) REQUIRE(run(stage_args(stage, tmp.path), tmp.path).code == 0);
    std::map<std::string, std::string> first;
    for (const auto& e : fs::directory_iterator(tmp.path))
      if (e.path().filename() != "cli.log") first[e.path().filename().string()] = slurp(e.path());
    for (const char* stage : kStages) REQUIRE(run(stage_args(stage, tmp.path), tmp.path).code == 0);
    for (const auto& [name, bytes] : first) CHECK_MESSAGE(slurp(tmp.path / name) == bytes, name);
  }

  TEST_CASE("grid mismatch against existing fields is a configuration error") {
    TempDir tmp("mismatch");
    synth_constant(tmp.path);
    REQUIRE(run(stage_args(kStages[0], tmp.path), tmp.path).code == 0);
    const auto r = run(stage_args(kStages[0], tmp.path) + " --dx 50", tmp.path);
    CHECK(r.code == 1);
    CHECK(r.out.find("grid mismatch") != std::string::npos);
  }

  TEST_CASE("usage errors exit 1") {
    TempDir tmp("usage");
    CHECK(run("", tmp.path).code == 1);
    CHECK(run("frobnicate", tmp.path).code == 1);
    CHECK(run("aggregate --output " + tmp.path.string(), tmp.path).code == 1);
    CHECK(run("smooth --sigma -3 --output " + tmp.path.string(), tmp.path).code == 1);
    CHECK(run("aggregate --units furlongs --input x --output " + tmp.path.string(), tmp.path).code == 1);
  }

  TEST_CASE("malformed data exits 2 naming file and line, leaving no partial outputs") {
    TempDir tmp("baddata");
    const fs::path bad = tmp.path / "bad.csv";
    std::ofstream(bad) << "vehicle_id,timestamp_s,position,lane\n1,0,0,1\n1,1,25,1\n1,2,oops,1\n";
    const auto r = run("aggregate --input " + bad.string() + " --t0 0 --t1 10 --x0 0 --x1 100 --output " +
                           (tmp.path / "out").string(),
                       tmp.path);
    CHECK(r.code == 2);
    CHECK(r.out.find("bad.csv") != std::string::npos);
    CHECK(r.out.find("line 4") != std::string::npos);
    if (fs::exists(tmp.path / "out"))
      for (const auto& e : fs::directory_iterator(tmp.path / "out")) CHECK(e.path().extension() != ".partial");
    CHECK_FALSE(fs::exists(tmp.path / "out" / "lane1.raw.field"));

    const auto r2 = run("render --field " + bad.string() + " --output " + tmp.path.string(), tmp.path);
    CHECK(r2.code == 2);
  }

  TEST_CASE("rendering a non-speed field exits 2") {
    TempDir tmp("kind");
    synth_constant(tmp.path);
    REQUIRE(run(stage_args(kStages[0], tmp.path), tmp.path).code == 0);
    const auto r = run("render --field " + (tmp.path / "lane1.ttt.field").string() + " --output " + tmp.path.string(),
                       tmp.path);
    CHECK(r.code == 2);
  }

  TEST_CASE("config file keys match option names") {
    TempDir tmp("config");
    synth_constant(tmp.path);
    std::ofstream(tmp.path / "run.ini") << "output = " << tmp.path.string() << "\ninput = " << (tmp.path / "synth.csv").string()
                                        << "\nt0 = 0\nt1 = 600\nx0 = 0\nx1 = 4000\ndx = 64.37376\n";
    const auto r = run("aggregate --config " + (tmp.path / "run.ini").string(), tmp.path);
    REQUIRE_MESSAGE(r.code == 0, r.out);
    CHECK(read_field_grid(tmp.path / "lane1.raw.field").dx == 64.37376);
    // Flags override the file.
    const auto r2 = run("aggregate --config " + (tmp.path / "run.ini").string() + " --dx 32.18688", tmp.path);
    CHECK(r2.code == 1);
  }

  TEST_CASE("file pipeline equals the in-memory pipeline") {
    TempDir tmp("compose");
    const auto r = run("synth --output " + tmp.path.string() +
                           " --kind dip --v0 30 --amplitude 20 --center 2500 --width 200 --wave-speed -5 --domain-t1 600"
                           " --spawn 4 --fine-step 0.05",
                       tmp.path);
    REQUIRE_MESSAGE(r.code == 0, r.out);
    const std::string stages[] = {"aggregate --input " + (tmp.path / "synth.csv").string() +
                                      " --t0 0 --t1 600 --x0 0 --x1 4000 --cwave -5 --jobs 2",
                                  "smooth --jobs 2",
                                  "generate --depart-start 0 --depart-end 400 --interval 40 --origin 0 --destination 4000",
                                  "stats"};
    for (const auto& s : stages) REQUIRE(run(s + " --output " + tmp.path.string(), tmp.path).code == 0);

    // Same computation without intermediate files.
    const GridSpec grid = grid_for_extent({0, 600, 0, 4000}, 4.0, 32.18688, -5.0);
    std::ifstream in(tmp.path / "synth.csv");
    FragmentReader reader(in, UnitConvention{});
    EdieAccumulator acc(grid);
    while (auto f = reader.next()) acc.add(*f);
    const auto smoothed = smooth(speed_field(acc.field()), AsmParams{});
    SweepParams sw;
    sw.t_start = 0;
    sw.t_end = 400;
    sw.interval = 40;
    sw.origin = 0;
    sw.destination = 4000;
    sw.t_max = grid.t_end();
    std::map<int, std::vector<VirtualTrajectory>> by_lane;
    by_lane[1] = departure_sweep(smoothed, sw);
    const auto mem = lane_summary(by_lane);

    const auto file_smoothed = read_field(tmp.path / "lane1.smoothed.field");
    CHECK(((file_smoothed.values - smoothed.v).abs() <= 1e-9 * smoothed.v.abs()).all());
    const auto j = nlohmann::json::parse(slurp(tmp.path / "stats.json"));
    REQUIRE(mem.size() == 1);
    CHECK(j["lanes"][0]["n"] == mem[0].n);
    const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
    CHECK(close(j["lanes"][0]["mean_travel_time_min"].get<double>(), *mem[0].mean_travel_time));
    CHECK(close(j["lanes"][0]["std_travel_time_min"].get<double>(), *mem[0].std_travel_time));
    CHECK(close(j["lanes"][0]["mean_speed_std_mph"].get<double>(), *mem[0].mean_speed_std));
  }

  TEST_CASE("miles with decreasing markers") {
    TempDir tmp("miles");
    // 2.5 mi of road from marker 62.7 down to 60.2 at 25 m/s.
    std::ofstream csv(tmp.path / "markers.csv");
    csv << "vehicle_id,timestamp_s,position,lane\n";
    for (int k = 0; k <= 170; ++k) csv << "7," << k << ',' << format_number(62.7 - 25.0 * k / 1609.344) << ",3\n";
    csv.close();
    const auto r = run("aggregate --units miles --direction decreasing --reference 62.7 --input " +
                           (tmp.path / "markers.csv").string() + " --t0 0 --t1 160 --x0 62.7 --x1 60.2 --output " +
                           tmp.path.string(),
                       tmp.path);
    REQUIRE_MESSAGE(r.code == 0, r.out);
    const auto raw = read_field(tmp.path / "lane3.raw.field");
    CHECK(raw.grid.dx == doctest::Approx(32.18688));
    int cells = 0;
    for (Eigen::Index i = 0; i < raw.values.rows(); ++i)
      for (Eigen::Index j = 0; j < raw.values.cols(); ++j)
        if (!std::isnan(raw.values(i, j))) {
          CHECK(raw.values(i, j) == doctest::Approx(25.0).epsilon(1e-9));
          ++cells;
        }
    CHECK(cells > 0);
  }
}
