#include <doctest.h>

#include <cmath>

#include "vtraj/errors.hpp"
#include "vtraj/synth.hpp"

using namespace vtraj;

namespace {

AnalyticFieldSpec dip_spec() {
  AnalyticFieldSpec s;
  s.kind = AnalyticFieldSpec::Kind::traveling_gaussian_dip;
  s.v0 = 30;
  s.amplitude = 20;
  s.center = 2000;
  s.width = 200;
  s.wave_speed = -5;
  s.t_min = 0;
  s.t_max = 1200;
  s.x_min = 0;
  s.x_max = 4000;
  return s;
}

}  // namespace

TEST_SUITE("synth") {
  TEST_CASE("analytic speed") {
    AnalyticFieldSpec constant;
    constant.v0 = 25;
    CHECK(analytic_speed(constant, 17.0, 1234.0) == 25.0);
    const auto dip = dip_spec();
    CHECK(analytic_speed(dip, 0.0, 2000.0) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(analytic_speed(dip, 100.0, 1500.0) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(analytic_speed(dip, 0.0, 2200.0) == doctest::Approx(30.0 - 20.0 * std::exp(-0.5)));
  }

  TEST_CASE("invalid specs are rejected") {
    auto s = dip_spec();
    s.amplitude = 30;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = dip_spec();
    s.width = 0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = dip_spec();
    s.x_max = s.x_min;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    CHECK_THROWS_AS(generate_fleet(dip_spec(), 2.0, 1, 0.1), ConfigError);
  }

  TEST_CASE("constant field fleet travel time") {
    AnalyticFieldSpec s;
    s.v0 = 25;
    s.t_max = 600;
    const auto fleet = generate_fleet(s, 10.0, 3, 0.01);
    REQUIRE(fleet.size() == 60);
    for (const auto& f : fleet) {
      CHECK(f.lane == 3);
      for (std::size_t i = 1; i < f.points.size(); ++i) CHECK(f.points[i].t > f.points[i - 1].t);
      if (f.points.back().x >= s.x_max - 1e-9) {
        CHECK(f.duration() == doctest::Approx(160.0).epsilon(1e-12));
      } else {
        CHECK(f.points.back().t >= s.t_max);
      }
    }
    CHECK(fleet.front().duration() == doctest::Approx(160.0).epsilon(1e-12));
  }

  TEST_CASE("fleet integration has converged at the fine step") {
    auto s = dip_spec();
    s.t_max = 300;
    const auto coarse = generate_fleet(s, 50.0, 1, 0.02);
    const auto fine = generate_fleet(s, 50.0, 1, 0.01);
    REQUIRE(coarse.size() == fine.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < fine.size(); ++i) {
      REQUIRE(coarse[i].points.size() == fine[i].points.size());
      for (std::size_t k = 0; k < fine[i].points.size(); ++k)
        worst = std::max(worst, std::abs(coarse[i].points[k].x - fine[i].points[k].x));
    }
    CHECK(worst < 1e-6);
  }

  TEST_CASE("reference trajectory") {
    AnalyticFieldSpec constant;
    constant.v0 = 25;
    const auto vt = reference_trajectory(constant, 0.0, 0.0);
    CHECK(vt.complete);
    CHECK(vt.travel_time == doctest::Approx(160.0).epsilon(1e-12));
    CHECK(position_at(vt, 40.0) == doctest::Approx(1000.0));

    // Crossing the dip core: the path meets the minimum speed.
    const auto dip = dip_spec();
    const auto through = reference_trajectory(dip, 0.0, 0.0);
    REQUIRE(through.complete);
    double vmin = 1e9;
    for (const auto& p : through.points) vmin = std::min(vmin, p.v);
    // Dense re-sampling of the analytic field around the slowest recorded point.
    auto slowest = std::min_element(through.points.begin(), through.points.end(),
                                     [](const auto& a, const auto& b) { return a.v < b.v; });
    double dense_min = vmin;
    for (int k = -1000; k <= 1000; ++k) {
      const double t = slowest->t + k * 1e-4;
      dense_min = std::min(dense_min, analytic_speed(dip, t, position_at(through, t)));
    }
    CHECK(dense_min == doctest::Approx(10.0).epsilon(1e-6));

    const auto late = reference_trajectory(dip, dip.t_max, 0.0);
    CHECK_FALSE(late.complete);
    CHECK(late.travel_time == 0.0);
    CHECK(late.points.size() == 1);
  }
}
