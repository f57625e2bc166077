#include <doctest.h>

#include <array>
#include <cmath>
#include <cstring>
#include <vector>

#include "fixtures.hpp"
#include "vtraj/errors.hpp"
#include "vtraj/pchip.hpp"
#include "vtraj/vtgen.hpp"

using namespace vtraj;

namespace {

// 5 x 6 field at 4 s / 10 m cells; reference values below come from an
// independent tensor-product PCHIP evaluation of the same nodes.
SmoothedField reference_field(double cwave) {
  SmoothedField s;
  s.grid = {0.0, 4.0, 5, 0.0, 10.0, 6, cwave};
  s.v.resize(5, 6);
  s.v << 30, 29, 25, 18, 22, 28,
         28, 24, 15, 12, 20, 27,
         25, 18, 10, 9, 16, 26,
         27, 22, 14, 11, 19, 28,
         30, 29, 27, 25, 26, 29;
  s.w = FieldArray::Zero(5, 6);
  return s;
}

}  // namespace

TEST_SUITE("vtgen") {
  TEST_CASE("one-dimensional monotone cubic matches the reference") {
    const std::vector<double> xs{0, 1, 2, 3, 4, 5}, ys{10, 10, 20, 20, 15, 30};
    const std::array<std::pair<double, double>, 8> expect{{{0, 10}, {0.25, 10}, {0.5, 10}, {1.5, 15},
                                                            {2.7, 20}, {3.3, 18.92}, {4.5, 19.375}, {5, 30}}};
    for (auto [q, v] : expect) CHECK(pchip_eval<double>(xs, ys, q) == doctest::Approx(v).epsilon(1e-13));

    const std::vector<double> x2{0, 1}, y2{3, 7};
    CHECK(pchip_eval<double>(x2, y2, 0.3) == doctest::Approx(4.2).epsilon(1e-14));
    const std::vector<double> x3{0, 1, 2}, y3{1, 4, 5};
    CHECK(pchip_eval<double>(x3, y3, 0.3) == doctest::Approx(2.1415).epsilon(1e-13));
    CHECK(pchip_eval<double>(x3, y3, 1.6) == doctest::Approx(4.792).epsilon(1e-13));
    // Outside the nodes: clamped.
    CHECK(pchip_eval<double>(x3, y3, -4.0) == 1.0);
    CHECK(pchip_eval<double>(x3, y3, 9.0) == 5.0);
  }

  TEST_CASE("four-point stencil equals the global interpolant") {
    const std::vector<double> xs{0, 1, 2.5, 3, 4.2, 5, 7}, ys{3, 1, 4, 1, 5, 9, 2};
    for (double q = 0.0; q <= 7.0; q += 0.013) {
      const double global = pchip_eval<double>(xs, ys, q);
      std::size_t k = 0;
      while (k + 2 < xs.size() && xs[k + 1] <= q) ++k;
      const std::size_t lo = k == 0 ? 0 : k - 1, hi = std::min(xs.size(), k + 3);
      const std::span<const double> sx(xs.data() + lo, hi - lo), sy(ys.data() + lo, hi - lo);
      CHECK(pchip_eval(sx, sy, q) == doctest::Approx(global).epsilon(1e-14));
    }
  }

  TEST_CASE("tensor-product sampling matches the reference") {
    const auto flat = reference_field(0.0);
    FieldSampler f(flat);
    CHECK(f(7, 23) == doctest::Approx(14.485092529081545).epsilon(1e-12));
    CHECK(f(9.1, 31.7) == doctest::Approx(9.376357789182286).epsilon(1e-12));
    CHECK(f(2, 5) == doctest::Approx(30.0).epsilon(1e-14));
    CHECK(f(15.5, 48) == doctest::Approx(23.191661881808216).epsilon(1e-12));
    CHECK(f(10, 33) == doctest::Approx(9.04711111111111).epsilon(1e-12));
    CHECK(f(0, 0) == doctest::Approx(30.0).epsilon(1e-14));

    const auto sheared = reference_field(-1.5);
    FieldSampler g(sheared);
    CHECK(g(7, 23) == doctest::Approx(11.43688534562047).epsilon(1e-12));
    CHECK(g(9.1, 31.7) == doctest::Approx(16.866649113308434).epsilon(1e-12));
  }

  TEST_CASE("constant field and node values") {
    const auto c = fixtures::constant_smoothed({0, 4, 10, 0, 32.18688, 20, -5.36}, 21.5);
    for (double t = -5; t < 50; t += 3.7)
      for (double x = -100; x < 800; x += 41.3) CHECK(sample_speed(c, t, x) == doctest::Approx(21.5).epsilon(1e-14));

    const auto r = reference_field(-1.5);
    for (Eigen::Index i = 0; i < 5; ++i)
      for (Eigen::Index j = 0; j < 6; ++j)
        CHECK(sample_speed(r, r.grid.t_center(i), r.grid.x_center(i, j)) == doctest::Approx(r.v(i, j)).epsilon(1e-13));
  }

  TEST_CASE("no overshoot between a 10 and a 20 cell") {
    SmoothedField s = fixtures::constant_smoothed({0, 4, 4, 0, 10, 6, 0}, 10.0);
    s.v.rightCols(3).setConstant(20.0);
    for (double t = 0; t <= 16; t += 0.5)
      for (double x = 0; x <= 60; x += 0.25) {
        const double v = sample_speed(s, t, x);
        CHECK(v >= 10.0);
        CHECK(v <= 20.0);
      }
  }

  TEST_CASE("constant speed trip is exact") {
    const auto c = fixtures::constant_smoothed({0, 4, 100, -50, 32.18688, 200, -5.36}, 25.0);
    const auto vt = integrate(c, 10.0, 0.0, 0.1, 4000.0, 1000.0);
    CHECK(vt.complete);
    CHECK(vt.travel_time == doctest::Approx(160.0).epsilon(1e-12));
    CHECK(std::abs(vt.travel_time - 160.0) < 1e-9);
    CHECK(vt.points.back().p == 4000.0);
    CHECK(vt.speed_std == doctest::Approx(0.0));
    CHECK(vt.speed_mean == doctest::Approx(25.0));
  }

  TEST_CASE("degenerate route and time bound") {
    const auto c = fixtures::constant_smoothed({0, 4, 100, -50, 32.18688, 200, -5.36}, 25.0);
    CHECK_THROWS_WITH_AS(integrate(c, 0.0, 100.0, 0.1, 100.0, 50.0), "degenerate route", DataError);
    const auto vt = integrate(c, 0.0, 0.0, 0.1, 4000.0, 50.0);
    CHECK_FALSE(vt.complete);
    CHECK(vt.points.back().t >= 50.0 - 1e-9);
    CHECK(vt.points.back().p < 4000.0);
  }

  TEST_CASE("departure counts") {
    CHECK(departure_count(0, 10800, 15) == 721);
    CHECK(departure_count(0, 7200, 120) == 61);
    CHECK(departure_count(300, 300, 15) == 1);
    CHECK(departure_count(0.1, 0.7, 0.1) == 7);
    const auto c = fixtures::constant_smoothed({0, 4, 100, -50, 32.18688, 200, -5.36}, 25.0);
    SweepParams sw;
    sw.t_start = 0;
    sw.t_end = 120;
    sw.interval = 15;
    sw.origin = 0;
    sw.destination = 1000;
    sw.t_max = 400;
    const auto vts = departure_sweep(c, sw, 3);
    REQUIRE(vts.size() == 9);
    for (std::size_t k = 0; k < vts.size(); ++k) {
      CHECK(vts[k].departure_time == 15.0 * static_cast<double>(k));
      CHECK(vts[k].travel_time == doctest::Approx(40.0).epsilon(1e-12));
    }
  }

  TEST_CASE("trajectories respect the field, are monotone and deterministic") {
    const auto raw = fixtures::dip_raw(-5.0);
    AsmParams p;
    p.c_cong = -5.0;
    const auto s = smooth(raw, p);
    SweepParams sw;
    sw.t_start = 0;
    sw.t_end = 300;
    sw.interval = 30;
    sw.origin = 0;
    sw.destination = 4000;
    sw.t_max = 600;
    const auto a = departure_sweep(s, sw, 1);
    const auto b = departure_sweep(s, sw, 4);
    REQUIRE(a.size() == b.size());
    const double vmax = s.v.maxCoeff();
    for (std::size_t k = 0; k < a.size(); ++k) {
      REQUIRE(a[k].points.size() == b[k].points.size());
      CHECK(std::memcmp(a[k].points.data(), b[k].points.data(), a[k].points.size() * sizeof(a[k].points[0])) == 0);
      const auto& pts = a[k].points;
      double max_acc = 0;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i + 1 < pts.size()) {
          CHECK(pts[i + 1].p >= pts[i].p);
          CHECK(pts[i + 1].t > pts[i].t);
          max_acc = std::max(max_acc, std::abs(pts[i + 1].v - pts[i].v) / (pts[i + 1].t - pts[i].t));
        }
        if (i + 1 < pts.size() || !a[k].complete) CHECK(pts[i].v == sample_speed(s, pts[i].t, pts[i].p));
        CHECK(pts[i].v >= 0.0);
        CHECK(pts[i].v <= vmax);
      }
      // A 200 m dip of 20 m/s crossed at up to 30 m/s: a few m/s^2 at most.
      CHECK(max_acc < 10.0);
    }
  }

  TEST_CASE("integration through the unsmoothed dip field follows the reference") {
    const auto spec = fixtures::dip_spec();
    const auto raw = fixtures::dip_raw(-5.0);
    SmoothedField direct;
    direct.grid = raw.grid;
    direct.v = raw.v.isNaN().select(spec.v0, raw.v);
    direct.w = FieldArray::Zero(raw.v.rows(), raw.v.cols());
    for (double t0 : {40.0, 100.0, 200.0}) {
      const auto vt = integrate(direct, t0, 0.0, 0.1, 4000.0, 600.0);
      const auto ref = reference_trajectory(spec, t0, 0.0);
      REQUIRE(vt.complete);
      double err = 0;
      for (const auto& pt : vt.points) err = std::max(err, std::abs(pt.p - position_at(ref, pt.t)));
      CHECK(err < 2 * 32.18688);
      CHECK(std::abs(vt.travel_time - ref.travel_time) < 2.0);
    }
  }

  TEST_CASE("dip trajectory through the smoothed field follows the reference") {
    const auto spec = fixtures::dip_spec();
    const auto s = smooth(fixtures::dip_raw(-5.0), AsmParams{});
    for (double t0 : {40.0, 100.0, 200.0}) {
      const auto vt = integrate(s, t0, 0.0, 0.1, 4000.0, 600.0);
      const auto ref = reference_trajectory(spec, t0, 0.0);
      REQUIRE(vt.complete);
      double err = 0;
      for (const auto& pt : vt.points) err = std::max(err, std::abs(pt.p - position_at(ref, pt.t)));
      MESSAGE("departure " << t0 << ": max position error " << err << " m");
      CHECK(err < 2 * 32.18688);
    }
  }
}
