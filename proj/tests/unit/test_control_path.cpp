#include <cmath>
#include <numbers>

#include "ccm/control_path.hpp"
#include "ccm/error.hpp"
#include "ccm/random.hpp"
#include "ccm/stockyard.hpp"
#include "doctest.h"
#include "oracles.hpp"

using ccm::Complex;
using ccm::ControlPair;
using ccm::Orientation;
using ccm::PotentialField;
using doctest::Approx;

namespace {

const double kPi = std::numbers::pi;

PotentialField discs() { return PotentialField::disc_array({-30, -30, 30, 30}); }

}  // namespace

TEST_CASE("straight flow along the real axis") {
  const auto q = PotentialField::quadratic();
  const auto p = ccm::integrate_flow(q, {0, 0}, 1.0, ControlPair::constant(0.8, 0.0));
  // Planar speed is delta |(alpha, beta)|, so the endpoint sits at path length.
  CHECK(p.z.real() == Approx(0.8));
  CHECK(p.z.imag() == Approx(0.0));
  CHECK(std::abs(p.t) < 1e-14);
  CHECK(ccm::path_length(ControlPair::constant(0.8, 0.0), 1.0) == Approx(0.8));
}

TEST_CASE("zero control fixes the point") {
  const ccm::BoundaryPoint p0{{1.5, -2}, 3.25};
  for (const auto& f : {PotentialField::quadratic(), discs()}) {
    const auto p = ccm::integrate_flow(f, p0, 7.0, ControlPair::constant(0, 0));
    CHECK(p.z == p0.z);
    CHECK(p.t == p0.t);
  }
  CHECK(ccm::path_length(ControlPair::constant(0, 0), 3.0) == 0.0);
}

TEST_CASE("clockwise circle twist on the quadratic field") {
  const auto q = PotentialField::quadratic();
  const double delta = 2 * kPi;
  const auto cw = ccm::circle_control(4096, Orientation::Clockwise);
  const auto end = ccm::integrate_flow(q, {0, 0}, delta, cw);
  CHECK(std::abs(end.z) < 1e-9);
  CHECK(end.t == Approx(4 * kPi).epsilon(1e-4 / (4 * kPi)));
  const double ccw = ccm::twist(q, 0, delta, ccm::circle_control(4096, Orientation::CounterClockwise));
  CHECK(ccw == Approx(-4 * kPi).epsilon(1e-4 / (4 * kPi)));
  CHECK(ccm::twist(q, 0, delta, ccm::circle_control(256, Orientation::Clockwise)) == Approx(4 * kPi).epsilon(0.01));
}

TEST_CASE("circle control lengths approach the circumference") {
  for (int k : {8, 16, 64, 256}) {
    const double len = ccm::path_length(ccm::circle_control(k, Orientation::Clockwise), 2 * kPi);
    CHECK(len <= 2 * kPi);
    CHECK(std::abs(len - 2 * kPi) <= 2 * kPi / (k * k));
  }
}

TEST_CASE("circle control shapes") {
  const auto sq = ccm::circle_control(4, Orientation::Clockwise);
  CHECK(sq.mean_zero());
  CHECK(std::abs(sq.integral()) < 1e-12);
  const auto v = ccm::control_vertices(0, 1.0, sq);
  REQUIRE(v.size() == 5);
  CHECK(std::abs(v.back() - v.front()) < 1e-12);
  CHECK(std::abs(v[1] - v[0]) == Approx(std::abs(v[2] - v[1])));
  CHECK(oracle::shoelace({v.begin(), v.end() - 1}) < 0.0);

  const auto oct = ccm::circle_control(8, Orientation::CounterClockwise);
  CHECK(std::abs(oct.integral()) < 1e-12);
  for (std::size_t j = 0; j < oct.size(); ++j) {
    CHECK(std::hypot(oct.segment(j).alpha, oct.segment(j).beta) < 1.0);
  }
  CHECK_THROWS_AS(ccm::circle_control(2, Orientation::Clockwise), ccm::Error);
}

TEST_CASE("twist on a line where the y derivative vanishes") {
  const auto q = PotentialField::quadratic(3.0);
  const ControlPair u({0, 0.3, 1}, {0.9, -0.5}, {0, 0});
  CHECK(std::abs(ccm::twist(q, {-1, 0}, 4.0, u)) < 1e-12);
}

TEST_CASE("control validation") {
  CHECK_THROWS_AS(ControlPair({0, 1}, {1.0}, {0.0}), ccm::Error);
  CHECK_THROWS_AS(ControlPair({0, 0.6, 0.4, 1}, {0, 0, 0}, {0, 0, 0}), ccm::Error);
  CHECK_THROWS_AS(ControlPair({0, 1}, {0.5}, {0.0}, true), ccm::Error);
  CHECK_THROWS_AS(ControlPair({0, 0.5, 1}, {0.5}, {0.0}), ccm::Error);
  try {
    ControlPair({0.1, 1}, {0.5}, {0.0});
    FAIL("expected InvalidControl");
  } catch (const ccm::Error& e) {
    CHECK(e.code() == ccm::ErrorCode::InvalidControl);
  }
}

TEST_CASE("row serialization round trip") {
  ccm::Rng rng(41);
  const auto u = oracle::random_mean_zero_control(rng, 9);
  const auto rows = u.rows();
  const auto back = ControlPair::from_rows(rows, true);
  REQUIRE(back.size() == u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    CHECK(back.segment(j).alpha == u.segment(j).alpha);
    CHECK(back.segment(j).end == u.segment(j).end);
  }
}

TEST_CASE("twist matches the closed-form segment sum on the quadratic field") {
  ccm::Rng rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 1 + static_cast<int>(rng.below(12));
    std::vector<double> s{0.0}, a, b;
    for (int i = 1; i < k; ++i) s.push_back(static_cast<double>(i) / k);
    s.push_back(1.0);
    for (int i = 0; i < k; ++i) {
      const Complex w = rng.in_unit_disc();
      a.push_back(w.real());
      b.push_back(w.imag());
    }
    const ControlPair u(s, a, b);
    const Complex z0{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const double delta = rng.uniform(0.1, 10);
    const double c = rng.uniform(0.2, 2.0);
    // Planar velocity delta (alpha, -beta) on each interval.
    double expect = 0.0;
    Complex z = z0;
    for (int i = 0; i < k; ++i) {
      const Complex next = z + delta * (s[i + 1] - s[i]) * Complex{a[i], -b[i]};
      expect += oracle::quadratic_segment(c, z, next);
      z = next;
    }
    const auto q = PotentialField::quadratic(c);
    CHECK(ccm::twist(q, z0, delta, u) == Approx(expect).epsilon(1e-10).scale(1.0));
    const auto end = ccm::integrate_flow(q, {z0, 2.0}, delta, u);
    CHECK(std::abs(end.z - z) < 1e-12 * (1 + std::abs(z)));
    CHECK(end.t - 2.0 == Approx(expect).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("twist matches midpoint quadrature on the disc array") {
  const auto f = discs();
  ccm::Rng rng(47);
  auto grad = [&](Complex z) { return f.gradient(z); };
  for (int trial = 0; trial < 10; ++trial) {
    const auto u = oracle::random_mean_zero_control(rng, 6);
    const Complex z0{rng.uniform(-2, 12), rng.uniform(-2, 12)};
    const double delta = rng.uniform(1, 20);
    const auto v = ccm::control_vertices(z0, delta, u);
    double expect = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) expect += oracle::segment_line_integral(grad, v[i], v[i + 1], 200000);
    CHECK(ccm::twist(f, z0, delta, u) == Approx(expect).epsilon(1e-5).scale(1.0));
  }
}

TEST_CASE("random controls stay below the circle optimum") {
  const auto q = PotentialField::quadratic();
  const double v = ccm::mc_lower_bound(q, 0, 2 * kPi, 1000, 7);
  CHECK(v >= 0.0);
  CHECK(v <= 4 * kPi + 1e-3);
}

TEST_CASE("random controls far from all density") {
  const auto lone = PotentialField::disc_array({-1, -1, 1, 1});
  CHECK(std::abs(ccm::mc_lower_bound(lone, {100, 100}, 5.0, 200, 3)) < 1e-8);
}

TEST_CASE("random control bound is reproducible") {
  const auto f = discs();
  CHECK(ccm::mc_lower_bound(f, {3, 4}, 12.0, 1, 99) == ccm::mc_lower_bound(f, {3, 4}, 12.0, 1, 99));
  CHECK(ccm::mc_lower_bound(f, {3, 4}, 12.0, 25, 5) == ccm::mc_lower_bound(f, {3, 4}, 12.0, 25, 5));
}

TEST_CASE("property: reversal negates the twist") {
  ccm::Rng rng(53);
  for (const auto& f : {PotentialField::quadratic(), discs()}) {
    for (int trial = 0; trial < 40; ++trial) {
      const auto u = oracle::random_mean_zero_control(rng, 2 + static_cast<int>(rng.below(20)));
      const Complex z0{rng.uniform(-5, 15), rng.uniform(-5, 15)};
      const double delta = rng.uniform(0.5, 30);
      const double fwd = ccm::twist(f, z0, delta, u);
      CHECK(ccm::twist(f, z0, delta, u.reversed()) == Approx(-fwd).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("property: concatenated loops add their twists") {
  ccm::Rng rng(59);
  for (const auto& f : {PotentialField::quadratic(), discs()}) {
    for (int trial = 0; trial < 30; ++trial) {
      const auto u1 = oracle::random_mean_zero_control(rng, 5);
      const auto u2 = oracle::random_mean_zero_control(rng, 7);
      const Complex z0{rng.uniform(-2, 12), rng.uniform(-2, 12)};
      const double d1 = rng.uniform(0.5, 15), d2 = rng.uniform(0.5, 15);
      const double w = d1 / (d1 + d2);
      const double joined = ccm::twist(f, z0, d1 + d2, ControlPair::concatenate(u1, u2, w));
      const double parts = ccm::twist(f, z0, d1, u1) + ccm::twist(f, z0, d2, u2);
      CHECK(joined == Approx(parts).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("property: path length never exceeds the budget") {
  ccm::Rng rng(61);
  for (int trial = 0; trial < 200; ++trial) {
    const auto u = oracle::random_mean_zero_control(rng, 1 + static_cast<int>(rng.below(30)));
    const double delta = rng.uniform(0.01, 100);
    CHECK(ccm::path_length(u, delta) < delta);
    CHECK(u.max_speed() < 1.0);
  }
}

TEST_CASE("property: twist of a simple loop is its signed enclosed mass") {
  ccm::Rng rng(67);
  for (const auto& f : {PotentialField::quadratic(0.5), discs()}) {
    for (int trial = 0; trial < 20; ++trial) {
      const bool cw = rng.uniform() < 0.5;
      const int k = 8 + static_cast<int>(rng.below(40));
      const auto u = ccm::circle_control(k, cw ? Orientation::Clockwise : Orientation::CounterClockwise);
      const Complex z0 = ccm::PotentialField::spiral_site(1 + static_cast<int>(rng.below(9))) +
                         Complex{rng.uniform(-1, 1), rng.uniform(-1, 1)};
      const double delta = rng.uniform(0.5, 6);
      auto v = ccm::control_vertices(z0, delta, u);
      v.pop_back();
      REQUIRE(oracle::polygon_is_simple(v));
      const double mass = f.region_mass(v);
      const double tw = ccm::twist(f, z0, delta, u);
      CHECK(tw == Approx(cw ? mass : -mass).epsilon(1e-6).scale(1e-3));
    }
  }
}

TEST_CASE("property: random control bounds sit below the upper bound") {
  ccm::Rng rng(71);
  const PotentialField fields[] = {PotentialField::quadratic(), discs()};
  for (const auto& f : fields) {
    for (int trial = 0; trial < 8; ++trial) {
      const Complex z0{rng.uniform(0, 10), rng.uniform(0, 10)};
      const double delta = rng.uniform(0.5, 60);
      const double lower = ccm::mc_lower_bound(f, z0, delta, 16, trial);
      CHECK(lower <= ccm::upper_bound(f, z0, delta, ccm::default_c2(f, delta)));
    }
  }
}
