#include <cmath>
#include <numbers>

#include "ccm/error.hpp"
#include "ccm/metric.hpp"
#include "ccm/random.hpp"
#include "doctest.h"
#include "oracles.hpp"

using ccm::BoundaryPoint;
using ccm::Complex;
using ccm::MetricContext;
using ccm::PotentialField;
using ccm::Regime;
using doctest::Approx;

namespace {

const double kPi = std::numbers::pi;

const MetricContext& quad_ctx() {
  static const MetricContext ctx(PotentialField::quadratic());
  return ctx;
}

}  // namespace

TEST_CASE("shear offsets on the quadratic field") {
  const auto q = PotentialField::quadratic();
  CHECK(ccm::t_offset(q, {{1, 0}, 0}, {{0, 1}, 0}, Regime::Large, 2) == Approx(-2.0));
  CHECK(std::abs(ccm::t_offset(q, {{2, 0}, 0}, {{0, 0}, 0}, Regime::Large, 2)) < 1e-14);
  for (auto regime : {Regime::Large, Regime::Small}) {
    CHECK(ccm::t_offset(q, {{3, -1}, 5}, {{3, -1}, 2}, regime, 3) == 0.0);
  }
}

TEST_CASE("large shear matches midpoint quadrature of the segment integral") {
  const auto f = PotentialField::disc_array({-30, -30, 30, 30});
  ccm::Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Complex z0{rng.uniform(-5, 15), rng.uniform(-5, 15)}, z1{rng.uniform(-5, 15), rng.uniform(-5, 15)};
    // 2 Im((z0 - z1) d_zP) with d_zP = (P_x - i P_y) / 2.
    const int n = 200000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const Complex g = f.gradient(z0 + (z1 - z0) * ((i + 0.5) / n));
      s += std::imag((z0 - z1) * Complex{g.real(), -g.imag()});
    }
    CHECK(ccm::t_offset(f, {z0, 0}, {z1, 0}, Regime::Large, 2) == Approx(s / n).epsilon(1e-5).scale(1.0));
  }
}

TEST_CASE("property: both shear branches agree on quadratic fields") {
  ccm::Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto q = PotentialField::quadratic(rng.uniform(0.1, 3));
    const BoundaryPoint p0{{rng.uniform(-9, 9), rng.uniform(-9, 9)}, 0}, p1{{rng.uniform(-9, 9), rng.uniform(-9, 9)}, 0};
    const double large = ccm::t_offset(q, p0, p1, Regime::Large, 2);
    CHECK(ccm::t_offset(q, p0, p1, Regime::Small, 2) == Approx(large).epsilon(1e-10).scale(1.0));
    CHECK(large == Approx(2 * q.quadratic_scale() * std::imag(p0.z * std::conj(p1.z))).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("inverse of the growth function") {
  const auto& ctx = quad_ctx();
  CHECK(ccm::mu(ctx, 0, 0.0) == 0.0);
  CHECK(ccm::mu(ctx, 0, kPi) == Approx(kPi).epsilon(0.03));
  CHECK(ccm::mu(ctx, 0, 4 * kPi) == Approx(2 * kPi).epsilon(0.03));
  try {
    (void)ccm::mu(ctx, 0, 1e12);
    FAIL("expected OutOfTableRange");
  } catch (const ccm::Error& e) {
    CHECK(e.code() == ccm::ErrorCode::OutOfTableRange);
  }
}

TEST_CASE("distances") {
  const auto& ctx = quad_ctx();
  CHECK(ccm::distance(ctx, {0, 0}, {0, 4 * kPi}) == Approx(2 * kPi).epsilon(0.05));
  CHECK(ccm::distance(ctx, {{1, 2}, 3}, {{1, 2}, 3}) == 0.0);
  CHECK(ccm::distance(ctx, {0, 0}, {10, 0}) == Approx(10.0).epsilon(1e-9));
}

TEST_CASE("square root distance") {
  const auto& ctx = quad_ctx();
  CHECK(ccm::distance_sqrt(ctx, {0, 0}, {0, 9}) == Approx(3.0));
  CHECK(ccm::distance_sqrt(ctx, {0, 0}, {4, 16}) == Approx(8.0));
  const MetricContext discs(PotentialField::disc_array({-30, -30, 30, 30}));
  try {
    (void)ccm::distance_sqrt(discs, {0, 0}, {1, 1});
    FAIL("expected HessianUnbounded");
  } catch (const ccm::Error& e) {
    CHECK(e.code() == ccm::ErrorCode::HessianUnbounded);
  }
}

TEST_CASE("cylinder map") {
  const auto& ctx = quad_ctx();
  const BoundaryPoint p0{{0.5, -1}, 2};
  const auto same = ccm::cylinder_point(ctx, p0, 3.0, 1.0, 0, 0, 0);
  CHECK(same.z == p0.z);
  CHECK(same.t == p0.t);
  const auto up = ccm::cylinder_point(ctx, {0, 0}, 2.0, 4.0 / kPi, 0, 0, 0.5);
  CHECK(std::abs(up.z) == 0.0);
  CHECK(up.t == Approx(2.0 / kPi));
  // Planar speed is delta |(a, b)|, so a = 0.6 at delta = 2 moves 1.2.
  const auto side = ccm::cylinder_point(ctx, {0, 0}, 2.0, 1.0, 0.6, 0, 0);
  CHECK(side.z.real() == Approx(1.2));
  CHECK(std::abs(side.t) < 1e-14);
  CHECK_THROWS_AS(ccm::cylinder_point(ctx, {0, 0}, 2.0, 1.0, 0.8, 0.6, 0), ccm::Error);
  CHECK_THROWS_AS(ccm::cylinder_point(ctx, {0, 0}, 2.0, 1.0, 0, 0, -1.0), ccm::Error);
}

TEST_CASE("constructive reachability") {
  const auto& ctx = quad_ctx();
  CHECK(ccm::reach_check(ctx, {{1, 1}, 1}, {{1, 1}, 1}, 0.1));
  CHECK(ccm::reach_check(ctx, {0, 0}, {0, 4 * kPi}, 1.1 * 2 * kPi));
  CHECK_FALSE(ccm::reach_check(ctx, {0, 0}, {0, 4 * kPi}, kPi));
  CHECK(ccm::reach_check(ctx, {0, 0}, {{3, 0}, -2.5}, 8.0));
}

TEST_CASE("ball volumes") {
  const auto& ctx = quad_ctx();
  const auto v = ccm::ball_volume(ctx, 0, kPi);
  CHECK(v.lower == Approx(kPi * kPi * kPi).epsilon(0.05));
  CHECK(v.upper >= v.lower);
  const auto small = ccm::ball_volume(ctx, 0, 1e-3);
  CHECK(small.lower <= 1e-12);
  CHECK(small.upper <= 1e-6 * 20);

  const MetricContext discs(PotentialField::disc_array({-30, -30, 30, 30}));
  const auto d = ccm::ball_volume(discs, PotentialField::spiral_site(1), 60.0);
  CHECK(d.lower >= 3600 * 8);
  CHECK(d.lower <= 3600 * 60 * 1.1);
}

TEST_CASE("property: mu is monotone and inverts the lower bound") {
  const auto& ctx = quad_ctx();
  ccm::Rng rng(7);
  double prev_h = 0.0, prev_mu = 0.0;
  std::vector<double> hs;
  for (int i = 0; i < 20; ++i) hs.push_back(rng.uniform(0, 400));
  std::sort(hs.begin(), hs.end());
  for (double h : hs) {
    const double m = ccm::mu(ctx, 0, h);
    CHECK(h >= prev_h);
    CHECK(m >= prev_mu);
    prev_h = h;
    prev_mu = m;
  }
  for (int i = 0; i < 10; ++i) {
    const double d = rng.uniform(0.5, 30);
    CHECK(ccm::mu(ctx, 0, ctx.lambda_lower(0, d)) <= d * (1 + 1e-6));
  }
}

TEST_CASE("property: distance is symmetric up to a factor") {
  const auto& ctx = quad_ctx();
  ccm::Rng rng(11);
  // Base points from a small set keep the per-point growth tables shared.
  const Complex bases[] = {{0, 0}, {3, -2}, {-4, 1}};
  for (int trial = 0; trial < 30; ++trial) {
    const BoundaryPoint p0{bases[rng.below(3)], rng.uniform(-50, 50)};
    const BoundaryPoint p1{bases[rng.below(3)], rng.uniform(-50, 50)};
    const double a = ccm::distance(ctx, p0, p1), b = ccm::distance(ctx, p1, p0);
    CHECK(a <= 4 * b + 1e-12);
    CHECK(b <= 4 * a + 1e-12);
  }
}

TEST_CASE("property: reach checks bracket the distance") {
  const auto& ctx = quad_ctx();
  ccm::Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const BoundaryPoint p1{{rng.uniform(-5, 5), rng.uniform(-5, 5)}, rng.uniform(-60, 60)};
    const double d = ccm::distance(ctx, {0, 0}, p1);
    CHECK(ccm::reach_check(ctx, {0, 0}, p1, 4 * d));
  }
  for (int trial = 0; trial < 20; ++trial) {
    const BoundaryPoint p1{0, rng.uniform(1, 200) * (trial % 2 ? 1 : -1)};
    const double d = ccm::distance(ctx, {0, 0}, p1);
    CHECK_FALSE(ccm::reach_check(ctx, {0, 0}, p1, d / 4));
  }
}
