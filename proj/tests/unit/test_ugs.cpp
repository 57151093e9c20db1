#include <cmath>
#include <numbers>

#include "ccm/error.hpp"
#include "ccm/ugs.hpp"
#include "doctest.h"

using ccm::Complex;
using ccm::PotentialField;
using ccm::Rect;
using ccm::Verdict;
using doctest::Approx;

namespace {

const double kPi = std::numbers::pi;

PotentialField discs() { return PotentialField::disc_array({-30, -30, 30, 30}); }

// Unit density on [-10, 10]^2 with nodes inside radius `hole` set to zero.
PotentialField holed(double hole) {
  const int n = 41;
  const double h = 0.5;
  std::vector<double> v(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) v[j * n + i] = std::hypot(-10 + i * h, -10 + j * h) < hole ? 0.0 : 1.0;
  return PotentialField::density_grid(ccm::DensityGrid(n, n, h, {-10, -10}, v));
}

// Density supported on [20, 22]^2 only.
PotentialField far_patch() {
  std::vector<double> v(25, 1.0);
  return PotentialField::density_grid(ccm::DensityGrid(5, 5, 0.5, {20, 20}, v));
}

}  // namespace

TEST_CASE("window lattice") {
  const auto one = ccm::window_lattice({0, 0, 2, 4}, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == Complex{1, 2});
  const auto nine = ccm::window_lattice({0, 0, 2, 2}, 3);
  CHECK(nine.size() == 9);
}

TEST_CASE("lower density constants") {
  CHECK(ccm::check_lower_density(PotentialField::quadratic(), {-3, -3, 3, 3}, 1.0, 3) == Approx(2 * kPi).epsilon(0.05));
  CHECK(ccm::check_lower_density(discs(), {0, 0, 10, 10}, 30.0, 3) > 0.01);
  CHECK(ccm::check_lower_density(far_patch(), {-2, -2, 2, 2}, 1.0, 3) == 0.0);
}

TEST_CASE("upper density constants") {
  CHECK(ccm::check_upper_density(PotentialField::quadratic(), {-3, -3, 3, 3}, 100.0, 3) ==
        Approx(4 * kPi).epsilon(0.05));
  CHECK(ccm::check_upper_density(discs(), {-30, -30, 30, 30}, 100.0, 3) <= 1.0);
  // A fixed mass seen from far away: ratio decays like m / (delta + delta^2).
  const auto patch = far_patch();
  const double m = patch.ball_mass({21, 21}, 10.0);
  for (double delta : {1e2, 1e3, 1e4}) {
    CHECK(patch.ball_mass({21, 21}, delta) / (delta + delta * delta) <= m / (delta + delta * delta) * (1 + 1e-9));
  }
}

TEST_CASE("ball averages") {
  const auto [lo, hi] = ccm::check_averages(PotentialField::quadratic(), {-5, -5, 5, 5}, 1.0, 4);
  CHECK(lo == Approx(4.0).epsilon(1e-9));
  CHECK(hi == Approx(4.0).epsilon(1e-9));

  const auto [dlo, dhi] = ccm::check_averages(discs(), {0, 0, 10, 10}, 30.0, 3);
  CHECK(dlo > 0.0);
  CHECK(std::isfinite(dhi));
  CHECK(dhi / dlo > 1.0);

  const auto [hlo, hhi] = ccm::check_averages(holed(3.0), {-1, -1, 1, 1}, 1.0, 3);
  CHECK(hlo < 1e-12);
  CHECK(hhi > 0.0);
}

TEST_CASE("growth fit on the quadratic field") {
  const double deltas[] = {2, 5, 10, 20, 50};
  const auto r = ccm::fit_ugs(PotentialField::quadratic(), {-1, -1, 1, 1}, deltas, 1'000'000, 0);
  CHECK(r.exponent == Approx(2.0).epsilon(0.025));
  CHECK(r.verdict == Verdict::UgsQuadratic);
  CHECK(r.density_bounded);
  CHECK(r.averages_ok);
  CHECK(r.f_table.size() == 5);
  CHECK(r.c1 <= r.c2);
}

TEST_CASE("growth fit on the disc array") {
  const double deltas[] = {30, 60, 120, 240};
  const auto r = ccm::fit_ugs(discs(), {0, 0, 10, 10}, deltas, 1'000'000, 0);
  CHECK(std::abs(r.exponent - 1.0) <= 0.15);
  CHECK(r.verdict == Verdict::UgsLinearLike);
  CHECK_FALSE(r.density_bounded);
  CHECK_FALSE(r.averages_ok);
  CHECK(r.delta0 == 30.0);
}

TEST_CASE("no evidence without lower density") {
  const double deltas[] = {1, 2, 4, 8};
  ccm::UgsOptions opts;
  opts.delta0 = 1.0;
  const auto r = ccm::fit_ugs(holed(3.0), {-1, -1, 1, 1}, deltas, 1'000'000, 0, opts);
  CHECK(r.c1 == 0.0);
  CHECK(r.verdict == Verdict::NoUgsEvidence);
  CHECK_FALSE(r.averages_ok);
}

TEST_CASE("fit preconditions") {
  const double three[] = {1, 10, 100};
  CHECK_THROWS_AS(ccm::fit_ugs(PotentialField::quadratic(), {-1, -1, 1, 1}, three, 1000, 0), ccm::Error);
  const double narrow[] = {1, 1.5, 2, 3};
  CHECK_THROWS_AS(ccm::fit_ugs(PotentialField::quadratic(), {-1, -1, 1, 1}, narrow, 1000, 0), ccm::Error);
}

TEST_CASE("uniform type") {
  const auto q = PotentialField::quadratic();
  CHECK(ccm::type_m(q, {-2, -2, 2, 2}, 2, 3));
  CHECK(ccm::type_m(q, {-2, -2, 2, 2}, 3, 3, 1e-3));
  CHECK_FALSE(ccm::type_m(holed(3.0), {-1, -1, 1, 1}, 2, 3));
  try {
    (void)ccm::type_m(q, {-1, -1, 1, 1}, 7, 2);
    FAIL("expected UnsupportedOrder");
  } catch (const ccm::Error& e) {
    CHECK(e.code() == ccm::ErrorCode::UnsupportedOrder);
  }
  CHECK_THROWS_AS(ccm::type_m(q, {-1, -1, 1, 1}, 1, 2), ccm::Error);
}

TEST_CASE("property: lower density never exceeds upper density") {
  const PotentialField fields[] = {PotentialField::quadratic(0.4), discs(), holed(3.0), far_patch()};
  const Rect windows[] = {{-4, -4, 4, 4}, {0, 0, 10, 10}, {-5, -5, 5, 5}, {19, 19, 23, 23}};
  for (int i = 0; i < 4; ++i) {
    for (double d0 : {0.5, 1.0, 4.0}) {
      CHECK(ccm::check_lower_density(fields[i], windows[i], d0, 3) <=
            ccm::check_upper_density(fields[i], windows[i], 100.0, 3) * (1 + 1e-12));
    }
  }
}

TEST_CASE("property: verdicts respect the growth window and are reproducible") {
  const double deltas[] = {1, 2, 4, 8, 16};
  const PotentialField fields[] = {PotentialField::quadratic(2.0), holed(1.2), far_patch()};
  const Rect windows[] = {{-3, -3, 3, 3}, {-4, -4, 4, 4}, {18, 18, 24, 24}};
  for (int i = 0; i < 3; ++i) {
    const auto a = ccm::fit_ugs(fields[i], windows[i], deltas, 200'000, 9);
    const auto b = ccm::fit_ugs(fields[i], windows[i], deltas, 200'000, 9);
    if (a.verdict != Verdict::NoUgsEvidence) {
      CHECK(a.exponent >= 0.8);
      CHECK(a.exponent <= 2.2);
    }
    CHECK(a.verdict == b.verdict);
    CHECK(a.exponent == b.exponent);
    CHECK(a.c1 == b.c1);
    REQUIRE(a.f_table.size() == b.f_table.size());
    for (std::size_t k = 0; k < a.f_table.size(); ++k) CHECK(a.f_table[k].lower == b.f_table[k].lower);
  }
}
