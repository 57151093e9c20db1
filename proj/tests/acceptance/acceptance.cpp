// Prints one PASS/FAIL line per acceptance criterion and exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ccm/control_path.hpp"
#include "ccm/cycle_decomp.hpp"
#include "ccm/metric.hpp"
#include "ccm/random.hpp"
#include "ccm/stockyard.hpp"
#include "ccm/ugs.hpp"
#include "ccm_cli/cli.hpp"
#include "oracles.hpp"

namespace {

using ccm::BoundaryPoint;
using ccm::Complex;
using ccm::PotentialField;

const double kPi = std::numbers::pi;

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Verdict quadratic_growth() {
  Verdict v;
  const auto q = PotentialField::quadratic();
  double worst_lo = 1e300, worst_hi = 0.0;
  for (Complex z0 : {Complex{0, 0}, Complex{3, 4}}) {
    for (double delta : {2.0, 5.0, 10.0, 50.0}) {
      const auto r = ccm::optimize(q, z0, delta, ccm::Strategy::Best);
      const double ratio = r.value / (delta * delta / kPi);
      worst_lo = std::min(worst_lo, ratio);
      worst_hi = std::max(worst_hi, ratio);
      v.require(ratio >= 0.95 && ratio <= 1.001, "ratio " + num(ratio) + " at delta " + num(delta));
      v.require(ccm::validate(r.stockyard).ok, "invalid stockyard");
    }
  }
  if (v.pass) v.detail = "lower/(delta^2/pi) in [" + num(worst_lo) + ", " + num(worst_hi) + "]";
  return v;
}

Verdict circle_twist() {
  Verdict v;
  const auto q = PotentialField::quadratic();
  const double t256 = ccm::twist(q, 0, 2 * kPi, ccm::circle_control(256, ccm::Orientation::Clockwise));
  const double t4096 = ccm::twist(q, 0, 2 * kPi, ccm::circle_control(4096, ccm::Orientation::Clockwise));
  const double e256 = std::abs(t256 / (4 * kPi) - 1), e4096 = std::abs(t4096 / (4 * kPi) - 1);
  v.require(e256 < 0.01, "K=256 relative error " + num(e256));
  v.require(e4096 < 1e-4, "K=4096 relative error " + num(e4096));
  if (v.pass) v.detail = "rel err K=256 " + num(e256) + ", K=4096 " + num(e4096);
  return v;
}

Verdict green_identity() {
  Verdict v;
  const auto q = PotentialField::quadratic();
  double worst = 0.0;
  ccm::Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const ccm::PolyLoop loop(oracle::random_loop(rng, 20, 10.0, {-5, -5}));
    double sum = 0.0;
    for (const auto& c : ccm::decompose(ccm::refine_intersections(loop))) sum += ccm::signed_mass(q, c);
    const double lhs = ccm::loop_integral(q, loop);
    // Closed form: the twist of a closed loop is -4 c times its shoelace area.
    const double exact = -4.0 * oracle::shoelace(loop.vertices());
    const double err = std::abs(sum - lhs) / std::max(std::abs(lhs), 1e-12);
    worst = std::max(worst, err);
    v.require(err < 1e-6, "trial " + std::to_string(trial) + " rel err " + num(err));
    v.require(std::abs(lhs - exact) <= 1e-9 * (1 + std::abs(exact)), "loop integral off the closed form");
  }
  if (v.pass) v.detail = "100 loops, worst rel err " + num(worst);
  return v;
}

Verdict disc_array_bracket() {
  Verdict v;
  const auto f = PotentialField::disc_array({-30, -30, 30, 30});
  ccm::Rng rng(4);
  double worst_margin = 1e300;
  for (int s = 0; s < 5; ++s) {
    const Complex z0{rng.uniform(0, 10), rng.uniform(0, 10)};
    for (double delta : {30.0, 60.0, 120.0, 240.0}) {
      const double c2 = ccm::default_c2(f, delta);
      const auto b = ccm::lambda_estimate(f, z0, delta, {1'000'000, 32, static_cast<std::uint64_t>(s), c2});
      const double need = (delta - 20) / (2 * kPi) - 1;
      worst_margin = std::min(worst_margin, b.lower - need);
      v.require(b.lower >= need, "lower " + num(b.lower) + " < " + num(need) + " at delta " + num(delta));
      v.require(b.lower <= b.upper, "lower above upper");
      v.require(b.upper <= 1.1 * c2 * (delta + delta * delta), "upper above 1.1 c2 (delta + delta^2)");
      v.require(b.lower <= 1.05 * delta, "lower " + num(b.lower) + " above 1.05 delta");
    }
  }
  if (v.pass) v.detail = "smallest margin over (delta-20)/(2pi)-1: " + num(worst_margin);
  return v;
}

Verdict growth_exponents() {
  Verdict v;
  const double qd[] = {2, 5, 10, 20, 50};
  const auto rq = ccm::fit_ugs(PotentialField::quadratic(), {-1, -1, 1, 1}, qd, 1'000'000, 0);
  v.require(std::abs(rq.exponent - 2.0) <= 0.05, "quadratic exponent " + num(rq.exponent));
  v.require(rq.verdict == ccm::Verdict::UgsQuadratic || rq.verdict == ccm::Verdict::UgsLinearLike,
            "quadratic verdict " + std::string(ccm::to_string(rq.verdict)));

  const double dd[] = {30, 60, 120, 240};
  const auto rd = ccm::fit_ugs(PotentialField::disc_array({-30, -30, 30, 30}), {0, 0, 10, 10}, dd, 1'000'000, 0);
  v.require(std::abs(rd.exponent - 1.0) <= 0.15, "disc exponent " + num(rd.exponent));
  v.require(rd.verdict == ccm::Verdict::UgsQuadratic || rd.verdict == ccm::Verdict::UgsLinearLike,
            "disc verdict " + std::string(ccm::to_string(rd.verdict)));

  // Unit density with a zero hole whose radius exceeds 2 delta0 = 2.
  const int n = 41;
  const double h = 0.5;
  std::vector<double> vals(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) vals[j * n + i] = std::hypot(-10 + i * h, -10 + j * h) < 3.0 ? 0.0 : 1.0;
  const auto holed = PotentialField::density_grid(ccm::DensityGrid(n, n, h, {-10, -10}, vals));
  const double hd[] = {1, 2, 4, 8};
  ccm::UgsOptions opts;
  opts.delta0 = 1.0;
  const auto rh = ccm::fit_ugs(holed, {-1, -1, 1, 1}, hd, 1'000'000, 0, opts);
  v.require(rh.verdict == ccm::Verdict::NoUgsEvidence, "hole verdict " + std::string(ccm::to_string(rh.verdict)));

  if (v.pass) {
    v.detail = "quadratic p=" + num(rq.exponent) + " " + std::string(ccm::to_string(rq.verdict)) + ", discs p=" +
               num(rd.exponent) + " " + std::string(ccm::to_string(rd.verdict)) + ", hole " +
               std::string(ccm::to_string(rh.verdict));
  }
  return v;
}

Verdict averages() {
  Verdict v;
  const auto [lo, hi] = ccm::check_averages(PotentialField::quadratic(), {-10, -10, 10, 10}, 1.0, 5);
  const double ratio = hi / lo;
  v.require(ratio < 1 + 1e-6, "ratio " + num(ratio));
  v.require(std::abs(lo - 4.0) < 1e-6, "average " + num(lo) + " instead of 4");
  if (v.pass) v.detail = "max/min - 1 = " + num(ratio - 1) + ", average " + num(lo);
  return v;
}

Verdict distance_formula() {
  Verdict v;
  const ccm::MetricContext ctx(PotentialField::quadratic());
  const double d = ccm::distance(ctx, {0, 0}, {0, 4 * kPi});
  v.require(std::abs(d / (2 * kPi) - 1) <= 0.05, "distance " + num(d));
  v.require(ccm::reach_check(ctx, {0, 0}, {0, 4 * kPi}, 1.1 * 2 * kPi), "not reached at 1.1 * 2pi");
  v.require(!ccm::reach_check(ctx, {0, 0}, {0, 4 * kPi}, kPi), "reached at pi");
  ccm::Rng rng(77);
  double lo = 1e300, hi = 0.0;
  int pairs = 0;
  while (pairs < 100) {
    const BoundaryPoint p1{{rng.uniform(-20, 20), rng.uniform(-20, 20)}, rng.uniform(-400, 400)};
    if (std::abs(p1.z) + std::sqrt(std::abs(p1.t)) < 5.0) continue;
    ++pairs;
    const double r = ccm::distance_sqrt(ctx, {0, 0}, p1) / ccm::distance(ctx, {0, 0}, p1);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  v.require(lo >= 0.1 && hi <= 10, "sqrt/formula ratio range [" + num(lo) + ", " + num(hi) + "]");
  if (v.pass) v.detail = "d=" + num(d) + ", sqrt/formula ratios in [" + num(lo) + ", " + num(hi) + "]";
  return v;
}

Verdict cylinders() {
  Verdict v;
  const ccm::MetricContext ctx(PotentialField::quadratic());
  const BoundaryPoint p0{0, 0};
  std::string jac;
  for (double delta : {5.0, 20.0}) {
    const double f_in = ctx.lambda_lower(p0.z, 0.5 * delta);
    ccm::Rng rng(static_cast<std::uint64_t>(delta));
    int misses = 0;
    for (int i = 0; i < 100; ++i) {
      const Complex ab = rng.in_unit_disc();
      const double c = rng.uniform(-1, 1);
      const auto q = ccm::cylinder_point(ctx, p0, 0.5 * delta, f_in, ab.real(), ab.imag(), c);
      misses += ccm::reach_check(ctx, p0, q, delta) ? 0 : 1;
    }
    v.require(misses == 0, std::to_string(misses) + " of 100 points unreached at delta " + num(delta));

    const double f = ctx.lambda_lower(p0.z, delta);
    const double h = 1e-4;
    auto psi = [&](double a, double b, double c) {
      const auto q = ccm::cylinder_point(ctx, p0, delta, f, a, b, c);
      return std::array<double, 3>{q.z.real(), q.z.imag(), q.t};
    };
    double J[3][3];
    for (int k = 0; k < 3; ++k) {
      double e[3] = {0, 0, 0};
      e[k] = h;
      const auto plus = psi(e[0], e[1], e[2]);
      const auto minus = psi(-e[0], -e[1], -e[2]);
      for (int r = 0; r < 3; ++r) J[r][k] = (plus[r] - minus[r]) / (2 * h);
    }
    const double det = J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
                       J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
                       J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
    const double ratio = std::abs(det) / (delta * delta * f);
    v.require(ratio >= 0.1 && ratio <= 10, "Jacobian ratio " + num(ratio) + " at delta " + num(delta));
    jac += (jac.empty() ? "" : ", ") + num(ratio);
  }
  if (v.pass) v.detail = "200/200 points reached, |J|/(delta^2 Lambda) = " + jac;
  return v;
}

Verdict invariants() {
  Verdict v;
  const PotentialField fields[] = {PotentialField::quadratic(), PotentialField::disc_array({-30, -30, 30, 30})};
  ccm::Rng rng(99);
  int checks = 0;
  for (const auto& f : fields) {
    const std::vector<double> deltas{1, 2, 4, 8, 16, 32, 64};
    for (int s = 0; s < 3; ++s) {
      const Complex z0{rng.uniform(0, 10), rng.uniform(0, 10)};
      const auto rows = ccm::lambda_sweep(f, z0, deltas, {200'000, 8, static_cast<std::uint64_t>(s), {}});
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0) v.require(rows[i].lower >= rows[i - 1].lower, "sweep not monotone");
        const double mc = ccm::mc_lower_bound(f, z0, rows[i].delta, 8, s);
        v.require(mc <= rows[i].upper, "random control bound above upper bound");
        ++checks;
      }
    }
    for (int s = 0; s < 50; ++s) {
      const auto u = oracle::random_mean_zero_control(rng, 3 + static_cast<int>(rng.below(30)));
      const Complex z0{rng.uniform(-5, 15), rng.uniform(-5, 15)};
      const double delta = rng.uniform(0.5, 40);
      const double a = ccm::twist(f, z0, delta, u), b = ccm::twist(f, z0, delta, u.reversed());
      v.require(std::abs(a + b) <= 1e-8 * (1 + std::abs(a)), "reversal did not negate the twist");
      ++checks;
    }
  }
  const ccm::MetricContext ctx(PotentialField::quadratic());
  double prev = 0.0;
  for (double d : {8.0, 1.0, 4.0, 2.0, 16.0}) {
    (void)ctx.lambda_lower(0, d);
  }
  for (double d : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    const double l = ctx.lambda_lower(0, d);
    v.require(l >= prev, "cached lower bounds not monotone");
    prev = l;
  }

  const std::vector<std::vector<std::string>> runs{
      {"lambda", "--z0", "2,3", "--deltas", "1,4,9", "--seed", "11"},
      {"cyl", "--delta", "5", "--samples", "20", "--seed", "11"},
      {"decompose", "--loop", CCM_TEST_DATA_DIR "/fig8.json"},
  };
  for (const auto& args : runs) {
    std::ostringstream a, b, ea, eb;
    const int ca = ccm::cli::run(args, a, ea), cb = ccm::cli::run(args, b, eb);
    v.require(ca == 0 && cb == 0, args[0] + " failed: " + ea.str());
    v.require(a.str() == b.str() && !a.str().empty(), args[0] + " output differs between runs");
  }
  if (v.pass) v.detail = std::to_string(checks) + " invariant checks, 3 CLI runs byte-identical";
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "quadratic growth delta^2/pi", 30, quadratic_growth},
      {2, "circle twist 4pi", 5, circle_twist},
      {3, "Green identity over cycle decompositions", 10, green_identity},
      {4, "disc array lambda bracket", 120, disc_array_bracket},
      {5, "growth exponents and hole rejection", 180, growth_exponents},
      {6, "uniform ball averages", 10, averages},
      {7, "distance formula and reachability", 60, distance_formula},
      {8, "cylinder containment and Jacobian", 60, cylinders},
      {9, "invariant suites and determinism", 60, invariants},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.limit_s) {
      v.pass = false;
      v.detail += (v.detail.empty() ? "" : "; ") + std::string("runtime over ") + num(c.limit_s) + " s";
    }
    failed += v.pass ? 0 : 1;
    std::printf("%s %d %s: %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
