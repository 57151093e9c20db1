#include "ccm/metric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "ccm/error.hpp"
#include "ccm/quadrature.hpp"

namespace ccm {

double t_offset(const PotentialField& field, BoundaryPoint p0, BoundaryPoint p1, Regime regime, int m) {
  const Complex d = p0.z - p1.z;
  if (d == Complex{0.0, 0.0}) return 0.0;
  if (regime == Regime::Large) {
    // d_zP = conj(grad) / 2, so the integrand is Im((z0 - z1) conj(grad)).
    auto f = [&](double s) { return std::imag(d * std::conj(field.gradient(p0.z + (p1.z - p0.z) * s))); };
    QuadratureBudget budget;
    // Rounding floor for integrands that vanish identically, e.g. radial segments.
    const double floor =
        1e-14 * std::abs(d) * (std::abs(field.gradient(p0.z)) + std::abs(field.gradient(p1.z))) + 1e-300;
    return adaptive_gauss_legendre(f, 0.0, 1.0, 1e-8, floor, budget);
  }
  const std::vector<Complex> dk = field.dz_derivatives(p1.z, m);
  Complex sum{0.0, 0.0};
  Complex power{1.0, 0.0};
  double fact = 1.0;
  for (int k = 1; k <= m; ++k) {
    power *= d;
    fact *= k;
    sum += dk[static_cast<std::size_t>(k) - 1] * power / fact;
  }
  return 2.0 * sum.imag();
}

MetricContext::MetricContext(PotentialField field, MetricOptions opts) : field_(std::move(field)), opts_(opts) {
  if (!(opts_.delta0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta0 must be > 0");
  if (opts_.m < 1) throw Error(ErrorCode::InvalidArgument, "Taylor order m must be >= 1");
  if (!(opts_.delta_cap > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta_cap must be > 0");
}

double MetricContext::lambda_lower(Complex z0, double delta) const {
  const std::pair<double, double> key{z0.real(), z0.imag()};
  double raw;
  {
    std::lock_guard lock(mutex_);
    auto& row = cache_[key];
    if (auto it = row.find(delta); it != row.end()) {
      raw = it->second;
    } else {
      raw = -1.0;
    }
  }
  if (raw < 0.0) {
    raw = optimize(field_, z0, delta, Strategy::Best, opts_.lambda.eval_budget, opts_.lambda.seed).value;
    if (opts_.lambda.mc_samples > 0) {
      raw = std::max(raw, mc_lower_bound(field_, z0, delta, opts_.lambda.mc_samples, opts_.lambda.seed));
    }
  }
  std::lock_guard lock(mutex_);
  auto& row = cache_[key];
  row.emplace(delta, raw);
  double best = 0.0;
  for (auto it = row.begin(); it != row.end() && it->first <= delta; ++it) best = std::max(best, it->second);
  return best;
}

double mu(const MetricContext& ctx, Complex z0, double h) {
  if (!(h >= 0.0) || !std::isfinite(h)) throw Error(ErrorCode::InvalidArgument, "mu needs h >= 0");
  if (h == 0.0) return 0.0;
  const double cap = ctx.options().delta_cap;
  auto reaches = [&](double d) { return ctx.lambda_lower(z0, d) >= h; };

  double hi = std::min(ctx.options().delta0, cap);
  double lo = 0.0;
  if (reaches(hi)) {
    lo = 0.5 * hi;
    while (reaches(lo)) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-300) return hi;
    }
  } else {
    lo = hi;
    while (true) {
      if (hi >= cap) {
        throw Error(ErrorCode::OutOfTableRange, "h = " + std::to_string(h) + " exceeds Lambda at delta_cap");
      }
      hi = std::min(2.0 * hi, cap);
      if (reaches(hi)) break;
      lo = hi;
    }
  }
  while (hi - lo > ctx.options().mu_rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (reaches(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double distance(const MetricContext& ctx, BoundaryPoint p0, BoundaryPoint p1) {
  const double dz = std::abs(p1.z - p0.z);
  auto eval = [&](Regime r) {
    const double shear = t_offset(ctx.field(), p0, p1, r, ctx.options().m);
    return dz + mu(ctx, p0.z, std::abs(p1.t - p0.t - shear));
  };
  const double large = eval(Regime::Large);
  if (large > ctx.options().delta0) return large;
  const double small = eval(Regime::Small);
  return small <= ctx.options().delta0 ? small : large;
}

double distance_sqrt(const MetricContext& ctx, BoundaryPoint p0, BoundaryPoint p1) {
  const PotentialField& f = ctx.field();
  if (f.kind() == PotentialField::Kind::DiscArray) {
    throw Error(ErrorCode::HessianUnbounded, "disc-array fields have unbounded Hessian");
  }
  if (f.kind() != PotentialField::Kind::Quadratic) {
    throw Error(ErrorCode::HessianUnbounded, "no exact base-point normalization for density grids");
  }
  // Translating the base point to the origin and removing the linear part of
  // P leaves t1 - t0 - 2c Im(z0 conj(z1)) as the vertical offset.
  const double c = f.quadratic_scale();
  const double dt = p1.t - p0.t - 2.0 * c * std::imag(p0.z * std::conj(p1.z));
  return std::abs(p1.z - p0.z) + std::sqrt(std::abs(dt));
}

BoundaryPoint cylinder_point(const MetricContext& ctx, BoundaryPoint p0, double delta, double f_delta, double a,
                             double b, double c) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be > 0");
  if (!(a * a + b * b < 1.0) || !(std::abs(c) < 1.0)) {
    throw Error(ErrorCode::OutOfCylinder, "need a^2 + b^2 < 1 and |c| < 1");
  }
  const Complex z1 = p0.z + planar_velocity(delta, a, b);
  QuadratureBudget budget;
  const double shear = segment_twist(ctx.field(), p0.z, z1, budget);
  return {z1, p0.t + c * f_delta + shear};
}

namespace {

ControlPair rotated(const ControlPair& u, double phi) {
  const Complex rot = std::polar(1.0, phi);
  std::vector<std::array<double, 3>> rows = u.rows();
  for (auto& r : rows) {
    const Complex v = Complex{r[1], -r[2]} * rot;
    r[1] = v.real();
    r[2] = -v.imag();
  }
  return ControlPair::from_rows(rows).projected_mean_zero();
}

}  // namespace

bool reach_check(const MetricContext& ctx, BoundaryPoint p0, BoundaryPoint target, double budget) {
  if (!(budget > 0.0)) throw Error(ErrorCode::InvalidArgument, "budget must be > 0");
  const PotentialField& field = ctx.field();
  const double seg = std::abs(target.z - p0.z);
  if (seg > budget) return false;
  QuadratureBudget qb;
  const double t_after = p0.t + segment_twist(field, p0.z, target.z, qb);
  const double residual = target.t - t_after;
  const double tol = 1e-6 * (1.0 + std::abs(target.t));
  if (std::abs(residual) < tol) return true;
  const double remaining = budget - seg;

  const Orientation orient = residual > 0.0 ? Orientation::Clockwise : Orientation::CounterClockwise;
  const ControlPair base = circle_control(ctx.options().loop_segments, orient);
  const double want = std::abs(residual);

  for (int loops = 1; loops <= 64; loops *= 2) {
    for (int h = 0; h < 4; ++h) {
      const ControlPair u = h == 0 ? base : rotated(base, 0.5 * std::numbers::pi * h);
      // Signed twist of `loops` repetitions of a loop of length sqrt(s).
      auto g = [&](double s) { return loops * twist(field, target.z, std::sqrt(s), u); };
      const double s_max = std::pow(remaining / loops, 2);
      if (!(s_max > 0.0)) continue;
      double fa = -want, fb = std::copysign(1.0, residual) * g(s_max) - want;
      if (std::abs(fb) < tol) return true;
      if (fb < 0.0) continue;
      // Illinois regula falsi in s = length^2; exact in one step when the
      // density is constant near the target.
      double a = 0.0, b = s_max;
      int side = 0;
      for (int it = 0; it < 80; ++it) {
        const double s = (a * fb - b * fa) / (fb - fa);
        const double fs = std::copysign(1.0, residual) * g(s) - want;
        if (std::abs(fs) < tol) return true;
        if (fs > 0.0) {
          b = s;
          fb = fs;
          if (side == 1) fa *= 0.5;
          side = 1;
        } else {
          a = s;
          fa = fs;
          if (side == -1) fb *= 0.5;
          side = -1;
        }
        if (b - a <= 1e-15 * s_max) break;
      }
    }
  }
  return false;
}

VolumeEstimate ball_volume(const MetricContext& ctx, Complex z0, double delta) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be > 0");
  const LambdaBounds b = lambda_estimate(ctx.field(), z0, delta, ctx.options().lambda);
  const double lower = std::max(b.lower, ctx.lambda_lower(z0, delta));
  return {delta, delta * delta * lower, delta * delta * std::max(b.upper, lower)};
}

}  // namespace ccm
