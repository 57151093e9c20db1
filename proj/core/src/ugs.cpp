#include "ccm/ugs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

#include "ccm/error.hpp"

namespace ccm {

std::vector<Complex> window_lattice(const Rect& window, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "grid_n must be >= 1");
  std::vector<Complex> out;
  if (n == 1) return {window.center()};
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      out.push_back({window.x0 + window.width() * i / (n - 1), window.y0 + window.height() * j / (n - 1)});
    }
  }
  return out;
}

namespace {

double ratio(const PotentialField& field, Complex z, double d) { return field.ball_mass(z, d) / (d + d * d); }

// Lattice over [-r, r]^2 pulled radially into the closed disc of radius r.
std::vector<Complex> disc_lattice(Complex center, double r, int n) {
  std::vector<Complex> out;
  for (Complex w : window_lattice({-r, -r, r, r}, n)) {
    const double a = std::abs(w);
    if (a > r) w *= r / a;
    out.push_back(center + w);
  }
  return out;
}

double half_diagonal(const Rect& w) { return 0.5 * std::hypot(w.width(), w.height()); }

}  // namespace

double check_lower_density(const PotentialField& field, const Rect& window, double delta0, int grid_n) {
  if (!(delta0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta0 must be > 0");
  double inf = std::numeric_limits<double>::infinity();
  for (Complex z0 : window_lattice(window, grid_n)) {
    double sup = 0.0;
    for (Complex z : disc_lattice(z0, delta0, grid_n)) {
      for (int j = 0; j <= 10; ++j) sup = std::max(sup, ratio(field, z, std::ldexp(delta0, -j)));
    }
    for (const Disc& d : field.feature_discs(z0, delta0)) {
      if (std::abs(d.center - z0) <= delta0 && d.radius <= delta0) sup = std::max(sup, ratio(field, d.center, d.radius));
    }
    inf = std::min(inf, sup);
  }
  return inf;
}

double check_upper_density(const PotentialField& field, const Rect& window, double delta_max, int grid_n) {
  if (!(delta_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta_max must be > 0");
  double sup = 0.0;
  for (Complex z0 : window_lattice(window, grid_n)) {
    for (int j = 0; j <= 40; ++j) sup = std::max(sup, ratio(field, z0, std::ldexp(delta_max, -j)));
  }
  for (const Disc& d : field.feature_discs(window.center(), half_diagonal(window) + delta_max)) {
    for (int j = 0; j <= 3; ++j) {
      const double r = std::ldexp(d.radius, j);
      if (r <= delta_max) sup = std::max(sup, ratio(field, d.center, r));
    }
  }
  return sup;
}

std::pair<double, double> check_averages(const PotentialField& field, const Rect& window, double delta0, int grid_n) {
  if (!(delta0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta0 must be > 0");
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (Complex z : window_lattice(window, grid_n)) {
    for (double d : {delta0, 2.0 * delta0, 4.0 * delta0}) {
      const double avg = field.ball_mass(z, d) / (std::numbers::pi * d * d);
      lo = std::min(lo, avg);
      hi = std::max(hi, avg);
    }
  }
  return {lo, hi};
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::UgsQuadratic: return "ugs_quadratic";
    case Verdict::UgsLinearLike: return "ugs_linear_like";
    case Verdict::UgsOther: return "ugs_other";
    case Verdict::NoUgsEvidence: return "no_ugs_evidence";
  }
  return "no_ugs_evidence";
}

UgsReport fit_ugs(const PotentialField& field, const Rect& window, std::span<const double> deltas,
                  std::int64_t eval_budget, std::uint64_t seed, const UgsOptions& opts) {
  if (deltas.size() < 4) throw Error(ErrorCode::InvalidArgument, "fit_ugs needs at least 4 deltas");
  std::vector<double> ds(deltas.begin(), deltas.end());
  std::sort(ds.begin(), ds.end());
  if (!(ds.front() > 0.0) || ds.back() < 8.0 * ds.front()) {
    throw Error(ErrorCode::InvalidArgument, "deltas must be positive and span a factor of at least 8");
  }

  UgsReport rep;
  rep.grid_n = opts.grid_n;
  rep.delta0 = opts.delta0.value_or(ds.front());
  rep.c1 = check_lower_density(field, window, rep.delta0, opts.grid_n);
  rep.c2 = std::max(check_upper_density(field, window, std::max(100.0, ds.back()), opts.grid_n),
                    default_c2(field, ds.back()));
  std::tie(rep.avg_ratio_lo, rep.avg_ratio_hi) = check_averages(field, window, rep.delta0, opts.grid_n);
  // Disc densities 2^k / pi grow without bound.
  rep.density_bounded = field.kind() != PotentialField::Kind::DiscArray;
  rep.averages_ok = rep.density_bounded && rep.avg_ratio_lo > 0.0 &&
                    rep.avg_ratio_hi <= opts.averages_ratio * rep.avg_ratio_lo;

  LambdaOptions lo;
  lo.eval_budget = eval_budget;
  lo.mc_samples = opts.mc_samples;
  lo.seed = seed;
  lo.c2 = rep.c2;

  const std::vector<Complex> sites = window_lattice(window, opts.grid_n);
  std::vector<std::vector<LambdaBounds>> per_site;
  for (Complex z0 : sites) per_site.push_back(lambda_sweep(field, z0, ds, lo));

  bool positive = true;
  for (std::size_t k = 0; k < ds.size(); ++k) {
    double log_sum = 0.0, mn = std::numeric_limits<double>::infinity(), mx = 0.0, up = 0.0;
    for (const auto& row : per_site) {
      const double l = row[k].lower;
      mn = std::min(mn, l);
      mx = std::max(mx, l);
      up = std::max(up, row[k].upper);
      log_sum += l > 0.0 ? std::log(l) : -std::numeric_limits<double>::infinity();
    }
    if (!(mn > 0.0)) positive = false;
    const double gm = mn > 0.0 ? std::exp(log_sum / static_cast<double>(per_site.size())) : 0.0;
    rep.f_table.push_back({ds[k], gm, up});
    rep.spread = std::max(rep.spread, mn > 0.0 ? mx / mn : std::numeric_limits<double>::infinity());
  }

  if (positive) {
    // Ordinary least squares of log f against log delta.
    const double n = static_cast<double>(ds.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const LambdaBounds& b : rep.f_table) {
      const double x = std::log(b.delta), y = std::log(b.lower);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    rep.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - rep.exponent * sx) / n;
    rep.prefactor = std::exp(intercept);
    double ss = 0.0;
    for (const LambdaBounds& b : rep.f_table) {
      const double r = std::log(b.lower) - (intercept + rep.exponent * std::log(b.delta));
      ss += r * r;
    }
    rep.residual = std::sqrt(ss / n);
  }

  const bool lower_ok = rep.c1 > 1e-12 * std::max(rep.c2, 1.0);
  const bool uniform = positive && rep.spread <= opts.uniformity_factor;
  const bool in_window = positive && rep.exponent >= 0.8 && rep.exponent <= 2.2;
  if (!lower_ok || !uniform || !in_window) {
    rep.verdict = Verdict::NoUgsEvidence;
  } else if (std::abs(rep.exponent - 2.0) <= 0.15) {
    rep.verdict = Verdict::UgsQuadratic;
  } else if (std::abs(rep.exponent - 1.0) <= 0.2) {
    rep.verdict = Verdict::UgsLinearLike;
  } else {
    rep.verdict = Verdict::UgsOther;
  }
  return rep;
}

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Central difference of d^a/dx^a d^b/dy^b Delta P at z.
double mixed_derivative(const PotentialField& field, Complex z, int a, int b) {
  const int order = a + b;
  if (order == 0) return field.laplacian(z);
  const double h = std::pow(1e-4, 1.0 / order) * (1.0 + std::abs(z));
  double sum = 0.0;
  for (int p = 0; p <= a; ++p) {
    for (int q = 0; q <= b; ++q) {
      const double w = ((p + q) % 2 ? -1.0 : 1.0) * binomial(a, p) * binomial(b, q);
      sum += w * field.laplacian(z + Complex{(0.5 * a - p) * h, (0.5 * b - q) * h});
    }
  }
  return sum / std::pow(h, order);
}

}  // namespace

bool type_m(const PotentialField& field, const Rect& window, int m, int grid_n, double lo, double hi) {
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "type order m must be >= 2");
  if (m - 2 > 4) throw Error(ErrorCode::UnsupportedOrder, "type order m - 2 must not exceed 4");
  for (Complex z : window_lattice(window, grid_n)) {
    double sup = 0.0;
    for (int j = 0; j <= m - 2; ++j) {
      for (int a = 0; a <= j; ++a) sup = std::max(sup, std::abs(mixed_derivative(field, z, a, j - a)));
    }
    if (sup < lo || sup > hi) return false;
  }
  return true;
}

}  // namespace ccm
