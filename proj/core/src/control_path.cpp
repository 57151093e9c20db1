#include "ccm/control_path.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "ccm/error.hpp"
#include "ccm/random.hpp"

namespace ccm {

namespace {

constexpr double kMeanTol = 1e-12;
constexpr double kTwistRelTol = 1e-8;

}  // namespace

ControlPair::ControlPair(std::vector<double> breakpoints, std::vector<double> alpha, std::vector<double> beta,
                         bool mean_zero)
    : breaks_(std::move(breakpoints)), alpha_(std::move(alpha)), beta_(std::move(beta)), mean_zero_(mean_zero) {
  if (alpha_.empty() || alpha_.size() != beta_.size() || breaks_.size() != alpha_.size() + 1) {
    throw Error(ErrorCode::InvalidControl, "need K+1 breakpoints for K (alpha, beta) pairs");
  }
  if (breaks_.front() != 0.0 || breaks_.back() != 1.0) {
    throw Error(ErrorCode::InvalidControl, "breakpoints must start at 0 and end at 1");
  }
  for (std::size_t j = 0; j < alpha_.size(); ++j) {
    if (!(breaks_[j + 1] > breaks_[j])) throw Error(ErrorCode::InvalidControl, "breakpoints must increase strictly");
    if (!std::isfinite(alpha_[j]) || !std::isfinite(beta_[j])) {
      throw Error(ErrorCode::InvalidControl, "control values must be finite");
    }
    if (std::hypot(alpha_[j], beta_[j]) > kMaxControlSpeed + 1e-15) {
      throw Error(ErrorCode::InvalidControl,
                  "alpha^2 + beta^2 must stay below 1 (segment " + std::to_string(j) + ")");
    }
  }
  if (mean_zero_) {
    const Complex m = integral();
    if (std::abs(m.real()) > kMeanTol || std::abs(m.imag()) > kMeanTol) {
      throw Error(ErrorCode::InvalidControl, "control flagged mean-zero has nonzero mean");
    }
  }
}

ControlPair ControlPair::constant(double alpha, double beta) { return ControlPair({0.0, 1.0}, {alpha}, {beta}); }

ControlPair ControlPair::from_rows(std::span<const std::array<double, 3>> rows, bool mean_zero) {
  std::vector<double> s, a, b;
  for (const auto& r : rows) {
    s.push_back(r[0]);
    a.push_back(r[1]);
    b.push_back(r[2]);
  }
  s.push_back(1.0);
  return ControlPair(std::move(s), std::move(a), std::move(b), mean_zero);
}

std::vector<std::array<double, 3>> ControlPair::rows() const {
  std::vector<std::array<double, 3>> out;
  for (std::size_t j = 0; j < size(); ++j) out.push_back({breaks_[j], alpha_[j], beta_[j]});
  return out;
}

Complex ControlPair::integral() const {
  double a = 0.0, b = 0.0;
  for (std::size_t j = 0; j < size(); ++j) {
    const double w = breaks_[j + 1] - breaks_[j];
    a += w * alpha_[j];
    b += w * beta_[j];
  }
  return {a, b};
}

double ControlPair::max_speed() const {
  double m = 0.0;
  for (std::size_t j = 0; j < size(); ++j) m = std::max(m, std::hypot(alpha_[j], beta_[j]));
  return m;
}

ControlPair ControlPair::reversed() const {
  const std::size_t k = size();
  std::vector<double> s(k + 1), a(k), b(k);
  for (std::size_t j = 0; j <= k; ++j) s[j] = 1.0 - breaks_[k - j];
  s.front() = 0.0;
  s.back() = 1.0;
  for (std::size_t j = 0; j < k; ++j) {
    a[j] = -alpha_[k - 1 - j];
    b[j] = -beta_[k - 1 - j];
  }
  return ControlPair(std::move(s), std::move(a), std::move(b), mean_zero_);
}

ControlPair ControlPair::concatenate(const ControlPair& first, const ControlPair& second, double w) {
  if (!(w > 0.0 && w < 1.0)) throw Error(ErrorCode::InvalidControl, "concatenation weight must lie in (0, 1)");
  std::vector<double> s, a, b;
  for (std::size_t j = 0; j < first.size(); ++j) {
    s.push_back(w * first.breaks_[j]);
    a.push_back(first.alpha_[j]);
    b.push_back(first.beta_[j]);
  }
  for (std::size_t j = 0; j < second.size(); ++j) {
    s.push_back(w + (1.0 - w) * second.breaks_[j]);
    a.push_back(second.alpha_[j]);
    b.push_back(second.beta_[j]);
  }
  s.push_back(1.0);
  // The combined mean is w*m1 + (1-w)*m2, zero whenever both parts are.
  const bool mz = first.mean_zero_ && second.mean_zero_;
  ControlPair out(std::move(s), std::move(a), std::move(b), false);
  if (mz) out = out.projected_mean_zero();
  return out;
}

ControlPair ControlPair::projected_mean_zero() const {
  std::vector<double> a = alpha_, b = beta_;
  for (int pass = 0; pass < 2; ++pass) {
    double ma = 0.0, mb = 0.0;
    for (std::size_t j = 0; j < size(); ++j) {
      const double w = breaks_[j + 1] - breaks_[j];
      ma += w * a[j];
      mb += w * b[j];
    }
    for (std::size_t j = 0; j < size(); ++j) {
      a[j] -= ma;
      b[j] -= mb;
    }
  }
  double vmax = 0.0;
  for (std::size_t j = 0; j < size(); ++j) vmax = std::max(vmax, std::hypot(a[j], b[j]));
  if (vmax > kMaxControlSpeed) {
    const double scale = kMaxControlSpeed / vmax * (1.0 - 1e-15);
    for (std::size_t j = 0; j < size(); ++j) {
      a[j] *= scale;
      b[j] *= scale;
    }
  }
  return ControlPair(breaks_, std::move(a), std::move(b), true);
}

Polygon control_vertices(Complex z0, double delta, const ControlPair& u) {
  Polygon out;
  out.reserve(u.size() + 1);
  out.push_back(z0);
  Complex z = z0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const auto seg = u.segment(j);
    z += seg.duration() * planar_velocity(delta, seg.alpha, seg.beta);
    out.push_back(z);
  }
  return out;
}

double segment_twist(const PotentialField& field, Complex a, Complex b, QuadratureBudget& budget) {
  const Complex d = b - a;
  if (d == Complex{0.0, 0.0}) return 0.0;
  auto integrand = [&](double tau) {
    const Complex g = field.gradient(a + tau * d);
    return g.imag() * d.real() - g.real() * d.imag();
  };
  return adaptive_simpson(integrand, 0.0, 1.0, kTwistRelTol, 1e-15, budget);
}

namespace {

void require_scale(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw Error(ErrorCode::InvalidControl, "delta must be > 0");
}

}  // namespace

BoundaryPoint integrate_flow(const PotentialField& field, BoundaryPoint p0, double delta, const ControlPair& u) {
  return {control_vertices(p0.z, delta, u).back(), p0.t + twist(field, p0.z, delta, u)};
}

double twist(const PotentialField& field, Complex z0, double delta, const ControlPair& u) {
  require_scale(delta);
  const Polygon path = control_vertices(z0, delta, u);
  QuadratureBudget budget;
  double t = 0.0;
  for (std::size_t j = 0; j + 1 < path.size(); ++j) t += segment_twist(field, path[j], path[j + 1], budget);
  return t;
}

double path_length(const ControlPair& u, double delta) {
  double len = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const auto seg = u.segment(j);
    len += seg.duration() * std::hypot(seg.alpha, seg.beta);
  }
  return delta * len;
}

ControlPair circle_control(int segments, Orientation orientation) {
  if (segments < 3) throw Error(ErrorCode::InvalidControl, "circle control needs at least 3 segments");
  const double turn = (orientation == Orientation::Clockwise ? -2.0 : 2.0) * std::numbers::pi / segments;
  std::vector<double> s(static_cast<std::size_t>(segments) + 1), a(static_cast<std::size_t>(segments)),
      b(static_cast<std::size_t>(segments));
  for (int j = 0; j <= segments; ++j) s[static_cast<std::size_t>(j)] = static_cast<double>(j) / segments;
  s.back() = 1.0;
  for (int j = 0; j < segments; ++j) {
    const double heading = turn * j;
    a[static_cast<std::size_t>(j)] = kMaxControlSpeed * std::cos(heading);
    b[static_cast<std::size_t>(j)] = -kMaxControlSpeed * std::sin(heading);
  }
  return ControlPair(std::move(s), std::move(a), std::move(b)).projected_mean_zero();
}

double mc_lower_bound(const PotentialField& field, Complex z0, double delta, int samples, std::uint64_t seed) {
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "mc_lower_bound needs at least one sample");
  require_scale(delta);
  Rng rng(seed);
  double best = 0.0;
  for (int n = 0; n < samples; ++n) {
    const int k = 4 + static_cast<int>(rng.below(61));
    std::vector<double> s(static_cast<std::size_t>(k) + 1);
    s.front() = 0.0;
    s.back() = 1.0;
    // Sorted interior breakpoints, with a floor on the interval width.
    std::vector<double> cuts(static_cast<std::size_t>(k) - 1);
    for (double& c : cuts) c = rng.uniform();
    std::sort(cuts.begin(), cuts.end());
    for (int j = 1; j < k; ++j) s[static_cast<std::size_t>(j)] = (cuts[static_cast<std::size_t>(j) - 1] + 1e-3 * j) / (1.0 + 1e-3 * k);
    std::vector<double> a(static_cast<std::size_t>(k)), b(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
      const Complex v = rng.in_unit_disc();
      a[static_cast<std::size_t>(j)] = v.real();
      b[static_cast<std::size_t>(j)] = v.imag();
    }
    // Fill the speed budget: random directions are rescaled to full speed.
    for (int j = 0; j < k; ++j) {
      const double sp = std::hypot(a[static_cast<std::size_t>(j)], b[static_cast<std::size_t>(j)]);
      if (sp > 0.0) {
        a[static_cast<std::size_t>(j)] *= kMaxControlSpeed / sp;
        b[static_cast<std::size_t>(j)] *= kMaxControlSpeed / sp;
      }
    }
    const ControlPair u = ControlPair(std::move(s), std::move(a), std::move(b)).projected_mean_zero();
    best = std::max(best, std::abs(twist(field, z0, delta, u)));
  }
  return best;
}

}  // namespace ccm
