#include "ccm/stockyard.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>

#include "ccm/control_path.hpp"
#include "ccm/error.hpp"
#include "ccm/random.hpp"
#include "ccm/ugs.hpp"

namespace ccm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFencingSlack = 1e-12;
constexpr std::uint64_t kMaxCopies = std::uint64_t{1} << 62;

double circle_boundary_distance(Complex c, double r, Complex z) { return std::abs(std::abs(z - c) - r); }

// Distance between a segment and a circle (as curves).
double segment_circle_distance(Complex a, Complex b, Complex c, double r) {
  const double dmin = point_segment_distance(c, a, b);
  const double dmax = std::max(std::abs(a - c), std::abs(b - c));
  if (r < dmin) return dmin - r;
  if (r > dmax) return r - dmax;
  return 0.0;
}

}  // namespace

Pen Pen::disc(Complex center, double radius, std::uint64_t count) {
  if (!(radius > 0.0) || !std::isfinite(radius) || !std::isfinite(center.real()) || !std::isfinite(center.imag())) {
    throw Error(ErrorCode::InvalidArgument, "disc pen needs a finite center and radius > 0");
  }
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "pen multiplicity must be >= 1");
  Pen p;
  p.shape_ = Shape::Disc;
  p.disc_ = {center, radius};
  p.perimeter_ = kTwoPi * radius;
  p.count_ = count;
  return p;
}

Pen Pen::polygon(Polygon vertices, std::uint64_t count) {
  require_nondegenerate(vertices);
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "pen multiplicity must be >= 1");
  Pen p;
  p.shape_ = Shape::Polygon;
  p.perimeter_ = ccm::perimeter(vertices);
  p.polygon_ = std::move(vertices);
  p.count_ = count;
  return p;
}

Pen Pen::connector(Complex from, Complex to, double width) {
  const Complex d = to - from;
  const double len = std::abs(d);
  if (!(len > 0.0) || !(width > 0.0)) throw Error(ErrorCode::InvalidArgument, "connector needs positive length and width");
  const Complex n = Complex{0.0, 1.0} * d / len * (0.5 * width);
  return polygon({from - n, to - n, to + n, from + n});
}

double Pen::boundary_distance(Complex z) const {
  if (shape_ == Shape::Disc) return circle_boundary_distance(disc_.center, disc_.radius, z);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < polygon_.size(); ++i) {
    best = std::min(best, point_segment_distance(z, polygon_[i], polygon_[(i + 1) % polygon_.size()]));
  }
  return best;
}

double boundary_distance(const Pen& a, const Pen& b) {
  using Shape = Pen::Shape;
  if (a.shape_ == Shape::Disc && b.shape_ == Shape::Disc) {
    const double d = std::abs(a.disc_.center - b.disc_.center);
    const double r1 = a.disc_.radius, r2 = b.disc_.radius;
    if (d >= r1 + r2) return d - r1 - r2;
    if (d <= std::abs(r1 - r2)) return std::abs(r1 - r2) - d;
    return 0.0;
  }
  if (a.shape_ == Shape::Polygon && b.shape_ == Shape::Disc) return boundary_distance(b, a);
  double best = std::numeric_limits<double>::infinity();
  const Polygon& q = b.polygon_;
  for (std::size_t j = 0; j < q.size(); ++j) {
    const Complex c = q[j], d = q[(j + 1) % q.size()];
    if (a.shape_ == Shape::Disc) {
      best = std::min(best, segment_circle_distance(c, d, a.disc_.center, a.disc_.radius));
    } else {
      const Polygon& p = a.polygon_;
      for (std::size_t i = 0; i < p.size(); ++i) {
        best = std::min(best, segment_segment_distance(p[i], p[(i + 1) % p.size()], c, d));
      }
    }
  }
  return best;
}

double Pen::mass(const PotentialField& field) const {
  if (shape_ == Shape::Disc) return field.ball_mass(disc_.center, disc_.radius);
  return field.region_mass(polygon_);
}

double Stockyard::fencing() const {
  double f = 0.0;
  for (const Pen& p : pens) f += p.fencing();
  return f;
}

std::uint64_t Stockyard::pen_count() const {
  std::uint64_t n = 0;
  for (const Pen& p : pens) n += p.count();
  return n;
}

Validation validate(const Stockyard& s, double eps_conn) {
  Validation v;
  auto fail = [&v](std::string msg) {
    v.ok = false;
    v.issues.push_back(std::move(msg));
  };
  if (!(s.budget > 0.0)) fail("budget must be > 0");
  if (s.pens.empty()) {
    fail("stockyard has no pens");
    return v;
  }
  const double fence = s.fencing();
  if (fence > s.budget * (1.0 + kFencingSlack)) {
    fail("fencing " + std::to_string(fence) + " exceeds budget " + std::to_string(s.budget));
  }

  const std::size_t n = s.pens.size();
  std::vector<std::size_t> parent(n + 1);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  auto unite = [&](std::size_t a, std::size_t b) { parent[find(a)] = find(b); };

  bool anchored = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (s.pens[i].boundary_distance(s.anchor) <= eps_conn) {
      anchored = true;
      unite(i, n);
    }
  }
  if (!anchored) fail("anchor is not on any pen boundary");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (find(i) != find(j) && boundary_distance(s.pens[i], s.pens[j]) <= eps_conn) unite(i, j);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (find(i) != find(n)) {
      fail("pen " + std::to_string(i) + " boundary is disconnected from the anchor");
    }
  }
  return v;
}

double value(const PotentialField& field, const Stockyard& s) {
  const Validation v = validate(s);
  if (!v) throw Error(ErrorCode::InvalidStockyard, v.issues.front());
  double total = 0.0;
  for (const Pen& p : s.pens) total += static_cast<double>(p.count()) * p.mass(field);
  return total;
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::SingleCircle: return "single_circle";
    case Strategy::DiscChain: return "disc_chain";
    case Strategy::GreedyMulti: return "greedy_multi";
    case Strategy::Best: return "best";
  }
  return "best";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  for (Strategy s : {Strategy::SingleCircle, Strategy::DiscChain, Strategy::GreedyMulti, Strategy::Best}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

namespace {

class Evaluator {
 public:
  Evaluator(const PotentialField& field, std::int64_t budget) : field_(field), budget_(budget) {}

  bool exhausted() const { return used_ >= budget_; }
  std::int64_t used() const { return used_; }
  double ball(Complex c, double r) {
    ++used_;
    return field_.ball_mass(c, r);
  }

 private:
  const PotentialField& field_;
  std::int64_t budget_;
  std::int64_t used_ = 0;
};

struct Best1D {
  double x;
  double fx;
};

// Golden-section search for a maximum on [a, b]; keeps the best point seen.
Best1D golden_max(const std::function<double(double)>& f, double a, double b, int iters, Best1D best) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 > best.fx) best = {x1, f1};
    if (f2 > best.fx) best = {x2, f2};
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    }
  }
  if (f1 > best.fx) best = {x1, f1};
  if (f2 > best.fx) best = {x2, f2};
  return best;
}

double max_radius(double delta) { return delta / kTwoPi * (1.0 - kFencingSlack); }

OptimizeResult finish(const PotentialField& field, Stockyard s, Strategy strategy, const Evaluator& ev) {
  OptimizeResult r;
  r.value = value(field, s);
  r.stockyard = std::move(s);
  r.strategy = strategy;
  r.evaluations = ev.used();
  return r;
}

OptimizeResult single_circle(const PotentialField& field, Complex z0, double delta, Evaluator& ev, Rng& rng) {
  const double rmax = max_radius(delta);
  auto f = [&](double theta, double rho) { return ev.ball(z0 + std::polar(rho, theta), rho); };

  struct Start {
    double theta, rho, value;
  };
  std::vector<Start> starts;
  for (int j = 0; j < 12; ++j) {
    const double theta = j < 8 ? kTwoPi * j / 8.0 : rng.uniform(0.0, kTwoPi);
    starts.push_back({theta, rmax, f(theta, rmax)});
    if (ev.exhausted()) break;
  }
  std::stable_sort(starts.begin(), starts.end(), [](const Start& a, const Start& b) { return a.value > b.value; });
  starts.resize(std::min<std::size_t>(starts.size(), 3));

  Start best = starts.front();
  for (Start s : starts) {
    for (int round = 0; round < 3 && !ev.exhausted(); ++round) {
      const double span = std::numbers::pi / 4.0 * std::ldexp(1.0, -round);
      const Best1D bt = golden_max([&](double t) { return f(t, s.rho); }, s.theta - span, s.theta + span, 20,
                                   {s.theta, s.value});
      s.theta = bt.x;
      s.value = bt.fx;
      const Best1D br = golden_max([&](double r) { return f(s.theta, r); }, 1e-3 * rmax, rmax, 30, {s.rho, s.value});
      s.rho = br.x;
      s.value = br.fx;
    }
    if (s.value > best.value) best = s;
  }

  Stockyard yard{z0, delta, {Pen::disc(z0 + std::polar(best.rho, best.theta), best.rho)}};
  return finish(field, std::move(yard), Strategy::SingleCircle, ev);
}

struct Target {
  Complex center;
  double radius;
  double mass;
};

std::vector<Target> scan_targets(const PotentialField& field, Complex z0, double delta, Evaluator& ev) {
  std::vector<Target> out;
  for (const Disc& d : field.feature_discs(z0, 0.5 * delta)) {
    out.push_back({d.center, d.radius, field.feature_disc_mass(d)});
  }
  const int n = 32;
  const double half = 0.5 * delta, step = delta / n;
  const double rmax = max_radius(delta);
  for (int j = 0; j < n && !ev.exhausted(); ++j) {
    for (int i = 0; i < n && !ev.exhausted(); ++i) {
      const Complex p = z0 + Complex{-half + (i + 0.5) * step, -half + (j + 0.5) * step};
      if (std::abs(p - z0) > half) continue;
      for (double r : {rmax, 0.5 * rmax, 0.25 * rmax}) {
        const double m = ev.ball(p, r);
        if (m > 0.0) out.push_back({p, r, m});
      }
    }
  }
  return out;
}

struct Link {
  double gap = 0.0;        // distance from z0 to the target circle
  Complex contact;         // nearest boundary point
  bool needed = false;
};

Link link_to(Complex z0, const Target& t, double on_tol) {
  Link l;
  const Complex d = z0 - t.center;
  const double dist = std::abs(d);
  l.gap = std::abs(dist - t.radius);
  l.contact = t.center + (dist > 0.0 ? d / dist : Complex{1.0, 0.0}) * t.radius;
  l.needed = l.gap > on_tol;
  return l;
}

double connector_cost(const Link& l, double width) { return l.needed ? 2.0 * l.gap + 2.0 * width : 0.0; }

struct Chain {
  Target target;
  Link link;
  std::uint64_t copies = 0;
  double estimate = 0.0;
};

Chain plan_chain(Complex z0, double delta, const Target& t, double width, double on_tol) {
  Chain c{t, link_to(z0, t, on_tol)};
  const double remaining = delta - connector_cost(c.link, width);
  const double per = kTwoPi * t.radius;
  if (remaining <= 0.0) return c;
  const double n = std::floor(remaining / per * (1.0 - kFencingSlack));
  if (n < 1.0 || n > static_cast<double>(kMaxCopies)) return c;
  c.copies = static_cast<std::uint64_t>(n);
  c.estimate = n * t.mass;
  return c;
}

Stockyard build_chain(Complex z0, double delta, const Chain& c, double width) {
  Stockyard s{z0, delta, {}};
  if (c.link.needed) s.pens.push_back(Pen::connector(z0, c.link.contact, width));
  s.pens.push_back(Pen::disc(c.target.center, c.target.radius, c.copies));
  // Leftover fencing buys a smaller disc tangent at the contact point.
  const double left = delta - s.fencing();
  const double rho = std::min(left / kTwoPi * (1.0 - 1e-9), c.target.radius * (1.0 - 1e-9));
  if (rho > 1e-9 * delta) {
    const Complex center = c.link.contact + (c.target.center - c.link.contact) * (rho / c.target.radius);
    s.pens.push_back(Pen::disc(center, rho));
  }
  return s;
}

Stockyard fallback(Complex z0, double delta) {
  const double r = max_radius(delta);
  return {z0, delta, {Pen::disc(z0 + r, r)}};
}

OptimizeResult disc_chain(const PotentialField& field, Complex z0, double delta, const std::vector<Target>& targets,
                          Evaluator& ev) {
  const double width = 1e-4 * delta;
  const double on_tol = 0.25 * default_eps_conn(delta);
  std::vector<Chain> plans;
  for (const Target& t : targets) {
    Chain c = plan_chain(z0, delta, t, width, on_tol);
    if (c.copies > 0) plans.push_back(c);
  }
  if (plans.empty()) return finish(field, fallback(z0, delta), Strategy::DiscChain, ev);
  std::stable_sort(plans.begin(), plans.end(), [](const Chain& a, const Chain& b) { return a.estimate > b.estimate; });
  if (plans.size() > 5) plans.resize(5);

  // Refine the radius of the leading candidates.
  const double rmax = max_radius(delta);
  for (Chain& c : plans) {
    if (ev.exhausted()) break;
    const Complex center = c.target.center;
    auto score = [&](double r) {
      Target t{center, r, ev.ball(center, r)};
      return plan_chain(z0, delta, t, width, on_tol).estimate;
    };
    const Best1D b = golden_max(score, 0.25 * c.target.radius, std::min(2.0 * c.target.radius, rmax), 24,
                                {c.target.radius, c.estimate});
    if (b.fx > c.estimate) {
      Target t{center, b.x, ev.ball(center, b.x)};
      c = plan_chain(z0, delta, t, width, on_tol);
    }
  }
  const auto best = std::max_element(plans.begin(), plans.end(),
                                     [](const Chain& a, const Chain& b) { return a.estimate < b.estimate; });
  if (best->copies == 0) return finish(field, fallback(z0, delta), Strategy::DiscChain, ev);
  return finish(field, build_chain(z0, delta, *best, width), Strategy::DiscChain, ev);
}

OptimizeResult greedy_multi(const PotentialField& field, Complex z0, double delta, const std::vector<Target>& targets,
                            Evaluator& ev) {
  const double width = 1e-4 * delta;
  const double on_tol = 0.25 * default_eps_conn(delta);

  struct Item {
    Target target;
    Link link;
    double conn = 0.0;
    double per = 0.0;
    std::uint64_t copies = 0;
  };
  std::vector<Item> items;
  for (const Target& t : targets) {
    Item it{t, link_to(z0, t, on_tol)};
    if (it.link.needed) it.conn = Pen::connector(z0, it.link.contact, width).perimeter();
    it.per = kTwoPi * t.radius;
    if (it.conn + it.per < delta) items.push_back(std::move(it));
  }
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    return a.target.mass / (a.per + a.conn) > b.target.mass / (b.per + b.conn);
  });
  if (items.size() > 8) items.resize(8);

  double remaining = delta * (1.0 - kFencingSlack);
  for (;;) {
    Item* pick = nullptr;
    double pick_ratio = 0.0;
    for (Item& it : items) {
      const double cost = it.per + (it.copies > 0 ? 0.0 : it.conn);
      if (cost > remaining) continue;
      const double ratio = it.target.mass / cost;
      if (ratio > pick_ratio) {
        pick = &it;
        pick_ratio = ratio;
      }
    }
    if (pick == nullptr) break;
    if (pick->copies == 0) {
      remaining -= pick->conn + pick->per;
      pick->copies = 1;
      continue;
    }
    const double more = std::floor(remaining / pick->per);
    if (more < 1.0 || static_cast<double>(pick->copies) + more > static_cast<double>(kMaxCopies)) break;
    pick->copies += static_cast<std::uint64_t>(more);
    remaining -= more * pick->per;
  }

  Stockyard s{z0, delta, {}};
  for (const Item& it : items) {
    if (it.copies == 0) continue;
    if (it.link.needed) s.pens.push_back(Pen::connector(z0, it.link.contact, width));
    s.pens.push_back(Pen::disc(it.target.center, it.target.radius, it.copies));
  }
  if (s.pens.empty()) s = fallback(z0, delta);
  return finish(field, std::move(s), Strategy::GreedyMulti, ev);
}

}  // namespace

OptimizeResult optimize(const PotentialField& field, Complex z0, double delta, Strategy strategy,
                        std::int64_t eval_budget, std::uint64_t seed) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw Error(ErrorCode::InvalidArgument, "delta must be > 0");
  if (eval_budget < 1) throw Error(ErrorCode::InvalidArgument, "eval_budget must be >= 1");
  Evaluator ev(field, eval_budget);
  Rng rng(seed);

  if (strategy == Strategy::SingleCircle) return single_circle(field, z0, delta, ev, rng);

  const std::vector<Target> targets = scan_targets(field, z0, delta, ev);
  if (strategy == Strategy::DiscChain) return disc_chain(field, z0, delta, targets, ev);
  if (strategy == Strategy::GreedyMulti) return greedy_multi(field, z0, delta, targets, ev);

  OptimizeResult best = single_circle(field, z0, delta, ev, rng);
  for (OptimizeResult r : {disc_chain(field, z0, delta, targets, ev), greedy_multi(field, z0, delta, targets, ev)}) {
    if (r.value > best.value) best = std::move(r);
  }
  best.evaluations = ev.used();
  return best;
}

double upper_bound(const PotentialField& field, Complex z0, double delta, double c2) {
  (void)field;
  (void)z0;
  return c2 * (delta + delta * delta);
}

double default_c2(const PotentialField& field, double delta) {
  return check_upper_density(field, field.default_window(), std::max(100.0, delta), 3);
}

LambdaBounds lambda_estimate(const PotentialField& field, Complex z0, double delta, const LambdaOptions& opts) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw Error(ErrorCode::InvalidArgument, "delta must be > 0");
  LambdaBounds b;
  b.delta = delta;
  b.lower = optimize(field, z0, delta, Strategy::Best, opts.eval_budget, opts.seed).value;
  if (opts.mc_samples > 0) b.lower = std::max(b.lower, mc_lower_bound(field, z0, delta, opts.mc_samples, opts.seed));
  const double c2 = opts.c2 ? *opts.c2 : default_c2(field, delta);
  b.upper = std::max(upper_bound(field, z0, delta, c2), b.lower);
  return b;
}

std::vector<LambdaBounds> lambda_sweep(const PotentialField& field, Complex z0, std::span<const double> deltas,
                                       const LambdaOptions& opts) {
  std::vector<LambdaBounds> out(deltas.size());
  if (deltas.empty()) return out;
  std::vector<std::size_t> order(deltas.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return deltas[a] < deltas[b]; });

  LambdaOptions o = opts;
  if (!o.c2) o.c2 = default_c2(field, deltas[order.back()]);
  double running = 0.0;
  for (std::size_t idx : order) {
    LambdaBounds b = lambda_estimate(field, z0, deltas[idx], o);
    running = std::max(running, b.lower);
    b.lower = running;
    b.upper = std::max(b.upper, b.lower);
    out[idx] = b;
  }
  return out;
}

}  // namespace ccm
