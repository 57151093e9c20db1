#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ccm/geometry.hpp"
#include "ccm/potential.hpp"

namespace ccm {

/// An open, simply connected region with its fencing (perimeter). Repeated
/// pens are stored once with a multiplicity.
class Pen {
 public:
  enum class Shape { Disc, Polygon };

  static Pen disc(Complex center, double radius, std::uint64_t count = 1);
  /// Throws DegeneratePolygon unless the polygon is simple with positive area.
  static Pen polygon(Polygon vertices, std::uint64_t count = 1);
  /// Thin rectangle of width `width` whose short sides are centered at `from`
  /// and `to`.
  static Pen connector(Complex from, Complex to, double width);

  Shape shape() const { return shape_; }
  const Disc& as_disc() const { return disc_; }
  const Polygon& vertices() const { return polygon_; }
  std::uint64_t count() const { return count_; }
  void set_count(std::uint64_t n) { count_ = n; }

  /// Fencing of a single copy; 2 pi r for discs.
  double perimeter() const { return perimeter_; }
  double fencing() const { return static_cast<double>(count_) * perimeter_; }
  /// Distance from z to the boundary curve.
  double boundary_distance(Complex z) const;
  /// Distance between the two boundary curves.
  friend double boundary_distance(const Pen& a, const Pen& b);
  /// Mass of a single copy.
  double mass(const PotentialField& field) const;

 private:
  Pen() = default;

  Shape shape_ = Shape::Disc;
  Disc disc_;
  Polygon polygon_;
  double perimeter_ = 0.0;
  std::uint64_t count_ = 1;
};

struct Stockyard {
  Complex anchor;
  double budget = 0.0;
  std::vector<Pen> pens;

  double fencing() const;
  std::uint64_t pen_count() const;
};

struct Validation {
  bool ok = true;
  std::vector<std::string> issues;

  explicit operator bool() const { return ok; }
};

/// Default connectivity tolerance, 1e-6 * delta.
inline double default_eps_conn(double delta) { return 1e-6 * delta; }

/// Checks that the anchor lies on a pen boundary, the fencing fits in the
/// budget and the union of pen boundaries is connected.
Validation validate(const Stockyard& s, double eps_conn);
inline Validation validate(const Stockyard& s) { return validate(s, default_eps_conn(s.budget)); }

/// Sum of pen masses with multiplicity; throws InvalidStockyard when the
/// stockyard does not validate.
double value(const PotentialField& field, const Stockyard& s);

enum class Strategy { SingleCircle, DiscChain, GreedyMulti, Best };

std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);

struct OptimizeResult {
  Stockyard stockyard;
  double value = 0.0;
  Strategy strategy = Strategy::SingleCircle;
  std::int64_t evaluations = 0;
};

/// Searches for a high-value stockyard anchored at z0 with fencing delta.
/// `eval_budget` caps the number of mass evaluations. The returned stockyard
/// always validates.
OptimizeResult optimize(const PotentialField& field, Complex z0, double delta, Strategy strategy,
                        std::int64_t eval_budget = 1'000'000, std::uint64_t seed = 0);

/// c2 (delta + delta^2).
double upper_bound(const PotentialField& field, Complex z0, double delta, double c2);

/// Upper density constant used when none is supplied: the sup of
/// (d + d^2)^-1 ball_mass over the field's window and a ladder up to
/// max(100, delta).
double default_c2(const PotentialField& field, double delta);

struct LambdaOptions {
  std::int64_t eval_budget = 1'000'000;
  int mc_samples = 32;
  std::uint64_t seed = 0;
  std::optional<double> c2;
};

struct LambdaBounds {
  double delta = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

LambdaBounds lambda_estimate(const PotentialField& field, Complex z0, double delta, const LambdaOptions& opts = {});

/// Estimates at several deltas. Lower bounds are made nondecreasing in delta
/// (a stockyard for delta is one for every larger delta).
std::vector<LambdaBounds> lambda_sweep(const PotentialField& field, Complex z0, std::span<const double> deltas,
                                       const LambdaOptions& opts = {});

}  // namespace ccm
