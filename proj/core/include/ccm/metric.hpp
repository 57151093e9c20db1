#pragma once

#include <map>
#include <mutex>
#include <utility>

#include "ccm/control_path.hpp"
#include "ccm/potential.hpp"
#include "ccm/stockyard.hpp"

namespace ccm {

enum class Regime { Large, Small };

/// Vertical shear between base points. Large: 2 Im int_0^1 (z0 - z1) d_zP(z0 + (z1 - z0) s) ds,
/// which is the twist along the segment z0 -> z1. Small: Taylor sum of order m at z1.
double t_offset(const PotentialField& field, BoundaryPoint p0, BoundaryPoint p1, Regime regime, int m);

struct MetricOptions {
  double delta0 = 1.0;
  /// Taylor order of the small-scale shear.
  int m = 2;
  /// Largest delta used when inverting Lambda.
  double delta_cap = 1e4;
  double mu_rel_tol = 1e-9;
  /// Segments of the loops tried by reach_check.
  int loop_segments = 512;
  LambdaOptions lambda{1'000'000, 0, 0, std::nullopt};
};

/// Field plus a memo of Lambda lower bounds per base point. Thread-safe.
class MetricContext {
 public:
  explicit MetricContext(PotentialField field, MetricOptions opts = {});

  const PotentialField& field() const { return field_; }
  const MetricOptions& options() const { return opts_; }

  /// Lower bound for Lambda(z0, delta); nondecreasing in delta across all
  /// values computed so far for this z0.
  double lambda_lower(Complex z0, double delta) const;

 private:
  PotentialField field_;
  MetricOptions opts_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<double, double>, std::map<double, double>> cache_;
};

/// Generalized inverse inf{delta : Lambda_lower(z0, delta) >= h}. Throws
/// OutOfTableRange when h is not reached at delta_cap.
double mu(const MetricContext& ctx, Complex z0, double h);

/// |z1 - z0| + mu(z0, |t1 - t0 - T|) with the regime chosen against delta0.
double distance(const MetricContext& ctx, BoundaryPoint p0, BoundaryPoint p1);

/// |z1 - z0| + sqrt|t1 - t0 - T| after normalizing the base point; quadratic
/// fields only (HessianUnbounded otherwise).
double distance_sqrt(const MetricContext& ctx, BoundaryPoint p0, BoundaryPoint p1);

/// Flow of the constant field a delta X + b delta Y + c f_delta d/dt for unit
/// time. Throws OutOfCylinder unless a^2 + b^2 < 1 and |c| < 1.
BoundaryPoint cylinder_point(const MetricContext& ctx, BoundaryPoint p0, double delta, double f_delta, double a,
                             double b, double c);

/// Tries a segment to the target's base point followed by loops there, all
/// within total length `budget`. A false result is inconclusive.
bool reach_check(const MetricContext& ctx, BoundaryPoint p0, BoundaryPoint target, double budget);

struct VolumeEstimate {
  double delta = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// delta^2 times the Lambda bounds.
VolumeEstimate ball_volume(const MetricContext& ctx, Complex z0, double delta);

}  // namespace ccm
