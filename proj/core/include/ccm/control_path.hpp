#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ccm/geometry.hpp"
#include "ccm/potential.hpp"
#include "ccm/quadrature.hpp"

namespace ccm {

/// A point (z, t) of the boundary hypersurface, identified with C x R.
struct BoundaryPoint {
  Complex z;
  double t = 0.0;
};

enum class Orientation { Clockwise, CounterClockwise };

/// Largest admissible control speed; the open constraint alpha^2 + beta^2 < 1
/// is realized with this margin.
inline constexpr double kMaxControlSpeed = 1.0 - 1e-9;

/// Piecewise constant control (alpha, beta) on [0, 1].
class ControlPair {
 public:
  struct Segment {
    double start;
    double end;
    double alpha;
    double beta;
    double duration() const { return end - start; }
  };

  /// `breakpoints` runs 0 = s_0 < ... < s_K = 1 and there is one (alpha, beta)
  /// per interval. Throws InvalidControl on any violated invariant,
  /// including a nonzero mean when `mean_zero` is requested.
  ControlPair(std::vector<double> breakpoints, std::vector<double> alpha, std::vector<double> beta,
              bool mean_zero = false);

  static ControlPair constant(double alpha, double beta);
  /// Rows [s_j, alpha_j, beta_j] with s_0 = 0; the last interval ends at 1.
  static ControlPair from_rows(std::span<const std::array<double, 3>> rows, bool mean_zero = false);

  std::size_t size() const { return alpha_.size(); }
  Segment segment(std::size_t j) const { return {breaks_[j], breaks_[j + 1], alpha_[j], beta_[j]}; }
  std::span<const double> breakpoints() const { return breaks_; }
  bool mean_zero() const { return mean_zero_; }

  /// (int alpha, int beta) packed as a complex number.
  Complex integral() const;
  double max_speed() const;

  /// Same trace traversed backwards.
  ControlPair reversed() const;
  /// `first` on [0, w], `second` on [w, 1] with unchanged control values:
  /// at scale delta the pieces behave as `first` at w*delta followed by
  /// `second` at (1-w)*delta.
  static ControlPair concatenate(const ControlPair& first, const ControlPair& second, double w);
  /// Subtracts the interval-weighted means, then rescales into the speed
  /// constraint if needed. The result carries mean_zero = true.
  ControlPair projected_mean_zero() const;

  std::vector<std::array<double, 3>> rows() const;

 private:
  std::vector<double> breaks_;
  std::vector<double> alpha_;
  std::vector<double> beta_;
  bool mean_zero_ = false;
};

/// Planar velocity of the projected path at scale delta:
/// (x', y') = delta (alpha, -beta).
inline Complex planar_velocity(double delta, double alpha, double beta) { return delta * Complex{alpha, -beta}; }

/// Vertices z_0 .. z_K of the projected piecewise linear path.
Polygon control_vertices(Complex z0, double delta, const ControlPair& u);

/// Line integral of P_y dx - P_x dy along the segment [a, b].
double segment_twist(const PotentialField& field, Complex a, Complex b, QuadratureBudget& budget);

/// Endpoint of the controlled flow started at p0.
BoundaryPoint integrate_flow(const PotentialField& field, BoundaryPoint p0, double delta, const ControlPair& u);

/// t-increment of the flow; independent of t0, hence takes only z0.
double twist(const PotentialField& field, Complex z0, double delta, const ControlPair& u);

/// delta * int sqrt(alpha^2 + beta^2), the Euclidean length of the projected path.
double path_length(const ControlPair& u, double delta);

/// Mean-zero control whose path is a regular K-gon traversed once at
/// maximal speed, starting at z0 with heading +x.
ControlPair circle_control(int segments, Orientation orientation);

/// Largest |twist| over random mean-zero controls with K in [4, 64].
double mc_lower_bound(const PotentialField& field, Complex z0, double delta, int samples, std::uint64_t seed);

}  // namespace ccm
