#pragma once

#include <cstddef>
#include <vector>

#include "ccm/control_path.hpp"
#include "ccm/geometry.hpp"
#include "ccm/potential.hpp"

namespace ccm {

/// Closed polygonal curve v_0 -> v_1 -> ... -> v_{M-1} -> v_0 with a marked
/// base point (the start of the controlled path).
class PolyLoop {
 public:
  /// Throws InvalidArgument unless M >= 3, coordinates are finite and
  /// consecutive vertices are at least 1e-12 * max(1, diameter) apart.
  explicit PolyLoop(Polygon vertices, std::size_t base = 0);

  /// Closed projected path of a mean-zero control started at z0.
  static PolyLoop from_control(Complex z0, double delta, const ControlPair& u);

  const Polygon& vertices() const { return vertices_; }
  std::size_t base() const { return base_; }
  std::size_t size() const { return vertices_.size(); }
  Complex base_point() const { return vertices_[base_]; }
  double length() const { return perimeter(vertices_); }
  PolyLoop reversed() const;

 private:
  Polygon vertices_;
  std::size_t base_;
};

/// Parameter range [begin, end] of the parent loop, in units of its
/// normalized arc length measured from the base point.
struct ParamInterval {
  double begin = 0.0;
  double end = 0.0;
};

struct SimpleCycle {
  Polygon vertices;
  Orientation orientation = Orientation::CounterClockwise;
  std::vector<ParamInterval> provenance;

  double length() const { return perimeter(vertices); }
  double area() const { return std::abs(signed_area(vertices)); }
};

/// Default general-position tolerance: 1e-9 times the bounding box diameter.
double default_gp_tolerance(const PolyLoop& loop);

/// Inserts every pairwise edge crossing as a vertex (once per passage).
/// Collinear overlaps, T-junctions and triple points trigger a deterministic
/// jitter of the interior vertices by eps_gp; after three failed attempts
/// throws DegenerateAfterPerturbation. The output starts at the base point.
PolyLoop refine_intersections(const PolyLoop& loop, double eps_gp);
inline PolyLoop refine_intersections(const PolyLoop& loop) {
  return refine_intersections(loop, default_gp_tolerance(loop));
}

/// Edge-disjoint simple cycles covering a refined loop, extracted by
/// stack-based loop erasure along the traversal order.
std::vector<SimpleCycle> decompose(const PolyLoop& refined);

/// +mass for clockwise cycles, -mass for counterclockwise ones.
double signed_mass(const PotentialField& field, const SimpleCycle& cycle);

/// oint P_y dx - P_x dy by per-edge adaptive quadrature.
double loop_integral(const PotentialField& field, const PolyLoop& loop);

}  // namespace ccm
