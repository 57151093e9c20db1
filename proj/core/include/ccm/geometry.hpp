#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace ccm {

using Complex = std::complex<double>;
using Polygon = std::vector<Complex>;

/// Axis-aligned rectangle [x0, x1] x [y0, y1].
struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  Complex center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  bool contains(Complex z) const {
    return z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 && z.imag() <= y1;
  }
};

inline double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }
inline double dot(Complex a, Complex b) { return a.real() * b.real() + a.imag() * b.imag(); }

/// Shoelace area; positive for counterclockwise vertex order.
double signed_area(std::span<const Complex> poly);
/// Closed perimeter including the edge from the last vertex back to the first.
double perimeter(std::span<const Complex> poly);
Rect bounding_box(std::span<const Complex> poly);
double bbox_diameter(std::span<const Complex> poly);

double point_segment_distance(Complex p, Complex a, Complex b);
double segment_segment_distance(Complex a, Complex b, Complex c, Complex d);

/// Intersection of segments [a,b] and [c,d] that are not parallel. Parameters
/// are along each segment in [0,1]; nullopt when the lines miss inside both.
struct SegmentCrossing {
  double s = 0.0;
  double t = 0.0;
  Complex point;
};
std::optional<SegmentCrossing> segment_crossing(Complex a, Complex b, Complex c, Complex d);

/// True when [a,b] and [c,d] are collinear and share a stretch of positive
/// length (relative tolerance `tol` on the bounding scale).
bool collinear_overlap(Complex a, Complex b, Complex c, Complex d, double tol);

/// O(n^2) pairwise test: no two non-adjacent edges touch, adjacent edges
/// only share their common vertex.
bool is_simple(std::span<const Complex> poly, double tol = 0.0);

/// Area of disc(center, radius) intersected with a simple polygon of either
/// orientation.
double disc_polygon_intersection_area(Complex center, double radius, std::span<const Complex> poly);

/// Area of the intersection of two discs whose centers are `d` apart.
double lens_area(double d, double r1, double r2);

/// Sutherland-Hodgman clip against an axis-aligned rectangle. Works for
/// non-convex subjects as far as area-type integrals are concerned.
Polygon clip_to_rect(std::span<const Complex> poly, const Rect& rect);

/// Signed (ccw positive) polygon moments: integrals of 1, x, y and xy,
/// taken in coordinates relative to `origin`.
struct Moments {
  double m00 = 0.0;
  double m10 = 0.0;
  double m01 = 0.0;
  double m11 = 0.0;
};
Moments polygon_moments(std::span<const Complex> poly, Complex origin = {});

/// Vertices of a regular n-gon inscribed in the circle, counterclockwise.
Polygon regular_polygon(Complex center, double radius, int n, double phase = 0.0);

}  // namespace ccm
