#include "ccm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ccm {

double signed_area(std::span<const Complex> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return 0.0;
  // Shift to the first vertex to keep the cross products well conditioned.
  const Complex o = poly[0];
  double sum = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) sum += cross(poly[i] - o, poly[i + 1] - o);
  return 0.5 * sum;
}

double perimeter(std::span<const Complex> poly) {
  const std::size_t n = poly.size();
  if (n < 2) return 0.0;
  double len = 0.0;
  for (std::size_t i = 0; i < n; ++i) len += std::abs(poly[(i + 1) % n] - poly[i]);
  return len;
}

Rect bounding_box(std::span<const Complex> poly) {
  Rect r{poly[0].real(), poly[0].imag(), poly[0].real(), poly[0].imag()};
  for (const Complex& z : poly) {
    r.x0 = std::min(r.x0, z.real());
    r.x1 = std::max(r.x1, z.real());
    r.y0 = std::min(r.y0, z.imag());
    r.y1 = std::max(r.y1, z.imag());
  }
  return r;
}

double bbox_diameter(std::span<const Complex> poly) {
  if (poly.empty()) return 0.0;
  const Rect r = bounding_box(poly);
  return std::hypot(r.width(), r.height());
}

double point_segment_distance(Complex p, Complex a, Complex b) {
  const Complex d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - a);
  const double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

std::optional<SegmentCrossing> segment_crossing(Complex a, Complex b, Complex c, Complex d) {
  // Disjoint boxes settle nearly collinear pairs whose line crossing is noise.
  if (std::max(a.real(), b.real()) < std::min(c.real(), d.real()) ||
      std::max(c.real(), d.real()) < std::min(a.real(), b.real()) ||
      std::max(a.imag(), b.imag()) < std::min(c.imag(), d.imag()) ||
      std::max(c.imag(), d.imag()) < std::min(a.imag(), b.imag())) {
    return std::nullopt;
  }
  const Complex u = b - a;
  const Complex v = d - c;
  const double denom = cross(u, v);
  if (denom == 0.0) return std::nullopt;
  const Complex w = c - a;
  const double s = cross(w, v) / denom;
  const double t = cross(w, u) / denom;
  if (s < 0.0 || s > 1.0 || t < 0.0 || t > 1.0) return std::nullopt;
  return SegmentCrossing{s, t, a + s * u};
}

double segment_segment_distance(Complex a, Complex b, Complex c, Complex d) {
  if (segment_crossing(a, b, c, d)) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

bool collinear_overlap(Complex a, Complex b, Complex c, Complex d, double tol) {
  const Complex u = b - a;
  const double lu = std::abs(u);
  const double lv = std::abs(d - c);
  if (lu == 0.0 || lv == 0.0) return false;
  const double scale = std::max(lu, lv);
  if (std::abs(cross(u, d - c)) > tol * lu * lv + 1e-300) return false;
  if (std::abs(cross(u, c - a)) / lu > tol * scale) return false;
  // Project both segments onto the common direction and intersect intervals.
  const Complex dir = u / lu;
  const double p0 = 0.0, p1 = lu;
  double q0 = dot(c - a, dir), q1 = dot(d - a, dir);
  if (q0 > q1) std::swap(q0, q1);
  const double overlap = std::min(p1, q1) - std::max(p0, q0);
  return overlap > tol * scale;
}

bool is_simple(std::span<const Complex> poly, double tol) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Complex a = poly[i], b = poly[(i + 1) % n];
    if (std::abs(b - a) <= tol) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex c = poly[j], d = poly[(j + 1) % n];
      const bool next = (j == i + 1);
      const bool wrap = (i == 0 && j == n - 1);
      if (next) {
        // Shared vertex b == c: the far endpoints must stay off the other edge.
        if (point_segment_distance(d, a, b) <= tol || point_segment_distance(a, c, d) <= tol) return false;
        if (n == 3) continue;
      } else if (wrap) {
        // Shared vertex d == a.
        if (point_segment_distance(c, a, b) <= tol || point_segment_distance(b, c, d) <= tol) return false;
      } else if (segment_segment_distance(a, b, c, d) <= tol) {
        return false;
      }
    }
  }
  return true;
}

namespace {

// Signed area of disc(0, 1) intersected with triangle (0, a, b).
double unit_disc_triangle(Complex a, Complex b) {
  auto sector = [](Complex p, Complex q) { return 0.5 * std::atan2(cross(p, q), dot(p, q)); };
  const double na = std::norm(a), nb = std::norm(b);
  if (na <= 1.0 && nb <= 1.0) return 0.5 * cross(a, b);
  const Complex d = b - a;
  const double qa = std::norm(d);
  if (qa == 0.0) return 0.0;
  const double qb = 2.0 * dot(a, d);
  const double qc = na - 1.0;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc <= 0.0) return sector(a, b);
  const double sq = std::sqrt(disc);
  const double t1 = (-qb - sq) / (2.0 * qa);
  const double t2 = (-qb + sq) / (2.0 * qa);
  if (t2 <= 0.0 || t1 >= 1.0) return sector(a, b);
  const Complex p1 = a + std::max(t1, 0.0) * d;
  const Complex p2 = a + std::min(t2, 1.0) * d;
  double area = 0.5 * cross(p1, p2);
  if (t1 > 0.0) area += sector(a, p1);
  if (t2 < 1.0) area += sector(p2, b);
  return area;
}

}  // namespace

double disc_polygon_intersection_area(Complex center, double radius, std::span<const Complex> poly) {
  if (radius <= 0.0 || poly.size() < 3) return 0.0;
  // Work in units of the radius so very small discs do not underflow r^2.
  const double inv = 1.0 / radius;
  double sum = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    sum += unit_disc_triangle((poly[i] - center) * inv, (poly[(i + 1) % n] - center) * inv);
  }
  return std::abs(sum) * radius * radius;
}

double lens_area(double d, double r1, double r2) {
  if (r1 <= 0.0 || r2 <= 0.0) return 0.0;
  if (d >= r1 + r2) return 0.0;
  const double rmin = std::min(r1, r2);
  if (d <= std::abs(r1 - r2)) return std::numbers::pi * rmin * rmin;
  // Half-chord and signed center-to-chord distances, arranged to avoid
  // cancellation when one circle is much larger than the other.
  const double k = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
  const double a = 0.5 * std::sqrt(std::max(k, 0.0)) / d;
  const double x1 = (d * d + (r1 - r2) * (r1 + r2)) / (2.0 * d);
  const double x2 = (d * d + (r2 - r1) * (r2 + r1)) / (2.0 * d);
  // Area of the circular segment with half-angle t, divided by r^2.
  auto segment = [](double t) {
    const double x = 2.0 * t;
    if (x < 1e-2) {
      const double x2 = x * x;
      return x * x2 * (1.0 / 12.0 - x2 * (1.0 / 240.0 - x2 * (1.0 / 10080.0 - x2 / 725760.0)));
    }
    return 0.5 * (x - std::sin(x));
  };
  return r1 * r1 * segment(std::atan2(a, x1)) + r2 * r2 * segment(std::atan2(a, x2));
}

Polygon clip_to_rect(std::span<const Complex> poly, const Rect& rect) {
  Polygon out(poly.begin(), poly.end());
  auto clip = [&out](auto inside, auto intersect) {
    if (out.empty()) return;
    Polygon in;
    in.swap(out);
    const std::size_t n = in.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Complex cur = in[i];
      const Complex prev = in[(i + n - 1) % n];
      const bool ci = inside(cur), pi = inside(prev);
      if (ci) {
        if (!pi) out.push_back(intersect(prev, cur));
        out.push_back(cur);
      } else if (pi) {
        out.push_back(intersect(prev, cur));
      }
    }
  };
  auto at_x = [](double x) {
    return [x](Complex p, Complex q) {
      const double t = (x - p.real()) / (q.real() - p.real());
      return Complex{x, p.imag() + t * (q.imag() - p.imag())};
    };
  };
  auto at_y = [](double y) {
    return [y](Complex p, Complex q) {
      const double t = (y - p.imag()) / (q.imag() - p.imag());
      return Complex{p.real() + t * (q.real() - p.real()), y};
    };
  };
  clip([&](Complex p) { return p.real() >= rect.x0; }, at_x(rect.x0));
  clip([&](Complex p) { return p.real() <= rect.x1; }, at_x(rect.x1));
  clip([&](Complex p) { return p.imag() >= rect.y0; }, at_y(rect.y0));
  clip([&](Complex p) { return p.imag() <= rect.y1; }, at_y(rect.y1));
  return out;
}

Moments polygon_moments(std::span<const Complex> poly, Complex origin) {
  Moments m;
  const std::size_t n = poly.size();
  if (n < 3) return m;
  for (std::size_t i = 0; i < n; ++i) {
    const Complex p = poly[i] - origin;
    const Complex q = poly[(i + 1) % n] - origin;
    const double x0 = p.real(), y0 = p.imag(), x1 = q.real(), y1 = q.imag();
    const double c = x0 * y1 - x1 * y0;
    m.m00 += c;
    m.m10 += (x0 + x1) * c;
    m.m01 += (y0 + y1) * c;
    m.m11 += (x0 * y1 + 2.0 * x0 * y0 + 2.0 * x1 * y1 + x1 * y0) * c;
  }
  m.m00 /= 2.0;
  m.m10 /= 6.0;
  m.m01 /= 6.0;
  m.m11 /= 24.0;
  return m;
}

Polygon regular_polygon(Complex center, double radius, int n, double phase) {
  Polygon out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double a = phase + 2.0 * std::numbers::pi * i / n;
    out.push_back(center + std::polar(radius, a));
  }
  return out;
}

}  // namespace ccm
