#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ccm/geometry.hpp"

namespace ccm {

/// Disc D = B(center, radius) carrying constant density; used both for the
/// disc-array field and as candidate pens.
struct Disc {
  Complex center;
  double radius = 0.0;
};

/// Rectangular grid of nonnegative density samples. Node (i, j) sits at
/// origin + (i h, j h); values are stored row-major with y outer.
class DensityGrid {
 public:
  DensityGrid(int nx, int ny, double spacing, Complex origin, std::vector<double> values);

  /// Parses the `ccgrid v1 <nx> <ny> <h> <ox> <oy>` text format.
  static DensityGrid read(std::istream& in);
  static DensityGrid load(const std::filesystem::path& path);
  void write(std::ostream& out) const;

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double spacing() const { return h_; }
  Complex origin() const { return origin_; }
  double at(int i, int j) const { return values_[static_cast<std::size_t>(j) * nx_ + i]; }
  std::span<const double> values() const { return values_; }

  /// Bilinear interpolation, zero outside the support rectangle.
  double sample(Complex z) const;
  Rect support() const;
  double max_value() const;

 private:
  int nx_;
  int ny_;
  double h_;
  Complex origin_;
  std::vector<double> values_;
};

/// The potential P : C -> R and its density Delta P (standard Laplacian
/// d^2/dx^2 + d^2/dy^2). Immutable; copies share the underlying data.
class PotentialField {
 public:
  enum class Kind { Quadratic, DiscArray, DensityGrid };

  /// Lattice spacing of the disc array.
  static constexpr double kLatticeSpacing = 10.0;
  /// Largest spiral index materialized; beyond it radii fall below 1e-14
  /// and the remaining mass is 2^-48.
  static constexpr int kMaxDiscIndex = 48;
  static constexpr int kMaxDerivativeOrder = 6;

  /// P(z) = c |z|^2, so Delta P = 4c.
  static PotentialField quadratic(double c = 1.0);
  /// Discs D_k of radius 2^-k and density 2^k / pi on the lattice 10 Z^2,
  /// indexed by a square spiral from the origin (k = 1 at 0). Only sites
  /// inside `window` with k <= max_index carry density.
  static PotentialField disc_array(const Rect& window, int max_index = kMaxDiscIndex);
  static PotentialField density_grid(DensityGrid grid);

  Kind kind() const;

  double laplacian(Complex z) const;
  /// (dP/dx, dP/dy) packed as dP/dx + i dP/dy.
  Complex gradient(Complex z) const;
  /// Mass of Delta P on the open disc B(z, r).
  double ball_mass(Complex z, double r) const;
  /// Mass of Delta P on a simple polygon; throws DegeneratePolygon.
  double region_mass(std::span<const Complex> polygon) const;
  /// (d_z^k P)(z) for k = 1..m with d_z = (d_x - i d_y) / 2.
  std::vector<Complex> dz_derivatives(Complex z, int m) const;

  /// sup |Delta P| when it is finite for the field family.
  std::optional<double> density_sup() const;
  /// Whether the Hessian of P is bounded on all of C.
  bool hessian_bounded() const;
  double quadratic_scale() const;
  /// Region the field is meant to be studied on.
  Rect default_window() const;
  /// Discs of concentrated density within `reach` of `near` (disc array
  /// only); used as optimizer candidates and density probes.
  std::vector<Disc> feature_discs(Complex near, double reach) const;
  /// Mass of one feature disc (disc array only).
  double feature_disc_mass(const Disc& d) const;

  const DensityGrid* grid() const;

  /// Spiral index of lattice site (m, n), 1-based.
  static std::int64_t spiral_index(int m, int n);
  /// Center c_k of the k-th lattice site in spiral order.
  static Complex spiral_site(std::int64_t k);

  struct Impl;

 private:
  explicit PotentialField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Rejects polygons that are self-intersecting or have area below
/// 1e-12 * bbox_diameter^2.
void require_nondegenerate(std::span<const Complex> polygon);

}  // namespace ccm
