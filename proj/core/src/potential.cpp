#include "ccm/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>

#include "ccm/error.hpp"
#include "ccm/quadrature.hpp"

namespace ccm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct QuadraticImpl {
  double c = 1.0;
};

struct LatticeDisc {
  Complex center;
  double radius;
  double density;
  double mass;
  std::int64_t k;
};

struct DiscArrayImpl {
  Rect window;
  std::vector<LatticeDisc> discs;
  std::map<std::pair<int, int>, std::size_t> by_site;

  const LatticeDisc* at_site(int m, int n) const {
    auto it = by_site.find({m, n});
    return it == by_site.end() ? nullptr : &discs[it->second];
  }

  template <class F>
  void for_each_near(Complex z, double reach, F&& f) const {
    const double s = PotentialField::kLatticeSpacing;
    const int m0 = static_cast<int>(std::floor((z.real() - reach) / s));
    const int m1 = static_cast<int>(std::ceil((z.real() + reach) / s));
    const int n0 = static_cast<int>(std::floor((z.imag() - reach) / s));
    const int n1 = static_cast<int>(std::ceil((z.imag() + reach) / s));
    if (static_cast<double>(m1 - m0) * (n1 - n0) > 4.0 * static_cast<double>(discs.size())) {
      for (const auto& d : discs) f(d);
      return;
    }
    for (int m = m0; m <= m1; ++m)
      for (int n = n0; n <= n1; ++n)
        if (const LatticeDisc* d = at_site(m, n)) f(*d);
  }
};

// Bilinear coefficients of one grid cell in coordinates local to its lower
// left corner: f = a + b x + c y + d x y.
struct CellPoly {
  double a, b, c, d;
  double operator()(double x, double y) const { return a + b * x + c * y + d * x * y; }
};

struct GridImpl {
  DensityGrid grid;
  std::vector<double> cell_mass;  // (nx-1) x (ny-1)

  explicit GridImpl(DensityGrid g) : grid(std::move(g)) {
    const int cx = grid.nx() - 1, cy = grid.ny() - 1;
    const double h2 = grid.spacing() * grid.spacing();
    cell_mass.resize(static_cast<std::size_t>(cx) * cy);
    for (int j = 0; j < cy; ++j)
      for (int i = 0; i < cx; ++i)
        cell_mass[static_cast<std::size_t>(j) * cx + i] =
            0.25 * h2 * (grid.at(i, j) + grid.at(i + 1, j) + grid.at(i, j + 1) + grid.at(i + 1, j + 1));
  }

  int cells_x() const { return grid.nx() - 1; }
  int cells_y() const { return grid.ny() - 1; }

  Rect cell_rect(int i, int j) const {
    const double h = grid.spacing();
    const Complex o = grid.origin();
    return {o.real() + i * h, o.imag() + j * h, o.real() + (i + 1) * h, o.imag() + (j + 1) * h};
  }

  CellPoly cell_poly(int i, int j) const {
    const double h = grid.spacing();
    const double f00 = grid.at(i, j), f10 = grid.at(i + 1, j);
    const double f01 = grid.at(i, j + 1), f11 = grid.at(i + 1, j + 1);
    return {f00, (f10 - f00) / h, (f01 - f00) / h, (f00 - f10 - f01 + f11) / (h * h)};
  }

  // Index range of cells overlapping [x0,x1] x [y0,y1], clamped.
  bool cell_range(const Rect& r, int& i0, int& i1, int& j0, int& j1) const {
    const double h = grid.spacing();
    const Complex o = grid.origin();
    i0 = std::max(0, static_cast<int>(std::floor((r.x0 - o.real()) / h)));
    i1 = std::min(cells_x() - 1, static_cast<int>(std::floor((r.x1 - o.real()) / h)));
    j0 = std::max(0, static_cast<int>(std::floor((r.y0 - o.imag()) / h)));
    j1 = std::min(cells_y() - 1, static_cast<int>(std::floor((r.y1 - o.imag()) / h)));
    return i0 <= i1 && j0 <= j1;
  }
};

}  // namespace

struct PotentialField::Impl {
  std::variant<QuadraticImpl, DiscArrayImpl, GridImpl> data;
};

// ---------------------------------------------------------------- DensityGrid

DensityGrid::DensityGrid(int nx, int ny, double spacing, Complex origin, std::vector<double> values)
    : nx_(nx), ny_(ny), h_(spacing), origin_(origin), values_(std::move(values)) {
  if (nx_ < 2 || ny_ < 2) throw Error(ErrorCode::InvalidArgument, "density grid needs nx, ny >= 2");
  if (!(h_ > 0.0) || !std::isfinite(h_)) throw Error(ErrorCode::InvalidArgument, "grid spacing must be positive");
  if (values_.size() != static_cast<std::size_t>(nx_) * ny_) {
    throw Error(ErrorCode::InvalidArgument, "expected " + std::to_string(nx_ * ny_) + " grid values, got " +
                                                std::to_string(values_.size()));
  }
  bool any = false;
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) throw Error(ErrorCode::InvalidArgument, "grid densities must be finite and >= 0");
    any = any || v > 0.0;
  }
  if (!any) throw Error(ErrorCode::InvalidArgument, "density grid is identically zero (harmonic potential)");
}

DensityGrid DensityGrid::read(std::istream& in) {
  std::string magic, version;
  int nx = 0, ny = 0;
  double h = 0.0, ox = 0.0, oy = 0.0;
  if (!(in >> magic >> version >> nx >> ny >> h >> ox >> oy) || magic != "ccgrid" || version != "v1") {
    throw Error(ErrorCode::InvalidArgument, "bad grid header; expected 'ccgrid v1 <nx> <ny> <h> <ox> <oy>'");
  }
  if (nx < 2 || ny < 2) throw Error(ErrorCode::InvalidArgument, "density grid needs nx, ny >= 2");
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(nx) * ny);
  double v = 0.0;
  while (values.size() < static_cast<std::size_t>(nx) * ny && in >> v) values.push_back(v);
  return DensityGrid(nx, ny, h, {ox, oy}, std::move(values));
}

DensityGrid DensityGrid::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open grid file " + path.string());
  return read(in);
}

void DensityGrid::write(std::ostream& out) const {
  const auto old = out.precision(17);
  out << "ccgrid v1 " << nx_ << ' ' << ny_ << ' ' << h_ << ' ' << origin_.real() << ' ' << origin_.imag() << '\n';
  for (int j = 0; j < ny_; ++j) {
    for (int i = 0; i < nx_; ++i) out << (i ? " " : "") << at(i, j);
    out << '\n';
  }
  out.precision(old);
}

double DensityGrid::sample(Complex z) const {
  const double u = (z.real() - origin_.real()) / h_;
  const double v = (z.imag() - origin_.imag()) / h_;
  if (u < 0.0 || v < 0.0 || u > nx_ - 1 || v > ny_ - 1) return 0.0;
  const int i = std::min(static_cast<int>(u), nx_ - 2);
  const int j = std::min(static_cast<int>(v), ny_ - 2);
  const double fu = u - i, fv = v - j;
  return (1 - fu) * (1 - fv) * at(i, j) + fu * (1 - fv) * at(i + 1, j) + (1 - fu) * fv * at(i, j + 1) +
         fu * fv * at(i + 1, j + 1);
}

Rect DensityGrid::support() const {
  return {origin_.real(), origin_.imag(), origin_.real() + (nx_ - 1) * h_, origin_.imag() + (ny_ - 1) * h_};
}

double DensityGrid::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

// ------------------------------------------------------------ construction

std::int64_t PotentialField::spiral_index(int m, int n) {
  const std::int64_t r = std::max(std::abs(m), std::abs(n));
  if (r == 0) return 1;
  std::int64_t offset;
  if (m == r && n > -r) {
    offset = n + r - 1;
  } else if (n == r) {
    offset = 2 * r + (r - 1 - m);
  } else if (m == -r) {
    offset = 4 * r + (r - 1 - n);
  } else {
    offset = 6 * r + (m + r - 1);
  }
  return (2 * r - 1) * (2 * r - 1) + offset + 1;
}

Complex PotentialField::spiral_site(std::int64_t k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "spiral index starts at 1");
  if (k == 1) return {0.0, 0.0};
  std::int64_t r = 1;
  while ((2 * r + 1) * (2 * r + 1) < k) ++r;
  const std::int64_t offset = k - 1 - (2 * r - 1) * (2 * r - 1);
  std::int64_t m, n;
  if (offset < 2 * r) {
    m = r;
    n = offset - r + 1;
  } else if (offset < 4 * r) {
    n = r;
    m = r - 1 - (offset - 2 * r);
  } else if (offset < 6 * r) {
    m = -r;
    n = r - 1 - (offset - 4 * r);
  } else {
    n = -r;
    m = offset - 6 * r - r + 1;
  }
  return {kLatticeSpacing * static_cast<double>(m), kLatticeSpacing * static_cast<double>(n)};
}

PotentialField PotentialField::quadratic(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "quadratic scale must be > 0");
  return PotentialField(std::make_shared<const Impl>(Impl{QuadraticImpl{c}}));
}

PotentialField PotentialField::disc_array(const Rect& window, int max_index) {
  if (!(window.x1 >= window.x0 && window.y1 >= window.y0)) {
    throw Error(ErrorCode::InvalidArgument, "disc array window must have x0 <= x1 and y0 <= y1");
  }
  if (max_index < 1 || max_index > 900) throw Error(ErrorCode::InvalidArgument, "max_index out of range");
  DiscArrayImpl da;
  da.window = window;
  const double s = kLatticeSpacing;
  const int m0 = static_cast<int>(std::ceil(window.x0 / s)), m1 = static_cast<int>(std::floor(window.x1 / s));
  const int n0 = static_cast<int>(std::ceil(window.y0 / s)), n1 = static_cast<int>(std::floor(window.y1 / s));
  for (int m = m0; m <= m1; ++m) {
    for (int n = n0; n <= n1; ++n) {
      const std::int64_t k = spiral_index(m, n);
      if (k > max_index) continue;
      const int ik = static_cast<int>(k);
      LatticeDisc d{{s * m, s * n}, std::ldexp(1.0, -ik), std::ldexp(1.0, ik) / kPi, std::ldexp(1.0, -ik), k};
      da.by_site[{m, n}] = da.discs.size();
      da.discs.push_back(d);
    }
  }
  if (da.discs.empty()) {
    throw Error(ErrorCode::InvalidArgument, "disc array window contains no lattice disc (harmonic potential)");
  }
  std::sort(da.discs.begin(), da.discs.end(), [](const auto& a, const auto& b) { return a.k < b.k; });
  da.by_site.clear();
  for (std::size_t i = 0; i < da.discs.size(); ++i) {
    const Complex c = da.discs[i].center;
    da.by_site[{static_cast<int>(std::lround(c.real() / s)), static_cast<int>(std::lround(c.imag() / s))}] = i;
  }
  return PotentialField(std::make_shared<const Impl>(Impl{std::move(da)}));
}

PotentialField PotentialField::density_grid(DensityGrid grid) {
  return PotentialField(std::make_shared<const Impl>(Impl{GridImpl(std::move(grid))}));
}

PotentialField::Kind PotentialField::kind() const {
  switch (impl_->data.index()) {
    case 0: return Kind::Quadratic;
    case 1: return Kind::DiscArray;
    default: return Kind::DensityGrid;
  }
}

const DensityGrid* PotentialField::grid() const {
  if (const auto* g = std::get_if<GridImpl>(&impl_->data)) return &g->grid;
  return nullptr;
}

double PotentialField::quadratic_scale() const {
  if (const auto* q = std::get_if<QuadraticImpl>(&impl_->data)) return q->c;
  throw Error(ErrorCode::InvalidArgument, "field is not quadratic");
}

// ------------------------------------------------------------------ queries

double PotentialField::laplacian(Complex z) const {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, QuadraticImpl>) {
          return 4.0 * f.c;
        } else if constexpr (std::is_same_v<T, DiscArrayImpl>) {
          const int m = static_cast<int>(std::lround(z.real() / kLatticeSpacing));
          const int n = static_cast<int>(std::lround(z.imag() / kLatticeSpacing));
          const LatticeDisc* d = f.at_site(m, n);
          return (d && std::abs(z - d->center) < d->radius) ? d->density : 0.0;
        } else {
          return f.grid.sample(z);
        }
      },
      impl_->data);
}

namespace {

Complex disc_array_gradient(const DiscArrayImpl& f, Complex z) {
  Complex g{0.0, 0.0};
  for (const auto& d : f.discs) {
    const Complex w = z - d.center;
    const double r2 = std::norm(w);
    if (r2 < d.radius * d.radius) {
      g += 0.5 * d.density * w;
    } else {
      g += (d.mass / kTwoPi) * w / r2;
    }
  }
  return g;
}

// Integral of f(w) (z - w) / |z - w|^2 over the sub-rectangle [x0,x1]x[y0,y1]
// of a cell whose bilinear polynomial is `poly` (local to `corner`).
Complex gauss_kernel(const CellPoly& poly, Complex corner, Complex z, double x0, double x1, double y0, double y1,
                     int n) {
  const GaussRule rule = gauss_legendre(n);
  const double cx = 0.5 * (x0 + x1), hx = 0.5 * (x1 - x0);
  const double cy = 0.5 * (y0 + y1), hy = 0.5 * (y1 - y0);
  Complex sum{0.0, 0.0};
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = cx + hx * rule.nodes[i];
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double y = cy + hy * rule.nodes[j];
      const Complex w = corner + Complex{x, y};
      const Complex dz = z - w;
      const double r2 = std::norm(dz);
      if (r2 == 0.0) continue;
      sum += rule.weights[i] * rule.weights[j] * poly(x, y) * dz / r2;
    }
  }
  return sum * hx * hy;
}

// Closed form of the integral of f(w) (z - w) / |z - w|^2 over one cell with
// bilinear density `poly` (local to `corner`). With (u, v) = z - w the density
// reads A + B u + C v + D u v and each monomial has an elementary antiderivative.
Complex cell_kernel_exact(const CellPoly& poly, Complex corner, Complex z, double h) {
  const double X = z.real() - corner.real(), Y = z.imag() - corner.imag();
  const double A = poly(X, Y);
  const double B = -(poly.b + poly.d * Y);
  const double C = -(poly.c + poly.d * X);
  const double D = poly.d;
  auto lg = [](double u, double v) {
    const double s = u * u + v * v;
    return s > 0.0 ? std::log(s) : 0.0;
  };
  auto at = [](double p, double q) { return p != 0.0 ? std::atan(q / p) : 0.0; };
  // Antiderivatives in (u, v) of u/r^2, u^2/r^2, u v/r^2 and u^2 v/r^2, up to
  // terms depending on one variable only.
  auto F = [&](double u, double v) { return 0.5 * v * lg(u, v) + u * at(u, v); };
  auto K = [&](double u, double v) { return 0.5 * u * v + 0.5 * u * u * at(u, v) - 0.5 * v * v * at(v, u); };
  auto H = [&](double u, double v) { return 0.25 * (u * u + v * v) * lg(u, v); };
  auto L = [&](double u, double v) {
    return u * u * u / 6.0 * lg(u, v) + u * v * v / 3.0 - v * v * v / 3.0 * at(v, u);
  };
  const double u0 = X - h, u1 = X, v0 = Y - h, v1 = Y;
  auto box = [&](auto&& G) { return G(u1, v1) - G(u0, v1) - G(u1, v0) + G(u0, v0); };
  auto box_t = [&](auto&& G) { return G(v1, u1) - G(v1, u0) - G(v0, u1) + G(v0, u0); };
  const double gx = A * box(F) + B * box(K) + C * box(H) + D * box(L);
  const double gy = A * box_t(F) + B * box(H) + C * box_t(K) + D * box_t(L);
  return {gx, gy};
}

Complex grid_gradient(const GridImpl& f, Complex z) {
  QuadratureBudget budget;
  const double h = f.grid.spacing();
  Complex sum{0.0, 0.0};
  for (int j = 0; j < f.cells_y(); ++j) {
    for (int i = 0; i < f.cells_x(); ++i) {
      const double mass = f.cell_mass[static_cast<std::size_t>(j) * f.cells_x() + i];
      if (mass == 0.0) continue;
      const Rect cell = f.cell_rect(i, j);
      const Complex corner{cell.x0, cell.y0};
      const CellPoly poly = f.cell_poly(i, j);
      const double dx = std::max({cell.x0 - z.real(), 0.0, z.real() - cell.x1});
      const double dy = std::max({cell.y0 - z.imag(), 0.0, z.imag() - cell.y1});
      const double dist = std::hypot(dx, dy);
      if (dist > 6.0 * h) {
        sum += gauss_kernel(poly, corner, z, 0.0, h, 0.0, h, 3);
        budget.charge(9);
        continue;
      }
      sum += cell_kernel_exact(poly, corner, z, h);
      budget.charge(16);
    }
  }
  return sum / kTwoPi;
}

// Integral of the bilinear cell polynomial over cell \cap B(center, r), via
// Green's theorem with Q = int f dx so that the area integral is oint Q dy.
double cell_disc_integral(const Rect& cell, const CellPoly& poly, double full_mass, Complex center, double r) {
  const double cx = center.real(), cy = center.imag();
  const double ddx = std::max({cell.x0 - cx, 0.0, cx - cell.x1});
  const double ddy = std::max({cell.y0 - cy, 0.0, cy - cell.y1});
  if (std::hypot(ddx, ddy) >= r) return 0.0;
  const double fx = std::max(std::abs(cell.x0 - cx), std::abs(cell.x1 - cx));
  const double fy = std::max(std::abs(cell.y0 - cy), std::abs(cell.y1 - cy));
  if (std::hypot(fx, fy) <= r) return full_mass;

  const Complex corner{cell.x0, cell.y0};
  auto Q = [&](Complex w) {
    const double x = w.real() - corner.real(), y = w.imag() - corner.imag();
    return poly.a * x + 0.5 * poly.b * x * x + poly.c * x * y + 0.5 * poly.d * x * x * y;
  };
  const GaussRule g3 = gauss_legendre(3);
  const GaussRule g8 = gauss_legendre(8);
  double sum = 0.0;

  // Straight boundary pieces: vertical rectangle edges clipped to the disc
  // (horizontal ones have dy = 0).
  const Complex verts[4] = {{cell.x0, cell.y0}, {cell.x1, cell.y0}, {cell.x1, cell.y1}, {cell.x0, cell.y1}};
  for (int e = 0; e < 4; ++e) {
    const Complex p = verts[e], q = verts[(e + 1) % 4];
    if (p.imag() == q.imag()) continue;
    const Complex d = q - p;
    const Complex w = p - center;
    const double A = std::norm(d), B = 2.0 * dot(w, d), C = std::norm(w) - r * r;
    const double disc = B * B - 4.0 * A * C;
    if (disc <= 0.0) continue;
    const double sq = std::sqrt(disc);
    const double t0 = std::max(0.0, (-B - sq) / (2.0 * A));
    const double t1 = std::min(1.0, (-B + sq) / (2.0 * A));
    if (t1 <= t0) continue;
    const double tm = 0.5 * (t0 + t1), th = 0.5 * (t1 - t0);
    double s = 0.0;
    for (std::size_t k = 0; k < g3.nodes.size(); ++k) s += g3.weights[k] * Q(p + (tm + th * g3.nodes[k]) * d);
    sum += s * th * d.imag();
  }

  // Circle arcs lying inside the rectangle.
  std::vector<double> angles;
  auto push = [&](double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0) a += kTwoPi;
    angles.push_back(a);
  };
  for (double X : {cell.x0, cell.x1}) {
    const double u = (X - cx) / r;
    if (std::abs(u) < 1.0) {
      const double a = std::acos(u);
      push(a);
      push(-a);
    }
  }
  for (double Y : {cell.y0, cell.y1}) {
    const double u = (Y - cy) / r;
    if (std::abs(u) < 1.0) {
      const double a = std::asin(u);
      push(a);
      push(kPi - a);
    }
  }
  std::sort(angles.begin(), angles.end());
  std::vector<std::pair<double, double>> arcs;
  if (angles.empty()) {
    arcs.emplace_back(0.0, kTwoPi);
  } else {
    for (std::size_t k = 0; k < angles.size(); ++k) {
      const double a0 = angles[k];
      const double a1 = (k + 1 < angles.size()) ? angles[k + 1] : angles[0] + kTwoPi;
      if (a1 - a0 <= 0.0) continue;
      const Complex mid = center + std::polar(r, 0.5 * (a0 + a1));
      if (cell.contains(mid)) arcs.emplace_back(a0, a1);
    }
  }
  for (const auto& [a0, a1] : arcs) {
    const int pieces = std::max(1, static_cast<int>(std::ceil((a1 - a0) / (kPi / 4.0))));
    const double step = (a1 - a0) / pieces;
    for (int p = 0; p < pieces; ++p) {
      const double b0 = a0 + p * step;
      const double bm = b0 + 0.5 * step, bh = 0.5 * step;
      double s = 0.0;
      for (std::size_t k = 0; k < g8.nodes.size(); ++k) {
        const double th = bm + bh * g8.nodes[k];
        s += g8.weights[k] * Q(center + std::polar(r, th)) * r * std::cos(th);
      }
      sum += s * bh;
    }
  }
  return std::max(sum, 0.0);
}

}  // namespace

Complex PotentialField::gradient(Complex z) const {
  return std::visit(
      [&](const auto& f) -> Complex {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, QuadraticImpl>) {
          return 2.0 * f.c * z;
        } else if constexpr (std::is_same_v<T, DiscArrayImpl>) {
          return disc_array_gradient(f, z);
        } else {
          return grid_gradient(f, z);
        }
      },
      impl_->data);
}

double PotentialField::ball_mass(Complex z, double r) const {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "ball radius must be > 0");
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, QuadraticImpl>) {
          return 4.0 * f.c * kPi * r * r;
        } else if constexpr (std::is_same_v<T, DiscArrayImpl>) {
          double m = 0.0;
          f.for_each_near(z, r + 1.0, [&](const LatticeDisc& d) {
            const double dist = std::abs(z - d.center);
            if (dist >= r + d.radius) return;
            if (dist + d.radius <= r) {
              m += d.mass;
              return;
            }
            // Normalize by the disc radius so tiny discs keep full precision.
            m += d.mass * lens_area(dist / d.radius, r / d.radius, 1.0) / kPi;
          });
          return m;
        } else {
          int i0, i1, j0, j1;
          if (!f.cell_range({z.real() - r, z.imag() - r, z.real() + r, z.imag() + r}, i0, i1, j0, j1)) return 0.0;
          double m = 0.0;
          for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i)
              m += cell_disc_integral(f.cell_rect(i, j), f.cell_poly(i, j),
                                      f.cell_mass[static_cast<std::size_t>(j) * f.cells_x() + i], z, r);
          return m;
        }
      },
      impl_->data);
}

void require_nondegenerate(std::span<const Complex> polygon) {
  if (polygon.size() < 3) throw Error(ErrorCode::DegeneratePolygon, "polygon needs at least 3 vertices");
  const double diam = bbox_diameter(polygon);
  if (std::abs(signed_area(polygon)) < 1e-12 * diam * diam) {
    throw Error(ErrorCode::DegeneratePolygon, "polygon area below 1e-12 * bbox^2");
  }
  if (!is_simple(polygon)) throw Error(ErrorCode::DegeneratePolygon, "polygon is self-intersecting");
}

double PotentialField::region_mass(std::span<const Complex> polygon) const {
  require_nondegenerate(polygon);
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, QuadraticImpl>) {
          return 4.0 * f.c * std::abs(signed_area(polygon));
        } else if constexpr (std::is_same_v<T, DiscArrayImpl>) {
          const Rect bb = bounding_box(polygon);
          const Complex mid = bb.center();
          const double reach = 0.5 * std::hypot(bb.width(), bb.height()) + 1.0;
          double m = 0.0;
          f.for_each_near(mid, reach, [&](const LatticeDisc& d) {
            const Complex c = d.center;
            if (c.real() + d.radius < bb.x0 || c.real() - d.radius > bb.x1 || c.imag() + d.radius < bb.y0 ||
                c.imag() - d.radius > bb.y1)
              return;
            const double area = disc_polygon_intersection_area(c, d.radius, polygon);
            m += d.mass * std::min(1.0, area / (kPi * d.radius * d.radius));
          });
          return m;
        } else {
          int i0, i1, j0, j1;
          if (!f.cell_range(bounding_box(polygon), i0, i1, j0, j1)) return 0.0;
          const double orient = signed_area(polygon) >= 0.0 ? 1.0 : -1.0;
          double m = 0.0;
          for (int j = j0; j <= j1; ++j) {
            for (int i = i0; i <= i1; ++i) {
              const Rect cell = f.cell_rect(i, j);
              const Polygon piece = clip_to_rect(polygon, cell);
              if (piece.size() < 3) continue;
              const Moments mo = polygon_moments(piece, {cell.x0, cell.y0});
              const CellPoly p = f.cell_poly(i, j);
              m += orient * (p.a * mo.m00 + p.b * mo.m10 + p.c * mo.m01 + p.d * mo.m11);
            }
          }
          return std::max(m, 0.0);
        }
      },
      impl_->data);
}

std::vector<Complex> PotentialField::dz_derivatives(Complex z, int m) const {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "derivative order must be >= 1");
  if (m > kMaxDerivativeOrder) {
    throw Error(ErrorCode::UnsupportedOrder,
                "order " + std::to_string(m) + " exceeds cap " + std::to_string(kMaxDerivativeOrder));
  }
  std::vector<Complex> out(static_cast<std::size_t>(m), Complex{0.0, 0.0});
  if (const auto* q = std::get_if<QuadraticImpl>(&impl_->data)) {
    out[0] = q->c * std::conj(z);
    return out;
  }
  // g = d_z P = (P_x - i P_y) / 2 from the gradient; higher orders apply
  // d_z = (d_x - i d_y)/2 to g with central differences.
  auto g = [this](Complex w) {
    const Complex grad = gradient(w);
    return 0.5 * Complex{grad.real(), -grad.imag()};
  };
  out[0] = g(z);
  for (int k = 2; k <= m; ++k) {
    const int order = k - 1;
    // Order-dependent step balancing truncation against roundoff; equals
    // 1e-4 (1 + |z|) for the first difference.
    const double step = std::pow(1e-4, 1.0 / order) * (1.0 + std::abs(z));
    // (d_x - i d_y)^order = sum_l C(order,l) (-i)^l d_x^(order-l) d_y^l.
    Complex acc{0.0, 0.0};
    double binom = 1.0;
    Complex ipow{1.0, 0.0};
    for (int l = 0; l <= order; ++l) {
      const int ax = order - l, ay = l;
      // Tensor central difference: d_x^ax d_y^ay g.
      Complex d{0.0, 0.0};
      double cxb = 1.0;
      for (int p = 0; p <= ax; ++p) {
        double cyb = 1.0;
        for (int s = 0; s <= ay; ++s) {
          const double sign = ((p + s) % 2 == 0) ? 1.0 : -1.0;
          const Complex w = z + Complex{(0.5 * ax - p) * step, (0.5 * ay - s) * step};
          d += sign * cxb * cyb * g(w);
          cyb = cyb * (ay - s) / (s + 1);
        }
        cxb = cxb * (ax - p) / (p + 1);
      }
      d /= std::pow(step, order);
      acc += binom * ipow * d;
      binom = binom * (order - l) / (l + 1);
      ipow *= Complex{0.0, -1.0};
    }
    out[static_cast<std::size_t>(k - 1)] = acc / std::pow(2.0, order);
  }
  return out;
}

std::optional<double> PotentialField::density_sup() const {
  return std::visit(
      [&](const auto& f) -> std::optional<double> {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, QuadraticImpl>) {
          return 4.0 * f.c;
        } else if constexpr (std::is_same_v<T, DiscArrayImpl>) {
          // h_k = 2^k / pi grows without bound along the enumeration.
          return std::nullopt;
        } else {
          return f.grid.max_value();
        }
      },
      impl_->data);
}

bool PotentialField::hessian_bounded() const { return kind() == Kind::Quadratic; }

Rect PotentialField::default_window() const {
  return std::visit(
      [&](const auto& f) -> Rect {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, QuadraticImpl>) {
          return {-1.0, -1.0, 1.0, 1.0};
        } else if constexpr (std::is_same_v<T, DiscArrayImpl>) {
          return f.window;
        } else {
          return f.grid.support();
        }
      },
      impl_->data);
}

std::vector<Disc> PotentialField::feature_discs(Complex near, double reach) const {
  std::vector<Disc> out;
  if (const auto* f = std::get_if<DiscArrayImpl>(&impl_->data)) {
    f->for_each_near(near, reach + 1.0, [&](const LatticeDisc& d) {
      if (std::abs(d.center - near) <= reach + d.radius) out.push_back({d.center, d.radius});
    });
  }
  return out;
}

double PotentialField::feature_disc_mass(const Disc& d) const {
  if (const auto* f = std::get_if<DiscArrayImpl>(&impl_->data)) {
    const int m = static_cast<int>(std::lround(d.center.real() / kLatticeSpacing));
    const int n = static_cast<int>(std::lround(d.center.imag() / kLatticeSpacing));
    if (const LatticeDisc* ld = f->at_site(m, n); ld && ld->center == d.center && ld->radius == d.radius) {
      return ld->mass;
    }
  }
  return ball_mass(d.center, d.radius);
}

}  // namespace ccm
