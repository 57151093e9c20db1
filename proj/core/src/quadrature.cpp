#include "ccm/quadrature.hpp"

#include <array>
#include <cmath>
#include <string>

#include "ccm/error.hpp"

namespace ccm {

void QuadratureBudget::charge(std::int64_t evals) {
  used_ += evals;
  if (used_ > limit_) {
    throw Error(ErrorCode::QuadratureBudgetExceeded,
                "more than " + std::to_string(limit_) + " integrand evaluations");
  }
}

namespace {

constexpr std::array<double, 1> kN1{0.0};
constexpr std::array<double, 1> kW1{2.0};
constexpr std::array<double, 2> kN2{-0.57735026918962576451, 0.57735026918962576451};
constexpr std::array<double, 2> kW2{1.0, 1.0};
constexpr std::array<double, 3> kN3{-0.77459666924148337704, 0.0, 0.77459666924148337704};
constexpr std::array<double, 3> kW3{0.55555555555555555556, 0.88888888888888888889,
                                    0.55555555555555555556};
constexpr std::array<double, 4> kN4{-0.86113631159405257522, -0.33998104358485626480,
                                    0.33998104358485626480, 0.86113631159405257522};
constexpr std::array<double, 4> kW4{0.34785484513745385737, 0.65214515486254614263,
                                    0.65214515486254614263, 0.34785484513745385737};
constexpr std::array<double, 5> kN5{-0.90617984593866399280, -0.53846931010568309104, 0.0,
                                    0.53846931010568309104, 0.90617984593866399280};
constexpr std::array<double, 5> kW5{0.23692688505618908751, 0.47862867049936646804,
                                    0.56888888888888888889, 0.47862867049936646804,
                                    0.23692688505618908751};
constexpr std::array<double, 8> kN8{-0.96028985649753623168, -0.79666647741362673959,
                                    -0.52553240991632898582, -0.18343464249564980494,
                                    0.18343464249564980494,  0.52553240991632898582,
                                    0.79666647741362673959,  0.96028985649753623168};
constexpr std::array<double, 8> kW8{0.10122853629037625915, 0.22238103445337447054,
                                    0.31370664587788728734, 0.36268378337836198297,
                                    0.36268378337836198297, 0.31370664587788728734,
                                    0.22238103445337447054, 0.10122853629037625915};

constexpr int kMaxDepth = 48;

struct SimpsonState {
  const Integrand1D& f;
  QuadratureBudget& budget;
  double eps;
  int min_depth;
};

double simpson_step(SimpsonState& st, double a, double fa, double m, double fm, double b, double fb,
                    double whole, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = st.f(lm);
  const double frm = st.f(rm);
  st.budget.charge(2);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth >= st.min_depth && (std::abs(delta) <= 15.0 * st.eps || depth >= kMaxDepth)) {
    return left + right + delta / 15.0;
  }
  SimpsonState half{st.f, st.budget, 0.5 * st.eps, st.min_depth};
  return simpson_step(half, a, fa, lm, flm, m, fm, left, depth + 1) +
         simpson_step(half, m, fm, rm, frm, b, fb, right, depth + 1);
}

double gauss5(const Integrand1D& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < kN5.size(); ++i) s += kW5[i] * f(c + h * kN5[i]);
  return s * h;
}

double gl_step(const Integrand1D& f, QuadratureBudget& budget, double a, double b, double whole,
               double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double left = gauss5(f, a, m);
  const double right = gauss5(f, m, b);
  budget.charge(10);
  if (std::abs(left + right - whole) <= eps || depth >= kMaxDepth) return left + right;
  return gl_step(f, budget, a, m, left, 0.5 * eps, depth + 1) +
         gl_step(f, budget, m, b, right, 0.5 * eps, depth + 1);
}

}  // namespace

GaussRule gauss_legendre(int n) {
  switch (n) {
    case 1: return {kN1, kW1};
    case 2: return {kN2, kW2};
    case 3: return {kN3, kW3};
    case 4: return {kN4, kW4};
    case 5: return {kN5, kW5};
    case 8: return {kN8, kW8};
    default:
      throw Error(ErrorCode::InvalidArgument, "no Gauss-Legendre rule with " + std::to_string(n) + " nodes");
  }
}

double adaptive_simpson(const Integrand1D& f, double a, double b, double rel_tol, double abs_tol,
                        QuadratureBudget& budget, int min_depth) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  budget.charge(3);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  // Scale the relative tolerance by a magnitude estimate that does not vanish
  // when the integrand is oscillating around zero.
  const double mag = std::abs(b - a) * (std::abs(fa) + std::abs(fm) + std::abs(fb)) / 3.0;
  SimpsonState st{f, budget, std::max(rel_tol * std::max(std::abs(whole), mag), abs_tol), min_depth};
  return simpson_step(st, a, fa, m, fm, b, fb, whole, 0);
}

double adaptive_gauss_legendre(const Integrand1D& f, double a, double b, double rel_tol,
                               double abs_tol, QuadratureBudget& budget) {
  if (a == b) return 0.0;
  const double whole = gauss5(f, a, b);
  const double mag = gauss5([&f](double x) { return std::abs(f(x)); }, a, b);
  budget.charge(10);
  // As above, a cancelling integrand must not drive the tolerance to zero.
  const double eps = std::max(rel_tol * std::max(std::abs(whole), std::abs(mag)), abs_tol);
  return gl_step(f, budget, a, b, whole, eps, 0);
}

}  // namespace ccm
