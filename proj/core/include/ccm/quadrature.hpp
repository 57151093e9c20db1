#pragma once

#include <cstdint>
#include <functional>
#include <span>

namespace ccm {

/// Shared evaluation counter; throws QuadratureBudgetExceeded once `limit`
/// integrand evaluations have been spent.
class QuadratureBudget {
 public:
  static constexpr std::int64_t kDefaultLimit = 10'000'000;

  explicit QuadratureBudget(std::int64_t limit = kDefaultLimit) : limit_(limit) {}

  void charge(std::int64_t evals);
  std::int64_t used() const { return used_; }
  std::int64_t limit() const { return limit_; }

 private:
  std::int64_t limit_;
  std::int64_t used_ = 0;
};

struct GaussRule {
  std::span<const double> nodes;    // on [-1, 1]
  std::span<const double> weights;
};

/// Gauss-Legendre rule with n in {1, 2, 3, 4, 5, 8}.
GaussRule gauss_legendre(int n);

using Integrand1D = std::function<double(double)>;

/// Adaptive Simpson with Richardson correction. Converged when the local
/// error estimate drops below max(rel_tol * |I|, abs_tol).
double adaptive_simpson(const Integrand1D& f, double a, double b, double rel_tol, double abs_tol,
                        QuadratureBudget& budget, int min_depth = 2);

/// Adaptive 5-point Gauss-Legendre, splitting by halves.
double adaptive_gauss_legendre(const Integrand1D& f, double a, double b, double rel_tol,
                               double abs_tol, QuadratureBudget& budget);

}  // namespace ccm
