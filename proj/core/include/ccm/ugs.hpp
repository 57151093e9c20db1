#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "ccm/geometry.hpp"
#include "ccm/potential.hpp"
#include "ccm/stockyard.hpp"

namespace ccm {

/// n x n lattice covering `window` (its center when n == 1).
std::vector<Complex> window_lattice(const Rect& window, int n);

/// inf over z0 of sup over z in B(z0, delta0) and dhat in {delta0 2^-j, j = 0..10}
/// of (dhat + dhat^2)^-1 ball_mass(z, dhat), with grid_n^2 samples for z0 and z.
double check_lower_density(const PotentialField& field, const Rect& window, double delta0, int grid_n);

/// sup over sampled z0 and delta <= delta_max (geometric ladder, ratio 2) of
/// (delta + delta^2)^-1 ball_mass(z0, delta). Disc-array fields are probed
/// at their discs as well.
double check_upper_density(const PotentialField& field, const Rect& window, double delta_max, int grid_n);

/// (min, max) of ball averages |B(z, d)|^-1 ball_mass(z, d) over sampled z and
/// d in {delta0, 2 delta0, 4 delta0}.
std::pair<double, double> check_averages(const PotentialField& field, const Rect& window, double delta0, int grid_n);

enum class Verdict { UgsQuadratic, UgsLinearLike, UgsOther, NoUgsEvidence };

std::string_view to_string(Verdict v);

struct UgsOptions {
  int grid_n = 3;
  /// Threshold for the lower density check; the smallest delta when unset.
  std::optional<double> delta0;
  int mc_samples = 0;
  /// Largest tolerated max/min spread of lower bounds across sampled z0.
  double uniformity_factor = 4.0;
  /// Largest max/min ball-average ratio accepted as "comparable to 1".
  double averages_ratio = 100.0;
};

struct UgsReport {
  double c1 = 0.0;
  double c2 = 0.0;
  double avg_ratio_lo = 0.0;
  double avg_ratio_hi = 0.0;
  /// Whether Delta P is bounded; the averages test is only meaningful then.
  bool density_bounded = true;
  /// Ball averages bounded away from 0 with max/min within averages_ratio.
  /// Always false for unbounded densities.
  bool averages_ok = false;
  /// Per delta: geometric mean of the lower bounds over z0 and the largest
  /// upper bound.
  std::vector<LambdaBounds> f_table;
  /// Largest max/min ratio of lower bounds across z0 over the table.
  double spread = 0.0;
  double exponent = 0.0;
  double prefactor = 0.0;
  /// Root mean square residual of the log-log fit.
  double residual = 0.0;
  Verdict verdict = Verdict::NoUgsEvidence;
  int grid_n = 0;
  double delta0 = 0.0;
};

/// Needs at least 4 deltas whose largest is at least 8 times the smallest.
UgsReport fit_ugs(const PotentialField& field, const Rect& window, std::span<const double> deltas,
                  std::int64_t eval_budget, std::uint64_t seed, const UgsOptions& opts = {});

/// Whether all derivatives of Delta P of order 0..m-2 have a sup within
/// [lo, hi] at every sampled point. Throws UnsupportedOrder when m - 2 > 4.
bool type_m(const PotentialField& field, const Rect& window, int m, int grid_n, double lo = 1e-3, double hi = 1e3);

}  // namespace ccm
