#include "ccm/cycle_decomp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ccm/error.hpp"
#include "ccm/random.hpp"

namespace ccm {

PolyLoop::PolyLoop(Polygon vertices, std::size_t base) : vertices_(std::move(vertices)), base_(base) {
  if (vertices_.size() < 3) throw Error(ErrorCode::InvalidArgument, "loop needs at least 3 vertices");
  if (base_ >= vertices_.size()) throw Error(ErrorCode::InvalidArgument, "base index out of range");
  for (const Complex& z : vertices_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw Error(ErrorCode::InvalidArgument, "loop vertices must be finite");
    }
  }
  const double min_gap = 1e-12 * std::max(1.0, bbox_diameter(vertices_));
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (std::abs(vertices_[(i + 1) % vertices_.size()] - vertices_[i]) < min_gap) {
      throw Error(ErrorCode::InvalidArgument, "consecutive loop vertices coincide at index " + std::to_string(i));
    }
  }
}

PolyLoop PolyLoop::from_control(Complex z0, double delta, const ControlPair& u) {
  Polygon v = control_vertices(z0, delta, u);
  const double tol = 1e-9 * std::max(1.0, delta);
  if (std::abs(v.back() - v.front()) > tol) {
    throw Error(ErrorCode::InvalidControl, "control path does not close; project it to mean zero first");
  }
  v.pop_back();
  return PolyLoop(std::move(v), 0);
}

PolyLoop PolyLoop::reversed() const {
  Polygon v(vertices_.rbegin(), vertices_.rend());
  return PolyLoop(std::move(v), vertices_.size() - 1 - base_);
}

double default_gp_tolerance(const PolyLoop& loop) { return 1e-9 * bbox_diameter(loop.vertices()); }

namespace {

struct Insert {
  double param;
  Complex point;
};

std::uint64_t loop_hash(const Polygon& v) {
  // FNV-1a over the raw coordinate bits.
  std::uint64_t h = 1469598103934665603ull;
  for (const Complex& z : v) {
    for (double c : {z.real(), z.imag()}) {
      std::uint64_t bits;
      std::memcpy(&bits, &c, sizeof bits);
      for (int b = 0; b < 8; ++b) {
        h ^= (bits >> (8 * b)) & 0xffu;
        h *= 1099511628211ull;
      }
    }
  }
  return h;
}

// Returns false when the configuration is not in general position.
bool collect_crossings(const Polygon& v, double eps_id, std::vector<std::vector<Insert>>& inserts) {
  const std::size_t n = v.size();
  inserts.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    const Complex a = v[i], b = v[(i + 1) % n];
    const double lab = std::abs(b - a);
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex c = v[j], d = v[(j + 1) % n];
      if (collinear_overlap(a, b, c, d, 1e-12)) return false;
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      const double lcd = std::abs(d - c);
      const auto cr = segment_crossing(a, b, c, d);
      if (!cr) {
        // Near misses closer than the identification tolerance are
        // ambiguous unless they are an exact vertex revisit.
        if (segment_segment_distance(a, b, c, d) < eps_id) {
          const double ee = std::min({std::abs(a - c), std::abs(a - d), std::abs(b - c), std::abs(b - d)});
          if (ee >= eps_id) return false;
        }
        continue;
      }
      const bool s_end = cr->s * lab < eps_id || (1.0 - cr->s) * lab < eps_id;
      const bool t_end = cr->t * lcd < eps_id || (1.0 - cr->t) * lcd < eps_id;
      if (s_end && t_end) continue;  // vertex revisit
      if (s_end || t_end) return false;  // T-junction
      inserts[i].push_back({cr->s, cr->point});
      inserts[j].push_back({cr->t, cr->point});
    }
  }
  for (auto& list : inserts) {
    std::sort(list.begin(), list.end(), [](const Insert& x, const Insert& y) { return x.param < y.param; });
    for (std::size_t k = 1; k < list.size(); ++k) {
      if (std::abs(list[k].point - list[k - 1].point) < eps_id) return false;  // triple point
    }
  }
  return true;
}

}  // namespace

PolyLoop refine_intersections(const PolyLoop& loop, double eps_gp) {
  const std::size_t n = loop.size();
  Polygon v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = loop.vertices()[(loop.base() + i) % n];
  const double diam = bbox_diameter(v);
  if (!(eps_gp > 0.0)) eps_gp = 1e-9 * diam;
  const double eps_id = 1e-3 * eps_gp;

  Rng rng(loop_hash(v));
  std::vector<std::vector<Insert>> inserts;
  for (int attempt = 0; attempt <= 3; ++attempt) {
    if (collect_crossings(v, eps_id, inserts)) {
      Polygon out;
      for (std::size_t i = 0; i < n; ++i) {
        out.push_back(v[i]);
        for (const Insert& ins : inserts[i]) out.push_back(ins.point);
      }
      return PolyLoop(std::move(out), 0);
    }
    if (attempt == 3) break;
    for (std::size_t i = 1; i < n; ++i) v[i] += eps_gp * rng.in_unit_disc();
  }
  throw Error(ErrorCode::DegenerateAfterPerturbation, "loop is not in general position after 3 jitter attempts");
}

std::vector<SimpleCycle> decompose(const PolyLoop& refined) {
  const Polygon& v = refined.vertices();
  const std::size_t n = v.size();
  const double eps_id = 1e-12 * bbox_diameter(v);

  // Graph vertex ids: positions within eps_id are the same vertex. A hash grid
  // with cells of size eps_id finds the candidates among the 3x3 neighbors.
  struct CellHash {
    std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& c) const {
      return std::hash<std::int64_t>{}(c.first * 1000003 ^ c.second);
    }
  };
  std::unordered_map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>, CellHash> cells;
  auto cell_of = [eps_id](Complex z) {
    return std::pair<std::int64_t, std::int64_t>{static_cast<std::int64_t>(std::floor(z.real() / eps_id)),
                                                 static_cast<std::int64_t>(std::floor(z.imag() / eps_id))};
  };
  std::vector<std::size_t> id(n);
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < n; ++i) {
    const Complex z = v[(refined.base() + i) % n];
    const auto c = cell_of(z);
    std::size_t found = reps.size();
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = cells.find({c.first + dx, c.second + dy});
        if (it == cells.end()) continue;
        for (std::size_t r : it->second) {
          if (r < found && std::abs(v[(refined.base() + reps[r]) % n] - z) <= eps_id) found = r;
        }
      }
    }
    if (found == reps.size()) {
      cells[c].push_back(reps.size());
      reps.push_back(i);
    }
    id[i] = found;
  }

  // Normalized arc-length parameter at each vertex, starting at the base.
  std::vector<double> param(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    param[i + 1] = param[i] + std::abs(v[(refined.base() + i + 1) % n] - v[(refined.base() + i) % n]);
  }
  const double total = param[n];
  for (double& p : param) p /= total;

  struct Entry {
    std::size_t index;  // loop position (relative to base) where pushed
  };
  std::vector<Entry> stack{{0}};
  std::unordered_map<std::size_t, std::size_t> on_stack{{id[0], 0}};
  std::vector<SimpleCycle> cycles;

  for (std::size_t k = 1; k <= n; ++k) {
    const std::size_t pos = k % n;
    const std::size_t vid = id[pos];
    auto it = on_stack.find(vid);
    if (it == on_stack.end()) {
      on_stack[vid] = stack.size();
      stack.push_back({k});
      continue;
    }
    const std::size_t p = it->second;
    SimpleCycle cyc;
    for (std::size_t q = p; q < stack.size(); ++q) cyc.vertices.push_back(v[(refined.base() + stack[q].index) % n]);
    // Each stack entry above p was reached by the loop edge ending at it; the
    // closing edge ends at position k.
    auto add_interval = [&cyc, &param](std::size_t end_index) {
      const ParamInterval iv{param[end_index - 1], param[end_index]};
      if (!cyc.provenance.empty() && cyc.provenance.back().end == iv.begin) {
        cyc.provenance.back().end = iv.end;
      } else {
        cyc.provenance.push_back(iv);
      }
    };
    for (std::size_t q = p + 1; q < stack.size(); ++q) add_interval(stack[q].index);
    add_interval(k);
    for (std::size_t q = p + 1; q < stack.size(); ++q) on_stack.erase(id[stack[q].index % n]);
    stack.resize(p + 1);
    if (cyc.vertices.size() >= 3) {
      cyc.orientation = signed_area(cyc.vertices) < 0.0 ? Orientation::Clockwise : Orientation::CounterClockwise;
      cycles.push_back(std::move(cyc));
    }
  }
  if (stack.size() != 1) throw Error(ErrorCode::NotEulerian, "traversal did not return to the base point");
  return cycles;
}

double signed_mass(const PotentialField& field, const SimpleCycle& cycle) {
  const double m = field.region_mass(cycle.vertices);
  return cycle.orientation == Orientation::Clockwise ? m : -m;
}

double loop_integral(const PotentialField& field, const PolyLoop& loop) {
  const Polygon& v = loop.vertices();
  QuadratureBudget budget;
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) sum += segment_twist(field, v[i], v[(i + 1) % v.size()], budget);
  return sum;
}

}  // namespace ccm
