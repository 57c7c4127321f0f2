#include "growthlab/fixed_points.hpp"

#include <algorithm>
#include <cmath>

#include "growthlab/errors.hpp"
#include "growthlab/numerics.hpp"

namespace growthlab {

namespace {

// Boundary between a zero probe and a nonzero probe, by bisection on "phi vanishes".
double zero_boundary(const MapModel& m, double zero_x, double nonzero_x) {
  double z = zero_x;
  double nz = nonzero_x;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (z + nz);
    if (mid == z || mid == nz) break;
    if (m.displacement_sign(mid) == 0) {
      z = mid;
    } else {
      nz = mid;
    }
  }
  return z;
}

struct Candidate {
  double x;
  int priority;  // 2: domain endpoint, 1: fixed-interval endpoint, 0: isolated zero
};

}  // namespace

std::string Stratum::label() const {
  switch (kind) {
    case Kind::E1:
      return "E1";
    case Kind::Ek:
      return "E" + std::to_string(order);
    case Kind::FlatToOrder:
      return "FlatToOrder(" + std::to_string(order) + ")";
  }
  return "?";
}

bool FixedPointSet::inside_fixed_interval(double x) const {
  for (const auto& iv : fixed_intervals) {
    if (x > iv.lo && x < iv.hi) return true;
  }
  return false;
}

FixedPointSet find_fixed_point_set(const DiffeoSpec& spec, int grid_size, double tol) {
  if (grid_size < 100) throw ArgumentError("find_fixed_points: grid_size must be at least 100");
  if (!(tol > 0.0)) throw ArgumentError("find_fixed_points: tol must be positive");
  const MapModel& m = spec.model();
  const int G = grid_size;
  auto probe = [G](int i) { return static_cast<double>(i) / G; };
  std::vector<int> sign(static_cast<std::size_t>(G) + 1);
  for (int i = 0; i <= G; ++i) sign[i] = m.displacement_sign(probe(i));

  FixedPointSet out;
  std::vector<Candidate> cands{{0.0, 2}, {1.0, 2}};
  int i = 0;
  while (i <= G) {
    if (sign[i] != 0) {
      if (i < G && sign[i + 1] != 0 && sign[i + 1] != sign[i]) {
        auto fn = [&m](double x) { return static_cast<double>(m.displacement_sign(x)); };
        const double root = bisect_root(fn, probe(i), probe(i + 1));
        // A sign change without a small value is a jump, not a fixed point.
        if (std::abs(m.displacement(root)) <= tol) cands.push_back({root, 0});
      }
      ++i;
      continue;
    }
    int j = i;
    while (j < G && sign[j + 1] == 0) ++j;
    bool flat_piece = j > i;
    for (int k = i; flat_piece && k < j; ++k) {
      if (m.displacement_sign(0.5 * (probe(k) + probe(k + 1))) != 0) flat_piece = false;
    }
    if (flat_piece) {
      const double lo = i > 0 ? zero_boundary(m, probe(i), probe(i - 1)) : 0.0;
      const double hi = j < G ? zero_boundary(m, probe(j), probe(j + 1)) : 1.0;
      out.fixed_intervals.push_back({lo, hi});
      cands.push_back({lo, lo == 0.0 ? 2 : 1});
      cands.push_back({hi, hi == 1.0 ? 2 : 1});
    } else {
      for (int k = i; k <= j; ++k) cands.push_back({probe(k), k == 0 || k == G ? 2 : 0});
    }
    i = j + 1;
  }

  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) { return a.x < b.x; });
  const double merge = 2.0 / G;
  std::vector<Candidate> kept;
  for (const auto& c : cands) {
    if (c.priority > 0) {
      kept.erase(std::remove_if(kept.begin(), kept.end(),
                                [&](const Candidate& k) {
                                  return k.priority == 0 && std::abs(k.x - c.x) < merge;
                                }),
                 kept.end());
      if (kept.empty() || kept.back().x != c.x) kept.push_back(c);
      continue;
    }
    bool close = false;
    for (const auto& k : kept) close = close || std::abs(k.x - c.x) < merge;
    if (!close) kept.push_back(c);
  }
  for (const auto& k : kept) out.points.push_back(k.x);
  std::sort(out.points.begin(), out.points.end());
  out.points.erase(std::unique(out.points.begin(), out.points.end()), out.points.end());
  return out;
}

std::vector<double> find_fixed_points(const DiffeoSpec& spec, int grid_size, double tol) {
  return find_fixed_point_set(spec, grid_size, tol).points;
}

Stratum classify_fixed_point(const DiffeoSpec& spec, double x_star, int max_order, double tol,
                             double location_tol) {
  if (max_order < 2 || max_order > kMaxDerivativeOrder) {
    throw ArgumentError("classify_fixed_point: max_order must lie in [2, 8]");
  }
  if (!(tol > 0.0)) throw ArgumentError("classify_fixed_point: tol must be positive");
  const double phi = spec.model().displacement(x_star);
  if (!(std::abs(phi) <= location_tol)) {
    throw ArgumentError("classify_fixed_point: x*=" + std::to_string(x_star) +
                        " is not a fixed point (|phi|=" + std::to_string(std::abs(phi)) + ")");
  }
  Stratum s;
  const double f1 = deriv(spec, x_star, 1);
  if (std::abs(f1 - 1.0) > tol) {
    s.kind = Stratum::Kind::E1;
    s.multiplier = f1;
    s.order = 1;
    return s;
  }
  const double threshold = std::sqrt(tol);
  for (int k = 2; k <= max_order; ++k) {
    const double dk = deriv(spec, x_star, k);
    if (std::abs(dk) > threshold) {
      s.kind = Stratum::Kind::Ek;
      s.order = k;
      s.derivative = dk;
      return s;
    }
  }
  s.kind = Stratum::Kind::FlatToOrder;
  s.order = max_order;
  return s;
}

double compute_V(const DiffeoSpec& spec, const std::vector<double>& points) {
  double v = 0.0;
  for (double p : points) v = std::max(v, std::abs(spec.model().log_derivative(p)));
  return v;
}

FixedPointReport fixed_point_report(const DiffeoSpec& spec, const ClassifyOptions& opts) {
  const FixedPointSet set = find_fixed_point_set(spec, opts.grid_size, opts.location_tol);
  FixedPointReport rep;
  rep.detection_grid = opts.grid_size;
  rep.fixed_intervals = set.fixed_intervals;
  std::vector<double> e1_points;
  for (double x : set.points) {
    ClassifiedPoint cp;
    cp.location = x;
    bool on_interval = false;
    for (const auto& iv : set.fixed_intervals) on_interval = on_interval || x == iv.lo || x == iv.hi;
    if (on_interval) {
      cp.fixed_interval_endpoint = true;
      cp.stratum.kind = Stratum::Kind::FlatToOrder;
      cp.stratum.order = opts.max_order;
    } else {
      cp.stratum =
          classify_fixed_point(spec, x, opts.max_order, opts.multiplier_tol, opts.location_tol);
      if (cp.stratum.kind == Stratum::Kind::E1) e1_points.push_back(x);
    }
    rep.points.push_back(cp);
  }
  rep.V = compute_V(spec, e1_points);
  return rep;
}

}  // namespace growthlab
