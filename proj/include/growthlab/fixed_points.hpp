#pragma once

#include <string>
#include <vector>

#include "growthlab/diffeo.hpp"

namespace growthlab {

struct Stratum {
  enum class Kind { E1, Ek, FlatToOrder };
  Kind kind = Kind::FlatToOrder;
  /// f'(x*) for E1.
  double multiplier = 1.0;
  /// k for Ek, m for FlatToOrder.
  int order = 0;
  /// k-th displacement derivative for Ek.
  double derivative = 0.0;

  std::string label() const;
  bool operator==(const Stratum& o) const { return kind == o.kind && order == o.order; }
};

struct FixedPointSet {
  /// Sorted; always contains 0 and 1.
  std::vector<double> points;
  /// Subintervals on which phi vanishes identically at every probe.
  std::vector<Interval> fixed_intervals;

  bool inside_fixed_interval(double x) const;
};

struct ClassifiedPoint {
  double location = 0.0;
  Stratum stratum;
  /// True when the point is an endpoint of a fixed interval (reported, not classified).
  bool fixed_interval_endpoint = false;
};

struct FixedPointReport {
  std::vector<ClassifiedPoint> points;
  std::vector<Interval> fixed_intervals;
  double V = 0.0;
  int detection_grid = 0;
};

struct ClassifyOptions {
  int grid_size = 1000;
  double location_tol = 1e-9;
  double multiplier_tol = 1e-5;
  int max_order = 8;
};

FixedPointSet find_fixed_point_set(const DiffeoSpec& spec, int grid_size, double tol);
/// Locations only (fixed-interval endpoints included).
std::vector<double> find_fixed_points(const DiffeoSpec& spec, int grid_size, double tol);

/// E1 if |f'(x*) - 1| > tol; else the first k <= max_order with |phi^(k)(x*)| > sqrt(tol);
/// else FlatToOrder(max_order). x* must satisfy |phi(x*)| <= location_tol.
Stratum classify_fixed_point(const DiffeoSpec& spec, double x_star, int max_order = 8,
                             double tol = 1e-5, double location_tol = 1e-9);

double compute_V(const DiffeoSpec& spec, const std::vector<double>& points);

FixedPointReport fixed_point_report(const DiffeoSpec& spec, const ClassifyOptions& opts = {});

}  // namespace growthlab
