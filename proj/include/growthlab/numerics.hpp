#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace growthlab {

/// Neumaier variant of compensated summation.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Root of a sign-changing function on [lo, hi] by plain bisection.
/// Stops when the bracket collapses to adjacent doubles or after max_iter halvings.
double bisect_root(const std::function<double(double)>& fn, double lo, double hi,
                   int max_iter = 200);

/// Adaptive Simpson quadrature. Throws PrecisionError if the depth cap is hit
/// before the local error estimate meets rel_tol.
double adaptive_simpson(const std::function<double(double)>& fn, double a, double b,
                        double rel_tol, int max_depth = 60);

/// C-infinity transition built from B(s) = exp(-1/s): 0 for s <= 0, 1 for s >= 1.
double smooth_step(double s);
double smooth_step_derivative(double s);
/// log of smooth_step(s), finite for every s in (0, 1].
double log_smooth_step(double s);

/// Flat-edged plateau: 0 outside (a, d), 1 on [b, c], smooth transitions between.
struct Plateau {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  double value(double x) const;
  double derivative(double x) const;
  /// log(value); -inf outside (a, d).
  double log_value(double x) const;
  /// log(1 - value); -inf on [b, c].
  double log_complement(double x) const;
};

double binomial(int n, int k);

/// Unique, increasing, log-spaced integers in [lo, hi] (at most count of them).
std::vector<std::int64_t> log_spaced_integers(std::int64_t lo, std::int64_t hi, int count);

/// max over index pairs i < j of |v[j] - v[i]| / ((j - i) h)^alpha for samples v on a
/// uniform grid of spacing h. Brute-force O(n^2) pair scan.
double holder_seminorm(const std::vector<double>& values, double h, double alpha);

/// log(exp(a) + exp(b)) without overflow; handles -inf inputs.
double log_add_exp(double a, double b);

}  // namespace growthlab
