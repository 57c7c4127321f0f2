#include "growthlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "growthlab/errors.hpp"

namespace growthlab {

namespace {

// log(1 + exp(g)) without overflow.
double softplus(double g) {
  if (g > 30.0) return g + std::log1p(std::exp(-g));
  return std::log1p(std::exp(g));
}

double transition_exponent(double s) { return (1.0 - 2.0 * s) / (s * (1.0 - s)); }

struct SimpsonState {
  const std::function<double(double)>* fn;
  int max_depth;
};

double simpson_rec(const SimpsonState& st, double a, double b, double fa, double fm, double fb,
                   double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = (*st.fn)(lm);
  const double frm = (*st.fn)(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (std::abs(diff) <= 15.0 * eps) return left + right + diff / 15.0;
  if (depth >= st.max_depth || !(lm > a && m > lm && rm > m && b > rm)) {
    throw PrecisionError("adaptive Simpson: depth cap reached near x=" + std::to_string(m));
  }
  return simpson_rec(st, a, m, fa, flm, fm, left, 0.5 * eps, depth + 1) +
         simpson_rec(st, m, b, fm, frm, fb, right, 0.5 * eps, depth + 1);
}

}  // namespace

double bisect_root(const std::function<double(double)>& fn, double lo, double hi, int max_iter) {
  double flo = fn(lo);
  const double fhi = fn(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) {
    throw ArgumentError("bisect_root: no sign change on bracket");
  }
  for (int i = 0; i < max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = fn(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double adaptive_simpson(const std::function<double(double)>& fn, double a, double b,
                        double rel_tol, int max_depth) {
  if (a == b) return 0.0;
  const double fa = fn(a);
  const double fb = fn(b);
  const double fm = fn(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double scale = std::abs(whole);
  if (scale == 0.0 || !std::isfinite(scale)) {
    scale = std::max({std::abs(fa), std::abs(fb), std::abs(fm)}) * std::abs(b - a);
  }
  if (!std::isfinite(scale)) throw PrecisionError("adaptive Simpson: non-finite integrand");
  SimpsonState st{&fn, max_depth};
  return simpson_rec(st, a, b, fa, fm, fb, whole, rel_tol * scale, 0);
}

double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return 1.0 / (1.0 + std::exp(transition_exponent(s)));
}

double smooth_step_derivative(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double v = smooth_step(s);
  return v * (1.0 - v) * (1.0 / (s * s) + 1.0 / ((1.0 - s) * (1.0 - s)));
}

double log_smooth_step(double s) {
  if (s <= 0.0) return -std::numeric_limits<double>::infinity();
  if (s >= 1.0) return 0.0;
  return -softplus(transition_exponent(s));
}

double Plateau::value(double x) const {
  if (x <= a || x >= d) return 0.0;
  if (x < b) return smooth_step((x - a) / (b - a));
  if (x > c) return smooth_step((d - x) / (d - c));
  return 1.0;
}

double Plateau::derivative(double x) const {
  if (x <= a || x >= d) return 0.0;
  if (x < b) return smooth_step_derivative((x - a) / (b - a)) / (b - a);
  if (x > c) return -smooth_step_derivative((d - x) / (d - c)) / (d - c);
  return 0.0;
}

double Plateau::log_value(double x) const {
  if (x <= a || x >= d) return -std::numeric_limits<double>::infinity();
  if (x < b) return log_smooth_step((x - a) / (b - a));
  if (x > c) return log_smooth_step((d - x) / (d - c));
  return 0.0;
}

double Plateau::log_complement(double x) const {
  if (x <= a || x >= d) return 0.0;
  if (x < b) return log_smooth_step(1.0 - (x - a) / (b - a));
  if (x > c) return log_smooth_step(1.0 - (d - x) / (d - c));
  return -std::numeric_limits<double>::infinity();
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

std::vector<std::int64_t> log_spaced_integers(std::int64_t lo, std::int64_t hi, int count) {
  if (lo < 1 || hi < lo || count < 1) {
    throw ArgumentError("log_spaced_integers: need 1 <= lo <= hi and count >= 1");
  }
  std::vector<std::int64_t> out;
  if (count == 1 || lo == hi) {
    out.push_back(hi);
    return out;
  }
  const double llo = std::log(static_cast<double>(lo));
  const double lhi = std::log(static_cast<double>(hi));
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / (count - 1);
    auto v = static_cast<std::int64_t>(std::llround(std::exp(llo + t * (lhi - llo))));
    v = std::clamp(v, lo, hi);
    if (out.empty() || v > out.back()) out.push_back(v);
  }
  return out;
}

double holder_seminorm(const std::vector<double>& values, double h, double alpha) {
  const std::size_t n = values.size();
  double best = 0.0;
  for (std::size_t d = 1; d < n; ++d) {
    double m = 0.0;
    const double* v = values.data();
    for (std::size_t i = 0; i + d < n; ++i) {
      const double diff = std::abs(v[i + d] - v[i]);
      if (diff > m) m = diff;
    }
    if (m > 0.0) best = std::max(best, m / std::pow(static_cast<double>(d) * h, alpha));
  }
  return best;
}

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

}  // namespace growthlab
