#include <algorithm>
#include <cmath>
#include <limits>

#include "growthlab/analysis.hpp"
#include "growthlab/errors.hpp"
#include "growthlab/numerics.hpp"

namespace growthlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sum of exp(-c k^e) for k > n, for every n in [1, n_check]; empty when the tail does not
// become negligible before k = 2e6.
std::vector<double> tails(double c, double e, int n_check) {
  if (!(c > 0.0)) return {};
  const double kmax_d = std::pow(760.0 / c, 1.0 / e) + 2.0;
  if (!(kmax_d < 2e6)) return {};
  const auto kmax = static_cast<std::int64_t>(std::max<double>(kmax_d, n_check + 2.0));
  std::vector<double> tail(static_cast<std::size_t>(n_check) + 1, 0.0);
  double acc = 0.0;
  for (std::int64_t k = kmax; k >= 1; --k) {
    if (k <= n_check) tail[k] = acc;  // sum over indices > k
    acc += std::exp(-c * std::pow(static_cast<double>(k), e));
  }
  return tail;
}

bool do12_holds(double A, double K, double K1, double alpha, int n_check) {
  const double e = 1.0 - alpha;
  const auto tail = tails(A / 2.0 - K1, e, n_check);
  if (tail.empty()) return false;
  for (int n = 1; n <= n_check; ++n) {
    const double lhs = A * (std::pow(n + 1.0, e) - std::pow(static_cast<double>(n), e));
    if (lhs < 2.0 * K * tail[n]) return false;
  }
  return true;
}

}  // namespace

std::string to_string(FitMode mode) {
  switch (mode) {
    case FitMode::power:
      return "power";
    case FitMode::exp_rate:
      return "exp-rate";
    case FitMode::loglog:
      return "loglog";
  }
  return "?";
}

FitMode fit_mode_from_string(const std::string& name) {
  if (name == "power") return FitMode::power;
  if (name == "exp-rate" || name == "exp_rate") return FitMode::exp_rate;
  if (name == "loglog") return FitMode::loglog;
  throw ArgumentError("unknown fit mode '" + name + "'");
}

ExponentFit fit_exponent(const std::vector<GrowthRecord>& records, FitMode mode, FitWindow window) {
  if (!(window.lo <= window.hi)) throw ArgumentError("fit_exponent: empty window");
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& r : records) {
    const double n = static_cast<double>(r.n);
    if (n < window.lo || n > window.hi) continue;
    double x = mode == FitMode::exp_rate ? n : std::log(n);
    double y = r.log_gamma;
    if (mode == FitMode::loglog) {
      if (!(r.log_gamma > 0.0)) {
        throw ArgumentError("fit_exponent: loglog mode needs log Gamma_n > 0 on the window");
      }
      y = std::log(r.log_gamma);
    }
    xs.push_back(x);
    ys.push_back(y);
  }
  if (xs.size() < 5) {
    throw ArgumentError("fit_exponent: window holds " + std::to_string(xs.size()) +
                        " checkpoints, need at least 5");
  }
  const double m = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw ArgumentError("fit_exponent: degenerate abscissae");
  ExponentFit fit;
  fit.mode = mode;
  fit.window = window;
  fit.points = static_cast<int>(xs.size());
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

ExponentFit fit_exponent(const GrowthCurve& curve, FitMode mode, FitWindow window) {
  return fit_exponent(curve.records, mode, window);
}

std::string to_string(LemmaStatus status) {
  switch (status) {
    case LemmaStatus::pass:
      return "pass";
    case LemmaStatus::fail:
      return "fail";
    case LemmaStatus::not_applicable:
      return "not-applicable";
  }
  return "?";
}

double LemmaReport::detail(const std::string& key) const {
  for (const auto& [k, v] : details) {
    if (k == key) return v;
  }
  throw ArgumentError("report has no detail '" + key + "'");
}

double almost_convexity_A(double K, double K1, double alpha, int n_check) {
  if (!(alpha < 1.0)) return kInf;
  if (!(K > 0.0 && K1 > 0.0)) throw ArgumentError("almost_convexity_A: need K, K1 > 0");
  double lo = 2.0 * K1;
  double hi = std::max(4.0 * K1, 1.0);
  while (!do12_holds(hi, K, K1, alpha, n_check)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) return kInf;
  }
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (do12_holds(mid, K, K1, alpha, n_check)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

LemmaReport check_almost_convexity(const std::vector<double>& a, double K, double K1,
                                   double alpha) {
  if (a.size() < 3) throw ArgumentError("check_almost_convexity: need at least 3 terms");
  LemmaReport rep;
  rep.lemma = "l5";
  rep.quantity = "max_n [2a_n - a_{n-1} - a_{n+1} - K exp(-a_n + K1 n^(1-alpha))]";
  rep.bound_lo = -kInf;
  rep.bound_hi = 0.0;
  double worst = -kInf;
  std::size_t worst_n = 1;
  for (std::size_t n = 1; n + 1 < a.size(); ++n) {
    const double lhs = 2.0 * a[n] - a[n - 1] - a[n + 1];
    const double rhs = K * std::exp(-a[n] + K1 * std::pow(static_cast<double>(n), 1.0 - alpha));
    const double slack = 1e-12 * std::max(1.0, std::abs(a[n]));
    const double excess = lhs - rhs - slack;
    if (excess > worst) {
      worst = excess;
      worst_n = n;
    }
  }
  rep.measured = worst;
  rep.worst_location = static_cast<double>(worst_n);
  const bool holds = worst <= 0.0;
  rep.status = holds ? LemmaStatus::pass : LemmaStatus::fail;

  const double A = almost_convexity_A(K, K1, alpha);
  double max_ratio = 0.0;
  for (std::size_t n = 1; n < a.size(); ++n) {
    max_ratio = std::max(max_ratio, a[n] / std::pow(static_cast<double>(n), 1.0 - alpha));
  }
  rep.details = {{"eq41_holds", holds ? 1.0 : 0.0},
                 {"a0", a[0]},
                 {"A", A},
                 {"max_a_over_power", max_ratio},
                 {"A_conclusion_holds", (std::isfinite(A) && max_ratio <= A) ? 1.0 : 0.0}};
  if (a[0] != 0.0) rep.note = "a_0 != 0";
  return rep;
}

ConvexityConstants fit_almost_convexity(const std::vector<double>& a, double alpha) {
  if (a.size() < 3) throw ArgumentError("fit_almost_convexity: need at least 3 terms");
  ConvexityConstants best{0.0, 0.0, kInf};
  for (double K1 : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    double K = 1e-12;
    for (std::size_t n = 1; n + 1 < a.size(); ++n) {
      const double lhs = 2.0 * a[n] - a[n - 1] - a[n + 1];
      if (lhs <= 0.0) continue;
      K = std::max(K, lhs * std::exp(a[n] - K1 * std::pow(static_cast<double>(n), 1.0 - alpha)));
    }
    const double A = almost_convexity_A(K, K1, alpha);
    if (A < best.A || best.K == 0.0) best = {K, K1, A};
  }
  return best;
}

double fit_almost_convexity_constant(const std::vector<double>& a) {
  if (a.size() < 3) throw ArgumentError("fit_almost_convexity_constant: need at least 3 terms");
  double log_q = -kInf;
  for (std::size_t n = 1; n + 1 < a.size(); ++n) {
    const double lhs = 2.0 * a[n] - a[n - 1] - a[n + 1];
    if (lhs > 0.0) log_q = std::max(log_q, std::log(lhs) + a[n]);
  }
  if (log_q == -kInf) return 0.0;
  // c e^c = q, i.e. c + log c = log q.
  double lo = 0.0;
  double hi = std::max(1.0, log_q + 1.0);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid + std::log(mid) >= log_q) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double hoelder_constant(const std::function<double(double)>& values, double alpha, int grid_size,
                        Interval interval) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ArgumentError("hoelder_constant: alpha in (0,1]");
  if (grid_size < 1000) throw ArgumentError("hoelder_constant: grid_size must be at least 1000");
  const double h = interval.length() / grid_size;
  std::vector<double> v(static_cast<std::size_t>(grid_size) + 1);
  for (int i = 0; i <= grid_size; ++i) v[i] = values(interval.lo + i * h);
  return holder_seminorm(v, h, alpha);
}

double hoelder_constant(const DiffeoSpec& spec, double alpha, int grid_size) {
  return hoelder_constant([&spec](double x) { return deriv(spec, x, 1); }, alpha, grid_size,
                          spec.domain());
}

double l6_probe(double b, double p, double x) {
  if (x == 0.0) return 0.0;
  return std::pow(x, b) * std::sin(std::pow(x, -p));
}

LemmaReport verify_lemma_l6(double b, double p, double alpha, int grid, int doublings) {
  if (doublings < 1) throw ArgumentError("verify_lemma_l6: need at least one doubling");
  LemmaReport rep;
  rep.lemma = "l6";
  const bool covered = b >= (p + 1.0) * alpha;
  std::vector<double> s;
  for (int i = 0; i <= doublings; ++i) {
    const int g = grid << i;
    s.push_back(hoelder_constant([&](double x) { return l6_probe(b, p, x); }, alpha, g));
    rep.details.emplace_back("seminorm_grid_" + std::to_string(g), s.back());
  }
  double max_change = 0.0;
  for (int i = 0; i < doublings; ++i) {
    const double change = s[i + 1] / s[i] - 1.0;
    rep.details.emplace_back("change_doubling_" + std::to_string(i + 1), change);
    max_change = std::max(max_change, std::abs(change));
  }
  const double growth = s.back() / s.front() - 1.0;
  rep.details.emplace_back("cumulative_growth", growth);
  rep.details.emplace_back("covered_by_lemma", covered ? 1.0 : 0.0);
  if (covered) {
    rep.quantity = "max relative change per grid doubling";
    rep.measured = max_change;
    rep.bound_lo = 0.0;
    rep.bound_hi = 0.2;
    rep.status = max_change < 0.2 ? LemmaStatus::pass : LemmaStatus::fail;
  } else {
    rep.quantity = "cumulative seminorm growth over the doublings";
    rep.measured = growth;
    rep.bound_lo = 0.5;
    rep.bound_hi = std::numeric_limits<double>::infinity();
    rep.status = growth > 0.5 ? LemmaStatus::pass : LemmaStatus::fail;
  }
  return rep;
}

}  // namespace growthlab
