#include <algorithm>
#include <cmath>
#include <limits>

#include "growthlab/analysis.hpp"
#include "growthlab/errors.hpp"
#include "growthlab/families.hpp"
#include "growthlab/fixed_points.hpp"
#include "growthlab/numerics.hpp"

namespace growthlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 6.283185307179586476925286766559;

// Sign of phi on (a, b), sampled; throws when it changes.
int interval_sign(const DiffeoSpec& spec, Interval I) {
  int sign = 0;
  for (int i = 1; i < 200; ++i) {
    const double x = I.lo + I.length() * i / 200.0;
    const int s = spec.model().displacement_sign(x);
    if (s == 0) continue;
    if (sign != 0 && s != sign) {
      throw ArgumentError("phi changes sign inside [" + std::to_string(I.lo) + ", " +
                          std::to_string(I.hi) + "]");
    }
    sign = s;
  }
  return sign;
}

void check_maximal(const DiffeoSpec& spec, Interval I) {
  const auto pts = find_fixed_points(spec, 1000, 1e-9);
  const double slack = 2.0 / 1000;
  auto near = [&](double v) {
    return std::any_of(pts.begin(), pts.end(), [&](double p) { return std::abs(p - v) <= slack; });
  };
  if (!near(I.lo) || !near(I.hi)) {
    throw ArgumentError("interval endpoints are not fixed points");
  }
  for (double p : pts) {
    if (p > I.lo + slack && p < I.hi - slack) {
      throw ArgumentError("interval contains the fixed point " + std::to_string(p));
    }
  }
}

double pr1_residual(const DiffeoSpec& spec, double x1, std::int64_t n, double& xn) {
  const MapModel& m = spec.model();
  double phi = 0.0;
  xn = x1;
  if (n > 1) {
    const Orbit orb = iterate_orbit(spec, x1, n - 1);
    xn = orb.points.back();
    phi = orb.phi_partial.back();
  }
  return std::abs(m.log_displacement(xn) - m.log_displacement(x1) - phi);
}

LemmaReport not_applicable(std::string lemma, std::string why) {
  LemmaReport rep;
  rep.lemma = std::move(lemma);
  rep.status = LemmaStatus::not_applicable;
  rep.note = std::move(why);
  return rep;
}

double spread(const std::vector<double>& v) {
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  if (*mx == 0.0) return 1.0;
  if (*mn <= 0.0) return kInf;
  return *mx / *mn;
}

}  // namespace

Interval fixed_point_free_interval(const DiffeoSpec& spec, double x) {
  const auto pts = find_fixed_points(spec, 1000, 1e-9);
  Interval I{0.0, 1.0};
  for (double p : pts) {
    if (p == x) throw ArgumentError("x is a fixed point");
    if (p < x) I.lo = std::max(I.lo, p);
    if (p > x) I.hi = std::min(I.hi, p);
  }
  return I;
}

LemmaReport verify_lemma_pr1(const DiffeoSpec& spec, Interval I, double x1, std::int64_t n,
                             bool require_maximal) {
  if (n < 1) throw ArgumentError("verify_lemma_pr1: n must be at least 1");
  if (!(x1 > I.lo && x1 < I.hi)) throw ArgumentError("verify_lemma_pr1: x1 outside the interval");
  if (require_maximal) check_maximal(spec, I);
  if (interval_sign(spec, I) == 0) throw ArgumentError("verify_lemma_pr1: phi vanishes on I");
  LemmaReport rep;
  rep.lemma = "pr1";
  rep.quantity = "|log(phi(x_n)/phi(x_1)) - Phi(n-1,x_1)| / |I|";
  double xn;
  const double residual = pr1_residual(spec, x1, n, xn);
  rep.measured = residual / I.length();
  rep.bound_lo = 0.0;
  rep.bound_hi = 10.0;
  rep.worst_location = xn;
  rep.status = rep.measured <= rep.bound_hi ? LemmaStatus::pass : LemmaStatus::fail;
  rep.details = {{"residual", residual}, {"interval_length", I.length()}, {"x_n", xn},
                 {"n", static_cast<double>(n)}};
  return rep;
}

LemmaReport verify_lemma_pr1_ladder(const DiffeoSpec& spec, Interval I, double x1,
                                    const std::vector<std::int64_t>& ns, bool require_maximal) {
  if (ns.empty()) throw ArgumentError("verify_lemma_pr1_ladder: empty n list");
  if (require_maximal) check_maximal(spec, I);
  LemmaReport rep;
  rep.lemma = "pr1";
  rep.quantity = "spread (max/min) of residual/|I| over n";
  std::vector<double> ratios;
  double worst = -1.0;
  for (std::int64_t n : ns) {
    const LemmaReport r = verify_lemma_pr1(spec, I, x1, n, false);
    ratios.push_back(r.measured);
    rep.details.emplace_back("ratio_n_" + std::to_string(n), r.measured);
    if (r.measured > worst) {
      worst = r.measured;
      rep.worst_location = r.worst_location;
    }
  }
  rep.measured = spread(ratios);
  rep.bound_lo = 1.0;
  rep.bound_hi = 10.0;
  rep.status = rep.measured <= 10.0 && worst <= 10.0 ? LemmaStatus::pass : LemmaStatus::fail;
  return rep;
}

LemmaReport verify_lemma_pr2(const DiffeoSpec& spec, double x, double delta) {
  return verify_lemma_pr2(spec, fixed_point_free_interval(spec, x), x, delta);
}

LemmaReport verify_lemma_pr2(const DiffeoSpec& spec, Interval I, double x, double delta) {
  if (!(x > I.lo && x < I.hi)) throw ArgumentError("verify_lemma_pr2: x outside the interval");
  if (!(delta > 0.0 && delta <= 1.0)) return not_applicable("pr2", "delta must lie in (0,1]");
  const MapModel& m = spec.model();
  const double phi_x = std::abs(m.displacement(x));
  if (!(phi_x > 0.0)) return not_applicable("pr2", "phi(x) = 0");
  const bool left_half = x <= 0.5 * (I.lo + I.hi);
  const Interval side = left_half ? Interval{I.lo, std::min(I.hi, 2.0 * x - I.lo)}
                                  : Interval{std::max(I.lo, 2.0 * x - I.hi), I.hi};
  double max_pp = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double y = side.lo + side.length() * i / 200.0;
    max_pp = std::max(max_pp, std::abs(deriv(spec, y, 2)));
  }
  LemmaReport rep;
  rep.lemma = "pr2";
  rep.details.emplace_back("max_abs_phi2_sampled", max_pp);
  if (max_pp > delta) {
    rep.status = LemmaStatus::not_applicable;
    rep.note = "max |phi''| on the side interval exceeds delta";
    return rep;
  }
  const double w = std::sqrt(phi_x / delta);
  const double hi = std::min(I.hi, x + w);
  double ratio = 1.0;
  double where = x;
  for (int i = 1; i <= 400; ++i) {
    const double y = x + (hi - x) * i / 400.0;
    const double r = std::abs(m.displacement(y)) / phi_x;
    if (r > ratio) {
      ratio = r;
      where = y;
    }
  }
  rep.quantity = "max phi(y)/phi(x), y in [x, x + delta^(-1/2) phi(x)^(1/2)]";
  rep.measured = ratio;
  rep.bound_lo = 0.0;
  rep.bound_hi = 4.0;
  rep.worst_location = where;
  rep.status = ratio <= 4.0 ? LemmaStatus::pass : LemmaStatus::fail;
  rep.details.emplace_back("window", w);
  rep.details.emplace_back("window_inside_interval",
                           (x - w >= I.lo && x + w <= I.hi) ? 1.0 : 0.0);
  return rep;
}

LemmaReport verify_lemma_pr3(const DiffeoSpec& spec, double x1, std::int64_t n) {
  if (n < 2) throw ArgumentError("verify_lemma_pr3: n must be at least 2");
  const MapModel& m = spec.model();
  const Orbit orb = iterate_orbit(spec, x1, n - 1);
  const int sign = m.displacement_sign(x1);
  if (sign == 0) return not_applicable("pr3", "x1 is a fixed point");
  double max_dphi = 0.0;
  double where = x1;
  for (std::size_t k = 0; k + 1 < orb.points.size(); ++k) {
    const double a = orb.points[k];
    const double b = orb.points[k + 1];
    for (int i = 0; i <= 4; ++i) {
      const double t = a + (b - a) * i / 4.0;
      if (m.displacement_sign(t) != sign) return not_applicable("pr3", "phi vanishes on the orbit");
      const double d = std::abs(m.displacement_derivative(t));
      if (d > max_dphi) {
        max_dphi = d;
        where = t;
      }
    }
  }
  if (max_dphi > 0.5) {
    LemmaReport rep = not_applicable("pr3", "max |phi'| > 1/2 on [x_1, x_n]");
    rep.details.emplace_back("max_abs_dphi", max_dphi);
    rep.worst_location = where;
    return rep;
  }
  auto inv = [&m](double t) { return 1.0 / m.displacement(t); };
  CompensatedSum total;
  double worst_step = 1.0;
  double worst_x = x1;
  for (std::size_t k = 0; k + 1 < orb.points.size(); ++k) {
    const double v = adaptive_simpson(inv, orb.points[k], orb.points[k + 1], 1e-8);
    total.add(v);
    if (std::abs(v - 1.0) > std::abs(worst_step - 1.0)) {
      worst_step = v;
      worst_x = orb.points[k];
    }
  }
  LemmaReport rep;
  rep.lemma = "pr3";
  rep.quantity = "(1/(n-1)) int_{x_1}^{x_n} dt/phi(t)";
  rep.measured = total.value() / static_cast<double>(n - 1);
  rep.bound_lo = 2.0 / 3.0;
  rep.bound_hi = 2.0;
  rep.worst_location = worst_x;
  rep.status = (rep.measured >= rep.bound_lo && rep.measured <= rep.bound_hi) ? LemmaStatus::pass
                                                                              : LemmaStatus::fail;
  rep.details = {{"max_abs_dphi", max_dphi}, {"most_extreme_single_step", worst_step},
                 {"x_n", orb.points.back()}};
  return rep;
}

LemmaReport verify_lemma_l4(const DiffeoSpec& spec, Interval J, const std::vector<std::int64_t>& ns,
                            int pair_samples, double alpha) {
  if (ns.empty()) throw ArgumentError("verify_lemma_l4: empty n list");
  if (pair_samples < 0) throw ArgumentError("verify_lemma_l4: negative sample count");
  const MapModel& m = spec.model();
  if (!(m.value(J.hi) < J.lo || m.value(J.lo) > J.hi)) {
    throw ArgumentError("verify_lemma_l4: f(J) intersects J");
  }
  std::vector<std::int64_t> sorted = ns;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<double> xs{J.lo, J.hi};
  for (int i = 0; i < pair_samples; ++i) xs.push_back(J.lo + J.length() * (i + 0.5) / pair_samples);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::vector<double> lo(sorted.size(), kInf);
  std::vector<double> hi(sorted.size(), -kInf);
  std::vector<double> hi_at(sorted.size(), J.lo);
  for (double x : xs) {
    const auto phis = phi_sums_at(spec, x, sorted);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      lo[i] = std::min(lo[i], phis[i]);
      if (phis[i] > hi[i]) {
        hi[i] = phis[i];
        hi_at[i] = x;
      }
    }
  }
  LemmaReport rep;
  rep.lemma = "l4";
  rep.quantity = "spread (max/min over n) of max_pairs |Phi(n,x)-Phi(n,y)| / n^(1-alpha)";
  std::vector<double> ratios;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double r = (hi[i] - lo[i]) / std::pow(static_cast<double>(sorted[i]), 1.0 - alpha);
    ratios.push_back(r);
    rep.details.emplace_back("ratio_n_" + std::to_string(sorted[i]), r);
  }
  rep.measured = spread(ratios);
  rep.bound_lo = 1.0;
  rep.bound_hi = 10.0;
  rep.worst_location = hi_at.back();
  rep.status = rep.measured <= 10.0 ? LemmaStatus::pass : LemmaStatus::fail;
  return rep;
}

namespace {

struct OscillationSample {
  bool applicable = false;
  std::string why;
  double ratio = 1.0;
  double max_dphi = 0.0;
  double where = 0.0;
};

OscillationSample oscillation_at(const DiffeoSpec& spec, int N, double x) {
  OscillationSample out;
  const MapModel& m = spec.model();
  const double lx = m.log_displacement(x);
  if (!(lx < 0.0)) {
    out.why = "phi(x) >= 1 or phi(x) = 0";
    if (lx == -kInf) out.why = "phi(x) = 0";
    return out;
  }
  const double cap = (1.0 - 1.0 / (2.0 * N)) * lx;
  for (int i = 1; i <= 200; ++i) {
    for (double y : {x * i / 201.0, x * std::exp2(-0.25 * i)}) {
      if (m.log_displacement(y) > cap + 1e-12 * std::abs(cap)) {
        out.why = "(h4) fails at y=" + std::to_string(y);
        return out;
      }
    }
  }
  const double width = std::exp(lx / N);
  const double end = std::min(1.0, x + width);
  double best = lx;
  out.where = x;
  for (int i = 0; i <= 512; ++i) {
    const double t = x + (end - x) * i / 512.0;
    const double lt = m.log_displacement(t);
    if (lt > best) {
      best = lt;
      out.where = t;
    }
    out.max_dphi = std::max(out.max_dphi, std::abs(m.displacement_derivative(t)));
  }
  out.applicable = true;
  out.ratio = std::exp(best - lx);
  return out;
}

bool flat_at_zero(const DiffeoSpec& spec) {
  try {
    return classify_fixed_point(spec, 0.0, 8).kind == Stratum::Kind::FlatToOrder;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

LemmaReport verify_bounded_oscillation_ladder(const DiffeoSpec& spec, int N,
                                              const std::vector<double>& xs) {
  if (N < 1) throw ArgumentError("verify_bounded_oscillation: N must be positive");
  if (xs.empty()) throw ArgumentError("verify_bounded_oscillation: empty ladder");
  if (!flat_at_zero(spec)) return not_applicable("prn", "phi is not flat at 0");
  LemmaReport rep;
  rep.lemma = "prn";
  rep.quantity = "spread (max/min) over the ladder of sup phi(t)/phi(x), t in [x, x+phi(x)^(1/N)]";
  std::vector<double> ratios;
  double worst = 0.0;
  for (double x : xs) {
    const OscillationSample s = oscillation_at(spec, N, x);
    if (!s.applicable) continue;
    ratios.push_back(s.ratio);
    rep.details.emplace_back("ratio_x_" + std::to_string(x), s.ratio);
    if (s.ratio > worst) {
      worst = s.ratio;
      rep.worst_location = x;
    }
  }
  if (ratios.empty()) return not_applicable("prn", "(h4) fails at every ladder point");
  rep.measured = spread(ratios);
  rep.bound_lo = 1.0;
  rep.bound_hi = 10.0;
  rep.details.emplace_back("max_ratio", worst);
  rep.details.emplace_back("applicable_points", static_cast<double>(ratios.size()));
  rep.status = rep.measured <= 10.0 ? LemmaStatus::pass : LemmaStatus::fail;
  return rep;
}

LemmaReport verify_bounded_oscillation(const DiffeoSpec& spec, int N, double x) {
  if (N < 1) throw ArgumentError("verify_bounded_oscillation: N must be positive");
  if (!(x > 0.0 && x < 1.0)) throw DomainError("verify_bounded_oscillation: x must lie in (0,1)");
  if (!flat_at_zero(spec)) return not_applicable("prn", "phi is not flat at 0");
  const OscillationSample s = oscillation_at(spec, N, x);
  if (!s.applicable) return not_applicable("prn", s.why);
  if (N == 1) {
    LemmaReport rep;
    rep.lemma = "prn";
    rep.quantity = "sup phi(t)/phi(x), t in [x, x+phi(x)]";
    rep.measured = s.ratio;
    rep.bound_lo = 1.0;
    rep.bound_hi = 1.0 + s.max_dphi;
    rep.worst_location = s.where;
    rep.status = s.ratio <= rep.bound_hi * (1.0 + 1e-12) ? LemmaStatus::pass : LemmaStatus::fail;
    return rep;
  }
  std::vector<double> ladder;
  for (int i = 0; i < 8; ++i) ladder.push_back(x * std::exp2(-i));
  LemmaReport rep = verify_bounded_oscillation_ladder(spec, N, ladder);
  rep.details.emplace_back("ratio_at_x", s.ratio);
  return rep;
}

LemmaReport verify_flow_identity(const DiffeoSpec& flow, double x, std::int64_t n,
                                 double tolerance) {
  const auto* fm = dynamic_cast<const FlowModel*>(&flow.model());
  if (!fm) throw ArgumentError("verify_flow_identity: spec is not a flow");
  if (n < 0) throw ArgumentError("verify_flow_identity: n must be non-negative");
  if (!(x > 0.0 && x < 1.0)) throw DomainError("verify_flow_identity: x must lie in (0,1)");
  LemmaReport rep;
  rep.lemma = "flow";
  rep.quantity = "|exp(Phi(n,x)) - phi(g^n x)/phi(x)| / (phi(g^n x)/phi(x))";
  rep.bound_lo = 0.0;
  rep.bound_hi = tolerance;
  rep.worst_location = x;
  if (!(fm->field(x) > 1e-8)) return not_applicable("flow", "phi(x) <= 1e-8");
  if (n == 0) {
    rep.measured = 0.0;
    rep.status = LemmaStatus::pass;
    return rep;
  }
  const double chain = phi_sum(flow, x, n);
  const double direct = fm->log_field(fm->flow_to(x, static_cast<double>(n) * fm->time())) -
                        fm->log_field(x);
  rep.measured = std::abs(std::expm1(chain - direct));
  rep.status = rep.measured <= tolerance ? LemmaStatus::pass : LemmaStatus::fail;
  rep.details = {{"log_chain", chain}, {"log_direct", direct}};
  return rep;
}

LemmaReport verify_bar_phi_sum(double alpha, double beta, std::int64_t N, double tolerance) {
  if (N < 2) throw ArgumentError("verify_bar_phi_sum: N must be at least 2");
  CompensatedSum sum;
  for (std::int64_t j = 2; j <= N; ++j) {
    const double x = std::pow(static_cast<double>(j), -beta);
    sum.add(std::log1p(hoelder_bar_phi_derivative(alpha, beta, x)));
  }
  const double e = 1.0 - alpha * (beta + 1.0);
  const double formula = kTwoPi / (beta * e) * std::pow(static_cast<double>(N), e);
  LemmaReport rep;
  rep.lemma = "eq39";
  rep.quantity = "sum_{j=2}^N log(1+bar-phi'(j^-beta)) / asymptotic formula";
  rep.measured = sum.value() / formula;
  rep.bound_lo = 1.0 - tolerance;
  rep.bound_hi = 1.0 + tolerance;
  rep.worst_location = std::pow(static_cast<double>(N), -beta);
  rep.status = std::abs(rep.measured - 1.0) <= tolerance ? LemmaStatus::pass : LemmaStatus::fail;
  rep.details = {{"sum", sum.value()}, {"formula", formula}};
  return rep;
}

LemmaReport verify_bar_phi_slope(double alpha, double beta, std::int64_t k, double tolerance) {
  if (k < 2) throw ArgumentError("verify_bar_phi_slope: k must be at least 2");
  const double kd = static_cast<double>(k);
  const double d = hoelder_bar_phi_derivative(alpha, beta, std::pow(kd, -beta));
  LemmaReport rep;
  rep.lemma = "eq741";
  rep.quantity = "bar-phi'(k^-beta) k^(alpha(beta+1)) / (2 pi/beta)";
  rep.measured = d * std::pow(kd, alpha * (beta + 1.0)) / (kTwoPi / beta);
  rep.bound_lo = 1.0 - tolerance;
  rep.bound_hi = 1.0 + tolerance;
  rep.worst_location = std::pow(kd, -beta);
  rep.status = std::abs(rep.measured - 1.0) <= tolerance ? LemmaStatus::pass : LemmaStatus::fail;
  rep.details = {{"derivative", d}};
  return rep;
}

LemmaReport verify_exact_orbit(double alpha, double beta, std::int64_t N, double tolerance) {
  if (N < 2) throw ArgumentError("verify_exact_orbit: N must be at least 2");
  double worst = 0.0;
  double where = 0.0;
  for (std::int64_t k = 1; k < N; ++k) {
    const double xk = std::pow(static_cast<double>(N + 1 - k), -beta);
    const double expected = std::pow(static_cast<double>(N - k), -beta);
    const double got = xk + hoelder_bar_phi(alpha, beta, xk);
    const double err = std::abs(got - expected) / expected;
    if (err > worst) {
      worst = err;
      where = xk;
    }
  }
  // Forward iteration from x_1 amplifies each rounding error by the local (f^k)'.
  double x = std::pow(static_cast<double>(N), -beta);
  double forward = 0.0;
  for (std::int64_t k = 1; k < N; ++k) {
    x = x + hoelder_bar_phi(alpha, beta, x);
    const double expected = std::pow(static_cast<double>(N - k), -beta);
    forward = std::max(forward, std::abs(x - expected) / expected);
    if (!(x < 1.0)) break;
  }
  LemmaReport rep;
  rep.lemma = "exact-orbit";
  rep.quantity = "max_k |x_k + bar-phi(x_k) - (N-k)^-beta| / (N-k)^-beta";
  rep.measured = worst;
  rep.bound_lo = 0.0;
  rep.bound_hi = tolerance;
  rep.worst_location = where;
  rep.status = worst < tolerance ? LemmaStatus::pass : LemmaStatus::fail;
  rep.details = {{"forward_orbit_max_rel_error", forward}};
  return rep;
}

}  // namespace growthlab
