#include "growthlab/diffeo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "growthlab/errors.hpp"
#include "growthlab/numerics.hpp"

namespace growthlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct KindName {
  FamilyKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {FamilyKind::identity, "identity"},
    {FamilyKind::hyperbolic, "hyperbolic"},
    {FamilyKind::polynomial_flat, "polynomial-flat"},
    {FamilyKind::conjugated_translation, "conjugated-translation"},
    {FamilyKind::flat_bump_thm2, "flat-bump-thm2"},
    {FamilyKind::hoelder_thm3b, "hoelder-thm3b"},
    {FamilyKind::flat_exp, "flat-exp"},
    {FamilyKind::flow, "flow"},
    {FamilyKind::custom_closure, "custom-closure"},
};

void check_domain(const DiffeoSpec& spec, double x) {
  const Interval d = spec.domain();
  if (!(x >= d.lo && x <= d.hi)) {
    throw DomainError("x=" + std::to_string(x) + " outside [" + std::to_string(d.lo) + ", " +
                      std::to_string(d.hi) + "]");
  }
}

// One finite-difference estimate of phi^(m) with step h. dir = 0 central, +1 forward, -1 backward.
double raw_difference(const MapModel& model, double x, int m, double h, int dir) {
  CompensatedSum acc;
  for (int i = 0; i <= m; ++i) {
    const double w = binomial(m, i) * ((i % 2 == 0) ? 1.0 : -1.0);
    double xi;
    if (dir == 0) {
      xi = x + (0.5 * m - i) * h;
    } else if (dir > 0) {
      xi = x + (m - i) * h;
    } else {
      xi = x - i * h;
    }
    acc.add(w * model.displacement(xi));
  }
  return acc.value() / std::pow(h, m);
}

}  // namespace

std::string to_string(FamilyKind kind) {
  for (const auto& kn : kKindNames) {
    if (kn.kind == kind) return kn.name;
  }
  return "unknown";
}

FamilyKind family_kind_from_string(const std::string& name) {
  std::string norm = name;
  std::replace(norm.begin(), norm.end(), '_', '-');
  for (const auto& kn : kKindNames) {
    if (norm == kn.name) return kn.kind;
  }
  throw ArgumentError("unknown family kind '" + name + "'");
}

double MapModel::log_derivative(double x) const { return std::log(derivative(x)); }

double MapModel::displacement(double x) const { return value(x) - x; }

double MapModel::log_displacement(double x) const { return std::log(std::abs(displacement(x))); }

int MapModel::displacement_sign(double x) const {
  const double d = displacement(x);
  return (d > 0) - (d < 0);
}

double MapModel::displacement_derivative(double x) const { return derivative(x) - 1.0; }

MapStep MapModel::step(double x) const { return {value(x), log_derivative(x)}; }

std::optional<double> MapModel::higher_derivative(double, int) const { return std::nullopt; }

std::optional<double> MapModel::iterate(double, std::int64_t) const { return std::nullopt; }

std::optional<double> MapModel::log_iterate_derivative(double, std::int64_t) const {
  return std::nullopt;
}

DiffeoSpec::DiffeoSpec(FamilyKind kind, Params params, std::shared_ptr<const MapModel> model,
                       std::vector<double> suggested_seeds, std::string label)
    : kind_(kind),
      params_(std::move(params)),
      domain_{0.0, 1.0},
      model_(std::move(model)),
      label_(std::move(label)) {
  if (!model_) throw ArgumentError("DiffeoSpec: null model");
  for (double s : suggested_seeds) {
    if (s > 0.0 && s < 1.0) seeds_.push_back(s);
  }
  std::sort(seeds_.begin(), seeds_.end());
  seeds_.erase(std::unique(seeds_.begin(), seeds_.end()), seeds_.end());
  if (label_.empty()) label_ = to_string(kind_);
  report_ = validate(*this, 1001);
}

double DiffeoSpec::param(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw ArgumentError("spec has no parameter '" + name + "'");
  return it->second;
}

double eval(const DiffeoSpec& spec, double x) {
  check_domain(spec, x);
  return spec.model().value(x);
}

double displacement_derivative_fd(const MapModel& model, double x, int order) {
  if (order < 1) throw ArgumentError("derivative order must be positive");
  if (order > kMaxDerivativeOrder) {
    throw PrecisionError("finite differences beyond order 8 are noise in double precision");
  }
  int dir = 0;
  double h;
  if (x <= 0.0) {
    dir = 1;
    h = 1e-3;
  } else if (x >= 1.0) {
    dir = -1;
    h = 1e-3;
  } else {
    h = 1e-2 * std::min({x, 1.0 - x, 0.1});
  }
  const double hmin = 0.25 * h;
  if (!(hmin > 0.0) || x + hmin == x || x - hmin == x ||
      std::pow(hmin, order) < std::numeric_limits<double>::min()) {
    throw PrecisionError("finite-difference step underflows at x=" + std::to_string(x));
  }
  const double d0 = raw_difference(model, x, order, h, dir);
  const double d1 = raw_difference(model, x, order, 0.5 * h, dir);
  const double d2 = raw_difference(model, x, order, 0.25 * h, dir);
  // Central errors expand in h^2, one-sided ones in h.
  const double r = (dir == 0) ? 4.0 : 2.0;
  const double r01 = (r * d1 - d0) / (r - 1.0);
  const double r12 = (r * d2 - d1) / (r - 1.0);
  return (r * r * r12 - r01) / (r * r - 1.0);
}

double deriv(const DiffeoSpec& spec, double x, int order) {
  check_domain(spec, x);
  if (order < 1) throw ArgumentError("derivative order must be positive");
  if (order == 1) return spec.model().derivative(x);
  if (auto exact = spec.model().higher_derivative(x, order)) return *exact;
  return displacement_derivative_fd(spec.model(), x, order);
}

double inverse_eval(const DiffeoSpec& spec, double y, double tol) {
  if (!(tol > 0.0)) throw ArgumentError("inverse_eval: tol must be positive");
  if (!spec.construction_report().monotone_ok) {
    throw InvalidSpecError("inverse_eval on a spec that failed validation: " +
                           spec.construction_report().message);
  }
  check_domain(spec, y);
  const MapModel& m = spec.model();
  double lo = spec.domain().lo;
  double hi = spec.domain().hi;
  if (y <= m.value(lo)) return lo;
  if (y >= m.value(hi)) return hi;
  double best = 0.5 * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    best = mid;
    const double fm = m.value(mid);
    if (fm == y) return mid;
    if (fm < y) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (std::abs(fm - y) <= tol) break;
  }
  return best;
}

ValidationReport validate(const DiffeoSpec& spec, int probe_count) {
  if (probe_count < 2) throw ArgumentError("validate: probe_count must be at least 2");
  ValidationReport rep;
  rep.probe_count = probe_count;
  rep.min_derivative = kInf;
  rep.max_derivative = -kInf;
  const MapModel& m = spec.model();
  const Interval d = spec.domain();

  rep.endpoints_ok = true;
  try {
    const double f0 = m.value(d.lo);
    const double f1 = m.value(d.hi);
    if (!(std::abs(f0 - d.lo) <= kEndpointTolerance) || !(std::abs(f1 - d.hi) <= kEndpointTolerance)) {
      rep.endpoints_ok = false;
      rep.message = "endpoints not fixed: f(0)=" + std::to_string(f0) + ", f(1)=" + std::to_string(f1);
    }
  } catch (const std::exception& e) {
    rep.endpoints_ok = false;
    rep.message = std::string("endpoint evaluation failed: ") + e.what();
  }

  bool increasing = true;
  bool positive = true;
  double prev = -kInf;
  for (int i = 0; i < probe_count; ++i) {
    const double x = d.lo + (d.hi - d.lo) * static_cast<double>(i) / (probe_count - 1);
    double fx;
    double dfx;
    try {
      fx = m.value(x);
      dfx = m.derivative(x);
    } catch (const std::exception& e) {
      increasing = false;
      if (rep.message.empty()) rep.message = std::string("evaluation failed: ") + e.what();
      continue;
    }
    if (!(fx > prev)) {
      if (increasing && rep.message.empty()) {
        rep.message = "not strictly increasing near x=" + std::to_string(x);
      }
      increasing = false;
    }
    prev = fx;
    if (!(dfx > 0.0)) {
      if (positive && rep.message.empty()) {
        rep.message = "non-positive derivative " + std::to_string(dfx) + " at x=" + std::to_string(x);
      }
      positive = false;
    }
    if (dfx < rep.min_derivative) {
      rep.min_derivative = dfx;
      rep.min_derivative_at = x;
    }
    rep.max_derivative = std::max(rep.max_derivative, dfx);
  }
  rep.monotone_ok = increasing && positive;
  return rep;
}

double Displacement::operator()(double x) const {
  check_domain(spec_, x);
  return spec_.model().displacement(x);
}

double Displacement::log_abs(double x) const {
  check_domain(spec_, x);
  return spec_.model().log_displacement(x);
}

int Displacement::sign(double x) const {
  check_domain(spec_, x);
  return spec_.model().displacement_sign(x);
}

double Displacement::derivative(double x, int order) const {
  if (order == 1) {
    check_domain(spec_, x);
    return spec_.model().displacement_derivative(x);
  }
  return deriv(spec_, x, order);
}

}  // namespace growthlab
