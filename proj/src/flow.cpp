#include <algorithm>
#include <cmath>
#include <limits>

#include "growthlab/errors.hpp"
#include "growthlab/families.hpp"

namespace growthlab {

namespace {

constexpr double kStepFloor = 1e-12;

}  // namespace

FlowModel::FlowModel(DiffeoSpec base, double t, double step_tol)
    : base_(std::move(base)), t_(t), tol_(step_tol) {}

double FlowModel::field(double x) const { return base_.model().displacement(x); }

double FlowModel::log_field(double x) const { return base_.model().log_displacement(x); }

double FlowModel::flow_to(double x, double T) const {
  if (x <= 0.0 || x >= 1.0 || T == 0.0) return x;
  const double dir = T > 0 ? 1.0 : -1.0;
  const double span = std::abs(T);
  auto rk4 = [&](double y, double h) {
    const double hh = dir * h;
    const double k1 = field(y);
    const double k2 = field(y + 0.5 * hh * k1);
    const double k3 = field(y + 0.5 * hh * k2);
    const double k4 = field(y + hh * k3);
    return y + hh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };
  double y = x;
  double tau = 0.0;
  double h = std::min(span, 0.25);
  while (tau < span) {
    h = std::min(h, span - tau);
    const double full = rk4(y, h);
    const double half = rk4(rk4(y, 0.5 * h), 0.5 * h);
    const double err = std::abs(half - full) / 15.0;
    // Error per unit time, relative to the distance from the nearer endpoint.
    const double scale = std::min(1.0, std::max(std::min(half, 1.0 - half), 1e-300));
    const double allowed = tol_ * h * scale;
    if (err <= allowed) {
      y = half + (half - full) / 15.0;
      y = std::clamp(y, 0.0, 1.0);
      tau += h;
      const double grow = err == 0.0 ? 4.0 : 0.9 * std::pow(allowed / err, 0.25);
      h *= std::clamp(grow, 0.2, 4.0);
    } else {
      h *= std::clamp(0.9 * std::pow(allowed / err, 0.25), 0.1, 0.9);
      if (h < kStepFloor && span - tau > kStepFloor) {
        throw PrecisionError("flow integrator: step fell below 1e-12 near x=" + std::to_string(y));
      }
    }
  }
  return y;
}

double FlowModel::value(double x) const { return flow_to(x, t_); }

double FlowModel::log_derivative(double x) const {
  if (x <= 0.0 || x >= 1.0 || t_ == 0.0) return 0.0;
  const double lx = log_field(x);
  if (!std::isfinite(lx)) return 0.0;
  const double ly = log_field(flow_to(x, t_));
  if (!std::isfinite(ly)) return 0.0;
  return ly - lx;
}

double FlowModel::derivative(double x) const { return std::exp(log_derivative(x)); }

int FlowModel::displacement_sign(double x) const {
  if (x <= 0.0 || x >= 1.0 || t_ == 0.0) return 0;
  return std::isfinite(log_field(x)) ? 1 : 0;
}

MapStep FlowModel::step(double x) const {
  if (x <= 0.0 || x >= 1.0 || t_ == 0.0) return {x, 0.0};
  const double y = flow_to(x, t_);
  const double lx = log_field(x);
  const double ly = log_field(y);
  if (!std::isfinite(lx) || !std::isfinite(ly)) return {y, 0.0};
  return {y, ly - lx};
}

DiffeoSpec flow_family(const DiffeoSpec& base, double t, double step_tol) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidParameterError("flow_family: need t >= 0");
  if (!(step_tol > 0.0)) throw InvalidParameterError("flow_family: need step_tol > 0");
  const int probes = 1000;
  for (int i = 1; i < probes; ++i) {
    const double x = static_cast<double>(i) / probes;
    if (base.model().displacement_sign(x) <= 0) {
      throw InvalidParameterError(
          "flow_family: base displacement must be positive on (0,1); fails at x=" +
          std::to_string(x));
    }
  }
  DiffeoSpec::Params params = base.params();
  params["t"] = t;
  params["step_tol"] = step_tol;
  return DiffeoSpec(FamilyKind::flow, params, std::make_shared<FlowModel>(base, t, step_tol),
                    base.suggested_seeds(), "flow(" + base.label() + ")");
}

}  // namespace growthlab
