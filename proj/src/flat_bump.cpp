#include <cmath>
#include <limits>

#include "growthlab/errors.hpp"
#include "growthlab/families.hpp"
#include "growthlab/numerics.hpp"

namespace growthlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct BumpGeometry {
  FlatBump bump;
  Plateau u;  // 1 on J, supported in I
  Plateau v;  // 1 on [z, z+w], supported in J; masks the filler
};

class FlatBumpModel : public MapModel {
 public:
  FlatBumpModel(const FlatBumpSchedule& s) : c_fill_(s.c_fill) {
    for (const auto& b : s.bumps) {
      BumpGeometry g;
      g.bump = b;
      g.u = Plateau{b.I.lo, b.J.lo, b.J.hi, b.I.hi};
      g.v = Plateau{b.J.lo, b.z, b.z + b.w, b.J.hi};
      geo_.push_back(g);
    }
  }

  double value(double x) const override { return x + displacement(x); }
  double derivative(double x) const override { return 1.0 + displacement_derivative(x); }
  double log_derivative(double x) const override { return std::log1p(displacement_derivative(x)); }

  double displacement(double x) const override {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    double phi = filler(x);
    if (const BumpGeometry* g = active(x)) {
      phi = phi * (1.0 - g->v.value(x)) + parabola(*g, x) * g->u.value(x);
    }
    return phi;
  }

  double displacement_derivative(double x) const override {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double q = x * (1.0 - x);
    const double F = filler(x);
    const double dF = F * (1.0 - 2.0 * x) / (q * q);
    const BumpGeometry* g = active(x);
    if (!g) return dF;
    const double p = parabola(*g, x);
    const double dp = 2.0 * g->bump.gamma * (x - g->bump.z);
    return dF * (1.0 - g->v.value(x)) - F * g->v.derivative(x) + dp * g->u.value(x) +
           p * g->u.derivative(x);
  }

  double log_displacement(double x) const override {
    if (x <= 0.0 || x >= 1.0) return kNegInf;
    double lf = kNegInf;
    if (c_fill_ > 0.0) lf = std::log(c_fill_) - 1.0 / (x * (1.0 - x));
    const BumpGeometry* g = active(x);
    if (!g) return lf;
    lf += g->v.log_complement(x);
    const double lb = std::log(parabola(*g, x)) + g->u.log_value(x);
    return log_add_exp(lf, lb);
  }

  int displacement_sign(double x) const override { return log_displacement(x) > kNegInf ? 1 : 0; }

  // Filler and bumps are flat at both ends. The one-sided stencil at 1 would instead see
  // the tail of the first bump, whose slot (1/2, 1) ends there.
  std::optional<double> higher_derivative(double x, int) const override {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return std::nullopt;
  }

 private:
  double filler(double x) const {
    if (c_fill_ <= 0.0) return 0.0;
    return c_fill_ * std::exp(-1.0 / (x * (1.0 - x)));
  }
  static double parabola(const BumpGeometry& g, double x) {
    const double t = x - g.bump.z;
    return g.bump.gamma * t * t + g.bump.omega;
  }
  const BumpGeometry* active(double x) const {
    for (const auto& g : geo_) {
      if (x > g.bump.I.lo && x < g.bump.I.hi) return &g;
    }
    return nullptr;
  }

  double c_fill_;
  std::vector<BumpGeometry> geo_;
};

}  // namespace

Interval flat_bump_slot(int k) {
  if (k < 1) throw ArgumentError("flat_bump_slot: k must be positive");
  return Interval{1.0 / (2.0 * k), 1.0 / (2.0 * k - 1.0)};
}

bool FlatBumpSchedule::growth_condition_holds(std::size_t k) const {
  const FlatBump& b = bumps.at(k);
  return epsilon && b.gamma * b.w >= epsilon(static_cast<double>(b.n));
}

std::string FlatBumpSchedule::violation() const {
  if (!(c_fill > 0.0)) return "filler constant must be positive";
  for (std::size_t i = 0; i < bumps.size(); ++i) {
    const FlatBump& b = bumps[i];
    const Interval slot = flat_bump_slot(static_cast<int>(i) + 1);
    const std::string tag = "bump " + std::to_string(i + 1) + ": ";
    if (b.I.lo != slot.lo || b.I.hi != slot.hi) return tag + "I_k must be (1/(2k), 1/(2k-1))";
    if (!(b.J.lo > b.I.lo && b.J.hi < b.I.hi && b.J.lo < b.J.hi)) {
      return tag + "J_k must lie in the interior of I_k";
    }
    if (!(b.w > 0.0 && b.z > b.J.lo && b.z + b.w < b.J.hi)) {
      return tag + "[z_k, z_k+w_k] must lie in the interior of J_k";
    }
    if (!(b.gamma > 0.0 && b.gamma < 0.01)) return tag + "gamma_k must lie in (0, 1/100)";
    if (i > 0 && !(b.gamma < bumps[i - 1].gamma)) return tag + "gamma_k must strictly decrease";
    if (!(b.omega > 0.0 && b.omega <= b.gamma)) return tag + "omega_k must lie in (0, gamma_k]";
    if (static_cast<double>(b.n) < 3.0 / (b.gamma * b.w) * (1.0 - 1e-12)) {
      return tag + "n_k < 3/(gamma_k w_k)";
    }
    if (enforce_growth_condition) {
      if (!epsilon) return tag + "epsilon sequence missing";
      if (!growth_condition_holds(i)) return tag + "gamma_k w_k < epsilon(n_k)";
    }
  }
  return {};
}

FlatBumpSchedule default_flat_bump_schedule(int K) {
  if (K < 0) throw InvalidParameterError("flat bump schedule: K must be non-negative");
  FlatBumpSchedule s;
  s.epsilon = [](double n) { return 1.0 / std::log(n + 2.0); };
  s.c_fill = 1e-4;
  // gamma_k w_k ~ 1e-4 cannot dominate 1/log(n_k + 2) ~ 0.1; see README.
  s.enforce_growth_condition = false;
  for (int k = 1; k <= K; ++k) {
    FlatBump b;
    b.I = flat_bump_slot(k);
    const double len = b.I.length();
    const double mid = 0.5 * (b.I.lo + b.I.hi);
    b.J = Interval{mid - 0.25 * len, mid + 0.25 * len};
    b.w = 0.25 * len;
    b.z = mid - 0.5 * b.w;
    b.gamma = 1e-2 * std::ldexp(1.0, -k);
    b.omega = b.gamma * 1e-6;
    const double nk = 3.0 / (b.gamma * b.w);
    b.n = static_cast<std::int64_t>(std::ceil(nk * (1.0 - 1e-12)));
    s.bumps.push_back(b);
  }
  return s;
}

DiffeoSpec flat_bump_thm2(const FlatBumpSchedule& schedule) {
  const std::string bad = schedule.violation();
  if (!bad.empty()) throw InvalidParameterError("flat_bump_thm2: " + bad);
  DiffeoSpec::Params params{{"K", static_cast<double>(schedule.bumps.size())},
                            {"c_fill", schedule.c_fill}};
  std::vector<double> seeds;
  for (std::size_t i = 0; i < schedule.bumps.size(); ++i) {
    const FlatBump& b = schedule.bumps[i];
    const std::string k = std::to_string(i + 1);
    params["gamma" + k] = b.gamma;
    params["omega" + k] = b.omega;
    params["n" + k] = static_cast<double>(b.n);
    for (int j = 0; j <= 80; ++j) {
      const double m = (b.w / 3.0) * std::exp2(-0.25 * j);
      seeds.push_back(b.z + m);
      seeds.push_back(b.z - m);
    }
  }
  return DiffeoSpec(FamilyKind::flat_bump_thm2, params, std::make_shared<FlatBumpModel>(schedule),
                    seeds);
}

}  // namespace growthlab
