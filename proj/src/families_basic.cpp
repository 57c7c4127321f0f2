#include <algorithm>
#include <cmath>
#include <limits>

#include "growthlab/errors.hpp"
#include "growthlab/families.hpp"
#include "growthlab/numerics.hpp"

namespace growthlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

class IdentityModel : public MapModel {
 public:
  double value(double x) const override { return x; }
  double derivative(double) const override { return 1.0; }
  double log_derivative(double) const override { return 0.0; }
  double displacement(double) const override { return 0.0; }
  double log_displacement(double) const override { return kNegInf; }
  int displacement_sign(double) const override { return 0; }
  double displacement_derivative(double) const override { return 0.0; }
  MapStep step(double x) const override { return {x, 0.0}; }
  std::optional<double> higher_derivative(double, int) const override { return 0.0; }
  std::optional<double> iterate(double x, std::int64_t) const override { return x; }
  std::optional<double> log_iterate_derivative(double, std::int64_t) const override {
    return 0.0;
  }
};

class HyperbolicModel : public MapModel {
 public:
  explicit HyperbolicModel(double c) : c_(c) {}
  double value(double x) const override { return x + displacement(x); }
  double derivative(double x) const override { return 1.0 + c_ * (1.0 - 2.0 * x); }
  double log_derivative(double x) const override { return std::log1p(c_ * (1.0 - 2.0 * x)); }
  double displacement(double x) const override { return c_ * x * (1.0 - x); }
  double displacement_derivative(double x) const override { return c_ * (1.0 - 2.0 * x); }
  MapStep step(double x) const override {
    return {x + c_ * x * (1.0 - x), std::log1p(c_ * (1.0 - 2.0 * x))};
  }
  std::optional<double> higher_derivative(double, int order) const override {
    return order == 2 ? -2.0 * c_ : 0.0;
  }

 private:
  double c_;
};

// Coefficients of x^k (1-x)^k, index = power.
std::vector<double> flat_poly_coefficients(int k) {
  std::vector<double> coef(2 * k + 1, 0.0);
  for (int i = 0; i <= k; ++i) coef[k + i] = binomial(k, i) * ((i % 2 == 0) ? 1.0 : -1.0);
  return coef;
}

double poly_derivative(const std::vector<double>& coef, double x, int m) {
  double acc = 0.0;
  for (int p = static_cast<int>(coef.size()) - 1; p >= m; --p) {
    double falling = 1.0;
    for (int i = 0; i < m; ++i) falling *= (p - i);
    acc = acc * x + coef[p] * falling;
  }
  return acc;
}

class PolynomialFlatModel : public MapModel {
 public:
  PolynomialFlatModel(int k, double c) : k_(k), c_(c), coef_(flat_poly_coefficients(k)) {}
  double value(double x) const override { return x + displacement(x); }
  double derivative(double x) const override { return 1.0 + displacement_derivative(x); }
  double log_derivative(double x) const override { return std::log1p(displacement_derivative(x)); }
  double displacement(double x) const override {
    return c_ * std::pow(x * (1.0 - x), k_);
  }
  double log_displacement(double x) const override {
    if (x <= 0.0 || x >= 1.0 || c_ == 0.0) return kNegInf;
    return std::log(c_) + k_ * (std::log(x) + std::log1p(-x));
  }
  int displacement_sign(double x) const override {
    return (x > 0.0 && x < 1.0 && c_ > 0.0) ? 1 : 0;
  }
  double displacement_derivative(double x) const override {
    return c_ * k_ * std::pow(x * (1.0 - x), k_ - 1) * (1.0 - 2.0 * x);
  }
  MapStep step(double x) const override {
    const double q = x * (1.0 - x);
    const double qk1 = std::pow(q, k_ - 1);
    return {x + c_ * qk1 * q, std::log1p(c_ * k_ * qk1 * (1.0 - 2.0 * x))};
  }
  std::optional<double> higher_derivative(double x, int order) const override {
    return c_ * poly_derivative(coef_, x, order);
  }

 private:
  int k_;
  double c_;
  std::vector<double> coef_;
};

class ConjugatedTranslationModel : public MapModel {
 public:
  explicit ConjugatedTranslationModel(double c) : c_(c) {}

  double value(double x) const override {
    if (x <= 0.0 || x >= 1.0 || c_ == 0.0) return x;
    return image(x).y;
  }
  double derivative(double x) const override { return std::exp(log_derivative(x)); }
  double log_derivative(double x) const override {
    if (x <= 0.0 || x >= 1.0 || c_ == 0.0) return 0.0;
    const Image im = image(x);
    return log_deriv_from(x, im);
  }
  double displacement(double x) const override {
    if (x <= 0.0 || x >= 1.0 || c_ == 0.0) return 0.0;
    return image(x).d;
  }
  double log_displacement(double x) const override {
    if (x <= 0.0 || x >= 1.0 || c_ == 0.0) return kNegInf;
    const Image im = image(x);
    // d = c x y (1-x)(1-y) / (x y + (1-x)(1-y)), all factors positive.
    return std::log(std::abs(c_)) + std::log(x) + std::log(im.y) + std::log1p(-x) +
           std::log(im.ybar) - std::log(x * im.y + (1.0 - x) * im.ybar);
  }
  int displacement_sign(double x) const override {
    if (x <= 0.0 || x >= 1.0) return 0;
    return (c_ > 0) - (c_ < 0);
  }
  MapStep step(double x) const override {
    if (x <= 0.0 || x >= 1.0 || c_ == 0.0) return {x, 0.0};
    const Image im = image(x);
    return {im.y, log_deriv_from(x, im)};
  }
  std::optional<double> iterate(double x, std::int64_t n) const override {
    if (x <= 0.0 || x >= 1.0) return x;
    return conj_psi_inverse(conj_psi(x) + static_cast<double>(n) * c_);
  }
  std::optional<double> log_iterate_derivative(double x, std::int64_t n) const override {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double s = conj_psi(x) + static_cast<double>(n) * c_;
    double y;
    double ybar;
    split_inverse(s, y, ybar);
    if (y <= 0.0 || ybar <= 0.0) {
      throw PrecisionError("closed-form iterate reached an endpoint in double precision");
    }
    return conj_log_psi_prime(x) - (std::log(1.0 / (y * y) + 1.0 / (ybar * ybar)));
  }

 private:
  struct Image {
    double y;
    double ybar;  // 1 - y, computed without cancellation
    double d;     // y - x
  };

  static void split_inverse(double s, double& y, double& ybar) {
    if (s <= 0.0) {
      y = 2.0 / (std::hypot(s, 2.0) - s + 2.0);
      ybar = 1.0 - y;
    } else {
      ybar = 2.0 / (std::hypot(s, 2.0) + s + 2.0);
      y = 1.0 - ybar;
    }
  }

  Image image(double x) const {
    Image im{};
    split_inverse(conj_psi(x) + c_, im.y, im.ybar);
    const double u = 1.0 - x;
    if (im.y <= 0.0 || im.ybar <= 0.0) {
      im.d = im.y - x;
      return im;
    }
    im.d = c_ * x * im.y * u * im.ybar / (x * im.y + u * im.ybar);
    return im;
  }

  static double log_deriv_from(double x, const Image& im) {
    const double u = 1.0 - x;
    const double d = im.d;
    return 2.0 * std::log1p(d / x) + 2.0 * std::log1p(-d / u) -
           std::log1p(2.0 * d * (x - u + d) / (x * x + u * u));
  }

  double c_;
};

class FlatExpModel : public MapModel {
 public:
  explicit FlatExpModel(double c) : c_(c) {}
  double value(double x) const override { return x + displacement(x); }
  double derivative(double x) const override { return 1.0 + displacement_derivative(x); }
  double log_derivative(double x) const override { return std::log1p(displacement_derivative(x)); }
  double displacement(double x) const override {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return c_ * std::exp(-1.0 / (x * (1.0 - x)));
  }
  double log_displacement(double x) const override {
    if (x <= 0.0 || x >= 1.0 || c_ == 0.0) return kNegInf;
    return std::log(c_) - 1.0 / (x * (1.0 - x));
  }
  int displacement_sign(double x) const override {
    return (x > 0.0 && x < 1.0 && c_ > 0.0) ? 1 : 0;
  }
  // Every derivative of exp(-1/(x(1-x))) vanishes at 0 and 1.
  std::optional<double> higher_derivative(double x, int) const override {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return std::nullopt;
  }
  double displacement_derivative(double x) const override {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double q = x * (1.0 - x);
    return displacement(x) * (1.0 - 2.0 * x) / (q * q);
  }

 private:
  double c_;
};

class CustomModel : public MapModel {
 public:
  CustomModel(std::function<double(double)> f, std::function<double(double)> df,
              std::function<double(double)> disp)
      : f_(std::move(f)), df_(std::move(df)), disp_(std::move(disp)) {}
  double value(double x) const override { return f_(x); }
  double derivative(double x) const override { return df_(x); }
  double displacement(double x) const override { return disp_ ? disp_(x) : f_(x) - x; }

 private:
  std::function<double(double)> f_;
  std::function<double(double)> df_;
  std::function<double(double)> disp_;
};

class RawBarPhiModel : public MapModel {
 public:
  RawBarPhiModel(double alpha, double beta) : alpha_(alpha), beta_(beta) {}
  double value(double x) const override { return x + displacement(x); }
  double derivative(double x) const override { return 1.0 + displacement_derivative(x); }
  double log_derivative(double x) const override { return std::log1p(displacement_derivative(x)); }
  double displacement(double x) const override {
    if (x == 0.0) return 0.0;
    return hoelder_bar_phi(alpha_, beta_, x);
  }
  double displacement_derivative(double x) const override {
    if (x == 0.0) return 0.0;
    return hoelder_bar_phi_derivative(alpha_, beta_, x);
  }

 private:
  double alpha_;
  double beta_;
};

}  // namespace

DiffeoSpec identity() {
  return DiffeoSpec(FamilyKind::identity, {}, std::make_shared<IdentityModel>());
}

DiffeoSpec hyperbolic(double c, ParamCheck check) {
  if (!std::isfinite(c) || (check == ParamCheck::strict && !(std::abs(c) < 1.0))) {
    throw InvalidParameterError("hyperbolic: need |c| < 1, got c=" + std::to_string(c));
  }
  // The expanding start near 0 sits at distance ~ (1+c)^-n, far below 2^-40 once n is in
  // the hundreds.
  std::vector<double> seeds;
  for (int j = 41; j <= 1020; ++j) seeds.push_back(std::ldexp(1.0, -j));
  return DiffeoSpec(FamilyKind::hyperbolic, {{"c", c}}, std::make_shared<HyperbolicModel>(c),
                    seeds);
}

double polynomial_flat_c_max(int k) {
  if (k < 2) throw InvalidParameterError("polynomial_flat: k must be at least 2");
  const auto coef = flat_poly_coefficients(k);
  // |p'| on [0,1/2] by symmetry; dense scan then golden-section polish.
  const int n = 20000;
  int best = 0;
  double best_v = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double v = std::abs(poly_derivative(coef, 0.5 * i / n, 1));
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  double lo = 0.5 * std::max(0, best - 1) / n;
  double hi = 0.5 * std::min(n, best + 1) / n;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 100; ++it) {
    const double m1 = hi - g * (hi - lo);
    const double m2 = lo + g * (hi - lo);
    if (std::abs(poly_derivative(coef, m1, 1)) > std::abs(poly_derivative(coef, m2, 1))) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  best_v = std::max(best_v, std::abs(poly_derivative(coef, 0.5 * (lo + hi), 1)));
  return 1.0 / best_v;
}

DiffeoSpec polynomial_flat(int k, double c, ParamCheck check) {
  if (k < 2) throw InvalidParameterError("polynomial_flat: k must be at least 2");
  if (!std::isfinite(c)) throw InvalidParameterError("polynomial_flat: c must be finite");
  if (check == ParamCheck::strict) {
    const double cmax = polynomial_flat_c_max(k);
    if (!(c > 0.0 && c < cmax)) {
      throw InvalidParameterError("polynomial_flat: need 0 < c < c_max(" + std::to_string(k) +
                                  ")=" + std::to_string(cmax) + ", got c=" + std::to_string(c));
    }
  }
  std::vector<double> seeds;
  for (int j = 1; j <= 40; ++j) seeds.push_back(std::ldexp(1.0, -j));
  return DiffeoSpec(FamilyKind::polynomial_flat, {{"k", static_cast<double>(k)}, {"c", c}},
                    std::make_shared<PolynomialFlatModel>(k, c), seeds);
}

double conj_psi(double x) { return 1.0 / (1.0 - x) - 1.0 / x; }

double conj_psi_inverse(double s) {
  if (s <= 0.0) return 2.0 / (std::hypot(s, 2.0) - s + 2.0);
  return 1.0 - 2.0 / (std::hypot(s, 2.0) + s + 2.0);
}

double conj_log_psi_prime(double x) {
  return std::log(1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x)));
}

DiffeoSpec conjugated_translation(double c) {
  if (!std::isfinite(c)) throw InvalidParameterError("conjugated_translation: c must be finite");
  return DiffeoSpec(FamilyKind::conjugated_translation, {{"c", c}},
                    std::make_shared<ConjugatedTranslationModel>(c));
}

DiffeoSpec flat_exp(double c) {
  if (!std::isfinite(c) || c < 0.0) {
    throw InvalidParameterError("flat_exp: need c >= 0, got c=" + std::to_string(c));
  }
  auto model = std::make_shared<FlatExpModel>(c);
  const int n = 10000;
  for (int i = 1; i < n; ++i) {
    const double x = static_cast<double>(i) / n;
    if (!(model->derivative(x) > 0.0)) {
      throw InvalidParameterError("flat_exp: f' <= 0 near x=" + std::to_string(x) +
                                  " for c=" + std::to_string(c));
    }
  }
  return DiffeoSpec(FamilyKind::flat_exp, {{"c", c}}, model);
}

DiffeoSpec custom_closure(std::string label, std::function<double(double)> f,
                          std::function<double(double)> df,
                          std::function<double(double)> displacement, std::vector<double> seeds) {
  if (!f || !df) throw ArgumentError("custom_closure: f and f' are required");
  return DiffeoSpec(FamilyKind::custom_closure, {},
                    std::make_shared<CustomModel>(std::move(f), std::move(df),
                                                  std::move(displacement)),
                    std::move(seeds), std::move(label));
}

DiffeoSpec custom_displacement(std::string label, std::function<double(double)> phi,
                               std::function<double(double)> dphi) {
  auto f = [phi](double x) { return x + phi(x); };
  auto df = [dphi](double x) { return 1.0 + dphi(x); };
  return custom_closure(std::move(label), f, df, phi);
}

DiffeoSpec hoelder_raw_map(double alpha, double beta) {
  hoelder_bar_phi(alpha, beta, 0.5);  // parameter check
  return DiffeoSpec(FamilyKind::custom_closure, {{"alpha", alpha}, {"beta", beta}},
                    std::make_shared<RawBarPhiModel>(alpha, beta), {}, "hoelder-raw");
}

}  // namespace growthlab
