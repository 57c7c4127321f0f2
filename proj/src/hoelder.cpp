#include <algorithm>
#include <cmath>
#include <limits>

#include "growthlab/errors.hpp"
#include "growthlab/families.hpp"
#include "growthlab/numerics.hpp"

namespace growthlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr std::int64_t kMaxCutoffIndex = 1000000000000LL;

void check_hoelder_params(double alpha, double beta) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidParameterError("hoelder: alpha must lie in (0,1), got " + std::to_string(alpha));
  }
  if (!(beta > 0.0 && beta + 1.0 < 1.0 / alpha)) {
    throw InvalidParameterError("hoelder: need 0 < beta < 1/alpha - 1, got beta=" +
                                std::to_string(beta));
  }
}

// sin and cos of 2 pi t with t reduced modulo 1 first.
void sincos_turns(double t, double& s, double& c) {
  const double r = (t < 4.5e15) ? t - std::nearbyint(t) : 0.0;
  s = std::sin(kTwoPi * r);
  c = std::cos(kTwoPi * r);
}

double bar_phi_unchecked(double alpha, double beta, double x) {
  const double lx = std::log(x);
  const double r = std::exp(lx / beta);   // x^(1/beta)
  const double t = std::exp(-lx / beta);  // x^(-1/beta)
  double s;
  double c;
  sincos_turns(t, s, c);
  const double smooth = x * std::expm1(-beta * std::log1p(-r));
  const double osc = std::exp(lx * (alpha + 1.0) * (beta + 1.0) / beta) * s;
  return smooth - osc;
}

double bar_phi_derivative_unchecked(double alpha, double beta, double x) {
  const double lx = std::log(x);
  const double r = std::exp(lx / beta);
  const double t = std::exp(-lx / beta);
  double s;
  double c;
  sincos_turns(t, s, c);
  const double e = (alpha + 1.0) * (beta + 1.0) / beta;
  return std::expm1(-(beta + 1.0) * std::log1p(-r)) -
         (alpha + 1.0) * ((beta + 1.0) / beta) * std::exp(lx * (e - 1.0)) * s +
         (kTwoPi / beta) * std::exp(lx * alpha * (beta + 1.0) / beta) * c;
}

// Zero of bar-phi' in ((j+1/2)^-beta, j^-beta), if the bracket changes sign.
std::optional<double> cutoff_zero(double alpha, double beta, std::int64_t j) {
  const double lo = std::pow(static_cast<double>(j) + 0.5, -beta);
  const double hi = std::pow(static_cast<double>(j), -beta);
  auto fn = [&](double x) { return bar_phi_derivative_unchecked(alpha, beta, x); };
  const double flo = fn(lo);
  const double fhi = fn(hi);
  if (!(flo < 0.0 && fhi > 0.0)) return std::nullopt;
  return bisect_root(fn, lo, hi);
}

// bar-phi' >= -1/2 on (0, y]: sampled on the partial period below y and the next
// 400 full periods; further down the oscillation envelope keeps shrinking.
bool derivative_floor_ok(double alpha, double beta, std::int64_t j, double y) {
  auto check_segment = [&](double lo, double hi) {
    for (int i = 0; i <= 32; ++i) {
      const double x = lo + (hi - lo) * i / 32.0;
      if (x <= 0.0) continue;
      if (bar_phi_derivative_unchecked(alpha, beta, x) < -0.5) return false;
    }
    return true;
  };
  const double jd = static_cast<double>(j);
  if (!check_segment(std::pow(jd + 1.0, -beta), y)) return false;
  for (int m = 1; m <= 400; ++m) {
    if (!check_segment(std::pow(jd + m + 1.0, -beta), std::pow(jd + m, -beta))) return false;
  }
  return true;
}

class HoelderModel : public MapModel {
 public:
  HoelderModel(double alpha, std::vector<HoelderPiece> pieces)
      : alpha_(alpha), pieces_(std::move(pieces)) {}

  double value(double x) const override { return x + displacement(x); }
  double derivative(double x) const override { return 1.0 + displacement_derivative(x); }
  double log_derivative(double x) const override { return std::log1p(displacement_derivative(x)); }

  double displacement(double x) const override {
    const HoelderPiece* p = find(x);
    if (!p) return 0.0;
    const double len = p->b - p->a;
    return (len / p->Delta) * p->profile(alpha_, (x - p->a) * p->Delta / len);
  }
  double displacement_derivative(double x) const override {
    const HoelderPiece* p = find(x);
    if (!p) return 0.0;
    const double len = p->b - p->a;
    return p->profile_derivative(alpha_, (x - p->a) * p->Delta / len);
  }
  double log_displacement(double x) const override {
    const HoelderPiece* p = find(x);
    if (!p) return kNegInf;
    const double len = p->b - p->a;
    const double v = p->profile(alpha_, (x - p->a) * p->Delta / len);
    if (!(v > 0.0)) return kNegInf;
    return std::log(len / p->Delta) + std::log(v);
  }
  int displacement_sign(double x) const override { return log_displacement(x) > kNegInf ? 1 : 0; }
  MapStep step(double x) const override {
    const HoelderPiece* p = find(x);
    if (!p) return {x, 0.0};
    const double len = p->b - p->a;
    const double s = (x - p->a) * p->Delta / len;
    return {x + (len / p->Delta) * p->profile(alpha_, s),
            std::log1p(p->profile_derivative(alpha_, s))};
  }

  const std::vector<HoelderPiece>& pieces() const { return pieces_; }

 private:
  const HoelderPiece* find(double x) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                               [](double v, const HoelderPiece& p) { return v < p.a; });
    if (it == pieces_.begin()) return nullptr;
    --it;
    return (x > it->a && x < it->b) ? &*it : nullptr;
  }

  double alpha_;
  std::vector<HoelderPiece> pieces_;
};

}  // namespace

double hoelder_bar_phi(double alpha, double beta, double x) {
  check_hoelder_params(alpha, beta);
  if (!(x > 0.0 && x < 1.0)) throw DomainError("hoelder_bar_phi: x must lie in (0,1)");
  return bar_phi_unchecked(alpha, beta, x);
}

double hoelder_bar_phi_derivative(double alpha, double beta, double x) {
  check_hoelder_params(alpha, beta);
  if (!(x > 0.0 && x < 1.0)) throw DomainError("hoelder_bar_phi_derivative: x must lie in (0,1)");
  return bar_phi_derivative_unchecked(alpha, beta, x);
}

double HoelderPiece::profile(double alpha, double s) const {
  if (s <= 0.0 || s >= Delta) return 0.0;
  if (s <= delta) return bar_phi_unchecked(alpha, beta, s);
  if (s <= 0.5 * Delta) return plateau;
  return plateau * smooth_step(1.0 - (2.0 * s - Delta) / Delta);
}

double HoelderPiece::profile_derivative(double alpha, double s) const {
  if (s <= 0.0 || s >= Delta) return 0.0;
  if (s <= delta) return bar_phi_derivative_unchecked(alpha, beta, s);
  if (s <= 0.5 * Delta) return 0.0;
  return -plateau * smooth_step_derivative(1.0 - (2.0 * s - Delta) / Delta) * 2.0 / Delta;
}

double hoelder_bar_phi_seminorm(double alpha, double beta, int grid) {
  check_hoelder_params(alpha, beta);
  std::vector<double> v(static_cast<std::size_t>(grid) + 1, 0.0);
  const double h = 0.5 / grid;
  for (int i = 1; i <= grid; ++i) v[i] = bar_phi_derivative_unchecked(alpha, beta, i * h);
  return holder_seminorm(v, h, alpha);
}

HoelderPiece build_hoelder_piece(double alpha, const HoelderInterval& iv) {
  check_hoelder_params(alpha, iv.beta);
  if (!(iv.a >= 0.0 && iv.b <= 1.0 && iv.a < iv.b)) {
    throw InvalidParameterError("hoelder: interval must satisfy 0 <= a < b <= 1");
  }
  HoelderPiece p;
  p.a = iv.a;
  p.b = iv.b;
  p.beta = iv.beta;
  p.K = iv.hoelder_bound > 0.0 ? iv.hoelder_bound : hoelder_bar_phi_seminorm(alpha, iv.beta);
  p.Delta = (iv.b - iv.a) * std::pow(p.K, -1.0 / alpha);

  const double half = 0.5 * p.Delta;
  double j0d = std::ceil(std::pow(std::min(half, 0.5), -1.0 / iv.beta));
  if (!(j0d < static_cast<double>(kMaxCutoffIndex))) {
    throw ConstructionError("hoelder: no zero of bar-phi' below Delta/2 within reach");
  }
  const auto j0 = std::max<std::int64_t>(2, static_cast<std::int64_t>(j0d));

  struct Candidate {
    bool ok = false;
    double y = 0.0;
  };
  auto test = [&](std::int64_t j) {
    Candidate c;
    if (std::pow(static_cast<double>(j), -iv.beta) > half) return c;
    auto y = cutoff_zero(alpha, iv.beta, j);
    if (!y || !(*y < half)) return c;
    c.y = *y;
    c.ok = derivative_floor_ok(alpha, iv.beta, j, *y);
    return c;
  };

  std::int64_t j = j0;
  Candidate found = test(j);
  if (!found.ok) {
    // Gallop, then bisect for the smallest admissible index.
    std::int64_t step = 1;
    std::int64_t bad = j;
    while (true) {
      const std::int64_t next = j0 + step;
      if (next > kMaxCutoffIndex) {
        throw ConstructionError("hoelder: no admissible zero of bar-phi' below Delta/2");
      }
      Candidate c = test(next);
      if (c.ok) {
        j = next;
        found = c;
        break;
      }
      bad = next;
      step *= 2;
    }
    std::int64_t lo = bad;
    std::int64_t hi = j;
    while (hi - lo > 1) {
      const std::int64_t mid = lo + (hi - lo) / 2;
      Candidate c = test(mid);
      if (c.ok) {
        hi = mid;
        found = c;
      } else {
        lo = mid;
      }
    }
    j = hi;
    if (!found.ok || found.y == 0.0) found = test(j);
  }
  p.j = j;
  p.delta = found.y;
  p.plateau = bar_phi_unchecked(alpha, iv.beta, p.delta);
  if (!(p.plateau > 0.0)) throw ConstructionError("hoelder: non-positive plateau value");
  return p;
}

DiffeoSpec hoelder_thm3b(const HoelderSchedule& schedule) {
  const double alpha = schedule.alpha;
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidParameterError("hoelder_thm3b: alpha must lie in (0,1)");
  }
  for (std::size_t i = 1; i < schedule.intervals.size(); ++i) {
    if (!(schedule.intervals[i].beta < schedule.intervals[i - 1].beta)) {
      throw InvalidParameterError("hoelder_thm3b: beta_k must strictly decrease");
    }
  }
  std::vector<HoelderPiece> pieces;
  for (const auto& iv : schedule.intervals) pieces.push_back(build_hoelder_piece(alpha, iv));
  std::sort(pieces.begin(), pieces.end(),
            [](const HoelderPiece& l, const HoelderPiece& r) { return l.a < r.a; });
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    if (pieces[i].a < pieces[i - 1].b) {
      throw InvalidParameterError("hoelder_thm3b: intervals overlap");
    }
  }

  DiffeoSpec::Params params{{"alpha", alpha},
                            {"intervals", static_cast<double>(pieces.size())}};
  std::vector<double> seeds;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const HoelderPiece& p = pieces[i];
    const std::string k = std::to_string(i + 1);
    params["a" + k] = p.a;
    params["b" + k] = p.b;
    params["beta" + k] = p.beta;
    params["K" + k] = p.K;
    params["delta" + k] = p.delta;
    for (double N : {1e2, 1e3, 1e4}) {
      const double s = std::pow(N, -p.beta);
      if (s < p.delta) seeds.push_back(p.a + s * (p.b - p.a) / p.Delta);
    }
  }
  return DiffeoSpec(FamilyKind::hoelder_thm3b, params,
                    std::make_shared<HoelderModel>(alpha, std::move(pieces)), seeds);
}

std::vector<HoelderPiece> hoelder_pieces(const DiffeoSpec& spec) {
  if (auto* m = dynamic_cast<const HoelderModel*>(&spec.model())) return m->pieces();
  return {};
}

}  // namespace growthlab
