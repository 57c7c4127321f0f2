#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "growthlab/diffeo.hpp"

namespace growthlab {

/// `none` skips parameter-range checks so that a broken map can still be built and
/// reported by validate().
enum class ParamCheck { strict, none };

DiffeoSpec identity();

/// f(x) = x + c x (1 - x), |c| < 1.
DiffeoSpec hyperbolic(double c, ParamCheck check = ParamCheck::strict);

/// f(x) = x + c x^k (1 - x)^k, 0 < c < polynomial_flat_c_max(k).
DiffeoSpec polynomial_flat(int k, double c, ParamCheck check = ParamCheck::strict);
double polynomial_flat_c_max(int k);

/// f = psi^-1(psi + c) with psi(x) = 1/(1-x) - 1/x.
DiffeoSpec conjugated_translation(double c);
double conj_psi(double x);
double conj_psi_inverse(double s);
/// log psi'(x) = log(1/x^2 + 1/(1-x)^2).
double conj_log_psi_prime(double x);

// ---------------------------------------------------------------------------
// Parked-parabola family with flat bumps.

struct FlatBump {
  Interval I;  // (1/(2k), 1/(2k-1))
  Interval J;
  double z = 0.0;
  double w = 0.0;
  double gamma = 0.0;
  double omega = 0.0;
  std::int64_t n = 0;
};

struct FlatBumpSchedule {
  std::vector<FlatBump> bumps;
  std::function<double(double)> epsilon;
  double c_fill = 1e-4;
  /// When false, gamma_k w_k >= epsilon(n_k) is reported but not enforced.
  bool enforce_growth_condition = true;

  /// Checks every schedule condition; returns a description of the first violation.
  std::string violation() const;
  bool growth_condition_holds(std::size_t k) const;
};

/// I_k for k >= 1.
Interval flat_bump_slot(int k);
/// Default K-bump schedule: J_k central half of I_k, w_k = |I_k|/4,
/// gamma_k = 1e-2 2^-k, omega_k = 1e-6 gamma_k, n_k = ceil(3/(gamma_k w_k)),
/// epsilon(n) = 1/log(n+2).
FlatBumpSchedule default_flat_bump_schedule(int K = 4);
DiffeoSpec flat_bump_thm2(const FlatBumpSchedule& schedule);

// ---------------------------------------------------------------------------
// Hoelder-class family.

/// bar-phi(beta, x) for x in (0,1).
double hoelder_bar_phi(double alpha, double beta, double x);
double hoelder_bar_phi_derivative(double alpha, double beta, double x);

struct HoelderInterval {
  double a = 0.0;
  double b = 1.0;
  double beta = 0.5;
  /// Normalizing constant K in Delta = |I| K^(-1/alpha). Non-positive means: use the
  /// estimated Lip_alpha seminorm of bar-phi' on [0, 1/2].
  double hoelder_bound = 0.0;
};

struct HoelderSchedule {
  double alpha = 0.5;
  std::vector<HoelderInterval> intervals;
};

/// Per-interval construction data.
struct HoelderPiece {
  double a = 0.0;
  double b = 1.0;
  double beta = 0.5;
  double K = 1.0;
  double Delta = 1.0;
  double delta = 0.0;
  double plateau = 0.0;  // bar-phi(delta)
  std::int64_t j = 0;    // delta lies in ((j+1/2)^-beta, j^-beta)

  /// Unscaled profile phi_delta on [0, Delta] and its derivative.
  double profile(double alpha, double s) const;
  double profile_derivative(double alpha, double s) const;
};

/// Estimated Lip_alpha seminorm of bar-phi'(beta, .) on [0, 1/2].
double hoelder_bar_phi_seminorm(double alpha, double beta, int grid = 4096);
HoelderPiece build_hoelder_piece(double alpha, const HoelderInterval& interval);
DiffeoSpec hoelder_thm3b(const HoelderSchedule& schedule);
/// Pieces of a spec built by hoelder_thm3b (empty for other specs).
std::vector<HoelderPiece> hoelder_pieces(const DiffeoSpec& spec);
/// The raw map x -> x + bar-phi(beta, x). Not a diffeomorphism of [0,1]; useful for the
/// exact orbit x_k = (N+1-k)^-beta.
DiffeoSpec hoelder_raw_map(double alpha, double beta);

// ---------------------------------------------------------------------------

/// f(x) = x + c exp(-1/(x(1-x))).
DiffeoSpec flat_exp(double c);

/// Time-t map of x' = phi(x), phi the displacement of `base`.
DiffeoSpec flow_family(const DiffeoSpec& base, double t, double step_tol);

class FlowModel : public MapModel {
 public:
  FlowModel(DiffeoSpec base, double t, double step_tol);
  double value(double x) const override;
  double derivative(double x) const override;
  double log_derivative(double x) const override;
  int displacement_sign(double x) const override;
  MapStep step(double x) const override;

  double field(double x) const;
  double log_field(double x) const;
  /// F(T, x) by adaptive RK4 with step doubling.
  double flow_to(double x, double T) const;
  double time() const { return t_; }
  double step_tol() const { return tol_; }

 private:
  DiffeoSpec base_;
  double t_;
  double tol_;
};

/// Map given by closures. displacement may be empty (then f(x) - x is used).
DiffeoSpec custom_closure(std::string label, std::function<double(double)> f,
                          std::function<double(double)> df,
                          std::function<double(double)> displacement = {},
                          std::vector<double> seeds = {});

/// Builds a custom spec whose displacement is phi (f = x + phi, f' = 1 + dphi).
DiffeoSpec custom_displacement(std::string label, std::function<double(double)> phi,
                               std::function<double(double)> dphi);

}  // namespace growthlab
