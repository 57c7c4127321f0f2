#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "growthlab/diffeo.hpp"
#include "growthlab/orbit.hpp"

namespace growthlab {

enum class FitMode { power, exp_rate, loglog };

std::string to_string(FitMode mode);
FitMode fit_mode_from_string(const std::string& name);

struct FitWindow {
  double lo = 1e3;
  double hi = 1e5;
};

struct ExponentFit {
  FitMode mode = FitMode::power;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  FitWindow window;
  int points = 0;
};

/// OLS on (log n, log G), (n, log G) or (log n, log log G) over records with n in the window.
ExponentFit fit_exponent(const std::vector<GrowthRecord>& records, FitMode mode, FitWindow window);
ExponentFit fit_exponent(const GrowthCurve& curve, FitMode mode, FitWindow window);

enum class LemmaStatus { pass, fail, not_applicable };
std::string to_string(LemmaStatus status);

struct LemmaReport {
  std::string lemma;
  std::string quantity;
  double measured = 0.0;
  double bound_lo = 0.0;
  double bound_hi = 0.0;
  LemmaStatus status = LemmaStatus::fail;
  double worst_location = 0.0;
  std::string note;
  std::vector<std::pair<std::string, double>> details;

  bool passed() const { return status == LemmaStatus::pass; }
  double detail(const std::string& key) const;
};

// --- Almost convexity ---------------------------------------------------------

/// Smallest A > 2 K1 with A[(n+1)^(1-a) - n^(1-a)] >= 2K sum_{k>n} exp(-(A/2 - K1) k^(1-a))
/// for n = 1..n_check. Infinity when alpha >= 1.
double almost_convexity_A(double K, double K1, double alpha, int n_check = 2000);

/// Checks 2a_n - a_{n-1} - a_{n+1} <= K exp(-a_n + K1 n^(1-alpha)) for every interior n and
/// reports separately whether a_n <= A n^(1-alpha).
LemmaReport check_almost_convexity(const std::vector<double>& a, double K, double K1,
                                   double alpha);

struct ConvexityConstants {
  double K = 0.0;
  double K1 = 0.0;
  double A = 0.0;
};

/// For each K1 in a fixed ladder, the smallest K making the inequality hold; keeps the pair
/// with the smallest resulting A.
ConvexityConstants fit_almost_convexity(const std::vector<double>& a, double alpha);

/// Smallest c with 2a_n - a_{n-1} - a_{n+1} <= c exp(-a_n + c) for all interior n.
double fit_almost_convexity_constant(const std::vector<double>& a);

// --- Hoelder seminorms -------------------------------------------------------

double hoelder_constant(const DiffeoSpec& spec, double alpha, int grid_size);
/// Seminorm of `values` (a derivative, or any function) on a uniform grid of `interval`.
double hoelder_constant(const std::function<double(double)>& values, double alpha,
                        int grid_size, Interval interval = {0.0, 1.0});

/// g(x) = x^b sin(x^-p), g(0) = 0.
double l6_probe(double b, double p, double x);

/// Seminorm of g at grid, 2 grid, ... (doublings + 1 grids). When b >= (p+1) alpha the
/// prediction is stability (each doubling changes the estimate by < 20%); otherwise growth
/// (the estimate rises by > 50% over the doublings).
LemmaReport verify_lemma_l6(double b, double p, double alpha, int grid, int doublings);

// --- Distortion lemmas -------------------------------------------------------

/// Fixed-point-free interval of `spec` containing x (endpoints from find_fixed_points).
Interval fixed_point_free_interval(const DiffeoSpec& spec, double x);

LemmaReport verify_lemma_pr1(const DiffeoSpec& spec, Interval interval, double x1,
                             std::int64_t n, bool require_maximal = true);
/// Ratio residual/|I| at each n; pass when max/min <= 10.
LemmaReport verify_lemma_pr1_ladder(const DiffeoSpec& spec, Interval interval, double x1,
                                    const std::vector<std::int64_t>& ns,
                                    bool require_maximal = true);

LemmaReport verify_lemma_pr2(const DiffeoSpec& spec, double x, double delta);
LemmaReport verify_lemma_pr2(const DiffeoSpec& spec, Interval interval, double x, double delta);

LemmaReport verify_lemma_pr3(const DiffeoSpec& spec, double x1, std::int64_t n);

LemmaReport verify_lemma_l4(const DiffeoSpec& spec, Interval J, const std::vector<std::int64_t>& ns,
                            int pair_samples, double alpha);

LemmaReport verify_bounded_oscillation(const DiffeoSpec& spec, int N, double x);
LemmaReport verify_bounded_oscillation_ladder(const DiffeoSpec& spec, int N,
                                              const std::vector<double>& xs);

LemmaReport verify_flow_identity(const DiffeoSpec& flow, double x, std::int64_t n,
                                 double tolerance = 1e-6);

// --- bar-phi identities ------------------------------------------------------

/// sum_{j=2}^N log(1 + bar-phi'(j^-beta)) against (2 pi/(beta(1-alpha(beta+1)))) N^(1-alpha(beta+1)).
LemmaReport verify_bar_phi_sum(double alpha, double beta, std::int64_t N, double tolerance = 0.15);
/// bar-phi'(k^-beta) k^(alpha(beta+1)) against 2 pi/beta.
LemmaReport verify_bar_phi_slope(double alpha, double beta, std::int64_t k, double tolerance = 0.05);
/// Per-step relative error of x -> x + bar-phi(x) on the lattice (N+1-k)^-beta.
LemmaReport verify_exact_orbit(double alpha, double beta, std::int64_t N, double tolerance = 1e-9);

}  // namespace growthlab
