#pragma once

#include <cstdint>
#include <vector>

#include "growthlab/diffeo.hpp"

namespace growthlab {

struct Orbit {
  double start = 0.0;
  /// x_1 .. x_{n+1}
  std::vector<double> points;
  /// phi_partial[k] = Phi(k, x_1), k = 0..n
  std::vector<double> phi_partial;
};

struct GrowthRecord {
  std::int64_t n = 0;
  double log_gamma = 0.0;
  double log_max_fwd = 0.0;
  double log_min_fwd = 0.0;
  double argmax_start = 0.0;
  double argmin_start = 0.0;
};

struct GrowthCurve {
  std::vector<std::int64_t> checkpoints;
  std::vector<GrowthRecord> records;
  int grid_size = 0;
  int refinement_rounds = 0;
  /// Every start evaluated per checkpoint (coarse grid plus refinement points); filled only
  /// when GrowthOptions::record_starts is set.
  std::vector<std::vector<double>> evaluated_starts;
};

struct GrowthOptions {
  int refinement_rounds = 3;
  int refine_candidates = 4;
  /// 0 means default_worker_count().
  int workers = 0;
  bool record_starts = false;
};

/// Applies f once with the boundary clamp: within 1e-12 of [0,1] is clamped, beyond is an error.
double checked_image(double y);

Orbit iterate_orbit(const DiffeoSpec& spec, double x1, std::int64_t n);
double phi_sum(const DiffeoSpec& spec, double x1, std::int64_t n);
/// Phi(n, x1) for every n in the increasing list `ns`, from a single sweep.
std::vector<double> phi_sums_at(const DiffeoSpec& spec, double x1,
                                const std::vector<std::int64_t>& ns);

/// Deterministic start grid: uniform i/(G+1), seeds, and 2^-j, 1-2^-j for j = 1..40.
std::vector<double> start_grid(const DiffeoSpec& spec, int grid_size);

GrowthCurve growth_sequence(const DiffeoSpec& spec, std::int64_t n_max, int grid_size,
                            std::vector<std::int64_t> checkpoints,
                            const GrowthOptions& options = {});

/// Local 17-point refinement of both extrema around `center`; never worse than center.
GrowthRecord refine_argmax(const DiffeoSpec& spec, std::int64_t n, double center, double radius,
                           int rounds);

inline double record_log_gamma(double log_max_fwd, double log_min_fwd) {
  // + 0.0 turns -0 into 0.
  return (log_max_fwd > -log_min_fwd ? log_max_fwd : -log_min_fwd) + 0.0;
}

}  // namespace growthlab
