#include "growthlab/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "growthlab/errors.hpp"
#include "growthlab/numerics.hpp"
#include "growthlab/parallel.hpp"

namespace growthlab {

namespace {

constexpr int kSubgrid = 17;

enum class Sense { max, min };

bool improves(Sense sense, double candidate, double incumbent) {
  return sense == Sense::max ? candidate > incumbent : candidate < incumbent;
}

struct RefineResult {
  double value;
  double location;
  std::vector<double> evaluated;
};

RefineResult refine_extremum(const DiffeoSpec& spec, std::int64_t n, double center,
                             double center_value, double radius, int rounds, Sense sense,
                             bool record) {
  RefineResult res{center_value, center, {}};
  double r = radius;
  for (int round = 0; round < rounds; ++round) {
    double round_best_v = res.value;
    double round_best_x = res.location;
    for (int i = 0; i < kSubgrid; ++i) {
      if (i == kSubgrid / 2) continue;
      const double x = res.location + (i - kSubgrid / 2) * r / (kSubgrid / 2);
      if (!(x > 0.0 && x < 1.0)) continue;
      const double v = phi_sum(spec, x, n);
      if (record) res.evaluated.push_back(x);
      if (improves(sense, v, round_best_v)) {
        round_best_v = v;
        round_best_x = x;
      }
    }
    res.value = round_best_v;
    res.location = round_best_x;
    r /= 8.0;
  }
  return res;
}

double refine_radius(const std::vector<double>& starts, std::size_t i) {
  const double x = starts[i];
  const double left = i > 0 ? x - starts[i - 1] : x;
  const double right = i + 1 < starts.size() ? starts[i + 1] - x : 1.0 - x;
  return std::min(std::max(left, right), 0.999 * std::min(x, 1.0 - x));
}

}  // namespace

double checked_image(double y) {
  if (!(y >= -kEndpointTolerance && y <= 1.0 + kEndpointTolerance)) {
    throw InvalidSpecError("orbit left [0,1]: f(x)=" + std::to_string(y));
  }
  return std::clamp(y, 0.0, 1.0);
}

Orbit iterate_orbit(const DiffeoSpec& spec, double x1, std::int64_t n) {
  if (n < 1) throw ArgumentError("iterate_orbit: n must be at least 1");
  if (!(x1 > 0.0 && x1 < 1.0)) throw DomainError("iterate_orbit: x1 must lie in (0,1)");
  Orbit orb;
  orb.start = x1;
  orb.points.reserve(static_cast<std::size_t>(n) + 1);
  orb.phi_partial.reserve(static_cast<std::size_t>(n) + 1);
  orb.points.push_back(x1);
  orb.phi_partial.push_back(0.0);
  const MapModel& m = spec.model();
  CompensatedSum acc;
  double x = x1;
  for (std::int64_t k = 1; k <= n; ++k) {
    const MapStep st = m.step(x);
    acc.add(st.log_derivative);
    x = checked_image(st.value);
    orb.points.push_back(x);
    orb.phi_partial.push_back(acc.value());
  }
  return orb;
}

std::vector<double> phi_sums_at(const DiffeoSpec& spec, double x1,
                                const std::vector<std::int64_t>& ns) {
  if (!(x1 >= 0.0 && x1 <= 1.0)) throw DomainError("phi_sum: x1 must lie in [0,1]");
  std::vector<double> out(ns.size(), 0.0);
  std::size_t idx = 0;
  while (idx < ns.size() && ns[idx] <= 0) ++idx;
  const MapModel& m = spec.model();
  CompensatedSum acc;
  double x = x1;
  std::int64_t k = 0;
  while (idx < ns.size()) {
    const MapStep st = m.step(x);
    acc.add(st.log_derivative);
    ++k;
    const double y = checked_image(st.value);
    if (y == x) {
      // Stuck in double precision: every later term repeats this one.
      for (; idx < ns.size(); ++idx) {
        CompensatedSum c = acc;
        c.add(static_cast<double>(ns[idx] - k) * st.log_derivative);
        out[idx] = c.value();
      }
      break;
    }
    x = y;
    while (idx < ns.size() && ns[idx] == k) out[idx++] = acc.value();
  }
  return out;
}

double phi_sum(const DiffeoSpec& spec, double x1, std::int64_t n) {
  if (n < 1) throw ArgumentError("phi_sum: n must be at least 1");
  return phi_sums_at(spec, x1, {n})[0];
}

std::vector<double> start_grid(const DiffeoSpec& spec, int grid_size) {
  std::vector<double> starts;
  starts.reserve(static_cast<std::size_t>(grid_size) + spec.suggested_seeds().size() + 80);
  for (int i = 1; i <= grid_size; ++i) starts.push_back(static_cast<double>(i) / (grid_size + 1));
  for (double s : spec.suggested_seeds()) starts.push_back(s);
  for (int j = 1; j <= 40; ++j) {
    starts.push_back(std::ldexp(1.0, -j));
    starts.push_back(1.0 - std::ldexp(1.0, -j));
  }
  std::sort(starts.begin(), starts.end());
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
  return starts;
}

GrowthCurve growth_sequence(const DiffeoSpec& spec, std::int64_t n_max, int grid_size,
                            std::vector<std::int64_t> checkpoints, const GrowthOptions& options) {
  if (checkpoints.empty()) throw ArgumentError("growth_sequence: empty checkpoint list");
  if (grid_size < 16) throw ArgumentError("growth_sequence: grid_size must be at least 16");
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  if (checkpoints.front() < 1 || checkpoints.back() > n_max) {
    throw ArgumentError("growth_sequence: checkpoints must lie in [1, n_max]");
  }
  const int workers = options.workers > 0 ? options.workers : default_worker_count();
  const int rounds = std::max(0, options.refinement_rounds);
  const std::size_t C = checkpoints.size();

  const std::vector<double> starts = start_grid(spec, grid_size);
  const std::size_t S = starts.size();
  std::vector<double> phi(S * C);
  parallel_for(S, workers, [&](std::size_t i) {
    const auto row = phi_sums_at(spec, starts[i], checkpoints);
    std::copy(row.begin(), row.end(), phi.begin() + static_cast<std::ptrdiff_t>(i * C));
  });

  struct Task {
    std::size_t checkpoint;
    Sense sense;
    std::size_t start_index;
  };
  std::vector<GrowthRecord> records(C);
  std::vector<std::size_t> coarse_max(C);
  std::vector<std::size_t> coarse_min(C);
  std::vector<Task> tasks;
  const std::size_t R = std::min<std::size_t>(std::max(0, options.refine_candidates), S);
  std::vector<std::size_t> order(S);
  for (std::size_t c = 0; c < C; ++c) {
    auto val = [&](std::size_t i) { return phi[i * C + c]; };
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return val(a) > val(b); });
    coarse_max[c] = order.front();
    if (rounds > 0) {
      for (std::size_t r = 0; r < R; ++r) tasks.push_back({c, Sense::max, order[r]});
    }
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return val(a) < val(b); });
    coarse_min[c] = order.front();
    if (rounds > 0) {
      for (std::size_t r = 0; r < R; ++r) tasks.push_back({c, Sense::min, order[r]});
    }
  }

  std::vector<RefineResult> refined(tasks.size());
  parallel_for(tasks.size(), workers, [&](std::size_t t) {
    const Task& task = tasks[t];
    const std::size_t i = task.start_index;
    refined[t] = refine_extremum(spec, checkpoints[task.checkpoint], starts[i],
                                 phi[i * C + task.checkpoint], refine_radius(starts, i), rounds,
                                 task.sense, options.record_starts);
  });

  GrowthCurve curve;
  curve.checkpoints = checkpoints;
  curve.grid_size = grid_size;
  curve.refinement_rounds = rounds;
  for (std::size_t c = 0; c < C; ++c) {
    GrowthRecord& rec = records[c];
    rec.n = checkpoints[c];
    rec.log_max_fwd = phi[coarse_max[c] * C + c];
    rec.argmax_start = starts[coarse_max[c]];
    rec.log_min_fwd = phi[coarse_min[c] * C + c];
    rec.argmin_start = starts[coarse_min[c]];
  }
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    GrowthRecord& rec = records[tasks[t].checkpoint];
    const RefineResult& rr = refined[t];
    if (tasks[t].sense == Sense::max && rr.value > rec.log_max_fwd) {
      rec.log_max_fwd = rr.value;
      rec.argmax_start = rr.location;
    } else if (tasks[t].sense == Sense::min && rr.value < rec.log_min_fwd) {
      rec.log_min_fwd = rr.value;
      rec.argmin_start = rr.location;
    }
  }
  for (auto& rec : records) rec.log_gamma = record_log_gamma(rec.log_max_fwd, rec.log_min_fwd);
  curve.records = std::move(records);

  if (options.record_starts) {
    curve.evaluated_starts.assign(C, starts);
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      auto& dst = curve.evaluated_starts[tasks[t].checkpoint];
      dst.insert(dst.end(), refined[t].evaluated.begin(), refined[t].evaluated.end());
    }
  }
  return curve;
}

GrowthRecord refine_argmax(const DiffeoSpec& spec, std::int64_t n, double center, double radius,
                           int rounds) {
  if (n < 1) throw ArgumentError("refine_argmax: n must be at least 1");
  if (!(center > 0.0 && center < 1.0)) throw DomainError("refine_argmax: center must lie in (0,1)");
  const double r = std::min(std::abs(radius), 0.999 * std::min(center, 1.0 - center));
  const double v0 = phi_sum(spec, center, n);
  const RefineResult hi = refine_extremum(spec, n, center, v0, r, rounds, Sense::max, false);
  const RefineResult lo = refine_extremum(spec, n, center, v0, r, rounds, Sense::min, false);
  GrowthRecord rec;
  rec.n = n;
  rec.log_max_fwd = hi.value;
  rec.argmax_start = hi.location;
  rec.log_min_fwd = lo.value;
  rec.argmin_start = lo.location;
  rec.log_gamma = record_log_gamma(rec.log_max_fwd, rec.log_min_fwd);
  return rec;
}

}  // namespace growthlab
