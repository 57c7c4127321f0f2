// Acceptance checks. Prints one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "growthlab/analysis.hpp"
#include "growthlab/cli.hpp"
#include "growthlab/families.hpp"
#include "growthlab/fixed_points.hpp"
#include "growthlab/orbit.hpp"

using namespace growthlab;

namespace {

// Pinned tolerances.
constexpr double kPowerSlopeK2Lo = 1.9, kPowerSlopeK2Hi = 2.1;
constexpr double kMinRSquared = 0.999;
constexpr double kPowerSlopeK3Lo = 1.4, kPowerSlopeK3Hi = 1.6;
constexpr double kPowerSlopeK4Lo = 1.23, kPowerSlopeK4Hi = 1.43;
constexpr double kPowerFitSeconds = 120.0;
constexpr double kHyperbolicRelTol = 0.05;
constexpr double kHyperbolicSeconds = 10.0;
constexpr double kOracleAbsTol = 1e-6;
constexpr double kExactOrbitTol = 1e-9;
constexpr double kBarPhiSumTol = 0.15;
constexpr double kBarPhiSlopeTol = 0.05;
constexpr double kLoglogSlopeLo = 0.15, kLoglogSlopeHi = 0.60;
constexpr double kLogisticTol = 1e-7;
constexpr double kFlowSelfTol = 1e-6;
constexpr double kSemigroupTol = 1e-7;
constexpr double kSpreadMax = 10.0;
constexpr double kFlatExpLateSlopeMax = 1.5;
constexpr double kChainRuleTol = 1e-4;

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [fail]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::int64_t> logspaced(int count, std::int64_t lo, std::int64_t hi) {
  return parse_checkpoints("logspaced:" + std::to_string(count) + ":" + std::to_string(lo), hi);
}

void power_fit(Outcome& o, const std::string& name, const DiffeoSpec& spec, double lo, double hi) {
  const auto t0 = std::chrono::steady_clock::now();
  const GrowthCurve c = growth_sequence(spec, 100000, 4096, logspaced(20, 1000, 100000));
  const ExponentFit fit = fit_exponent(c, FitMode::power, {1e3, 1e5});
  const double secs = seconds_since(t0);
  o.check(fit.slope >= lo && fit.slope <= hi && fit.r_squared >= kMinRSquared &&
              secs < kPowerFitSeconds,
          name + " slope=" + fmt("%.4f", fit.slope) + " r2=" + fmt("%.6f", fit.r_squared) +
              " in " + fmt("%.1fs", secs));
}

Outcome criterion1() {
  Outcome o;
  power_fit(o, "polynomial_flat(2,1)", polynomial_flat(2, 1.0), kPowerSlopeK2Lo, kPowerSlopeK2Hi);
  power_fit(o, "conjugated_translation(1)", conjugated_translation(1.0), kPowerSlopeK2Lo,
            kPowerSlopeK2Hi);
  return o;
}

Outcome criterion2() {
  Outcome o;
  power_fit(o, "polynomial_flat(3,c_max/2)", polynomial_flat(3, 0.5 * polynomial_flat_c_max(3)),
            kPowerSlopeK3Lo, kPowerSlopeK3Hi);
  power_fit(o, "polynomial_flat(4,c_max/2)", polynomial_flat(4, 0.5 * polynomial_flat_c_max(4)),
            kPowerSlopeK4Lo, kPowerSlopeK4Hi);
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::int64_t> cps;
  for (std::int64_t n = 50; n <= 200; n += 10) cps.push_back(n);
  const GrowthCurve c = growth_sequence(hyperbolic(0.5), 200, 4096, cps);
  const ExponentFit fit = fit_exponent(c, FitMode::exp_rate, {50, 200});
  const double secs = seconds_since(t0);
  const double rel = std::abs(fit.slope / std::log(2.0) - 1.0);
  o.check(rel <= kHyperbolicRelTol && secs < kHyperbolicSeconds,
          "hyperbolic(0.5) rate=" + fmt("%.5f", fit.slope) + " vs log 2, rel err " +
              fmt("%.4f", rel) + " in " + fmt("%.2fs", secs));
  return o;
}

Outcome criterion4() {
  Outcome o;
  const DiffeoSpec f = conjugated_translation(1.0);
  GrowthOptions opts;
  opts.record_starts = true;
  const GrowthCurve c = growth_sequence(f, 10000, 4096, logspaced(20, 1, 10000), opts);
  double worst = 0.0;
  for (std::size_t i = 0; i < c.records.size(); ++i) {
    const std::int64_t n = c.records[i].n;
    double best_max = -INFINITY;
    double best_min = INFINITY;
    for (double x : c.evaluated_starts[i]) {
      const double v = *f.model().log_iterate_derivative(x, n);
      best_max = std::max(best_max, v);
      best_min = std::min(best_min, v);
    }
    worst = std::max(worst, std::abs(c.records[i].log_gamma - record_log_gamma(best_max, best_min)));
  }
  o.check(worst <= kOracleAbsTol, "max |log G - closed form| = " + fmt("%.3g", worst) + " over " +
                                      std::to_string(c.records.size()) + " checkpoints");
  return o;
}

Outcome criterion5() {
  Outcome o;
  for (double beta : {0.5, 1.0, 2.0}) {
    const LemmaReport r = verify_exact_orbit(0.3, beta, 50, kExactOrbitTol);
    o.check(r.passed(), "beta=" + fmt("%g", beta) + " max step error " + fmt("%.3g", r.measured));
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  const LemmaReport a = verify_bar_phi_sum(0.3, 0.5, 10000, kBarPhiSumTol);
  o.check(a.passed(), "sum/asymptotic at N=1e4 = " + fmt("%.4f", a.measured) + " (need within " +
                          fmt("%g", kBarPhiSumTol) + " of 1)");
  const LemmaReport b = verify_bar_phi_slope(0.3, 0.5, 1000, kBarPhiSlopeTol);
  o.check(b.passed(), "derivative ratio at k=1e3 = " + fmt("%.4f", b.measured));
  return o;
}

Outcome criterion7() {
  Outcome o;
  const FlatBumpSchedule s = default_flat_bump_schedule(4);
  const DiffeoSpec f = flat_bump_thm2(s);
  std::int64_t n1 = s.bumps.front().n;
  std::int64_t n4 = s.bumps.front().n;
  for (const auto& b : s.bumps) {
    n1 = std::min(n1, b.n);
    n4 = std::max(n4, b.n);
  }
  std::vector<std::int64_t> cps = logspaced(12, n1, n4);
  for (const auto& b : s.bumps) cps.push_back(b.n);
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  const GrowthCurve c = growth_sequence(f, n4, 4096, cps);
  int below = 0;
  double worst_gap = INFINITY;
  for (const auto& r : c.records) {
    const double n = static_cast<double>(r.n);
    const double target = std::log(s.epsilon(n) * n * n);
    worst_gap = std::min(worst_gap, r.log_gamma - target);
    if (r.log_gamma < target) ++below;
  }
  o.check(below == 0, "log G_n - log(eps_n n^2) min " + fmt("%.3f", worst_gap) + ", " +
                          std::to_string(below) + "/" + std::to_string(c.records.size()) +
                          " checkpoints below, n in [" + std::to_string(n1) + ", " +
                          std::to_string(n4) + "]");
  const FixedPointReport rep = fixed_point_report(f);
  bool fixed_ok = rep.fixed_intervals.empty() && rep.points.size() == 2 &&
                  rep.points[0].location == 0.0 && rep.points[1].location == 1.0;
  for (const auto& p : rep.points) {
    fixed_ok = fixed_ok && p.stratum.kind == Stratum::Kind::FlatToOrder && p.stratum.order == 8;
  }
  std::string labels;
  for (const auto& p : rep.points) labels += (labels.empty() ? "" : ",") + p.stratum.label();
  o.check(fixed_ok, "fixed points " + std::to_string(rep.points.size()) + " (" + labels + ")");
  return o;
}

Outcome criterion8() {
  Outcome o;
  const DiffeoSpec f = hoelder_thm3b({0.5, {{0.0, 1.0, 0.5, 1.0}}});
  const GrowthCurve c = growth_sequence(f, 100000, 4096, logspaced(20, 1000, 100000));
  std::vector<double> scaled;
  for (const auto& r : c.records) scaled.push_back(r.log_gamma / std::sqrt(static_cast<double>(r.n)));
  const std::size_t w = 5;
  double first = 0.0;
  double last = 0.0;
  for (std::size_t i = 0; i < w; ++i) {
    first += scaled[i] / w;
    last += scaled[scaled.size() - w + i] / w;
  }
  o.check(last <= first, "log G/n^0.5 first-window mean " + fmt("%.4f", first) +
                             ", last-window mean " + fmt("%.4f", last));
  const ExponentFit fit = fit_exponent(c, FitMode::loglog, {1e3, 1e5});
  o.check(fit.slope >= kLoglogSlopeLo && fit.slope <= kLoglogSlopeHi,
          "loglog slope " + fmt("%.4f", fit.slope));
  return o;
}

Outcome criterion9() {
  Outcome o;
  const DiffeoSpec logistic = custom_displacement(
      "logistic", [](double x) { return x * (1 - x); }, [](double x) { return 1 - 2 * x; });
  const DiffeoSpec g = flow_family(logistic, 1.0, 1e-12);
  const auto& gm = dynamic_cast<const FlowModel&>(g.model());
  double worst_value = 0.0;
  double worst_deriv = 0.0;
  for (double x : {0.05, 0.25, 0.5, 0.8}) {
    for (int n : {1, 3, 5}) {
      const double en = std::exp(static_cast<double>(n));
      const double exact = x * en / (1 - x + x * en);
      worst_value = std::max(worst_value, std::abs(gm.flow_to(x, n) / exact - 1.0));
      const double log_exact = n - 2.0 * std::log1p(x * (en - 1));
      const LemmaReport r = verify_flow_identity(g, x, n, kLogisticTol);
      worst_deriv = std::max(worst_deriv, std::abs(r.detail("log_chain") - log_exact));
      worst_deriv = std::max(worst_deriv, r.measured);
    }
  }
  o.check(worst_value <= kLogisticTol && worst_deriv <= kLogisticTol,
          "logistic value err " + fmt("%.2g", worst_value) + ", derivative err " +
              fmt("%.2g", worst_deriv));

  const DiffeoSpec fe = flow_family(flat_exp(0.1), 1.0, 1e-10);
  const DiffeoSpec fe_tight = flow_family(flat_exp(0.1), 1.0, 1e-13);
  const auto& fm = dynamic_cast<const FlowModel&>(fe.model());
  const auto& fm_tight = dynamic_cast<const FlowModel&>(fe_tight.model());
  const double a = fm.flow_to(0.3, 10.0);
  const double b = fm_tight.flow_to(0.3, 10.0);
  const double self = std::abs(a / b - 1.0);
  const LemmaReport id = verify_flow_identity(fe, 0.3, 10, kFlowSelfTol);
  o.check(self <= kFlowSelfTol && id.passed(),
          "flat_exp flow tolerance drift " + fmt("%.2g", self) + ", identity err " +
              fmt("%.2g", id.measured));

  double worst_sg = 0.0;
  for (const FlowModel* m : {&gm, &fm_tight}) {
    for (double x : {0.2, 0.5, 0.7}) {
      const double one = m->flow_to(x, 1.1);
      const double two = m->flow_to(m->flow_to(x, 0.4), 0.7);
      worst_sg = std::max(worst_sg, std::abs(two / one - 1.0));
    }
  }
  o.check(worst_sg <= kSemigroupTol, "semigroup err " + fmt("%.2g", worst_sg));
  return o;
}

Outcome criterion10() {
  Outcome o;
  struct Pr3Case {
    const char* name;
    DiffeoSpec spec;
    double x1;
    std::int64_t n;
  };
  const std::vector<Pr3Case> pr3{
      {"conj(0.1)", conjugated_translation(0.1), 0.1, 100},
      {"conj(-0.1)", conjugated_translation(-0.1), 0.9, 100},
      {"poly(2,0.25)", polynomial_flat(2, 0.25), 0.05, 1000},
      {"poly(3,c/2)", polynomial_flat(3, 0.5 * polynomial_flat_c_max(3)), 0.1, 1000},
      {"hyperbolic(0.1)", hyperbolic(0.1), 0.01, 100},
      {"hyperbolic(0.9)", hyperbolic(0.9), 0.01, 10},
      {"flat_exp(0.1)", flat_exp(0.1), 0.3, 1000},
      {"hoelder", hoelder_thm3b({0.5, {{0.0, 1.0, 0.5, 1.0}}}), 0.2, 100},
  };
  int applicable = 0;
  int held = 0;
  double lo = INFINITY;
  double hi = -INFINITY;
  for (const auto& c : pr3) {
    const LemmaReport r = verify_lemma_pr3(c.spec, c.x1, c.n);
    if (r.status == LemmaStatus::not_applicable) continue;
    ++applicable;
    if (r.passed()) ++held;
    lo = std::min(lo, r.measured);
    hi = std::max(hi, r.measured);
  }
  o.check(applicable > 0 && held == applicable,
          "pr3 " + std::to_string(held) + "/" + std::to_string(applicable) +
              " applicable in [2/3,2], range " + fmt("%.3f", lo) + ".." + fmt("%.3f", hi));

  const LemmaReport pr1 =
      verify_lemma_pr1_ladder(polynomial_flat(2, 1.0), {0.0, 1.0}, 0.01, {100, 1000, 10000});
  o.check(pr1.passed() && pr1.measured <= kSpreadMax, "pr1 spread " + fmt("%.3f", pr1.measured));

  const DiffeoSpec h = hoelder_thm3b({0.5, {{0.0, 1.0, 0.5, 1.0}}});
  const double x = 0.05;
  const double w = 0.5 * h.model().displacement(x);
  const LemmaReport l4 = verify_lemma_l4(h, {x, x + w}, {100, 1000, 10000}, 32, 0.5);
  o.check(l4.passed() && l4.measured <= kSpreadMax, "l4 spread " + fmt("%.3f", l4.measured));

  std::vector<double> ladder;
  for (int j = 3; j <= 20; ++j) ladder.push_back(std::ldexp(1.0, -j));
  const LemmaReport prn = verify_bounded_oscillation_ladder(flat_exp(0.1), 2, ladder);
  o.check(prn.passed(), "prn flat_exp spread " + fmt("%.3f", prn.measured));

  const double p = 1.0;
  const double alpha = 0.5;
  const LemmaReport stable = verify_lemma_l6((p + 1) * alpha, p, alpha, 1024, 3);
  const LemmaReport growing = verify_lemma_l6((p + 1) * alpha / 2, p, alpha, 1024, 3);
  o.check(stable.passed(), "l6 b=(p+1)a max change/doubling " + fmt("%.3f", stable.measured));
  o.check(growing.passed(), "l6 b=(p+1)a/2 growth over 3 doublings " + fmt("%.3f", growing.measured) +
                                " (per doubling " + fmt("%.3f", growing.detail("change_doubling_1")) +
                                ")");
  return o;
}

Outcome criterion11() {
  Outcome o;
  const GrowthCurve c = growth_sequence(flat_exp(0.1), 100000, 4096, logspaced(30, 100, 100000));
  const ExponentFit early = fit_exponent(c, FitMode::power, {1e2, 1e3});
  const ExponentFit late = fit_exponent(c, FitMode::power, {1e4, 1e5});
  o.check(late.slope <= kFlatExpLateSlopeMax && late.slope < early.slope,
          "flat_exp(0.1) slope [1e4,1e5] " + fmt("%.4f", late.slope) + ", [1e2,1e3] " +
              fmt("%.4f", early.slope));
  return o;
}

std::string run_growth(const ExperimentConfig& cfg, const std::string& workers) {
  setenv("GROWTHLAB_WORKERS", workers.c_str(), 1);
  std::ostringstream out;
  std::ostringstream err;
  const int code = cmd_growth(cfg, out, err);
  unsetenv("GROWTHLAB_WORKERS");
  if (code != kExitPass) return "exit " + std::to_string(code) + ": " + err.str();
  std::ifstream in(cfg.output, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Central differences of x -> f^n(x), Richardson-combined, with the step shrunk until two
// successive estimates agree.
double iterate_slope(const DiffeoSpec& s, double x, std::int64_t n) {
  auto iterate = [&](double y) {
    for (std::int64_t k = 0; k < n; ++k) y = eval(s, y);
    return y;
  };
  auto richardson = [&](double h) {
    const double d1 = (iterate(x + h) - iterate(x - h)) / (2 * h);
    const double d2 = (iterate(x + h / 2) - iterate(x - h / 2)) / h;
    return (4 * d2 - d1) / 3;
  };
  double h = 1e-5 * std::min(x, 1 - x);
  double fd = richardson(h);
  for (int i = 0; i < 40; ++i) {
    h /= 4;
    const double next = richardson(h);
    const bool settled = std::abs(next / fd - 1.0) < 1e-6;
    fd = next;
    if (settled) break;
  }
  return fd;
}

Outcome criterion12() {
  Outcome o;
  const GrowthCurve id = growth_sequence(identity(), 10000, 4096, logspaced(10, 1, 10000));
  bool all_zero = true;
  for (const auto& r : id.records) all_zero = all_zero && r.log_gamma == 0.0;
  o.check(all_zero, "identity log G == 0 at " + std::to_string(id.records.size()) + " checkpoints");

  const std::vector<DiffeoSpec> specs{
      hyperbolic(0.5),          hyperbolic(-0.5),
      polynomial_flat(2, 1.0),  polynomial_flat(3, 0.5 * polynomial_flat_c_max(3)),
      conjugated_translation(1.0), conjugated_translation(-0.5),
      flat_bump_thm2(default_flat_bump_schedule(4)), hoelder_thm3b({0.5, {{0.0, 1.0, 0.5, 1.0}}}),
      flat_exp(0.1),            flow_family(hyperbolic(0.5), 0.7, 1e-10)};
  int negative = 0;
  int records = 0;
  for (const auto& s : specs) {
    const GrowthCurve c = growth_sequence(s, 2000, 1024, logspaced(8, 1, 2000));
    for (const auto& r : c.records) {
      ++records;
      if (!(r.log_gamma >= 0.0)) ++negative;
    }
  }
  o.check(negative == 0, std::to_string(negative) + "/" + std::to_string(records) +
                             " records with log G < 0");

  ExperimentConfig cfg = parse_config(Json::parse(
      R"({"family": {"kind": "flat_bump_thm2", "schedule": "default"}, "n_max": 20000,
          "checkpoints": "logspaced:12", "grid_size": 1024})"));
  const auto dir = std::filesystem::temp_directory_path() / "growthlab_acceptance";
  std::filesystem::create_directories(dir);
  const int many = std::max(8, static_cast<int>(std::thread::hardware_concurrency()));
  std::vector<std::string> outputs;
  for (int w : {1, 2, many}) {
    cfg.output = (dir / ("workers_" + std::to_string(w) + ".csv")).string();
    outputs.push_back(run_growth(cfg, std::to_string(w)));
  }
  const bool same = outputs[0] == outputs[1] && outputs[0] == outputs[2] &&
                    outputs[0].rfind(kGrowthCsvHeader, 0) == 0;
  o.check(same, "growth CSV identical for workers 1, 2, " + std::to_string(many));

  double worst = 0.0;
  for (const auto& s : specs) {
    for (std::int64_t n : {1, 10, 100}) {
      for (double x : {0.1, 0.3, 0.55, 0.8}) {
        double y = x;
        for (std::int64_t k = 0; k < n; ++k) y = eval(s, y);
        if (y < 1e-6 || y > 1 - 1e-6) continue;
        worst = std::max(worst, std::abs(std::exp(phi_sum(s, x, n)) / iterate_slope(s, x, n) - 1.0));
      }
    }
  }
  o.check(worst <= kChainRuleTol, "chain rule vs finite differences max rel err " + fmt("%.2g", worst));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  int only = 0;
  app.add_option("--criterion", only, "Run a single criterion (1-12); all when omitted")
      ->check(CLI::Range(1, 12));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Outcome()>> criteria{
      criterion1, criterion2, criterion3, criterion4,  criterion5,  criterion6,
      criterion7, criterion8, criterion9, criterion10, criterion11, criterion12};
  bool all = true;
  for (int i = 1; i <= 12; ++i) {
    if (only != 0 && only != i) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i - 1]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    std::printf("criterion %2d %s  %s (%.1fs)\n", i, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
