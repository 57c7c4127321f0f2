#include "growthlab/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "growthlab/errors.hpp"
#include "growthlab/numerics.hpp"
#include "growthlab/parallel.hpp"

namespace growthlab {

namespace {

const Json& params_of(const Json& d) {
  if (d.contains("params")) {
    if (!d["params"].is_object()) throw UsageError("family 'params' must be an object");
    return d["params"];
  }
  return d;
}

double get_number(const Json& obj, const std::string& key) {
  if (!obj.contains(key)) throw UsageError("missing numeric field '" + key + "'");
  if (!obj[key].is_number()) throw UsageError("field '" + key + "' must be a number");
  return obj[key].get<double>();
}

double get_number(const Json& obj, const std::string& key, double fallback) {
  return obj.contains(key) ? get_number(obj, key) : fallback;
}

std::int64_t get_integer(const Json& obj, const std::string& key, std::int64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const double v = get_number(obj, key);
  if (v != std::floor(v) || std::abs(v) > 9e15) {
    throw UsageError("field '" + key + "' must be an integer");
  }
  return static_cast<std::int64_t>(v);
}

Interval get_interval(const Json& obj, const std::string& key) {
  if (!obj.contains(key)) throw UsageError("missing interval field '" + key + "'");
  const Json& v = obj[key];
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw UsageError("field '" + key + "' must be [lo, hi]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

FlatBumpSchedule parse_flat_bump_schedule(const Json& p) {
  if (!p.contains("schedule") || (p["schedule"].is_string() && p["schedule"] == "default")) {
    return default_flat_bump_schedule(static_cast<int>(get_integer(p, "K", 4)));
  }
  const Json& s = p["schedule"];
  if (!s.is_object()) throw UsageError("flat_bump_thm2: schedule must be \"default\" or an object");
  if (!s.contains("bumps")) {
    return default_flat_bump_schedule(static_cast<int>(get_integer(s, "K", 4)));
  }
  FlatBumpSchedule out;
  out.epsilon = [](double n) { return 1.0 / std::log(n + 2.0); };
  out.c_fill = get_number(s, "c_fill", out.c_fill);
  if (s.contains("enforce_growth_condition")) {
    out.enforce_growth_condition = s["enforce_growth_condition"].get<bool>();
  }
  if (!s["bumps"].is_array()) throw UsageError("flat_bump_thm2: bumps must be an array");
  int k = 0;
  for (const Json& b : s["bumps"]) {
    ++k;
    FlatBump bump;
    bump.I = flat_bump_slot(k);
    bump.J = get_interval(b, "J");
    bump.z = get_number(b, "z");
    bump.w = get_number(b, "w");
    bump.gamma = get_number(b, "gamma");
    bump.omega = get_number(b, "omega");
    bump.n = get_integer(b, "n", 0);
    out.bumps.push_back(bump);
  }
  return out;
}

HoelderSchedule parse_hoelder_schedule(const Json& p) {
  HoelderSchedule s;
  s.alpha = get_number(p, "alpha", 0.5);
  if (!p.contains("intervals")) {
    s.intervals.push_back({0.0, 1.0, get_number(p, "beta", 0.5), get_number(p, "hoelder_bound", 0.0)});
    return s;
  }
  if (!p["intervals"].is_array()) throw UsageError("hoelder_thm3b: intervals must be an array");
  for (const Json& iv : p["intervals"]) {
    HoelderInterval h;
    h.a = get_number(iv, "a");
    h.b = get_number(iv, "b");
    h.beta = get_number(iv, "beta");
    h.hoelder_bound = get_number(iv, "hoelder_bound", 0.0);
    s.intervals.push_back(h);
  }
  return s;
}

DiffeoSpec build_custom(const Json& p) {
  const std::string name = p.value("name", std::string{});
  if (name == "logistic") {
    // phi(x) = c x (1 - x); its flow is F(t, x) = x e^(ct) / (1 - x + x e^(ct)).
    const double c = get_number(p, "c", 1.0);
    if (!std::isfinite(c)) throw InvalidParameterError("logistic: c must be finite");
    return custom_displacement(
        "logistic", [c](double x) { return c * x * (1.0 - x); },
        [c](double x) { return c * (1.0 - 2.0 * x); });
  }
  throw UsageError("custom_closure: unknown name '" + name + "' (known: logistic)");
}

}  // namespace

DiffeoSpec build_family(const Json& d, ParamCheck check) {
  if (!d.is_object()) throw UsageError("family descriptor must be an object");
  if (!d.contains("kind") || !d["kind"].is_string()) throw UsageError("family needs a 'kind'");
  FamilyKind kind;
  try {
    kind = family_kind_from_string(d["kind"].get<std::string>());
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const Json& p = params_of(d);
  switch (kind) {
    case FamilyKind::identity:
      return identity();
    case FamilyKind::hyperbolic:
      return hyperbolic(get_number(p, "c"), check);
    case FamilyKind::polynomial_flat: {
      const int k = static_cast<int>(get_integer(p, "k", 2));
      if (p.contains("c_fraction")) {
        return polynomial_flat(k, get_number(p, "c_fraction") * polynomial_flat_c_max(k), check);
      }
      return polynomial_flat(k, get_number(p, "c"), check);
    }
    case FamilyKind::conjugated_translation:
      return conjugated_translation(get_number(p, "c"));
    case FamilyKind::flat_bump_thm2:
      return flat_bump_thm2(parse_flat_bump_schedule(p));
    case FamilyKind::hoelder_thm3b:
      return hoelder_thm3b(parse_hoelder_schedule(p));
    case FamilyKind::flat_exp:
      return flat_exp(get_number(p, "c"));
    case FamilyKind::flow: {
      if (!p.contains("base")) throw UsageError("flow: missing 'base' family");
      return flow_family(build_family(p["base"], check), get_number(p, "t", 1.0),
                         get_number(p, "step_tol", 1e-10));
    }
    case FamilyKind::custom_closure:
      return build_custom(p);
  }
  throw UsageError("unhandled family kind");
}

std::vector<std::int64_t> parse_checkpoints(const std::string& text, std::int64_t n_max) {
  if (n_max < 1) throw UsageError("n_max must be positive");
  const std::string prefix = "logspaced:";
  std::vector<std::int64_t> out;
  try {
    if (text.rfind(prefix, 0) == 0) {
      std::string rest = text.substr(prefix.size());
      std::int64_t lo = 1;
      const auto colon = rest.find(':');
      if (colon != std::string::npos) {
        lo = std::stoll(rest.substr(colon + 1));
        rest = rest.substr(0, colon);
      }
      const int count = std::stoi(rest);
      if (count < 1 || lo < 1 || lo > n_max) throw UsageError("bad logspaced checkpoints");
      return log_spaced_integers(lo, n_max, count);
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size()) throw UsageError("bad checkpoint '" + item + "'");
      out.push_back(v);
    }
  } catch (const std::invalid_argument&) {
    throw UsageError("cannot parse checkpoints '" + text + "'");
  } catch (const std::out_of_range&) {
    throw UsageError("checkpoint out of range in '" + text + "'");
  }
  if (out.empty()) throw UsageError("empty checkpoint list");
  return out;
}

FitWindow parse_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("window must be LO:HI");
  try {
    std::size_t u1 = 0;
    std::size_t u2 = 0;
    const std::string a = text.substr(0, colon);
    const std::string b = text.substr(colon + 1);
    FitWindow w{std::stod(a, &u1), std::stod(b, &u2)};
    if (u1 != a.size() || u2 != b.size() || !(w.lo <= w.hi)) throw UsageError("bad window");
    return w;
  } catch (const std::logic_error&) {
    throw UsageError("cannot parse window '" + text + "'");
  }
}

ExperimentConfig parse_config(const Json& j) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  ExperimentConfig c;
  if (j.contains("family")) c.family = j["family"];
  c.n_max = get_integer(j, "n_max", c.n_max);
  c.grid_size = static_cast<int>(get_integer(j, "grid_size", c.grid_size));
  c.refinement_rounds = static_cast<int>(get_integer(j, "refinement_rounds", c.refinement_rounds));
  if (c.refinement_rounds < 0) throw UsageError("refinement_rounds must be non-negative");
  if (j.contains("output")) {
    if (!j["output"].is_string()) throw UsageError("output must be a string");
    c.output = j["output"].get<std::string>();
  }
  if (!j.contains("checkpoints")) {
    c.checkpoints = parse_checkpoints("logspaced:20", c.n_max);
  } else if (j["checkpoints"].is_string()) {
    c.checkpoints = parse_checkpoints(j["checkpoints"].get<std::string>(), c.n_max);
  } else if (j["checkpoints"].is_array()) {
    for (const Json& v : j["checkpoints"]) {
      if (!v.is_number_integer()) throw UsageError("checkpoints must be integers");
      c.checkpoints.push_back(v.get<std::int64_t>());
    }
  } else {
    throw UsageError("checkpoints must be a list or \"logspaced:K\"");
  }
  for (auto n : c.checkpoints) {
    if (n < 1 || n > c.n_max) throw UsageError("checkpoint " + std::to_string(n) + " outside [1, n_max]");
  }
  if (j.contains("fit_windows")) {
    if (!j["fit_windows"].is_array()) throw UsageError("fit_windows must be a list");
    for (const Json& w : j["fit_windows"]) {
      if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number()) {
        throw UsageError("each fit window must be [lo, hi]");
      }
      c.fit_windows.push_back({w[0].get<double>(), w[1].get<double>()});
    }
  }
  if (j.contains("verify")) {
    if (!j["verify"].is_object()) throw UsageError("verify must be an object");
    c.verify = j["verify"];
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw UsageError("malformed JSON in '" + path + "': " + e.what());
  }
  return parse_config(j);
}

void apply_overrides(ExperimentConfig& c, const CliOverrides& o) {
  if (o.n_max) {
    c.n_max = *o.n_max;
    if (!o.checkpoints) {
      std::erase_if(c.checkpoints, [&](std::int64_t n) { return n > c.n_max; });
      if (c.checkpoints.empty()) c.checkpoints = parse_checkpoints("logspaced:20", c.n_max);
    }
  }
  if (o.grid) c.grid_size = *o.grid;
  if (o.checkpoints) c.checkpoints = parse_checkpoints(*o.checkpoints, c.n_max);
  if (o.out) c.output = *o.out;
}

namespace {

int report_error(std::ostream& err, const std::exception& e) {
  err << "error: " << e.what() << '\n';
  if (dynamic_cast<const UsageError*>(&e)) return kExitUsage;
  if (dynamic_cast<const Json::exception*>(&e)) return kExitUsage;
  return kExitFail;
}

DiffeoSpec require_family(const ExperimentConfig& c, ParamCheck check = ParamCheck::strict) {
  if (c.family.is_null()) throw UsageError("config has no family");
  return build_family(c.family, check);
}

std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int cmd_validate(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const DiffeoSpec spec = require_family(config, ParamCheck::none);
    const ValidationReport& rep = spec.construction_report();
    Json j = to_json(rep);
    j["family"] = spec.label();
    out << j.dump(2) << '\n';
    return rep.ok() ? kExitPass : kExitFail;
  } catch (const std::exception& e) {
    return report_error(err, e);
  }
}

int cmd_growth(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const DiffeoSpec spec = require_family(config);
    if (!spec.construction_report().ok()) {
      throw InvalidSpecError("family fails validation: " + spec.construction_report().message);
    }
    GrowthOptions opts;
    opts.refinement_rounds = config.refinement_rounds;
    const auto t0 = std::chrono::steady_clock::now();
    const GrowthCurve curve =
        growth_sequence(spec, config.n_max, config.grid_size, config.checkpoints, opts);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (config.output.empty()) {
      write_growth_csv(out, curve.records);
      return kExitPass;
    }
    {
      std::ofstream f(config.output, std::ios::binary);
      if (!f) throw UsageError("cannot write '" + config.output + "'");
      write_growth_csv(f, curve.records);
    }
    Json meta{{"family", config.family},
              {"label", spec.label()},
              {"n_max", config.n_max},
              {"grid_size", config.grid_size},
              {"refinement_rounds", config.refinement_rounds},
              {"checkpoints", curve.checkpoints},
              {"workers", default_worker_count()},
              {"elapsed_seconds", elapsed},
              {"finished_at", utc_timestamp()}};
    std::ofstream m(config.output + ".meta.json", std::ios::binary);
    m << meta.dump(2) << '\n';
    return kExitPass;
  } catch (const std::exception& e) {
    return report_error(err, e);
  }
}

int cmd_classify(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const DiffeoSpec spec = require_family(config);
    Json j = to_json(fixed_point_report(spec));
    j["family"] = spec.label();
    out << j.dump(2) << '\n';
    return kExitPass;
  } catch (const std::exception& e) {
    return report_error(err, e);
  }
}

int cmd_fit(const std::string& csv_path, FitMode mode, FitWindow window, std::ostream& out,
            std::ostream& err) {
  try {
    std::ifstream in(csv_path);
    if (!in) throw UsageError("cannot read '" + csv_path + "'");
    const auto records = read_growth_csv(in);
    out << to_json(fit_exponent(records, mode, window)).dump(2) << '\n';
    return kExitPass;
  } catch (const std::exception& e) {
    return report_error(err, e);
  }
}

const std::vector<std::string>& verify_ids() {
  static const std::vector<std::string> ids{"pr1", "pr2",  "pr3",   "l4", "prn",
                                            "flow", "eq39", "eq741", "l6"};
  return ids;
}

namespace {

std::vector<std::int64_t> get_int_list(const Json& v, const std::string& key,
                                       std::vector<std::int64_t> fallback) {
  if (!v.contains(key)) return fallback;
  if (!v[key].is_array()) throw UsageError("'" + key + "' must be a list");
  std::vector<std::int64_t> out;
  for (const Json& x : v[key]) {
    if (!x.is_number_integer()) throw UsageError("'" + key + "' must hold integers");
    out.push_back(x.get<std::int64_t>());
  }
  return out;
}

std::vector<double> get_list(const Json& v, const std::string& key) {
  if (!v[key].is_array()) throw UsageError("'" + key + "' must be a list");
  std::vector<double> out;
  for (const Json& x : v[key]) {
    if (!x.is_number()) throw UsageError("'" + key + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

LemmaReport run_lemma(const std::string& id, const ExperimentConfig& c) {
  const Json& v = c.verify;
  if (id == "eq39") {
    return verify_bar_phi_sum(get_number(v, "alpha", 0.3), get_number(v, "beta", 0.5),
                              get_integer(v, "N", 10000), get_number(v, "tolerance", 0.15));
  }
  if (id == "eq741") {
    return verify_bar_phi_slope(get_number(v, "alpha", 0.3), get_number(v, "beta", 0.5),
                                get_integer(v, "k", 1000), get_number(v, "tolerance", 0.05));
  }
  if (id == "l6") {
    const double p = get_number(v, "p", 1.0);
    const double alpha = get_number(v, "alpha", 0.5);
    return verify_lemma_l6(get_number(v, "b", (p + 1.0) * alpha), p, alpha,
                           static_cast<int>(get_integer(v, "grid", 1024)),
                           static_cast<int>(get_integer(v, "doublings", 3)));
  }
  const DiffeoSpec spec = require_family(c);
  if (id == "pr1") {
    const double x1 = get_number(v, "x1", 0.5);
    const Interval I = v.contains("interval") ? get_interval(v, "interval")
                                              : fixed_point_free_interval(spec, x1);
    const bool maximal = v.value("require_maximal", true);
    if (v.contains("ns")) return verify_lemma_pr1_ladder(spec, I, x1, get_int_list(v, "ns", {}), maximal);
    return verify_lemma_pr1(spec, I, x1, get_integer(v, "n", 100), maximal);
  }
  if (id == "pr2") {
    const double x = get_number(v, "x", 0.5);
    const double delta = get_number(v, "delta", 1.0);
    if (v.contains("interval")) return verify_lemma_pr2(spec, get_interval(v, "interval"), x, delta);
    return verify_lemma_pr2(spec, x, delta);
  }
  if (id == "pr3") return verify_lemma_pr3(spec, get_number(v, "x1", 0.5), get_integer(v, "n", 100));
  if (id == "l4") {
    const double alpha = get_number(v, "alpha", spec.params().count("alpha") ? spec.param("alpha") : 0.5);
    return verify_lemma_l4(spec, get_interval(v, "J"), get_int_list(v, "ns", {100, 1000, 10000}),
                           static_cast<int>(get_integer(v, "pair_samples", 64)), alpha);
  }
  if (id == "prn") {
    const int N = static_cast<int>(get_integer(v, "N", 2));
    if (v.contains("xs")) return verify_bounded_oscillation_ladder(spec, N, get_list(v, "xs"));
    return verify_bounded_oscillation(spec, N, get_number(v, "x", 0.1));
  }
  if (id == "flow") {
    return verify_flow_identity(spec, get_number(v, "x", 0.5), get_integer(v, "n", 10),
                                get_number(v, "tolerance", 1e-6));
  }
  throw UsageError("unknown lemma id '" + id + "'");
}

}  // namespace

int cmd_verify(const std::string& lemma, const ExperimentConfig& config, std::ostream& out,
               std::ostream& err) {
  const auto& ids = verify_ids();
  if (std::find(ids.begin(), ids.end(), lemma) == ids.end()) {
    err << "error: unknown lemma id '" << lemma << "'\n";
    return kExitUsage;
  }
  try {
    const LemmaReport rep = run_lemma(lemma, config);
    out << to_json(rep).dump(2) << '\n';
    return rep.passed() ? kExitPass : kExitFail;
  } catch (const std::exception& e) {
    return report_error(err, e);
  }
}

int cmd_family_list(std::ostream& out) {
  out << "identity                 (no parameters)\n"
         "hyperbolic               c: |c| < 1\n"
         "polynomial_flat          k >= 2; c in (0, c_max(k)) or c_fraction in (0, 1)\n"
         "conjugated_translation   c: any finite real\n"
         "flat_bump_thm2           schedule: \"default\" | {K} | {bumps: [{J, z, w, gamma, omega, n}],"
         " c_fill, enforce_growth_condition}\n"
         "hoelder_thm3b            alpha; intervals: [{a, b, beta, hoelder_bound}] (or beta alone)\n"
         "flat_exp                 c >= 0\n"
         "flow                     base: <family>; t >= 0; step_tol > 0\n"
         "custom_closure           name: \"logistic\"; c (a diffeomorphism only for |c| < 1)\n";
  return kExitPass;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Growth sequences of interval diffeomorphisms"};
  app.require_subcommand(1);
  std::string config_path;
  std::string csv_path;
  std::string mode = "power";
  std::string window;
  std::string lemma;
  CliOverrides ov;
  int grid = 0;
  std::int64_t nmax = 0;
  std::string checkpoints;
  std::string out_path;

  auto add_common = [&](CLI::App* sub, bool growth_flags) {
    sub->add_option("--config", config_path, "JSON experiment config")->required();
    if (growth_flags) {
      sub->add_option("--out", out_path, "output path");
      sub->add_option("--grid", grid, "start grid size")->check(CLI::Range(16, 1 << 28));
      sub->add_option("--nmax", nmax, "largest iterate")->check(CLI::PositiveNumber);
      sub->add_option("--checkpoints", checkpoints, "LIST or logspaced:K[:LO]");
    }
  };
  auto* validate = app.add_subcommand("validate", "check monotonicity and endpoints");
  add_common(validate, false);
  auto* growth = app.add_subcommand("growth", "compute log Gamma_n at checkpoints (CSV)");
  add_common(growth, true);
  auto* classify = app.add_subcommand("classify", "fixed points and strata (JSON)");
  add_common(classify, false);
  classify->add_option("--out", out_path, "output path");
  auto* fit = app.add_subcommand("fit", "exponent fit of a growth CSV (JSON)");
  fit->add_option("csv", csv_path, "growth CSV")->required();
  fit->add_option("--config", config_path, "config supplying fit_windows");
  fit->add_option("--mode", mode, "power | exp-rate | loglog");
  fit->add_option("--window", window, "LO:HI");
  fit->add_option("--out", out_path, "output path");
  auto* verify = app.add_subcommand("verify", "check one lemma (JSON)");
  add_common(verify, false);
  verify->add_option("--lemma", lemma, "pr1 | pr2 | pr3 | l4 | prn | flow | eq39 | eq741 | l6")
      ->required();
  verify->add_option("--out", out_path, "output path");
  app.add_subcommand("family-list", "list family kinds and parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  if (app.got_subcommand("family-list")) return cmd_family_list(out);

  // Reports other than growth CSVs go to --out when given.
  auto emit = [&](auto&& body) -> int {
    if (out_path.empty()) return body(out);
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
      err << "error: cannot write '" << out_path << "'\n";
      return kExitUsage;
    }
    return body(f);
  };

  try {
    if (app.got_subcommand("fit")) {
      FitMode m;
      try {
        m = fit_mode_from_string(mode);
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      FitWindow w;
      if (!window.empty()) {
        w = parse_window(window);
      } else if (!config_path.empty()) {
        const ExperimentConfig c = load_config(config_path);
        if (!c.fit_windows.empty()) w = c.fit_windows.front();
      }
      return emit([&](std::ostream& o) { return cmd_fit(csv_path, m, w, o, err); });
    }
    ExperimentConfig config = load_config(config_path);
    if (grid) ov.grid = grid;
    if (nmax) ov.n_max = nmax;
    if (!checkpoints.empty()) ov.checkpoints = checkpoints;
    if (app.got_subcommand("growth") && !out_path.empty()) ov.out = out_path;
    apply_overrides(config, ov);
    if (app.got_subcommand("validate")) return cmd_validate(config, out, err);
    if (app.got_subcommand("growth")) return cmd_growth(config, out, err);
    if (app.got_subcommand("classify")) {
      return emit([&](std::ostream& o) { return cmd_classify(config, o, err); });
    }
    return emit([&](std::ostream& o) { return cmd_verify(lemma, config, o, err); });
  } catch (const std::exception& e) {
    return report_error(err, e);
  }
}

}  // namespace growthlab
