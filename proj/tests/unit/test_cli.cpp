#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "growthlab/cli.hpp"

using namespace growthlab;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "growthlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "growthlab_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p.string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("validate") {
  const auto id = write_file("id.json", R"({"family": {"kind": "identity"}})");
  CHECK(run({"validate", "--config", id}).code == 0);

  const auto bad = write_file("h15.json", R"({"family": {"kind": "hyperbolic", "c": 1.5}})");
  const Run r = run({"validate", "--config", bad});
  CHECK(r.code == 1);
  const Json j = Json::parse(r.out);
  CHECK(j["monotone_ok"] == false);
  CHECK(j["min_derivative"].get<double>() == doctest::Approx(-0.5));

  const auto trunc = write_file("trunc.json", R"({"family": {"kind": )");
  const Run t = run({"validate", "--config", trunc});
  CHECK(t.code == 2);
  CHECK_FALSE(t.err.empty());

  CHECK(run({"validate", "--config", (scratch() / "missing.json").string()}).code == 2);
  CHECK(run({"validate"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
}

TEST_CASE("growth") {
  const auto id = write_file(
      "idg.json", R"({"family": {"kind": "identity"}, "n_max": 100, "checkpoints": [1, 10, 100], "grid_size": 64})");
  const Run r = run({"growth", "--config", id});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  const auto rows = read_growth_csv(in);
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) CHECK(row.log_gamma == 0.0);
  CHECK(r.out.rfind(std::string(kGrowthCsvHeader) + "\n", 0) == 0);
  CHECK(r.out.find('\r') == std::string::npos);

  const auto ct = write_file(
      "ct.json", R"({"family": {"kind": "conjugated_translation", "c": 1}, "n_max": 1000,
                    "checkpoints": "logspaced:8", "grid_size": 256})");
  const std::string csv = (scratch() / "ct.csv").string();
  REQUIRE(run({"growth", "--config", ct, "--out", csv}).code == 0);
  const GrowthCurve lib = growth_sequence(conjugated_translation(1.0), 1000, 256,
                                          parse_checkpoints("logspaced:8", 1000));
  std::ostringstream expected;
  write_growth_csv(expected, lib.records);
  CHECK(read_file(csv) == expected.str());
  CHECK(fs::exists(csv + ".meta.json"));
  const Json meta = Json::parse(read_file(csv + ".meta.json"));
  CHECK(meta["grid_size"] == 256);

  // Every CSV round-trips through fit without loss.
  const Run fit = run({"fit", csv, "--mode", "power", "--window", "10:1000"});
  REQUIRE(fit.code == 0);
  const ExponentFit mem = fit_exponent(lib, FitMode::power, {10, 1000});
  CHECK(Json::parse(fit.out)["slope"].get<double>() == mem.slope);
  CHECK(Json::parse(fit.out)["r_squared"].get<double>() == mem.r_squared);

  // Overrides from the command line.
  const Run o = run({"growth", "--config", ct, "--nmax", "50", "--checkpoints", "5,50", "--grid", "32"});
  REQUIRE(o.code == 0);
  std::istringstream oin(o.out);
  CHECK(read_growth_csv(oin).size() == 2);

  const auto inv = write_file("inv.json", R"({"family": {"kind": "hyperbolic", "c": 3}})");
  CHECK(run({"growth", "--config", inv}).code == 1);
  const auto over = write_file("over.json", R"({"family": {"kind": "identity"}, "n_max": 10, "checkpoints": [20]})");
  CHECK(run({"growth", "--config", over}).code == 2);
}

TEST_CASE("growth output does not depend on the worker count") {
  const auto cfg = write_file(
      "det.json", R"({"family": {"kind": "flat_exp", "c": 0.1}, "n_max": 2000,
                     "checkpoints": "logspaced:6", "grid_size": 300})");
  std::vector<std::string> outputs;
  for (const char* w : {"1", "2", "6"}) {
    setenv("GROWTHLAB_WORKERS", w, 1);
    const std::string csv = (scratch() / (std::string("det_") + w + ".csv")).string();
    REQUIRE(run({"growth", "--config", cfg, "--out", csv}).code == 0);
    outputs.push_back(read_file(csv));
  }
  unsetenv("GROWTHLAB_WORKERS");
  CHECK(outputs[0] == outputs[1]);
  CHECK(outputs[0] == outputs[2]);
}

TEST_CASE("classify") {
  const auto id = write_file("idc.json", R"({"family": {"kind": "identity"}})");
  const Run a = run({"classify", "--config", id});
  REQUIRE(a.code == 0);
  CHECK(Json::parse(a.out)["has_fixed_interval"] == true);

  const auto h = write_file("hc.json", R"({"family": {"kind": "hyperbolic", "params": {"c": 0.5}}})");
  const Json hj = Json::parse(run({"classify", "--config", h}).out);
  CHECK(hj["points"][0]["stratum"] == "E1");
  CHECK(hj["points"][1]["stratum"] == "E1");
  CHECK(hj["V"].get<double>() == doctest::Approx(std::log(2.0)));

  const auto fb = write_file("fb.json", R"({"family": {"kind": "flat_bump_thm2", "schedule": "default"}})");
  const Json fj = Json::parse(run({"classify", "--config", fb}).out);
  REQUIRE(fj["points"].size() == 2);
  CHECK(fj["points"][0]["stratum"] == "FlatToOrder(8)");
  CHECK(fj["points"][1]["stratum"] == "FlatToOrder(8)");
}

TEST_CASE("fit") {
  const std::string csv = write_file("short.csv", std::string(kGrowthCsvHeader) +
                                                      "\n1,0,0,0,0.5,0.5\n2,1,1,-1,0.5,0.5\n");
  CHECK(run({"fit", csv}).code == 1);
  CHECK(run({"fit", csv, "--mode", "cubic"}).code == 2);
  CHECK(run({"fit", csv, "--window", "nonsense"}).code == 2);
  const std::string broken = write_file("broken.csv", "a,b\n1,2\n");
  CHECK(run({"fit", broken}).code == 1);
}

TEST_CASE("verify") {
  const auto ct = write_file(
      "pr3.json", R"({"family": {"kind": "conjugated_translation", "c": 0.1}, "verify": {"x1": 0.1, "n": 100}})");
  const Run pr3 = run({"verify", "--config", ct, "--lemma", "pr3"});
  CHECK(pr3.code == 0);
  CHECK(Json::parse(pr3.out)["status"] == "pass");

  const auto eq = write_file("eq39.json", R"({"verify": {"alpha": 0.3, "beta": 0.5, "N": 10000}})");
  const Run e = run({"verify", "--config", eq, "--lemma", "eq39"});
  const Json ej = Json::parse(e.out);
  CHECK(e.code == (ej["status"] == "pass" ? 0 : 1));

  CHECK(run({"verify", "--config", eq, "--lemma", "eq741"}).code == 0);
  CHECK(run({"verify", "--config", eq, "--lemma", "xx"}).code == 2);
  // Lemmas that need a family report a usage error without one.
  CHECK(run({"verify", "--config", eq, "--lemma", "pr3"}).code == 2);

  const auto flow = write_file(
      "flow.json", R"({"family": {"kind": "flow", "base": {"kind": "custom_closure", "name": "logistic"},
                      "t": 1.0, "step_tol": 1e-12}, "verify": {"x": 0.25, "n": 3, "tolerance": 1e-7}})");
  CHECK(run({"verify", "--config", flow, "--lemma", "flow"}).code == 0);
}

TEST_CASE("config parsing") {
  CHECK(parse_checkpoints("1,10,100", 100) == std::vector<std::int64_t>{1, 10, 100});
  CHECK(parse_checkpoints("logspaced:3", 100) == std::vector<std::int64_t>{1, 10, 100});
  CHECK(parse_checkpoints("logspaced:3:10", 1000) == std::vector<std::int64_t>{10, 100, 1000});
  CHECK_THROWS_AS(parse_checkpoints("logspaced:x", 100), UsageError);
  CHECK_THROWS_AS(parse_checkpoints("1,,2", 100), UsageError);
  CHECK(parse_window("1e3:1e5").hi == 1e5);
  CHECK_THROWS_AS(parse_window("5:1"), UsageError);

  const ExperimentConfig c = parse_config(Json::parse(
      R"({"family": {"kind": "polynomial_flat", "k": 3, "c_fraction": 0.5}, "n_max": 500,
          "fit_windows": [[10, 500]], "refinement_rounds": 2})"));
  CHECK(c.checkpoints.back() == 500);
  CHECK(c.fit_windows.size() == 1);
  CHECK(c.refinement_rounds == 2);
  const DiffeoSpec s = build_family(c.family);
  CHECK(s.param("c") == doctest::Approx(0.5 * polynomial_flat_c_max(3)));

  CHECK_THROWS_AS(build_family(Json::parse(R"({"kind": "warp"})")), UsageError);
  CHECK_THROWS_AS(build_family(Json::parse(R"({"kind": "hyperbolic"})")), UsageError);
  CHECK_THROWS_AS(build_family(Json::parse(R"({"kind": "hyperbolic", "c": 2})")), InvalidParameterError);
  CHECK_NOTHROW(build_family(Json::parse(
      R"({"kind": "hoelder_thm3b", "alpha": 0.5, "intervals": [{"a": 0, "b": 1, "beta": 0.5, "hoelder_bound": 1}]})")));
  CHECK_NOTHROW(build_family(Json::parse(R"({"kind": "flat_bump_thm2", "K": 2})")));
}

TEST_CASE("family-list") {
  const Run r = run({"family-list"});
  CHECK(r.code == 0);
  for (const char* k : {"identity", "hyperbolic", "polynomial_flat", "conjugated_translation",
                        "flat_bump_thm2", "hoelder_thm3b", "flat_exp", "flow", "custom_closure"}) {
    CHECK(r.out.find(k) != std::string::npos);
  }
}
