#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "growthlab/analysis.hpp"
#include "growthlab/errors.hpp"
#include "growthlab/families.hpp"
#include "growthlab/io.hpp"

namespace growthlab {

/// Malformed input or invocation (exit code 2).
class UsageError : public Error {
 public:
  using Error::Error;
};

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitUsage = 2 };

struct ExperimentConfig {
  /// Family descriptor, {"kind": ..., "params": {...}}; null when absent.
  Json family;
  std::int64_t n_max = 1000;
  std::vector<std::int64_t> checkpoints;
  int grid_size = 4096;
  int refinement_rounds = 3;
  std::string output;
  std::vector<FitWindow> fit_windows;
  /// Parameters for the verify command.
  Json verify = Json::object();
};

/// Builds a spec from a family descriptor. Structural problems in the descriptor raise
/// UsageError; inadmissible parameters raise the family's own errors.
DiffeoSpec build_family(const Json& descriptor, ParamCheck check = ParamCheck::strict);

/// "1,10,100" or "logspaced:K" or "logspaced:K:LO" (upper end n_max).
std::vector<std::int64_t> parse_checkpoints(const std::string& text, std::int64_t n_max);
FitWindow parse_window(const std::string& text);

ExperimentConfig parse_config(const Json& j);
/// Reads and parses a JSON config file; UsageError on I/O or parse failure.
ExperimentConfig load_config(const std::string& path);

struct CliOverrides {
  std::optional<int> grid;
  std::optional<std::int64_t> n_max;
  std::optional<std::string> checkpoints;
  std::optional<std::string> out;
};

void apply_overrides(ExperimentConfig& config, const CliOverrides& overrides);

/// Every command returns an exit code and never throws; reports go to `out`,
/// diagnostics to `err`.
int cmd_validate(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
/// Writes CSV to config.output (plus <output>.meta.json), or to `out` when output is empty.
int cmd_growth(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
int cmd_classify(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
int cmd_fit(const std::string& csv_path, FitMode mode, FitWindow window, std::ostream& out,
            std::ostream& err);
int cmd_verify(const std::string& lemma, const ExperimentConfig& config, std::ostream& out,
               std::ostream& err);
int cmd_family_list(std::ostream& out);

/// Lemma ids accepted by cmd_verify.
const std::vector<std::string>& verify_ids();

/// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace growthlab
