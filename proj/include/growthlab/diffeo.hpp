#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace growthlab {

enum class FamilyKind {
  identity,
  hyperbolic,
  polynomial_flat,
  conjugated_translation,
  flat_bump_thm2,
  hoelder_thm3b,
  flat_exp,
  flow,
  custom_closure,
};

std::string to_string(FamilyKind kind);
/// Accepts both "polynomial-flat" and "polynomial_flat" spellings.
FamilyKind family_kind_from_string(const std::string& name);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

/// f(x) together with log f'(x), computed in one pass.
struct MapStep {
  double value;
  double log_derivative;
};

/// Numerical model of a map of [0,1]. Implementations must be thread-safe for reads.
class MapModel {
 public:
  virtual ~MapModel() = default;

  virtual double value(double x) const = 0;
  /// Analytic first derivative.
  virtual double derivative(double x) const = 0;
  virtual double log_derivative(double x) const;
  /// phi(x) = f(x) - x. Families override this when the subtraction loses digits.
  virtual double displacement(double x) const;
  /// log|phi(x)|, -inf where phi vanishes. Flat families return the exact log even
  /// where phi itself underflows.
  virtual double log_displacement(double x) const;
  /// Sign of phi(x), consistent with log_displacement.
  virtual int displacement_sign(double x) const;
  /// phi'(x) = f'(x) - 1.
  virtual double displacement_derivative(double x) const;
  virtual MapStep step(double x) const;
  /// f^(order)(x) for order >= 2 when the family knows it exactly.
  virtual std::optional<double> higher_derivative(double x, int order) const;
  virtual std::optional<double> iterate(double x, std::int64_t n) const;
  /// log (f^n)'(x) in closed form.
  virtual std::optional<double> log_iterate_derivative(double x, std::int64_t n) const;
};

struct ValidationReport {
  bool monotone_ok = false;
  bool endpoints_ok = false;
  double min_derivative = 0.0;
  double max_derivative = 0.0;
  double min_derivative_at = 0.0;
  int probe_count = 0;
  std::string message;

  bool ok() const { return monotone_ok && endpoints_ok; }
};

/// Immutable description of an endpoint-fixing diffeomorphism of [0,1].
class DiffeoSpec {
 public:
  using Params = std::map<std::string, double>;

  DiffeoSpec(FamilyKind kind, Params params, std::shared_ptr<const MapModel> model,
             std::vector<double> suggested_seeds = {}, std::string label = {});

  FamilyKind kind() const { return kind_; }
  const Params& params() const { return params_; }
  double param(const std::string& name) const;
  Interval domain() const { return domain_; }
  const std::vector<double>& suggested_seeds() const { return seeds_; }
  const MapModel& model() const { return *model_; }
  std::shared_ptr<const MapModel> model_ptr() const { return model_; }
  /// Validation on 1001 probes, computed once at construction.
  const ValidationReport& construction_report() const { return report_; }
  const std::string& label() const { return label_; }

 private:
  FamilyKind kind_;
  Params params_;
  Interval domain_;
  std::vector<double> seeds_;
  std::shared_ptr<const MapModel> model_;
  ValidationReport report_;
  std::string label_;
};

double eval(const DiffeoSpec& spec, double x);
double deriv(const DiffeoSpec& spec, double x, int order);
double inverse_eval(const DiffeoSpec& spec, double y, double tol);
ValidationReport validate(const DiffeoSpec& spec, int probe_count);

/// phi = f - x of a spec.
class Displacement {
 public:
  explicit Displacement(DiffeoSpec spec) : spec_(std::move(spec)) {}
  double operator()(double x) const;
  double log_abs(double x) const;
  int sign(double x) const;
  double derivative(double x, int order = 1) const;
  const DiffeoSpec& underlying() const { return spec_; }

 private:
  DiffeoSpec spec_;
};

/// Richardson-extrapolated finite-difference estimate of phi^(order)(x), order in [1, 8].
double displacement_derivative_fd(const MapModel& model, double x, int order);

constexpr int kMaxDerivativeOrder = 8;
constexpr double kEndpointTolerance = 1e-12;

}  // namespace growthlab
