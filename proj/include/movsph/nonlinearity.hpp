#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "movsph/point.hpp"
#include "movsph/rng.hpp"

namespace movsph {

/// f_eps(a, b) = eps (1+a^2)^{-(p+n)} b + (1+a^2)^{(pq-p-2n)/2} b^{-q}.
struct HyderNgo {
  double epsilon = 0.0;
  double q = 1.0;
};

/// f(a, b) = (1+a^2)^{weight_exponent/2} b^kappa.
struct PurePower {
  double kappa = 1.0;
  double weight_exponent = 0.0;
};

/// Caller-supplied f; trusted to be continuous, positivity is checked per call.
struct Custom {
  std::function<double(double, double)> fn;
  std::string name = "custom";
};

using NonlinearityFamily = std::variant<HyderNgo, PurePower, Custom>;

/// The right-hand side f(|y|, u) of the integral equation together with the
/// kernel exponent p and the dimension n it is used with.
class Nonlinearity {
 public:
  Nonlinearity(NonlinearityFamily family, double p, int n);

  /// f(alpha, beta); throws DomainError for beta <= 0 and ContractViolation
  /// when the result is not strictly positive.
  double operator()(double alpha, double beta) const;

  double p() const noexcept { return p_; }
  int n() const noexcept { return n_; }
  const NonlinearityFamily& family() const noexcept { return family_; }
  std::string describe() const;

  /// True when f(alpha, .) is known to be nonincreasing for every alpha.
  bool nonincreasing_in_beta() const noexcept;

  /// The Hyder-Ngo parameters when this is the eps = 0 member of that
  /// family, for which the condition reduces to a closed-form ratio test.
  std::optional<HyderNgo> hyder_ngo_pure() const noexcept;

  /// Largest q for which the eps = 0 Hyder-Ngo family satisfies the
  /// moving-sphere condition: (p + 2n) / p.
  double hyder_ngo_critical_q() const noexcept { return (p_ + 2.0 * n_) / p_; }

 private:
  double evaluate(double alpha, double beta) const;

  NonlinearityFamily family_;
  double p_;
  int n_;
};

double eval_f(const Nonlinearity& f, double alpha, double beta);

/// One point of the quantifier domain: x != 0, 0 < lambda < |x|,
/// |z - x| > lambda, 0 < a <= b.
struct ConditionSample {
  Point x;
  double lambda = 0.0;
  Point z;
  double a = 0.0;
  double b = 0.0;
};

bool in_condition_domain(const ConditionSample& s) noexcept;

/// Relative margin below which a strict inequality is treated as failed.
inline constexpr double kStrictMarginTol = 1e-14;

struct ConditionEvaluation {
  double lhs = 0.0;     ///< f(|z|, a)
  double rhs = 0.0;     ///< (lam/|z-x|)^{p+2n} f(|z^{x,lam}|, (lam/|z-x|)^p b)
  double margin = 0.0;  ///< (lhs - rhs) / max(lhs, rhs)
  bool holds = false;   ///< margin > kStrictMarginTol
};

/// Evaluates the moving-sphere condition at one sample. Throws DomainError
/// when the sample is outside the quantifier domain.
ConditionEvaluation evaluate_condition(const Nonlinearity& f, const ConditionSample& s);

struct ConditionViolation {
  ConditionSample sample;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
};

struct ConditionReport {
  std::size_t samples_tested = 0;
  std::size_t rejected = 0;  ///< sampler output outside the domain, resampled
  std::size_t violation_count = 0;
  std::vector<ConditionViolation> violations;  ///< first `max_recorded` in sample order
  double min_margin = 0.0;                     ///< smallest relative margin seen
  std::optional<ConditionSample> worst;        ///< sample attaining min_margin

  // Cross-check against the closed-form Hyder-Ngo ratio inequality; only
  // populated for the eps = 0 Hyder-Ngo family.
  std::size_t ratio_test_checked = 0;
  std::size_t ratio_test_disagreements = 0;

  bool holds() const noexcept { return violation_count == 0; }
};

/// Default sampler: |x| log-uniform in [x_min, x_max], lambda uniform in
/// (0, |x|), z = x + r theta with r log-uniform in (lambda, r_ratio_max *
/// lambda), a log-uniform in [a_min, a_max], b = a 10^{U[0, log10_ratio_max]}.
struct SamplerConfig {
  double x_min = 1e-2;
  double x_max = 1e2;
  double r_ratio_max = 1e3;
  double a_min = 1e-3;
  double a_max = 1e3;
  double log10_ratio_max = 3.0;
};

using ConditionSampler = std::function<ConditionSample(Rng&)>;

ConditionSampler default_condition_sampler(int n, SamplerConfig cfg = {});

struct CheckOptions {
  std::uint64_t seed = 0;
  std::size_t max_recorded = 16;
  std::size_t max_resample = 1000;  ///< per sample, before giving up
};

/// Random-sample check of the condition over `count` samples, parallel over
/// samples with one RNG stream per sample index.
ConditionReport check_condition_F1(const Nonlinearity& f, const ConditionSampler& sampler,
                                   std::size_t count, const CheckOptions& opts = {});

/// Single-threaded reference for check_condition_F1; identical output.
ConditionReport check_condition_F1_serial(const Nonlinearity& f, const ConditionSampler& sampler,
                                          std::size_t count, const CheckOptions& opts = {});

/// Deterministic scan aimed at the weakest part of the domain: b = a, z on
/// the ray through x, lambda close to |x| and |z - x| close to lambda.
struct DirectedSearchConfig {
  std::size_t x_steps = 12;
  std::size_t lambda_steps = 12;
  std::size_t r_steps = 12;
  std::size_t direction_steps = 8;
  double x_min = 1e-2;
  double x_max = 1e2;
  double a = 1.0;
};

ConditionReport directed_condition_search(const Nonlinearity& f, const DirectedSearchConfig& cfg = {},
                                          std::size_t max_recorded = 16);

/// lambda^2/|z-x|^2 (1+|z|^2) / (1+|z^{x,lambda}|^2); requires x != 0,
/// |z - x| > lambda and lambda < sqrt(1 + |x|^2).
double hn_ratio(const Point& x, double lambda, const Point& z);

/// The eps = 0 Hyder-Ngo condition written as a ratio test:
/// (b/a)^q > hn_ratio^{(p+2n-pq)/2}, with the same strictness margin.
bool hn_ratio_inequality_holds(double q, double p, int n, const ConditionSample& s);

}  // namespace movsph
