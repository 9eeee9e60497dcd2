#pragma once

#include "groupattr/partition.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

namespace groupattr {

using FeatureVector = std::vector<double>;

/// Numerically stable logistic function e^x / (1 + e^x).
double sigmoid(double z);

/// Derivative of the logistic function, sigma(z) * (1 - sigma(z)).
double sigmoid_prime(double z);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Monotone-friendly piecewise-linear map with explicit knots. Outside the
/// knot range the end segments extrapolate; at a knot the derivative is the
/// right derivative.
struct PiecewiseLinear {
  std::vector<double> knots;   // strictly increasing, size >= 2
  std::vector<double> values;  // same size as knots

  double operator()(double u) const;
  double derivative(double u) const;
  void check() const;
};

enum class ModelKind { Linear, LogisticLinear, AdditiveLogistic, Composed, Opaque };

const char* to_string(ModelKind kind);

/// Inverse feature map carried by composed models (x_tilde -> x). The
/// Jacobian is analytic for the built-in transform patterns and may be
/// omitted for user-supplied maps, in which case gradients fall back to
/// central finite differences.
struct InverseMap {
  std::function<FeatureVector(const FeatureVector&)> apply;
  /// J[r][c] = d apply(x)[r] / d x[c]; empty function means "not available".
  std::function<std::vector<std::vector<double>>(const FeatureVector&)> jacobian;
};

/// A declarative scalar model over m features. Immutable after construction;
/// safe to share across threads. Monotonicity declarations are validated by
/// a numeric scan against the declared domain box at declaration time.
class ModelSpec {
 public:
  static ModelSpec linear(double bias, std::vector<double> coefficients);
  static ModelSpec logistic_linear(double bias, std::vector<double> coefficients);
  static ModelSpec additive_logistic(double bias, std::vector<PiecewiseLinear> shapes);
  /// User-supplied evaluator; `grad` may be empty (finite differences then).
  static ModelSpec opaque(int feature_count,
                          std::function<double(const FeatureVector&)> evaluate,
                          std::function<FeatureVector(const FeatureVector&)> grad = {});
  /// Model g(x~) = inner(inverse(x~)); used by compose_with_inverse.
  static ModelSpec composed(ModelSpec inner, InverseMap inverse);

  ModelKind kind() const { return kind_; }
  int feature_count() const { return m_; }
  double bias() const { return bias_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  const std::vector<PiecewiseLinear>& shape_functions() const { return shapes_; }
  const ModelSpec& inner() const;
  const InverseMap& inverse_map() const;

  const std::vector<Interval>& domain() const { return domain_; }
  bool has_domain() const { return !domain_.empty(); }
  const std::vector<int>& monotone_increasing() const { return monotone_increasing_; }
  const std::vector<std::pair<int, int>>& strong_pairs() const { return strong_pairs_; }

  /// Declares the per-feature domain box used by monotonicity scans and
  /// transform verification.
  ModelSpec with_domain(std::vector<Interval> box) const;

  /// Declares individually monotone increasing features (0-based) and runs
  /// the 17-point grid scan over the domain box; throws when the scan finds
  /// a finite difference below -1e-9.
  ModelSpec with_monotone_increasing(std::vector<int> indices,
                                     std::uint64_t scan_seed = 17) const;

  /// Declares strong pairs (i over j, 0-based) and scans them numerically.
  ModelSpec with_strong_pairs(std::vector<std::pair<int, int>> pairs,
                              std::uint64_t scan_seed = 17) const;

  bool is_declared_monotone(int feature) const;
  bool is_declared_strong_pair(int i, int j) const;

 private:
  ModelSpec() = default;

  ModelKind kind_ = ModelKind::Linear;
  int m_ = 0;
  double bias_ = 0.0;
  std::vector<double> coefficients_;
  std::vector<PiecewiseLinear> shapes_;
  std::shared_ptr<const ModelSpec> inner_;
  InverseMap inverse_;
  std::function<double(const FeatureVector&)> opaque_eval_;
  std::function<FeatureVector(const FeatureVector&)> opaque_grad_;

  std::vector<Interval> domain_;
  std::vector<int> monotone_increasing_;
  std::vector<std::pair<int, int>> strong_pairs_;

  friend double evaluate(const ModelSpec&, const FeatureVector&);
  friend FeatureVector gradient(const ModelSpec&, const FeatureVector&);
};

/// f(x). Pure and deterministic; throws on dimension mismatch or
/// non-finite input.
double evaluate(const ModelSpec& model, const FeatureVector& x);

/// Gradient of f at x: analytic for declarative kinds, chain rule through
/// the inverse map for composed kinds, central finite differences with step
/// h_i = cbrt(eps) * max(1, |x_i|) for opaque evaluators without a gradient
/// callback.
FeatureVector gradient(const ModelSpec& model, const FeatureVector& x);

/// alpha*f + beta*g as an opaque model with an exact combined gradient.
ModelSpec linear_combination(double alpha, const ModelSpec& f, double beta, const ModelSpec& g);

/// Memoized characteristic-function values v(x_bar, x', f; S) for a fixed
/// (model, explicand, baseline) triple. The model must outlive the cache.
/// Not safe for concurrent mutation; instantiate per worker when
/// parallelizing.
class CoalitionValueCache {
 public:
  CoalitionValueCache(const ModelSpec& model, FeatureVector explicand, FeatureVector baseline);

  /// f(x_bar_S; x'_{M\S}); computed once per mask.
  double value(CoalitionMask coalition);

  std::size_t evaluations() const { return evaluations_; }
  const FeatureVector& explicand() const { return explicand_; }
  const FeatureVector& baseline() const { return baseline_; }
  const ModelSpec& model() const { return *model_; }
  int feature_count() const { return m_; }

 private:
  static constexpr int kDenseBits = 20;

  const ModelSpec* model_;
  FeatureVector explicand_;
  FeatureVector baseline_;
  FeatureVector scratch_;
  int m_ = 0;
  std::vector<double> dense_;
  std::vector<bool> present_;
  std::unordered_map<CoalitionMask, double> sparse_;
  std::size_t evaluations_ = 0;
};

/// Spec-level alias for cache.value(S).
double coalition_value(const ModelSpec& model, const FeatureVector& explicand,
                       const FeatureVector& baseline, CoalitionMask coalition,
                       CoalitionValueCache& cache);

}  // namespace groupattr
