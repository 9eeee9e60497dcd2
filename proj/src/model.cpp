#include "groupattr/model.hpp"

#include "groupattr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace groupattr {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double sigmoid_prime(double z) {
  const double s = sigmoid(z);
  return s * (1.0 - s);
}

void PiecewiseLinear::check() const {
  if (knots.size() < 2 || knots.size() != values.size())
    throw std::invalid_argument("shape function: need >= 2 knots and matching values");
  for (size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i] > knots[i - 1]))
      throw std::invalid_argument("shape function: knots must be strictly increasing");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("shape function: non-finite value");
  }
}

double PiecewiseLinear::operator()(double u) const {
  const size_t n = knots.size();
  size_t j;
  if (u <= knots.front()) {
    j = 0;
  } else if (u >= knots[n - 2]) {
    j = n - 2;
  } else {
    j = static_cast<size_t>(std::upper_bound(knots.begin(), knots.end(), u) - knots.begin()) - 1;
  }
  const double slope = (values[j + 1] - values[j]) / (knots[j + 1] - knots[j]);
  return values[j] + slope * (u - knots[j]);
}

double PiecewiseLinear::derivative(double u) const {
  const size_t n = knots.size();
  size_t j;
  if (u < knots.front()) {
    j = 0;
  } else if (u >= knots[n - 2]) {
    // right derivative at interior knots; last segment extends rightwards
    j = n - 2;
  } else {
    j = static_cast<size_t>(std::upper_bound(knots.begin(), knots.end(), u) - knots.begin()) - 1;
  }
  return (values[j + 1] - values[j]) / (knots[j + 1] - knots[j]);
}

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Linear: return "linear";
    case ModelKind::LogisticLinear: return "logistic-linear";
    case ModelKind::AdditiveLogistic: return "additive-logistic";
    case ModelKind::Composed: return "composed";
    case ModelKind::Opaque: return "opaque";
  }
  return "?";
}

namespace {

void check_input(const ModelSpec& model, const FeatureVector& x) {
  if (static_cast<int>(x.size()) != model.feature_count())
    throw std::invalid_argument("model input: expected " +
                                std::to_string(model.feature_count()) + " features, got " +
                                std::to_string(x.size()));
  for (double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument("model input: non-finite entry");
  }
}

void check_coefficients(const std::vector<double>& w) {
  if (w.empty()) throw std::invalid_argument("model: empty coefficient vector");
  for (double v : w) {
    if (!std::isfinite(v)) throw std::invalid_argument("model: non-finite coefficient");
  }
}

}  // namespace

ModelSpec ModelSpec::linear(double bias, std::vector<double> coefficients) {
  check_coefficients(coefficients);
  ModelSpec m;
  m.kind_ = ModelKind::Linear;
  m.m_ = static_cast<int>(coefficients.size());
  m.bias_ = bias;
  m.coefficients_ = std::move(coefficients);
  return m;
}

ModelSpec ModelSpec::logistic_linear(double bias, std::vector<double> coefficients) {
  check_coefficients(coefficients);
  ModelSpec m;
  m.kind_ = ModelKind::LogisticLinear;
  m.m_ = static_cast<int>(coefficients.size());
  m.bias_ = bias;
  m.coefficients_ = std::move(coefficients);
  return m;
}

ModelSpec ModelSpec::additive_logistic(double bias, std::vector<PiecewiseLinear> shapes) {
  if (shapes.empty()) throw std::invalid_argument("model: additive kind needs shape functions");
  for (const auto& s : shapes) s.check();
  ModelSpec m;
  m.kind_ = ModelKind::AdditiveLogistic;
  m.m_ = static_cast<int>(shapes.size());
  m.bias_ = bias;
  m.shapes_ = std::move(shapes);
  return m;
}

ModelSpec ModelSpec::opaque(int feature_count, std::function<double(const FeatureVector&)> evaluate,
                            std::function<FeatureVector(const FeatureVector&)> grad) {
  if (feature_count < 1) throw std::invalid_argument("model: feature count must be positive");
  if (!evaluate) throw std::invalid_argument("model: opaque kind needs an evaluator");
  ModelSpec m;
  m.kind_ = ModelKind::Opaque;
  m.m_ = feature_count;
  m.opaque_eval_ = std::move(evaluate);
  m.opaque_grad_ = std::move(grad);
  return m;
}

ModelSpec ModelSpec::composed(ModelSpec inner, InverseMap inverse) {
  if (!inverse.apply) throw std::invalid_argument("model: composed kind needs an inverse map");
  ModelSpec m;
  m.kind_ = ModelKind::Composed;
  m.m_ = inner.feature_count();
  m.inner_ = std::make_shared<const ModelSpec>(std::move(inner));
  m.inverse_ = std::move(inverse);
  return m;
}

const ModelSpec& ModelSpec::inner() const {
  if (!inner_) throw std::logic_error("model: not a composed model");
  return *inner_;
}

const InverseMap& ModelSpec::inverse_map() const {
  if (kind_ != ModelKind::Composed) throw std::logic_error("model: not a composed model");
  return inverse_;
}

ModelSpec ModelSpec::with_domain(std::vector<Interval> box) const {
  if (static_cast<int>(box.size()) != m_)
    throw std::invalid_argument("domain box: need one interval per feature");
  for (const auto& iv : box) {
    if (!(iv.lo < iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi))
      throw std::invalid_argument("domain box: need finite lo < hi");
  }
  ModelSpec copy = *this;
  copy.domain_ = std::move(box);
  return copy;
}

namespace {

constexpr double kMonotoneSlack = 1e-9;
constexpr int kGridPoints = 17;
constexpr int kScanContexts = 8;

FeatureVector random_point(const std::vector<Interval>& box, Rng& rng) {
  FeatureVector x(box.size());
  for (size_t i = 0; i < box.size(); ++i) x[i] = rng.uniform(box[i].lo, box[i].hi);
  return x;
}

void scan_individual(const ModelSpec& model, int feature, std::uint64_t seed) {
  const auto& box = model.domain();
  Rng rng(seed);
  for (int ctx = 0; ctx < kScanContexts; ++ctx) {
    FeatureVector x = random_point(box, rng);
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int g = 0; g < kGridPoints; ++g) {
      x[feature] = box[feature].lo +
                   (box[feature].hi - box[feature].lo) * g / double(kGridPoints - 1);
      const double fx = evaluate(model, x);
      if (g > 0 && fx < prev - kMonotoneSlack)
        throw std::invalid_argument(
            "monotonicity scan failed for feature " + std::to_string(feature + 1) +
            ": f decreases by " + std::to_string(prev - fx) + " along the grid");
      prev = fx;
    }
  }
}

void scan_strong_pair(const ModelSpec& model, int i, int j, std::uint64_t seed) {
  const auto& box = model.domain();
  Rng rng(seed);
  const double span = std::min(box[i].hi - box[i].lo, box[j].hi - box[j].lo);
  const double shifts[] = {span / 16.0, span / 8.0, span / 4.0, span / 2.0};
  for (int ctx = 0; ctx < kScanContexts; ++ctx) {
    for (double c : shifts) {
      FeatureVector x = random_point(box, rng);
      // keep both shifted coordinates inside the box
      x[i] = rng.uniform(box[i].lo, box[i].hi - c);
      x[j] = rng.uniform(box[j].lo, box[j].hi - c);
      FeatureVector strong = x, weak = x;
      strong[i] += c;
      weak[j] += c;
      if (evaluate(model, strong) < evaluate(model, weak) - kMonotoneSlack)
        throw std::invalid_argument("strong pairwise scan failed for pair (" +
                                    std::to_string(i + 1) + " over " + std::to_string(j + 1) +
                                    ")");
    }
  }
}

}  // namespace

ModelSpec ModelSpec::with_monotone_increasing(std::vector<int> indices,
                                              std::uint64_t scan_seed) const {
  if (!has_domain())
    throw std::invalid_argument("monotonicity declaration requires a domain box");
  for (int i : indices) {
    if (i < 0 || i >= m_) throw std::invalid_argument("monotone index out of range");
  }
  ModelSpec copy = *this;
  copy.monotone_increasing_ = std::move(indices);
  std::sort(copy.monotone_increasing_.begin(), copy.monotone_increasing_.end());
  for (int i : copy.monotone_increasing_) scan_individual(copy, i, scan_seed + i);
  return copy;
}

ModelSpec ModelSpec::with_strong_pairs(std::vector<std::pair<int, int>> pairs,
                                       std::uint64_t scan_seed) const {
  if (!has_domain())
    throw std::invalid_argument("strong-pair declaration requires a domain box");
  for (auto [i, j] : pairs) {
    if (i < 0 || i >= m_ || j < 0 || j >= m_ || i == j)
      throw std::invalid_argument("strong pair indices out of range");
  }
  ModelSpec copy = *this;
  copy.strong_pairs_ = std::move(pairs);
  for (auto [i, j] : copy.strong_pairs_) scan_strong_pair(copy, i, j, scan_seed + i * 31 + j);
  return copy;
}

bool ModelSpec::is_declared_monotone(int feature) const {
  return std::binary_search(monotone_increasing_.begin(), monotone_increasing_.end(), feature);
}

bool ModelSpec::is_declared_strong_pair(int i, int j) const {
  for (auto [a, b] : strong_pairs_) {
    if (a == i && b == j) return true;
  }
  return false;
}

double evaluate(const ModelSpec& model, const FeatureVector& x) {
  check_input(model, x);
  switch (model.kind_) {
    case ModelKind::Linear: {
      double z = model.bias_;
      for (int i = 0; i < model.m_; ++i) z += model.coefficients_[i] * x[i];
      return z;
    }
    case ModelKind::LogisticLinear: {
      double z = model.bias_;
      for (int i = 0; i < model.m_; ++i) z += model.coefficients_[i] * x[i];
      return sigmoid(z);
    }
    case ModelKind::AdditiveLogistic: {
      double z = model.bias_;
      for (int i = 0; i < model.m_; ++i) z += model.shapes_[i](x[i]);
      return sigmoid(z);
    }
    case ModelKind::Composed:
      return evaluate(*model.inner_, model.inverse_.apply(x));
    case ModelKind::Opaque: {
      const double v = model.opaque_eval_(x);
      if (!std::isfinite(v)) throw std::runtime_error("opaque evaluator returned non-finite value");
      return v;
    }
  }
  throw std::logic_error("unreachable model kind");
}

namespace {

FeatureVector finite_difference_gradient(const ModelSpec& model, const FeatureVector& x) {
  const double h0 = std::cbrt(std::numeric_limits<double>::epsilon());
  FeatureVector g(x.size());
  FeatureVector probe = x;
  for (size_t i = 0; i < x.size(); ++i) {
    const double h = h0 * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + h;
    const double fp = evaluate(model, probe);
    probe[i] = x[i] - h;
    const double fm = evaluate(model, probe);
    probe[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace

FeatureVector gradient(const ModelSpec& model, const FeatureVector& x) {
  check_input(model, x);
  switch (model.kind_) {
    case ModelKind::Linear:
      return model.coefficients_;
    case ModelKind::LogisticLinear: {
      double z = model.bias_;
      for (int i = 0; i < model.m_; ++i) z += model.coefficients_[i] * x[i];
      const double sp = sigmoid_prime(z);
      FeatureVector g(model.m_);
      for (int i = 0; i < model.m_; ++i) g[i] = sp * model.coefficients_[i];
      return g;
    }
    case ModelKind::AdditiveLogistic: {
      double z = model.bias_;
      for (int i = 0; i < model.m_; ++i) z += model.shapes_[i](x[i]);
      const double sp = sigmoid_prime(z);
      FeatureVector g(model.m_);
      for (int i = 0; i < model.m_; ++i) g[i] = sp * model.shapes_[i].derivative(x[i]);
      return g;
    }
    case ModelKind::Composed: {
      if (!model.inverse_.jacobian) return finite_difference_gradient(model, x);
      const FeatureVector inner_x = model.inverse_.apply(x);
      const FeatureVector inner_g = gradient(*model.inner_, inner_x);
      const auto jac = model.inverse_.jacobian(x);
      FeatureVector g(model.m_, 0.0);
      // grad g(x~) = J^T grad f(inverse(x~)), J[r][c] = d inverse_r / d x~_c
      for (int r = 0; r < model.m_; ++r) {
        for (int c = 0; c < model.m_; ++c) g[c] += jac[r][c] * inner_g[r];
      }
      return g;
    }
    case ModelKind::Opaque:
      if (model.opaque_grad_) return model.opaque_grad_(x);
      return finite_difference_gradient(model, x);
  }
  throw std::logic_error("unreachable model kind");
}

ModelSpec linear_combination(double alpha, const ModelSpec& f, double beta, const ModelSpec& g) {
  if (f.feature_count() != g.feature_count())
    throw std::invalid_argument("linear_combination: feature counts differ");
  auto fa = std::make_shared<ModelSpec>(f);
  auto gb = std::make_shared<ModelSpec>(g);
  return ModelSpec::opaque(
      f.feature_count(),
      [alpha, beta, fa, gb](const FeatureVector& x) {
        return alpha * evaluate(*fa, x) + beta * evaluate(*gb, x);
      },
      [alpha, beta, fa, gb](const FeatureVector& x) {
        FeatureVector ga = gradient(*fa, x);
        const FeatureVector gg = gradient(*gb, x);
        for (size_t i = 0; i < ga.size(); ++i) ga[i] = alpha * ga[i] + beta * gg[i];
        return ga;
      });
}

CoalitionValueCache::CoalitionValueCache(const ModelSpec& model, FeatureVector explicand,
                                         FeatureVector baseline)
    : model_(&model),
      explicand_(std::move(explicand)),
      baseline_(std::move(baseline)),
      m_(model.feature_count()) {
  check_input(model, explicand_);
  check_input(model, baseline_);
  scratch_ = baseline_;
  if (m_ <= kDenseBits) {
    dense_.assign(std::size_t{1} << m_, 0.0);
    present_.assign(std::size_t{1} << m_, false);
  }
}

double CoalitionValueCache::value(CoalitionMask coalition) {
  if (m_ < 32 && (coalition >> m_) != 0)
    throw std::invalid_argument("coalition mask references features beyond m");
  if (!dense_.empty()) {
    if (present_[coalition]) return dense_[coalition];
  } else {
    auto it = sparse_.find(coalition);
    if (it != sparse_.end()) return it->second;
  }
  for (int i = 0; i < m_; ++i)
    scratch_[i] = (coalition & (CoalitionMask{1} << i)) ? explicand_[i] : baseline_[i];
  const double v = evaluate(*model_, scratch_);
  ++evaluations_;
  if (!dense_.empty()) {
    dense_[coalition] = v;
    present_[coalition] = true;
  } else {
    sparse_.emplace(coalition, v);
  }
  return v;
}

double coalition_value(const ModelSpec& model, const FeatureVector& explicand,
                       const FeatureVector& baseline, CoalitionMask coalition,
                       CoalitionValueCache& cache) {
  if (&cache.model() != &model || cache.explicand() != explicand || cache.baseline() != baseline)
    throw std::invalid_argument("coalition_value: cache was built for a different context");
  return cache.value(coalition);
}

}  // namespace groupattr
