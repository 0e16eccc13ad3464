#include "rlgogar/approx.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace rlgogar {

FeatureMap::FeatureMap(int dim, std::function<std::vector<double>(int)> encode)
    : dim_(dim), encode_(std::move(encode)) {
  if (dim_ <= 0) throw std::invalid_argument("[approx] feature dimension must be positive");
}

FeatureMap FeatureMap::one_hot(int n_states) {
  return FeatureMap(n_states, [n_states](int s) {
    if (s < 0 || s >= n_states) throw std::out_of_range("[approx] state index out of range");
    std::vector<double> f(n_states, 0.0);
    f[s] = 1.0;
    return f;
  });
}

FeatureMap FeatureMap::from_function(int dim, std::function<std::vector<double>(int)> encode) {
  return FeatureMap(dim, std::move(encode));
}

double value(const LinearValueFn& v, const FeatureMap& fm, int s) {
  const auto f = fm.encode(s);
  return dot(v.w, f);
}

std::vector<double> policy_probs(const SoftmaxPolicy& p, const FeatureMap& fm, int s) {
  const auto f = fm.encode(s);
  const int n = p.n_actions();
  std::vector<double> scores(n);
  for (int a = 0; a < n; ++a) scores[a] = dot(p.theta.row_span(a), f);
  const double m = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (int a = 0; a < n; ++a) {
    scores[a] = std::exp(scores[a] - m);
    sum += scores[a];
  }
  for (int a = 0; a < n; ++a) scores[a] /= sum;
  return scores;
}

Matrix log_policy_grad(const SoftmaxPolicy& p, const FeatureMap& fm, int s, int a) {
  if (a < 0 || a >= p.n_actions()) throw std::out_of_range("[approx] action index out of range");
  const auto f = fm.encode(s);
  const auto probs = policy_probs(p, fm, s);
  Matrix g(p.n_actions(), p.dim());
  for (int b = 0; b < p.n_actions(); ++b) {
    const double coeff = (b == a ? 1.0 : 0.0) - probs[b];
    for (int j = 0; j < p.dim(); ++j) g.at(b, j) = coeff * f[j];
  }
  return g;
}

std::vector<double> value_grad(const LinearValueFn& v, const FeatureMap& fm, int s) {
  if (v.dim() != fm.dim()) throw std::invalid_argument("[approx] value/feature dim mismatch");
  return fm.encode(s);
}

double finite_diff_check(const std::function<double(const std::vector<double>&)>& f,
                         const std::vector<double>& grad, const std::vector<double>& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("[approx] finite-difference h must be > 0");
  if (grad.size() != x.size())
    throw std::invalid_argument("[approx] gradient/point size mismatch");
  double worst = 0.0;
  std::vector<double> probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double fp = f(probe);
    probe[i] = x[i] - h;
    const double fm_ = f(probe);
    probe[i] = x[i];
    if (!std::isfinite(fp) || !std::isfinite(fm_))
      throw std::runtime_error("[approx] non-finite function evaluation in gradient check");
    const double numeric = (fp - fm_) / (2.0 * h);
    const double denom = std::max({std::fabs(grad[i]), std::fabs(numeric), 1e-8});
    worst = std::max(worst, std::fabs(numeric - grad[i]) / denom);
  }
  return worst;
}

std::vector<double> flatten(const Matrix& m) { return m.data; }

Matrix unflatten(const std::vector<double>& v, int rows, int cols) {
  if (static_cast<int>(v.size()) != rows * cols)
    throw std::invalid_argument("[approx] unflatten size mismatch");
  Matrix m(rows, cols);
  m.data = v;
  return m;
}

}  // namespace rlgogar
