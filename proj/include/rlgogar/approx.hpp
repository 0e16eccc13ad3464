#pragma once

#include <functional>
#include <vector>

#include "rlgogar/linalg.hpp"

namespace rlgogar {

// State feature encoder: a fixed dimension plus a deterministic, total
// encode(state). The one-hot map keeps linear-in-features exact on tabular
// MDPs; from_function is the seam for custom encodings.
class FeatureMap {
 public:
  static FeatureMap one_hot(int n_states);
  static FeatureMap from_function(int dim, std::function<std::vector<double>(int)> encode);

  int dim() const { return dim_; }
  std::vector<double> encode(int s) const { return encode_(s); }

 private:
  FeatureMap(int dim, std::function<std::vector<double>(int)> encode);
  int dim_;
  std::function<std::vector<double>(int)> encode_;
};

// v(s, w) = dot(w, encode(s)).
struct LinearValueFn {
  std::vector<double> w;

  LinearValueFn() = default;
  explicit LinearValueFn(int dim) : w(dim, 0.0) {}
  explicit LinearValueFn(std::vector<double> weights) : w(std::move(weights)) {}
  int dim() const { return static_cast<int>(w.size()); }
};

// pi(a | s, theta) = softmax over per-action scores dot(theta[a], encode(s)).
struct SoftmaxPolicy {
  Matrix theta;  // n_actions x dim

  SoftmaxPolicy() = default;
  SoftmaxPolicy(int n_actions, int dim) : theta(n_actions, dim, 0.0) {}
  explicit SoftmaxPolicy(Matrix t) : theta(std::move(t)) {}
  int n_actions() const { return theta.rows; }
  int dim() const { return theta.cols; }
};

double value(const LinearValueFn& v, const FeatureMap& fm, int s);

// Softmax with max-subtraction; output is non-negative and sums to 1 +/- 1e-12
// for any finite theta.
std::vector<double> policy_probs(const SoftmaxPolicy& p, const FeatureMap& fm, int s);

// Gradient of log pi(a|s,theta): row b is (1[b==a] - pi(b|s)) * encode(s).
Matrix log_policy_grad(const SoftmaxPolicy& p, const FeatureMap& fm, int s, int a);

// Gradient of the linear value form: encode(s), independent of w.
std::vector<double> value_grad(const LinearValueFn& v, const FeatureMap& fm, int s);

// Central-difference gradient checker. Returns the worst per-coordinate
// relative discrepancy, with denominator max(|analytic|, |numeric|, 1e-8).
double finite_diff_check(const std::function<double(const std::vector<double>&)>& f,
                         const std::vector<double>& grad, const std::vector<double>& x, double h);

// theta <-> flat vector helpers for gradient checking.
std::vector<double> flatten(const Matrix& m);
Matrix unflatten(const std::vector<double>& v, int rows, int cols);

}  // namespace rlgogar
