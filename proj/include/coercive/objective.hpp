#pragma once

#include <span>
#include <string>

#include "coercive/datasets.hpp"
#include "coercive/models.hpp"

namespace coercive {

enum class LossFamily { logistic, smooth_hinge };

struct LossKind {
  LossFamily family = LossFamily::logistic;
  int p = 3;  // smooth-hinge exponent, >= 3

  static LossKind logistic() { return {LossFamily::logistic, 3}; }
  static LossKind smooth_hinge(int p);
  std::string name() const;
};

// logistic: log2(1 + e^z); smooth hinge: max(1+z, 0)^p.
double loss_value(const LossKind& kind, double z);
double loss_deriv(const LossKind& kind, double z);
// l'(0): the largest eps with l'(z) < eps  =>  z < 0.
double epsilon_for(const LossKind& kind);

struct ObjectiveConfig {
  LossKind loss;
  Vector lambda;            // one coefficient per neuron, all > 0
  double lambda_c = 1.0;    // filter-norm penalty, deep nets only
  double leaky_slope = 0.1; // used when building deep nets from a config
};

// Throws DomainError / ShapeError when cfg does not fit a network with m
// neurons (lambda length, positivity, lambda_c > 0 for deep nets).
void validate_config(const ObjectiveConfig& cfg, std::size_t m, bool deep);

// (1/3) sum_j lambda_j (|a_j|^3 + 2 (||w_j||^2 + b_j^2)^{3/2})
template <class Net>
double regularizer_single(const Net& net, std::span<const double> lambda);
// Head term plus (lambda_c / 4) sum_k (||v_k||^2 - 1)^2.
double regularizer_deep(const DeepConvNet& net, std::span<const double> lambda,
                        double lambda_c);

// f(x_i) for every sample.
Vector outputs(const Network& net, const Dataset& ds);

double empirical_loss(const Network& net, const Dataset& ds, const ObjectiveConfig& cfg);
// Fraction of samples with y_i != sgn(f(x_i)), sgn(0) = 0.
double training_error(const Network& net, const Dataset& ds);
// min_i y_i f(x_i); +inf for an empty dataset.
double margin(const Network& net, const Dataset& ds);

// Analytic gradient with the same layout as params(net).
Vector gradient(const Network& net, const Dataset& ds, const ObjectiveConfig& cfg);

struct LossAndGradient {
  double loss = 0.0;
  Vector grad;
};
LossAndGradient loss_and_gradient(const Network& net, const Dataset& ds,
                                  const ObjectiveConfig& cfg);

// max_k |g_k - fd_k| / (1 + |g_k|) with central differences of width 2*step.
double finite_diff_check(const Network& net, const Dataset& ds,
                         const ObjectiveConfig& cfg, double step = 1e-6);

// Smallest |pre-activation| over all leaky-ReLU inputs on the dataset; +inf
// for l = 1 or shallow nets. Finite differences are reliable when this
// exceeds the step.
double min_leaky_kink_distance(const Network& net, const Dataset& ds);

// Parameters of (a, W, b) only; the whole vector for shallow nets.
double head_param_norm(const Network& net);
// (lambda_min / (3 sqrt(2m))) * ||head||^3, a lower bound on the loss.
double coercivity_bound(const Network& net, const ObjectiveConfig& cfg);

}  // namespace coercive
