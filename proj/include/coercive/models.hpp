#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "coercive/numkit.hpp"
#include "coercive/random.hpp"

namespace coercive {

using numkit::Vector;

inline double requ(double z) { return z > 0.0 ? z * z : 0.0; }
inline double requ_deriv(double z) { return z > 0.0 ? 2.0 * z : 0.0; }
// Throws DomainError unless 0 < k < 1.
double leaky_relu(double z, double k);
// Derivative 1 on z >= 0 and k on z < 0.
double leaky_relu_deriv(double z, double k);

enum class Activation { requ, square };

// f(x) = sum_j a_j act(w_j . x + b_j). Parameters live in one flat vector:
//   [a_1..a_m | w_1 (d entries) .. w_m | b_1..b_m]
template <Activation Act>
class ShallowNet {
 public:
  static constexpr Activation activation = Act;

  ShallowNet(std::size_t m, std::size_t d) : m_(m), d_(d), theta_(param_count(m, d)) {}
  ShallowNet(std::size_t m, std::size_t d, Vector flat);

  static constexpr std::size_t param_count(std::size_t m, std::size_t d) {
    return m * (d + 2);
  }

  std::size_t m() const { return m_; }
  std::size_t d() const { return d_; }

  std::span<double> a() { return {theta_.data(), m_}; }
  std::span<const double> a() const { return {theta_.data(), m_}; }
  std::span<double> w(std::size_t j) { return {theta_.data() + m_ + j * d_, d_}; }
  std::span<const double> w(std::size_t j) const {
    return {theta_.data() + m_ + j * d_, d_};
  }
  std::span<double> b() { return {theta_.data() + m_ * (d_ + 1), m_}; }
  std::span<const double> b() const { return {theta_.data() + m_ * (d_ + 1), m_}; }

  std::span<double> params() { return theta_; }
  std::span<const double> params() const { return theta_; }

  static double act(double z) { return Act == Activation::requ ? requ(z) : z * z; }
  static double act_deriv(double z) {
    return Act == Activation::requ ? requ_deriv(z) : 2.0 * z;
  }

  double preactivation(std::size_t j, std::span<const double> x) const;
  double operator()(std::span<const double> x) const;

 private:
  std::size_t m_;
  std::size_t d_;
  Vector theta_;
};

using SingleLayerReQUNet = ShallowNet<Activation::requ>;
using QuadraticNet = ShallowNet<Activation::square>;

// h0 = x, h_k = leaky(v_k * h_{k-1}) for k = 1..l-1 (padded convolution),
// f = sum_j a_j requ(w_j . h_{l-1} + b_j). The head sees dimension
// h = d + (l-1)(s-1). Flat layout:
//   [a (m) | w_1..w_m (h entries each) | b (m) | v_1..v_{l-1} (s each)]
class DeepConvNet {
 public:
  DeepConvNet(std::size_t d, std::size_t layers, std::size_t filter_len,
              std::size_t m, double slope);
  DeepConvNet(std::size_t d, std::size_t layers, std::size_t filter_len,
              std::size_t m, double slope, Vector flat);

  static std::size_t head_dim(std::size_t d, std::size_t layers, std::size_t s) {
    return d + (layers - 1) * (s - 1);
  }
  static std::size_t param_count(std::size_t d, std::size_t layers,
                                 std::size_t s, std::size_t m) {
    return m * (head_dim(d, layers, s) + 2) + (layers - 1) * s;
  }

  std::size_t d() const { return d_; }
  std::size_t layers() const { return l_; }
  std::size_t filter_len() const { return s_; }
  std::size_t m() const { return m_; }
  std::size_t head_dim() const { return h_; }
  double slope() const { return k_; }
  std::size_t filter_count() const { return l_ - 1; }

  std::span<double> a() { return {theta_.data(), m_}; }
  std::span<const double> a() const { return {theta_.data(), m_}; }
  std::span<double> w(std::size_t j) { return {theta_.data() + m_ + j * h_, h_}; }
  std::span<const double> w(std::size_t j) const {
    return {theta_.data() + m_ + j * h_, h_};
  }
  std::span<double> b() { return {theta_.data() + m_ * (h_ + 1), m_}; }
  std::span<const double> b() const { return {theta_.data() + m_ * (h_ + 1), m_}; }
  // Filters are 0-based here: v(0) is the first conv layer.
  std::span<double> v(std::size_t k) { return {theta_.data() + filter_offset(k), s_}; }
  std::span<const double> v(std::size_t k) const {
    return {theta_.data() + filter_offset(k), s_};
  }
  // Number of head parameters (a, W, b), a prefix of params().
  std::size_t head_param_count() const { return m_ * (h_ + 2); }

  std::span<double> params() { return theta_; }
  std::span<const double> params() const { return theta_; }

 private:
  std::size_t filter_offset(std::size_t k) const { return m_ * (h_ + 2) + k * s_; }

  std::size_t d_, l_, s_, m_, h_;
  double k_;
  Vector theta_;
};

using Network = std::variant<SingleLayerReQUNet, QuadraticNet, DeepConvNet>;

double forward_single(const SingleLayerReQUNet& net, std::span<const double> x);
double forward_quadratic(const QuadraticNet& net, std::span<const double> x);

struct DeepForward {
  double output = 0.0;
  std::vector<Vector> hidden;  // h_1 .. h_{l-1}
};

// Full trace used by backpropagation: hidden[0] = x, hidden[k] = h_k, and
// pre[k-1] = v_k * h_{k-1} before the leaky activation.
struct DeepTrace {
  std::vector<Vector> hidden;
  std::vector<Vector> pre;
  Vector head_pre;  // w_j . h_{l-1} + b_j
  double output = 0.0;
};

DeepTrace trace_deep(const DeepConvNet& net, std::span<const double> x);
DeepForward forward_deep(const DeepConvNet& net, std::span<const double> x);
// h_{l-1}(x); x itself when l = 1.
Vector last_hidden(const DeepConvNet& net, std::span<const double> x);

// Scales v_k by r_k (k < l), W by r_l, b by r_1...r_l and a by r_{l+1}, then
// returns |f(x; scaled) - (r_1...r_l)^2 r_{l+1} f(x)| / (1 + |f(x)|).
double positive_homogeneity_check(const DeepConvNet& net, std::span<const double> x,
                                  std::span<const double> r);

// Network-agnostic helpers.
std::span<const double> params(const Network& net);
std::span<double> params(Network& net);
std::size_t neuron_count(const Network& net);
std::size_t input_dim(const Network& net);
double evaluate(const Network& net, std::span<const double> x);

// Head weights ~ N(0, (0.1/sqrt(d))^2); filters uniform on the unit sphere.
void init_gaussian(SingleLayerReQUNet& net, Rng& rng);
void init_gaussian(QuadraticNet& net, Rng& rng);
void init_gaussian(DeepConvNet& net, Rng& rng);

// ---------------------------------------------------------------------------

template <Activation Act>
ShallowNet<Act>::ShallowNet(std::size_t m, std::size_t d, Vector flat)
    : m_(m), d_(d), theta_(std::move(flat)) {
  if (theta_.size() != param_count(m, d))
    throw ShapeError("ShallowNet: flat parameter length does not match shape");
}

template <Activation Act>
double ShallowNet<Act>::preactivation(std::size_t j, std::span<const double> x) const {
  return numkit::dot(w(j), x) + b()[j];
}

template <Activation Act>
double ShallowNet<Act>::operator()(std::span<const double> x) const {
  if (x.size() != d_) throw ShapeError("ShallowNet: input dimension mismatch");
  double f = 0.0;
  for (std::size_t j = 0; j < m_; ++j) f += a()[j] * act(preactivation(j, x));
  return f;
}

}  // namespace coercive
