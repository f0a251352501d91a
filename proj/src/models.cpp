#include "coercive/models.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

namespace coercive {

double leaky_relu(double z, double k) {
  if (!(k > 0.0 && k < 1.0)) throw DomainError("leaky_relu: slope must lie in (0,1)");
  return z >= 0.0 ? z : k * z;
}

double leaky_relu_deriv(double z, double k) {
  if (!(k > 0.0 && k < 1.0)) throw DomainError("leaky_relu: slope must lie in (0,1)");
  return z >= 0.0 ? 1.0 : k;
}

DeepConvNet::DeepConvNet(std::size_t d, std::size_t layers, std::size_t filter_len,
                         std::size_t m, double slope)
    : DeepConvNet(d, layers, filter_len, m, slope,
                  Vector(layers >= 1 && filter_len >= 1
                             ? param_count(d, layers, filter_len, m)
                             : 0)) {}

DeepConvNet::DeepConvNet(std::size_t d, std::size_t layers, std::size_t filter_len,
                         std::size_t m, double slope, Vector flat)
    : d_(d), l_(layers), s_(filter_len), m_(m), k_(slope), theta_(std::move(flat)) {
  if (l_ < 1) throw DomainError("DeepConvNet: need at least one layer");
  if (s_ < 1) throw DomainError("DeepConvNet: filter length must be positive");
  if (d_ < 1) throw DomainError("DeepConvNet: input dimension must be positive");
  if (!(k_ > 0.0 && k_ < 1.0))
    throw DomainError("DeepConvNet: leaky slope must lie in (0,1)");
  h_ = head_dim(d_, l_, s_);
  if (theta_.size() != param_count(d_, l_, s_, m_))
    throw ShapeError("DeepConvNet: flat parameter length does not match shape");
}

double forward_single(const SingleLayerReQUNet& net, std::span<const double> x) {
  return net(x);
}

double forward_quadratic(const QuadraticNet& net, std::span<const double> x) {
  return net(x);
}

DeepTrace trace_deep(const DeepConvNet& net, std::span<const double> x) {
  if (x.size() != net.d()) throw ShapeError("forward_deep: input dimension mismatch");
  DeepTrace t;
  t.hidden.reserve(net.layers());
  t.hidden.emplace_back(x.begin(), x.end());
  for (std::size_t k = 0; k < net.filter_count(); ++k) {
    Vector pre = numkit::conv_padded(net.v(k), t.hidden.back());
    Vector h(pre.size());
    for (std::size_t i = 0; i < pre.size(); ++i) h[i] = leaky_relu(pre[i], net.slope());
    t.pre.push_back(std::move(pre));
    t.hidden.push_back(std::move(h));
  }
  const Vector& top = t.hidden.back();
  t.head_pre.resize(net.m());
  double f = 0.0;
  for (std::size_t j = 0; j < net.m(); ++j) {
    t.head_pre[j] = numkit::dot(net.w(j), top) + net.b()[j];
    f += net.a()[j] * requ(t.head_pre[j]);
  }
  t.output = f;
  return t;
}

DeepForward forward_deep(const DeepConvNet& net, std::span<const double> x) {
  DeepTrace t = trace_deep(net, x);
  DeepForward out;
  out.output = t.output;
  out.hidden.assign(std::make_move_iterator(t.hidden.begin() + 1),
                    std::make_move_iterator(t.hidden.end()));
  return out;
}

Vector last_hidden(const DeepConvNet& net, std::span<const double> x) {
  DeepTrace t = trace_deep(net, x);
  return std::move(t.hidden.back());
}

double positive_homogeneity_check(const DeepConvNet& net, std::span<const double> x,
                                  std::span<const double> r) {
  const std::size_t l = net.layers();
  if (r.size() != l + 1)
    throw ShapeError("positive_homogeneity_check: need l+1 scale factors");
  for (double ri : r)
    if (!(ri > 0.0)) throw DomainError("positive_homogeneity_check: scales must be positive");

  DeepConvNet scaled = net;
  double prod = 1.0;
  for (std::size_t k = 0; k < net.filter_count(); ++k) {
    for (double& vi : scaled.v(k)) vi *= r[k];
    prod *= r[k];
  }
  prod *= r[l - 1];
  for (std::size_t j = 0; j < net.m(); ++j) {
    for (double& wi : scaled.w(j)) wi *= r[l - 1];
    scaled.b()[j] *= prod;
    scaled.a()[j] *= r[l];
  }
  const double f = forward_deep(net, x).output;
  const double g = forward_deep(scaled, x).output;
  return std::abs(g - prod * prod * r[l] * f) / (1.0 + std::abs(f));
}

std::span<const double> params(const Network& net) {
  return std::visit([](const auto& n) { return n.params(); }, net);
}

std::span<double> params(Network& net) {
  return std::visit([](auto& n) { return n.params(); }, net);
}

std::size_t neuron_count(const Network& net) {
  return std::visit([](const auto& n) { return n.m(); }, net);
}

std::size_t input_dim(const Network& net) {
  return std::visit([](const auto& n) { return n.d(); }, net);
}

double evaluate(const Network& net, std::span<const double> x) {
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, DeepConvNet>) {
          return forward_deep(n, x).output;
        } else {
          return n(x);
        }
      },
      net);
}

namespace {

template <class Net>
void init_head(Net& net, std::size_t dim, Rng& rng) {
  const double scale = 0.1 / std::sqrt(static_cast<double>(std::max<std::size_t>(dim, 1)));
  for (double& v : net.a()) v = scale * standard_normal(rng);
  for (std::size_t j = 0; j < net.m(); ++j)
    for (double& v : net.w(j)) v = scale * standard_normal(rng);
  for (double& v : net.b()) v = scale * standard_normal(rng);
}

}  // namespace

void init_gaussian(SingleLayerReQUNet& net, Rng& rng) { init_head(net, net.d(), rng); }
void init_gaussian(QuadraticNet& net, Rng& rng) { init_head(net, net.d(), rng); }

void init_gaussian(DeepConvNet& net, Rng& rng) {
  init_head(net, net.d(), rng);
  for (std::size_t k = 0; k < net.filter_count(); ++k) {
    const Vector u = random_unit_vector(rng, net.filter_len());
    std::copy(u.begin(), u.end(), net.v(k).begin());
  }
}

}  // namespace coercive
