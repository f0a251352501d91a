#include "coercive/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <type_traits>

namespace coercive {

LossKind LossKind::smooth_hinge(int p) {
  if (p < 3) throw DomainError("smooth hinge: exponent must be at least 3");
  return {LossFamily::smooth_hinge, p};
}

std::string LossKind::name() const {
  return family == LossFamily::logistic ? "logistic" : "smooth-hinge";
}

double loss_value(const LossKind& kind, double z) {
  if (kind.family == LossFamily::logistic) {
    const double softplus = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
    return softplus / std::numbers::ln2;
  }
  const double t = std::max(1.0 + z, 0.0);
  return std::pow(t, kind.p);
}

double loss_deriv(const LossKind& kind, double z) {
  if (kind.family == LossFamily::logistic) {
    const double sig = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z))
                                : std::exp(z) / (1.0 + std::exp(z));
    return sig / std::numbers::ln2;
  }
  const double t = std::max(1.0 + z, 0.0);
  return kind.p * std::pow(t, kind.p - 1);
}

double epsilon_for(const LossKind& kind) { return loss_deriv(kind, 0.0); }

void validate_config(const ObjectiveConfig& cfg, std::size_t m, bool deep) {
  if (cfg.lambda.size() != m) {
    std::ostringstream msg;
    msg << "objective: lambda has " << cfg.lambda.size() << " entries, network has "
        << m << " neurons";
    throw ShapeError(msg.str());
  }
  for (double l : cfg.lambda)
    if (!(l > 0.0) || !std::isfinite(l))
      throw DomainError("objective: every lambda_j must be positive and finite");
  if (deep && !(cfg.lambda_c > 0.0))
    throw DomainError("objective: lambda_c must be positive for deep nets");
  if (cfg.loss.family == LossFamily::smooth_hinge && cfg.loss.p < 3)
    throw DomainError("objective: smooth hinge exponent must be at least 3");
}

template <class Net>
double regularizer_single(const Net& net, std::span<const double> lambda) {
  if (lambda.size() != net.m()) throw ShapeError("regularizer: lambda length");
  double s = 0.0;
  for (std::size_t j = 0; j < net.m(); ++j) {
    const double wn = numkit::norm2(net.w(j));
    const double rho2 = wn * wn + net.b()[j] * net.b()[j];
    const double a = std::abs(net.a()[j]);
    s += lambda[j] * (a * a * a + 2.0 * rho2 * std::sqrt(rho2));
  }
  return s / 3.0;
}

template double regularizer_single(const SingleLayerReQUNet&, std::span<const double>);
template double regularizer_single(const QuadraticNet&, std::span<const double>);
template double regularizer_single(const DeepConvNet&, std::span<const double>);

double regularizer_deep(const DeepConvNet& net, std::span<const double> lambda,
                        double lambda_c) {
  double conv = 0.0;
  for (std::size_t k = 0; k < net.filter_count(); ++k) {
    const double nv = numkit::norm2(net.v(k));
    const double t = nv * nv - 1.0;
    conv += t * t;
  }
  return regularizer_single(net, lambda) + 0.25 * lambda_c * conv;
}

namespace {

bool is_deep(const Network& net) { return std::holds_alternative<DeepConvNet>(net); }

double regularizer(const Network& net, const ObjectiveConfig& cfg) {
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, DeepConvNet>) {
          return regularizer_deep(n, cfg.lambda, cfg.lambda_c);
        } else {
          return regularizer_single(n, cfg.lambda);
        }
      },
      net);
}

void check_shapes(const Network& net, const Dataset& ds, const ObjectiveConfig& cfg) {
  if (input_dim(net) != ds.d())
    throw ShapeError("objective: network input dimension differs from dataset");
  validate_config(cfg, neuron_count(net), is_deep(net));
}

// Gradient of the regularizer, added into g.
template <class Net>
void add_head_reg_grad(const Net& net, std::span<const double> lambda, Vector& g) {
  const std::size_t m = net.m();
  if (m == 0) return;
  const std::size_t dim = net.w(0).size();
  for (std::size_t j = 0; j < m; ++j) {
    const double a = net.a()[j];
    g[j] += lambda[j] * std::abs(a) * a;
    const double wn = numkit::norm2(net.w(j));
    const double rho = std::sqrt(wn * wn + net.b()[j] * net.b()[j]);
    const double c = 2.0 * lambda[j] * rho;
    for (std::size_t t = 0; t < dim; ++t) g[m + j * dim + t] += c * net.w(j)[t];
    g[m * (dim + 1) + j] += c * net.b()[j];
  }
}

template <Activation Act>
LossAndGradient shallow_loss_grad(const ShallowNet<Act>& net, const Dataset& ds,
                                  const ObjectiveConfig& cfg) {
  using Net = ShallowNet<Act>;
  const std::size_t m = net.m();
  const std::size_t d = net.d();
  LossAndGradient out{0.0, Vector(Net::param_count(m, d), 0.0)};
  Vector& g = out.grad;
  Vector pre(m);
  double data_loss = 0.0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const auto x = ds.x(i);
    double f = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      pre[j] = net.preactivation(j, x);
      f += net.a()[j] * Net::act(pre[j]);
    }
    const double y = ds.y(i);
    data_loss += loss_value(cfg.loss, -y * f);
    const double gi = -y * loss_deriv(cfg.loss, -y * f);
    if (gi == 0.0) continue;
    for (std::size_t j = 0; j < m; ++j) {
      g[j] += gi * Net::act(pre[j]);
      const double c = gi * net.a()[j] * Net::act_deriv(pre[j]);
      if (c == 0.0) continue;
      for (std::size_t t = 0; t < d; ++t) g[m + j * d + t] += c * x[t];
      g[m * (d + 1) + j] += c;
    }
  }
  add_head_reg_grad(net, cfg.lambda, g);
  out.loss = data_loss + regularizer_single(net, cfg.lambda);
  return out;
}

LossAndGradient deep_loss_grad(const DeepConvNet& net, const Dataset& ds,
                               const ObjectiveConfig& cfg) {
  const std::size_t m = net.m();
  const std::size_t h = net.head_dim();
  const std::size_t s = net.filter_len();
  const std::size_t nf = net.filter_count();
  const std::size_t head = net.head_param_count();
  LossAndGradient out{0.0, Vector(net.params().size(), 0.0)};
  Vector& g = out.grad;
  double data_loss = 0.0;

  for (std::size_t i = 0; i < ds.n(); ++i) {
    const DeepTrace tr = trace_deep(net, ds.x(i));
    const double y = ds.y(i);
    data_loss += loss_value(cfg.loss, -y * tr.output);
    const double gi = -y * loss_deriv(cfg.loss, -y * tr.output);
    if (gi == 0.0) continue;

    const Vector& top = tr.hidden.back();
    Vector delta(h, 0.0);  // dL/dh_{l-1}
    for (std::size_t j = 0; j < m; ++j) {
      g[j] += gi * requ(tr.head_pre[j]);
      const double c = gi * net.a()[j] * requ_deriv(tr.head_pre[j]);
      if (c == 0.0) continue;
      const auto wj = net.w(j);
      for (std::size_t t = 0; t < h; ++t) {
        g[m + j * h + t] += c * top[t];
        delta[t] += c * wj[t];
      }
      g[m * (h + 1) + j] += c;
    }

    for (std::size_t kk = nf; kk-- > 0;) {
      const Vector& pre = tr.pre[kk];
      const Vector& below = tr.hidden[kk];
      for (std::size_t j = 0; j < pre.size(); ++j)
        delta[j] *= leaky_relu_deriv(pre[j], net.slope());
      // pre(j) = sum_t v(t - j + s - 1) below(t)
      const auto v = net.v(kk);
      const std::size_t gv = head + kk * s;
      Vector down(below.size(), 0.0);
      for (std::size_t j = 0; j < pre.size(); ++j) {
        if (delta[j] == 0.0) continue;
        for (std::size_t t = 0; t < below.size(); ++t) {
          const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(t + s - 1) -
                                     static_cast<std::ptrdiff_t>(j);
          if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(s)) continue;
          g[gv + static_cast<std::size_t>(idx)] += delta[j] * below[t];
          down[t] += delta[j] * v[static_cast<std::size_t>(idx)];
        }
      }
      delta = std::move(down);
    }
  }

  add_head_reg_grad(net, cfg.lambda, g);
  for (std::size_t kk = 0; kk < nf; ++kk) {
    const double nv = numkit::norm2(net.v(kk));
    const double c = cfg.lambda_c * (nv * nv - 1.0);
    for (std::size_t t = 0; t < s; ++t) g[head + kk * s + t] += c * net.v(kk)[t];
  }
  out.loss = data_loss + regularizer_deep(net, cfg.lambda, cfg.lambda_c);
  return out;
}

}  // namespace

Vector outputs(const Network& net, const Dataset& ds) {
  if (input_dim(net) != ds.d())
    throw ShapeError("outputs: network input dimension differs from dataset");
  Vector f(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) f[i] = evaluate(net, ds.x(i));
  return f;
}

double empirical_loss(const Network& net, const Dataset& ds, const ObjectiveConfig& cfg) {
  check_shapes(net, ds, cfg);
  const Vector f = outputs(net, ds);
  double s = 0.0;
  for (std::size_t i = 0; i < ds.n(); ++i) s += loss_value(cfg.loss, -ds.y(i) * f[i]);
  return s + regularizer(net, cfg);
}

double training_error(const Network& net, const Dataset& ds) {
  if (ds.empty()) throw DomainError("training_error: empty dataset");
  const Vector f = outputs(net, ds);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const int sgn = f[i] > 0.0 ? 1 : (f[i] < 0.0 ? -1 : 0);
    if (sgn != ds.y(i)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(ds.n());
}

double margin(const Network& net, const Dataset& ds) {
  const Vector f = outputs(net, ds);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ds.n(); ++i) worst = std::min(worst, ds.y(i) * f[i]);
  return worst;
}

LossAndGradient loss_and_gradient(const Network& net, const Dataset& ds,
                                  const ObjectiveConfig& cfg) {
  check_shapes(net, ds, cfg);
  return std::visit(
      [&](const auto& n) -> LossAndGradient {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, DeepConvNet>) {
          return deep_loss_grad(n, ds, cfg);
        } else {
          return shallow_loss_grad(n, ds, cfg);
        }
      },
      net);
}

Vector gradient(const Network& net, const Dataset& ds, const ObjectiveConfig& cfg) {
  return loss_and_gradient(net, ds, cfg).grad;
}

double finite_diff_check(const Network& net, const Dataset& ds,
                         const ObjectiveConfig& cfg, double step) {
  if (!(step > 0.0)) throw DomainError("finite_diff_check: step must be positive");
  const Vector g = gradient(net, ds, cfg);
  Network probe = net;
  std::span<double> theta = params(probe);
  double worst = 0.0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double saved = theta[k];
    theta[k] = saved + step;
    const double up = empirical_loss(probe, ds, cfg);
    theta[k] = saved - step;
    const double down = empirical_loss(probe, ds, cfg);
    theta[k] = saved;
    const double fd = (up - down) / (2.0 * step);
    worst = std::max(worst, std::abs(g[k] - fd) / (1.0 + std::abs(g[k])));
  }
  return worst;
}

double min_leaky_kink_distance(const Network& net, const Dataset& ds) {
  const auto* deep = std::get_if<DeepConvNet>(&net);
  double best = std::numeric_limits<double>::infinity();
  if (deep == nullptr) return best;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const DeepTrace tr = trace_deep(*deep, ds.x(i));
    for (const Vector& pre : tr.pre)
      for (double z : pre) best = std::min(best, std::abs(z));
  }
  return best;
}

double head_param_norm(const Network& net) {
  const auto theta = params(net);
  if (const auto* deep = std::get_if<DeepConvNet>(&net))
    return numkit::norm2(theta.first(deep->head_param_count()));
  return numkit::norm2(theta);
}

double coercivity_bound(const Network& net, const ObjectiveConfig& cfg) {
  const std::size_t m = neuron_count(net);
  if (m == 0) return 0.0;
  const double lmin = *std::min_element(cfg.lambda.begin(), cfg.lambda.end());
  const double r = head_param_norm(net);
  return lmin / (3.0 * std::sqrt(2.0 * static_cast<double>(m))) * r * r * r;
}

}  // namespace coercive
