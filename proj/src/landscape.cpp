#include "coercive/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <type_traits>

#include "coercive/parallel.hpp"
#include "coercive/random.hpp"

namespace coercive {

namespace {

// (input to the head; 1) for every sample.
std::vector<Vector> head_inputs(const Network& net, const Dataset& ds) {
  std::vector<Vector> z(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    if (const auto* deep = std::get_if<DeepConvNet>(&net)) {
      z[i] = last_hidden(*deep, ds.x(i));
    } else {
      z[i].assign(ds.x(i).begin(), ds.x(i).end());
    }
    z[i].push_back(1.0);
  }
  return z;
}

// (w_j; b_j)
template <class Net>
Vector neuron_u(const Net& net, std::size_t j) {
  Vector u(net.w(j).begin(), net.w(j).end());
  u.push_back(net.b()[j]);
  return u;
}

Vector head_u(const Network& net, std::size_t j) {
  return std::visit([&](const auto& n) { return neuron_u(n, j); }, net);
}

double head_a(const Network& net, std::size_t j) {
  return std::visit([&](const auto& n) { return n.a()[j]; }, net);
}

int sgn(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::certified: return "certified";
    case Verdict::escape_recommended: return "escape-recommended";
    case Verdict::underparameterized: return "underparameterized";
    case Verdict::bad_lambda_suspect: return "bad-lambda-suspect";
    case Verdict::inconsistent: return "inconsistent";
  }
  return "unknown";
}

std::string to_string(DeepCase c) {
  switch (c) {
    case DeepCase::case1_zero_filter: return "case1";
    case DeepCase::case2_unit_filters: return "case2";
    case DeepCase::case3_active_head: return "case3";
    case DeepCase::unclassified: return "unclassified";
  }
  return "unknown";
}

std::vector<DenseMatrix> build_M_matrices(const Network& net, const Dataset& ds,
                                          const ObjectiveConfig& cfg) {
  const std::size_t m = neuron_count(net);
  validate_config(cfg, m, std::holds_alternative<DeepConvNet>(net));
  const bool indicator = !std::holds_alternative<QuadraticNet>(net);
  const std::vector<Vector> z = head_inputs(net, ds);
  const Vector f = outputs(net, ds);
  const std::size_t dim = z.empty() ? head_u(net, 0).size() : z[0].size();

  std::vector<DenseMatrix> out;
  out.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    DenseMatrix M = DenseMatrix::identity(dim) * cfg.lambda[j];
    const int s = sgn(head_a(net, j));
    if (s != 0) {
      const Vector u = head_u(net, j);
      for (std::size_t i = 0; i < ds.n(); ++i) {
        if (indicator && numkit::dot(u, z[i]) < 0.0) continue;
        const double lp = loss_deriv(cfg.loss, -ds.y(i) * f[i]);
        numkit::add_scaled_outer(M, -s * lp * ds.y(i), z[i]);
      }
    }
    out.push_back(std::move(M));
  }
  return out;
}

std::vector<std::size_t> inactive_neurons(const Network& net, double tol) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < neuron_count(net); ++j) {
    Vector u = head_u(net, j);
    bool small = std::abs(head_a(net, j)) < tol && std::abs(u.back()) < tol;
    u.pop_back();
    small = small && numkit::norm2(u) < tol;
    if (small) out.push_back(j);
  }
  return out;
}

CertificateReport certify(const Network& net, const Dataset& ds,
                          const ObjectiveConfig& cfg, const CertifyOptions& opts) {
  if (ds.empty()) throw DomainError("certify: empty dataset");
  const LossAndGradient lg = loss_and_gradient(net, ds, cfg);
  CertificateReport r;
  r.loss = lg.loss;
  r.grad_norm = numkit::norm2(lg.grad);
  r.grad_tol = opts.grad_tol_abs + opts.grad_tol_rel * std::abs(lg.loss);
  if (!(r.grad_norm < r.grad_tol)) {
    throw NotCriticalError("certify: gradient norm " + std::to_string(r.grad_norm) +
                               " is not below the criticality tolerance " +
                               std::to_string(r.grad_tol),
                           r.grad_norm);
  }

  const std::size_t m = neuron_count(net);
  const std::vector<DenseMatrix> M = build_M_matrices(net, ds, cfg);
  r.balance_residual.resize(m);
  r.sigma_min.resize(m);
  r.singular_tol.resize(m);
  r.stationarity_residual.resize(m);
  bool any_nonsingular = false;
  for (std::size_t j = 0; j < m; ++j) {
    const Vector u = head_u(net, j);
    r.balance_residual[j] = std::abs(head_a(net, j)) - numkit::norm2(u);
    r.sigma_min[j] = numkit::min_singular_value(M[j]);
    r.singular_tol[j] = opts.singular_rel * cfg.lambda[j];
    r.stationarity_residual[j] = numkit::norm2(M[j] * u);
    any_nonsingular = any_nonsingular || r.sigma_min[j] > r.singular_tol[j];
  }
  r.inactive = inactive_neurons(net, opts.inactive_tol);

  const Vector f = outputs(net, ds);
  r.margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ds.n(); ++i) {
    r.margin = std::min(r.margin, ds.y(i) * f[i]);
    r.max_loss_deriv = std::max(r.max_loss_deriv, loss_deriv(cfg.loss, -ds.y(i) * f[i]));
  }
  r.training_error = training_error(net, ds);
  r.epsilon = epsilon_for(cfg.loss);

  r.lemma1_ok = !any_nonsingular || !r.inactive.empty();
  r.step2_ok = r.inactive.empty() || !(r.max_loss_deriv < r.epsilon) ||
               r.training_error == 0.0;

  if (!r.lemma1_ok || !r.step2_ok) {
    r.verdict = Verdict::inconsistent;
  } else if (r.training_error == 0.0) {
    r.verdict = Verdict::certified;
  } else if (!r.inactive.empty()) {
    r.verdict = Verdict::escape_recommended;
  } else {
    r.verdict = m <= ds.n() ? Verdict::underparameterized : Verdict::bad_lambda_suspect;
  }
  return r;
}

PerturbationProbe perturbation_probe(const Network& net, const Dataset& ds,
                                     const ObjectiveConfig& cfg, std::size_t j,
                                     std::size_t samples, std::uint64_t seed,
                                     double inactive_tol) {
  if (j >= neuron_count(net)) throw DomainError("perturbation_probe: neuron index out of range");
  const auto inactive = inactive_neurons(net, inactive_tol);
  if (std::find(inactive.begin(), inactive.end(), j) == inactive.end())
    throw DomainError("perturbation_probe: neuron " + std::to_string(j) + " is not inactive");
  validate_config(cfg, neuron_count(net), std::holds_alternative<DeepConvNet>(net));

  const std::vector<Vector> z = head_inputs(net, ds);
  const Vector f = outputs(net, ds);
  Vector weight(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i)
    weight[i] = -ds.y(i) * loss_deriv(cfg.loss, -ds.y(i) * f[i]);

  PerturbationProbe out;
  out.lambda_j = cfg.lambda[j];
  const std::size_t dim = head_u(net, j).size();
  Rng rng = make_rng(seed, 0x9b0 + j);
  for (std::size_t s = 0; s < samples; ++s) {
    Vector dir = random_unit_vector(rng, dim);
    double sum = 0.0;
    for (std::size_t i = 0; i < ds.n(); ++i) sum += weight[i] * requ(numkit::dot(dir, z[i]));
    if (std::abs(sum) > out.sup_estimate || out.direction.empty()) {
      out.sup_estimate = std::abs(sum);
      out.direction = std::move(dir);
    }
  }
  out.descent_found = out.sup_estimate >= out.lambda_j;
  return out;
}

Vector lemma2_sigmas(const Dataset& ds, std::span<const double> z, const DenseMatrix& A,
                     std::span<const double> lambda) {
  const std::size_t n = ds.n();
  const std::size_t m = A.cols();
  if (z.size() != n || A.rows() != n || lambda.size() != m)
    throw ShapeError("lemma2_sigmas: inconsistent shapes");
  std::vector<Vector> zi(n);
  for (std::size_t i = 0; i < n; ++i) zi[i] = ds.augmented(i);
  Vector out(m);
  for (std::size_t j = 0; j < m; ++j) {
    DenseMatrix M = DenseMatrix::identity(ds.d() + 1) * lambda[j];
    for (std::size_t i = 0; i < n; ++i)
      if (A(i, j) != 0.0) numkit::add_scaled_outer(M, -z[i] * A(i, j), zi[i]);
    out[j] = numkit::min_singular_value(M);
  }
  return out;
}

Lemma2Result lemma2_monte_carlo(const Dataset& ds, std::size_t m,
                                std::span<const double> lambda, std::size_t trials,
                                std::uint64_t seed, Lemma2Mode mode) {
  const std::size_t n = ds.n();
  if (lambda.size() != m) throw ShapeError("lemma2_monte_carlo: lambda length must be m");
  if (n == 0) throw DomainError("lemma2_monte_carlo: empty dataset");
  Lemma2Result res;
  res.trials = trials;
  res.hypothesis_violated = m <= n;
  if (res.hypothesis_violated)
    res.warning = "m <= n: the m >= n+1 hypothesis does not hold, all-singular "
                  "configurations may exist";

  std::vector<Vector> zi(n);
  for (std::size_t i = 0; i < n; ++i) zi[i] = ds.augmented(i);

  Vector best(trials);
  std::vector<char> all_singular(trials, 0);
  parallel_for(trials, [&](std::size_t t) {
    Rng rng = make_rng(seed, t);
    Vector z(n);
    DenseMatrix A(n, m);
    if (mode == Lemma2Mode::random) {
      std::cauchy_distribution<double> cauchy(0.0, 1.0);
      std::uniform_int_distribution<int> tern(-1, 1);
      std::bernoulli_distribution heavy(0.5);
      for (double& v : z) v = heavy(rng) ? cauchy(rng) : standard_normal(rng);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) A(i, j) = tern(rng);
    } else {
      for (std::size_t i = 0; i < n; ++i)
        z[i] = i < m ? lambda[i] / numkit::dot(zi[i], zi[i]) : 0.0;
      for (std::size_t j = 0; j < m; ++j) A(j % n, j) = 1.0;
    }
    double worst = 0.0;
    bool singular = true;
    for (std::size_t j = 0; j < m; ++j) {
      DenseMatrix M = DenseMatrix::identity(ds.d() + 1) * lambda[j];
      for (std::size_t i = 0; i < n; ++i)
        if (A(i, j) != 0.0) numkit::add_scaled_outer(M, -z[i] * A(i, j), zi[i]);
      const double s = numkit::min_singular_value(M);
      worst = std::max(worst, s);
      if (s > numkit::nonsingularity_threshold(M)) singular = false;
    }
    best[t] = worst;
    all_singular[t] = singular ? 1 : 0;
  });
  res.min_max_sigma = trials == 0 ? 0.0 : *std::min_element(best.begin(), best.end());
  res.all_singular_trials =
      static_cast<std::size_t>(std::count(all_singular.begin(), all_singular.end(), 1));
  return res;
}

double overdetermined_no_solution(const DenseMatrix& A, std::span<const double> lambda) {
  if (lambda.size() != A.cols())
    throw ShapeError("overdetermined_no_solution: lambda length must equal columns of A");
  return numkit::least_squares_residual(A.transpose(), lambda);
}

OverdeterminedSweep overdetermined_sweep(std::size_t n, std::size_t m, std::size_t trials,
                                         std::uint64_t seed) {
  if (m < n + 1) throw DomainError("overdetermined_sweep: need m >= n+1");
  Vector res(trials);
  parallel_for(trials, [&](std::size_t t) {
    Rng rng = make_rng(seed, t);
    std::uniform_int_distribution<int> tern(-1, 1);
    DenseMatrix A(n, m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) A(i, j) = tern(rng);
    Vector lambda(m);
    for (double& l : lambda) l = uniform(rng, 0.0, 1.0);
    res[t] = overdetermined_no_solution(A, lambda);
  });
  OverdeterminedSweep out;
  out.trials = trials;
  out.min_residual = trials == 0 ? 0.0 : *std::min_element(res.begin(), res.end());
  return out;
}

DeepBalanceReport deep_balance_check(const DeepConvNet& net, const ObjectiveConfig& cfg,
                                     double tol, double band) {
  validate_config(cfg, net.m(), true);
  DeepBalanceReport r;
  double a_norm2 = 0.0;
  double w_norm2 = 0.0;
  for (std::size_t j = 0; j < net.m(); ++j) {
    const double a = std::abs(net.a()[j]);
    const double wn = numkit::norm2(net.w(j));
    const double rho = std::hypot(wn, net.b()[j]);
    r.sum_a3 += cfg.lambda[j] * a * a * a;
    r.sum_rho3 += cfg.lambda[j] * rho * rho * rho;
    r.head_term += 2.0 * cfg.lambda[j] * rho * wn * wn;
    a_norm2 += a * a;
    w_norm2 += wn * wn;
  }
  r.balance_residual = std::abs(r.sum_a3 - r.sum_rho3);
  r.max_residual = r.balance_residual;
  for (std::size_t k = 0; k < net.filter_count(); ++k) {
    const double nv = numkit::norm2(net.v(k));
    r.filter_norms.push_back(nv);
    const double term = cfg.lambda_c * (nv * nv - 1.0) * nv * nv;
    r.filter_term.push_back(term);
    r.filter_residual.push_back(std::abs(term - r.head_term));
    r.max_residual = std::max(r.max_residual, r.filter_residual.back());
  }
  r.ok = r.max_residual < tol;

  const bool head_zero = std::sqrt(a_norm2) <= band && std::sqrt(w_norm2) <= band;
  const auto& norms = r.filter_norms;
  if (head_zero) {
    if (std::any_of(norms.begin(), norms.end(), [&](double v) { return v <= band; })) {
      r.classification = DeepCase::case1_zero_filter;
    } else if (std::all_of(norms.begin(), norms.end(),
                           [&](double v) { return std::abs(v - 1.0) <= band; })) {
      r.classification = DeepCase::case2_unit_filters;
    }
  } else if (!norms.empty()) {
    const auto [lo, hi] = std::minmax_element(norms.begin(), norms.end());
    if (*lo - 1.0 > band && *hi - *lo <= band) r.classification = DeepCase::case3_active_head;
  }
  return r;
}

InjectivityReport hidden_injectivity_check(const DeepConvNet& net, const Dataset& ds,
                                           double tol) {
  for (std::size_t k = 0; k < net.filter_count(); ++k)
    if (numkit::norm2(net.v(k)) <= tol)
      throw DomainError("hidden_injectivity_check: filter " + std::to_string(k + 1) +
                        " is zero, injectivity is not guaranteed");
  std::vector<Vector> h(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) h[i] = last_hidden(net, ds.x(i));
  InjectivityReport r;
  r.min_distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ds.n(); ++i)
    for (std::size_t j = i + 1; j < ds.n(); ++j) {
      Vector diff(h[i].size());
      for (std::size_t t = 0; t < diff.size(); ++t) diff[t] = h[i][t] - h[j][t];
      const double dist = numkit::norm2(diff);
      r.min_distance = std::min(r.min_distance, dist);
      if (dist <= tol && r.ok) {
        r.ok = false;
        r.pair = {i, j};
      }
    }
  return r;
}

}  // namespace coercive
