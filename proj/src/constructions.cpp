#include "coercive/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "coercive/objective.hpp"
#include "coercive/random.hpp"

namespace coercive {

namespace {

double separation(const Dataset& ds, std::span<const double> w) {
  Vector proj(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) proj[i] = numkit::dot(w, ds.x(i));
  std::sort(proj.begin(), proj.end());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < proj.size(); ++i) best = std::min(best, proj[i] - proj[i - 1]);
  return best;
}

}  // namespace

Vector find_separating_direction(const Dataset& ds, std::uint64_t seed,
                                 std::size_t budget) {
  if (ds.d() == 0) throw DomainError("find_separating_direction: zero-dimensional data");
  if (budget == 0) throw DomainError("find_separating_direction: budget must be positive");
  Rng rng = make_rng(seed, 0x5e9);
  Vector best;
  double best_sep = -1.0;
  for (std::size_t c = 0; c < budget; ++c) {
    Vector w = random_unit_vector(rng, ds.d());
    const double sep = separation(ds, w);
    if (sep > best_sep) {
      best_sep = sep;
      best = std::move(w);
    }
  }
  if (!(best_sep > 0.0))
    throw InfeasibleError(
        "find_separating_direction: no candidate separates every pair; "
        "are the points distinct?");
  return best;
}

InterpolatorNet build_interpolating_requ(const Dataset& ds, std::uint64_t seed) {
  const std::size_t n = ds.n();
  const std::size_t d = ds.d();
  if (n == 0) throw DomainError("build_interpolating_requ: empty dataset");
  if (const auto check = validate_distinct(ds); !check.ok)
    throw DomainError("build_interpolating_requ: duplicate feature vectors");

  InterpolatorNet out;
  out.direction = find_separating_direction(ds, seed);
  Vector z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = numkit::dot(out.direction, ds.x(i));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return z[a] < z[b]; });

  Vector zs(n);
  std::vector<int> ys(n);
  for (std::size_t k = 0; k < n; ++k) {
    zs[k] = z[order[k]];
    ys[k] = ds.y(order[k]);
  }

  out.knots.resize(n);
  out.knots[0] = n >= 2 ? zs[0] - (zs[1] - zs[0]) : zs[0] - 1.0;
  for (std::size_t k = 1; k < n; ++k) out.knots[k] = zs[k - 1];

  Vector alpha(n);
  alpha[0] = ys[0];
  auto q = [&](std::size_t terms, double at) {
    double s = 0.0;
    for (std::size_t t = 0; t < terms; ++t) s += alpha[t] * requ(at - out.knots[t]);
    return s;
  };
  for (std::size_t k = 1; k < n; ++k) {
    const double gap = zs[k] - zs[k - 1];
    alpha[k] = 2.0 * ys[k] * (std::abs(q(k, zs[k])) + 1.0) / (gap * gap);
  }

  out.net = SingleLayerReQUNet(n, d);
  for (std::size_t k = 0; k < n; ++k) {
    out.net.a()[k] = alpha[k];
    std::copy(out.direction.begin(), out.direction.end(), out.net.w(k).begin());
    out.net.b()[k] = -out.knots[k];
  }
  out.margin = margin(Network(out.net), ds);
  if (!(out.margin > 0.0) || !std::isfinite(out.margin))
    throw InfeasibleError("build_interpolating_requ: interpolator lost its margin");
  return out;
}

double interpolator_lambda_hat(const InterpolatorNet& interp) {
  // Neuron alpha (w.x + b)_+^2 with ||w|| = 1, knot -b: rescaling
  // (a, w, b) -> (alpha/t^2, t w, t b) leaves it unchanged; the smallest
  // a^2 + t^2 (1 + b^2) over t is 3 (|alpha| (1 + b^2) / 2)^{2/3}.
  double norm2 = 0.0;
  const SingleLayerReQUNet& net = interp.net;
  for (std::size_t j = 0; j < net.m(); ++j) {
    const double wn = numkit::norm2(net.w(j));
    const double bj = net.b()[j];
    // Fold ||w|| into the coefficient so the formula sees a unit direction.
    const double alpha = std::abs(net.a()[j]) * wn * wn;
    const double knot = wn > 0.0 ? bj / wn : 0.0;
    const double g = alpha * (1.0 + knot * knot);
    norm2 += 3.0 * std::cbrt((g / 2.0) * (g / 2.0));
  }
  if (!(norm2 > 0.0)) throw InfeasibleError("interpolator_lambda_hat: empty interpolator");
  const double norm = std::sqrt(norm2);
  return interp.margin / (norm * norm * norm);
}

namespace {

const LossKind kLogistic = LossKind::logistic();

double golden_min(const auto& fn, double lo, double hi, double tol, double* argmin) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = fn(x1);
  double f2 = fn(x2);
  while (hi - lo > tol * (1.0 + std::abs(lo) + std::abs(hi))) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = fn(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = fn(x2);
    }
  }
  *argmin = f1 <= f2 ? x1 : x2;
  return std::min(f1, f2);
}

double subproblem_value(double c, double lambda, double a, double r) {
  return loss_value(kLogistic, -c * a * r * r) +
         (lambda / 3.0) * (std::abs(a) * a * a + 2.0 * r * r * r);
}

}  // namespace

std::pair<double, double> solve_neuron_subproblem(double c, double lambda) {
  if (!(c > 0.0) || !(lambda > 0.0))
    throw DomainError("solve_neuron_subproblem: c and lambda must be positive");
  // The zero point has value l(0) = 1, so any better point obeys
  // (2 lambda / 3) r^3 <= 1 and (lambda / 3) a^3 <= 1.
  const double r_max = std::cbrt(1.5 / lambda) * 1.01;
  const double a_max = std::cbrt(3.0 / lambda) * 1.01;
  auto inner = [&](double r, double* a_star) {
    return golden_min([&](double a) { return subproblem_value(c, lambda, a, r); }, 0.0,
                      a_max, 1e-13, a_star);
  };
  double r = 0.0;
  golden_min([&](double rr) {
    double a_tmp = 0.0;
    return inner(rr, &a_tmp);
  }, 0.0, r_max, 1e-12, &r);
  double a = 0.0;
  inner(r, &a);

  if (subproblem_value(c, lambda, a, r) >= subproblem_value(c, lambda, 0.0, 0.0))
    return {0.0, 0.0};

  // Newton polish on the stationarity equations.
  const double ln2 = std::log(2.0);
  for (int it = 0; it < 60; ++it) {
    const double z = -c * a * r * r;
    const double l1 = loss_deriv(kLogistic, z);
    const double sig = l1 * ln2;
    const double l2 = sig * (1.0 - sig) / ln2;
    const double ga = -c * r * r * l1 + lambda * a * a;
    const double gr = -2.0 * c * a * r * l1 + 2.0 * lambda * r * r;
    if (std::hypot(ga, gr) < 1e-15) break;
    const double haa = c * c * r * r * r * r * l2 + 2.0 * lambda * a;
    const double har = -2.0 * c * r * l1 + 2.0 * c * c * a * r * r * r * l2;
    const double hrr = -2.0 * c * a * l1 + 4.0 * c * c * a * a * r * r * l2 + 4.0 * lambda * r;
    const double det = haa * hrr - har * har;
    if (!(det > 0.0)) break;
    const double da = (hrr * ga - har * gr) / det;
    const double dr = (haa * gr - har * ga) / det;
    a -= da;
    r -= dr;
    if (std::abs(da) + std::abs(dr) < 1e-17 * (1.0 + a + r)) break;
  }
  return {a, r};
}

BadLocalMin build_bad_local_min(std::size_t n, std::size_t m,
                                std::span<const double> lambda,
                                std::optional<RepellingMode> mode) {
  if (m == 0 || m > n)
    throw DomainError("build_bad_local_min: need 1 <= m <= n");
  if (lambda.size() != m) throw ShapeError("build_bad_local_min: lambda length must be m");
  for (double l : lambda)
    if (!(l > 0.0 && l < 0.5))
      throw DomainError("build_bad_local_min: every lambda_j must lie in (0, 1/2)");

  const RepellingMode chosen = mode.value_or(n <= 4 ? RepellingMode::exact
                                                    : RepellingMode::generalized);
  BadLocalMin out;
  out.data = gen_mutually_repelling(n, m, chosen);
  out.lambda.assign(lambda.begin(), lambda.end());
  out.a.resize(m);
  out.r.resize(m);
  const std::size_t d = out.data.d();
  out.net = SingleLayerReQUNet(m, d);

  for (std::size_t j = 0; j < m; ++j) {
    const Vector zj = out.data.augmented(j);
    const double c = numkit::dot(zj, zj);
    const auto [a, r] = solve_neuron_subproblem(c, lambda[j]);
    if (!(a > 0.0 && r > 0.0)) {
      std::ostringstream msg;
      msg << "build_bad_local_min: neuron " << j
          << " subproblem returned the zero solution at lambda=" << lambda[j];
      throw InfeasibleError(msg.str());
    }
    out.a[j] = a;
    out.r[j] = r;
    const double scale = r / std::sqrt(c);
    out.net.a()[j] = a;
    for (std::size_t t = 0; t < d; ++t) out.net.w(j)[t] = scale * zj[t];
    out.net.b()[j] = scale * zj[d];
  }
  return out;
}

}  // namespace coercive
