#include "coercive/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "coercive/random.hpp"

namespace coercive {

Dataset::Dataset(DenseMatrix features, std::vector<int> labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (features_.rows() != labels_.size())
    throw ShapeError("Dataset: feature rows and label count differ");
  for (int y : labels_)
    if (y != 1 && y != -1) throw DomainError("Dataset: labels must be -1 or +1");
  if (!features_.all_finite()) throw DomainError("Dataset: non-finite feature");
}

Vector Dataset::augmented(std::size_t i) const {
  Vector z(x(i).begin(), x(i).end());
  z.push_back(1.0);
  return z;
}

DistinctnessReport validate_distinct(const Dataset& ds, double tol) {
  DistinctnessReport report;
  report.min_distance = std::numeric_limits<double>::infinity();
  const std::size_t d = ds.d();
  for (std::size_t i = 0; i < ds.n(); ++i) {
    for (std::size_t j = i + 1; j < ds.n(); ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < d; ++t) {
        const double diff = ds.x(i)[t] - ds.x(j)[t];
        s += diff * diff;
      }
      const double dist = std::sqrt(s);
      if (dist < report.min_distance) report.min_distance = dist;
      if (dist <= tol && report.ok) {
        report.ok = false;
        report.pair = {i, j};
      }
    }
  }
  return report;
}

namespace {

std::vector<int> repelling_labels(std::size_t n, std::size_t positives) {
  if (positives > n)
    throw DomainError("gen_mutually_repelling: more positives than samples");
  std::vector<int> y(n, -1);
  std::fill(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(positives), 1);
  return y;
}

// Rows of the returned matrix realise the given PSD Gram matrix (lower
// Cholesky factor, zero columns where the pivot vanishes).
DenseMatrix realise_gram(const DenseMatrix& gram, std::size_t dim) {
  const std::size_t n = gram.rows();
  DenseMatrix l(n, std::max(dim, n));
  for (std::size_t j = 0; j < n; ++j) {
    double diag = gram(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    const double pivot = diag > 1e-12 * gram(j, j) ? std::sqrt(diag) : 0.0;
    l(j, j) = pivot;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = gram(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = pivot > 0.0 ? s / pivot : 0.0;
    }
  }
  DenseMatrix out(n, dim);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < std::min(dim, l.cols()); ++k) out(i, k) = l(i, k);
  return out;
}

}  // namespace

Dataset gen_mutually_repelling(std::size_t n, std::size_t positives,
                               RepellingMode mode, std::size_t d) {
  if (n == 0) throw DomainError("gen_mutually_repelling: n must be positive");
  std::vector<int> labels = repelling_labels(n, positives);

  if (mode == RepellingMode::exact) {
    if (n >= 5) {
      std::ostringstream msg;
      msg << "gen_mutually_repelling: exact mode infeasible for n=" << n
          << "; with ||x_i||=2 the identity ||sum x_i||^2 >= 0 forces the "
             "average pairwise inner product to be >= -4/(n-1) = "
          << -4.0 / static_cast<double>(n - 1) << " >= -1";
      throw InfeasibleError(msg.str());
    }
    const std::size_t dim = std::max<std::size_t>({d, n - 1, 1});
    DenseMatrix gram(n, n, n > 1 ? -4.0 / static_cast<double>(n - 1) : 0.0);
    for (std::size_t i = 0; i < n; ++i) gram(i, i) = 4.0;
    return Dataset(realise_gram(gram, dim), std::move(labels));
  }

  const std::size_t dim = d == 0 ? n : d;
  if (dim < n)
    throw DomainError("gen_mutually_repelling: generalized mode needs d >= n");
  const double c = (static_cast<double>(dim) + 1.0) / 2.0 + 1.0;
  DenseMatrix x(n, dim, -1.0);
  for (std::size_t i = 0; i < n; ++i) x(i, i) += c;
  return Dataset(std::move(x), std::move(labels));
}

double Quadratic::operator()(std::span<const double> x) const {
  if (x.size() != p.size() || Q.rows() != p.size())
    throw ShapeError("Quadratic: dimension mismatch");
  const Vector qx = Q * x;
  return numkit::dot(x, qx) + numkit::dot(p, x) + c;
}

Dataset label_by_quadratic(const DenseMatrix& features, const Quadratic& q) {
  std::vector<int> labels(features.rows());
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const double v = q(features.row(i));
    if (v == 0.0) throw DomainError("label_by_quadratic: point on q = 0");
    labels[i] = v > 0.0 ? 1 : -1;
  }
  return Dataset(features, std::move(labels));
}

QuadraticDataset gen_quadratically_separable(std::size_t n, std::size_t d,
                                             std::uint64_t seed) {
  if (n == 0 || d == 0)
    throw DomainError("gen_quadratically_separable: n and d must be positive");
  Rng rng = make_rng(seed, 0x51);
  Quadratic q{DenseMatrix(d, d), gaussian_vector(rng, d), standard_normal(rng)};
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      const double v = standard_normal(rng);
      q.Q(i, j) = v;
      q.Q(j, i) = v;
    }

  DenseMatrix x(n, d);
  Vector values(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < d; ++t) x(i, t) = standard_normal(rng);
    values[i] = q(x.row(i));
  }
  constexpr int kBudget = 10000;
  for (int round = 0;; ++round) {
    double peak = 0.0;
    for (double v : values) peak = std::max(peak, std::abs(v));
    const double floor = 1e-3 * peak;
    bool redrawn = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(values[i]) >= floor && values[i] != 0.0) continue;
      redrawn = true;
      for (std::size_t t = 0; t < d; ++t) x(i, t) = standard_normal(rng);
      values[i] = q(x.row(i));
    }
    if (!redrawn) break;
    if (round == kBudget)
      throw InfeasibleError("gen_quadratically_separable: resampling budget exhausted");
  }
  Dataset ds = label_by_quadratic(x, q);
  if (!validate_distinct(ds).ok)
    throw InfeasibleError("gen_quadratically_separable: duplicate points drawn");
  return {std::move(ds), std::move(q)};
}

Dataset gen_random(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0x52);
  DenseMatrix x(n, d);
  std::vector<int> labels(n);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < d; ++t) x(i, t) = standard_normal(rng);
    labels[i] = coin(rng) ? 1 : -1;
  }
  Dataset ds(std::move(x), std::move(labels));
  if (!validate_distinct(ds).ok)
    throw InfeasibleError("gen_random: duplicate points drawn");
  return ds;
}

}  // namespace coercive
