#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "coercive/numkit.hpp"

namespace coercive {

using numkit::DenseMatrix;
using numkit::Vector;

// n labelled points x_i in R^d with y_i in {-1, +1}. Features are stored as
// the rows of an n x d matrix.
class Dataset {
 public:
  explicit Dataset(std::size_t d = 0) : features_(0, d) {}
  Dataset(DenseMatrix features, std::vector<int> labels);

  std::size_t n() const { return labels_.size(); }
  std::size_t d() const { return features_.cols(); }
  bool empty() const { return labels_.empty(); }

  std::span<const double> x(std::size_t i) const { return features_.row(i); }
  int y(std::size_t i) const { return labels_[i]; }
  // (x_i; 1)
  Vector augmented(std::size_t i) const;

  const DenseMatrix& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }

 private:
  DenseMatrix features_;
  std::vector<int> labels_;
};

struct DistinctnessReport {
  bool ok = true;
  // 0-based indices of the first offending pair, i < j.
  std::optional<std::pair<std::size_t, std::size_t>> pair;
  double min_distance = 0.0;  // +inf for n < 2
};

// Fails iff some ||x_i - x_j|| <= tol with i != j.
DistinctnessReport validate_distinct(const Dataset& ds, double tol = 1e-12);

enum class RepellingMode { exact, generalized };

// Points whose augmented vectors (x_i; 1) have pairwise negative inner
// products; the first `positives` samples get label +1, the rest -1.
//   exact:       ||x_i|| = 2 and x_i . x_j = -4/(n-1) < -1 (regular simplex);
//                only possible for n <= 4. Dimension max(d, n-1, 1).
//   generalized: x_i = c e_i - 1 in R^d with d >= n and c = (d+1)/2 + 1,
//                so (x_i;1).(x_j;1) = -2. d = 0 picks d = n.
Dataset gen_mutually_repelling(std::size_t n, std::size_t positives,
                               RepellingMode mode, std::size_t d = 0);

struct Quadratic {
  DenseMatrix Q;  // symmetric d x d
  Vector p;
  double c = 0.0;
  double operator()(std::span<const double> x) const;
};

struct QuadraticDataset {
  Dataset data;
  Quadratic q;
};

// Labels each row of `features` by sign(q(x)); throws DomainError if some
// q(x_i) == 0.
Dataset label_by_quadratic(const DenseMatrix& features, const Quadratic& q);

// Random quadratic q and Gaussian sample labelled by sign(q), with every
// |q(x_i)| >= 1e-3 * max_i |q(x_i)| (offending points are redrawn).
QuadraticDataset gen_quadratically_separable(std::size_t n, std::size_t d,
                                             std::uint64_t seed);

// Standard Gaussian features, uniform labels, pairwise distinct.
Dataset gen_random(std::size_t n, std::size_t d, std::uint64_t seed);

}  // namespace coercive
