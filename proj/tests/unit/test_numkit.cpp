#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "coercive/numkit.hpp"
#include "coercive/random.hpp"

using namespace coercive;
using namespace coercive::numkit;

namespace {

DenseMatrix random_symmetric(Rng& rng, std::size_t n) {
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = standard_normal(rng);
  return a;
}

// Direct sum oracle, written independently of the library loop.
Vector naive_conv(const Vector& alpha, const Vector& beta) {
  Vector out(alpha.size() + beta.size() - 1, 0.0);
  for (std::size_t i = 0; i < alpha.size(); ++i)
    for (std::size_t t = 0; t < beta.size(); ++t)
      out[t + alpha.size() - 1 - i] += alpha[i] * beta[t];
  return out;
}

}  // namespace

TEST(DenseMatrix, ConstructionAndShapeChecks) {
  DenseMatrix a = DenseMatrix::from_rows({{1, 2, 3}, {4, 5, 6}});
  EXPECT_EQ(a.rows(), 2u);
  EXPECT_EQ(a.cols(), 3u);
  EXPECT_DOUBLE_EQ(a(1, 2), 6.0);
  DenseMatrix t = a.transpose();
  EXPECT_DOUBLE_EQ(t(2, 1), 6.0);
  EXPECT_THROW(DenseMatrix(2, 2, Vector{1, 2, 3}), ShapeError);
  EXPECT_THROW(a * a, ShapeError);
  EXPECT_THROW(a + t, ShapeError);
  EXPECT_THROW(a.max_asymmetry(), ShapeError);
}

TEST(DenseMatrix, ProductsAndNorms) {
  DenseMatrix a = DenseMatrix::from_rows({{1, 2}, {3, 4}});
  DenseMatrix p = a * DenseMatrix::identity(2);
  EXPECT_EQ(max_abs_diff(p.data(), a.data()), 0.0);
  DenseMatrix sq = a * a;
  EXPECT_DOUBLE_EQ(sq(0, 0), 7.0);
  EXPECT_DOUBLE_EQ(sq(1, 1), 22.0);
  Vector x{1.0, -1.0};
  Vector ax = a * std::span<const double>(x);
  EXPECT_DOUBLE_EQ(ax[0], -1.0);
  EXPECT_DOUBLE_EQ(ax[1], -1.0);
  EXPECT_DOUBLE_EQ(a.frobenius_norm(), std::sqrt(30.0));
  Vector big{3e200, 4e200};
  EXPECT_NEAR(norm2(big) / 5e200, 1.0, 1e-14);
  DenseMatrix o(2, 2);
  Vector z{1.0, 2.0};
  add_scaled_outer(o, 2.0, z);
  EXPECT_DOUBLE_EQ(o(0, 1), 4.0);
  EXPECT_DOUBLE_EQ(o(1, 1), 8.0);
}

TEST(SymEigen, DiagonalAndKnownSpectrum) {
  DenseMatrix a = DenseMatrix::from_rows({{2, 1}, {1, 2}});
  EigenSpectrum s = sym_eigvals(a);
  ASSERT_EQ(s.values.size(), 2u);
  EXPECT_NEAR(s.values[0], 1.0, 1e-14);
  EXPECT_NEAR(s.values[1], 3.0, 1e-14);
  EXPECT_TRUE(sym_eigvals(DenseMatrix(0, 0)).values.empty());
}

TEST(SymEigen, RejectsAsymmetricAndNonSquare) {
  EXPECT_THROW(sym_eigvals(DenseMatrix::from_rows({{1, 2}, {0, 1}})), DomainError);
  EXPECT_THROW(sym_eigvals(DenseMatrix(2, 3)), DomainError);
}

TEST(SymEigen, ReconstructsRandomMatrices) {
  Rng rng = make_rng(7);
  for (std::size_t n : {1u, 2u, 5u, 12u, 20u}) {
    DenseMatrix a = random_symmetric(rng, n);
    SymmetricEigen e = sym_eigen(a);
    EXPECT_TRUE(std::is_sorted(e.values.begin(), e.values.end()));
    // A V = V diag(values) and V^T V = I.
    DenseMatrix av = a * e.vectors;
    DenseMatrix vtv = e.vectors.transpose() * e.vectors;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        EXPECT_NEAR(av(i, k), e.vectors(i, k) * e.values[k], 1e-10 * (1 + a.frobenius_norm()));
        EXPECT_NEAR(vtv(i, k), i == k ? 1.0 : 0.0, 1e-10);
      }
    double trace = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += a(i, i);
    for (double v : e.values) sum += v;
    EXPECT_NEAR(trace, sum, 1e-10 * (1 + a.frobenius_norm()));
  }
}

TEST(SingularValues, MatchEigenvaluesOfGram) {
  Rng rng = make_rng(11);
  for (auto [r, c] : {std::pair{3u, 3u}, std::pair{5u, 2u}, std::pair{2u, 6u}}) {
    DenseMatrix a(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) a(i, j) = standard_normal(rng);
    Vector sv = singular_values(a);
    ASSERT_EQ(sv.size(), std::min(r, c));
    EXPECT_TRUE(std::is_sorted(sv.rbegin(), sv.rend()));
    DenseMatrix gram = r >= c ? a.transpose() * a : a * a.transpose();
    Vector ev = sym_eigvals(gram).values;
    for (std::size_t k = 0; k < sv.size(); ++k)
      EXPECT_NEAR(sv[k] * sv[k], ev[ev.size() - 1 - k], 1e-10);
    EXPECT_DOUBLE_EQ(min_singular_value(a), sv.back());
  }
}

TEST(SingularValues, DetectsSingularity) {
  DenseMatrix rank1 = DenseMatrix::from_rows({{1, 2}, {2, 4}});
  EXPECT_LT(min_singular_value(rank1), 1e-12);
  EXPECT_FALSE(is_nonsingular(rank1));
  EXPECT_TRUE(is_nonsingular(DenseMatrix::identity(4)));
  EXPECT_DOUBLE_EQ(min_singular_value(DenseMatrix::identity(3) * 2.5), 2.5);
}

TEST(LeastSquares, ResidualIsDistanceToColumnSpace) {
  DenseMatrix a = DenseMatrix::from_rows({{1, 0}, {0, 1}, {0, 0}});
  Vector b{3.0, 4.0, 5.0};
  EXPECT_NEAR(least_squares_residual(a, b), 5.0, 1e-14);
  Vector inside{1.0, -2.0, 0.0};
  EXPECT_NEAR(least_squares_residual(a, inside), 0.0, 1e-14);
  // Duplicate column is skipped, not divided by zero.
  DenseMatrix dup = DenseMatrix::from_rows({{1, 1}, {1, 1}, {0, 0}});
  EXPECT_NEAR(least_squares_residual(dup, Vector{1.0, -1.0, 0.0}), std::sqrt(2.0), 1e-12);
}

TEST(Convolution, SmallKnownExample) {
  Vector out = conv_padded(Vector{1.0, 2.0}, Vector{3.0, 4.0});
  ASSERT_EQ(out.size(), 3u);
  EXPECT_DOUBLE_EQ(out[0], 6.0);
  EXPECT_DOUBLE_EQ(out[1], 11.0);
  EXPECT_DOUBLE_EQ(out[2], 4.0);
  EXPECT_THROW(conv_padded(Vector{}, Vector{1.0}), ShapeError);
}

TEST(Convolution, MatchesNaiveOracleAndMatrix) {
  Rng rng = make_rng(3);
  for (int t = 0; t < 50; ++t) {
    const std::size_t s = 1 + rng() % 6, dz = 1 + rng() % 10;
    Vector v = gaussian_vector(rng, s), z = gaussian_vector(rng, dz);
    Vector fast = conv_padded(v, z);
    Vector slow = naive_conv(v, z);
    EXPECT_LT(max_abs_diff(fast, slow), 1e-12);
    DenseMatrix V = conv_matrix(v, dz);
    ASSERT_EQ(V.rows(), s + dz - 1);
    ASSERT_EQ(V.cols(), dz);
    EXPECT_LT(max_abs_diff(V * std::span<const double>(z), fast), 1e-12);
    EXPECT_GT(min_singular_value(V), 0.0);
  }
}

TEST(Convolution, ZeroFilterIsRankZero) {
  DenseMatrix V = conv_matrix(Vector{0.0, 0.0}, 3);
  EXPECT_EQ(min_singular_value(V), 0.0);
}
