#include <gtest/gtest.h>

#include <cmath>

#include "coercive/datasets.hpp"

using namespace coercive;

namespace {

double aug_dot(const Dataset& ds, std::size_t i, std::size_t j) {
  Vector a = ds.augmented(i), b = ds.augmented(j);
  return numkit::dot(a, b);
}

}  // namespace

TEST(Dataset, RejectsBadLabelsAndShapes) {
  DenseMatrix x(2, 1);
  EXPECT_THROW(Dataset(x, {1, 0}), DomainError);
  EXPECT_THROW(Dataset(x, {1}), ShapeError);
  Dataset ok(x, {1, -1});
  EXPECT_EQ(ok.n(), 2u);
  Vector z = ok.augmented(1);
  ASSERT_EQ(z.size(), 2u);
  EXPECT_DOUBLE_EQ(z[1], 1.0);
}

TEST(Distinctness, ReportsFirstDuplicatePair) {
  Dataset ds(DenseMatrix::from_rows({{0, 0}, {1, 0}, {0, 0}}), {1, -1, 1});
  DistinctnessReport r = validate_distinct(ds);
  EXPECT_FALSE(r.ok);
  ASSERT_TRUE(r.pair.has_value());
  EXPECT_EQ(r.pair->first, 0u);
  EXPECT_EQ(r.pair->second, 2u);
  Dataset single(DenseMatrix::from_rows({{1, 1}}), {1});
  EXPECT_TRUE(validate_distinct(single).ok);
  EXPECT_TRUE(std::isinf(validate_distinct(single).min_distance));
}

TEST(Repelling, ExactModeSimplex) {
  for (std::size_t n = 2; n <= 4; ++n) {
    Dataset ds = gen_mutually_repelling(n, 1, RepellingMode::exact);
    ASSERT_EQ(ds.n(), n);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(numkit::norm2(ds.x(i)), 2.0, 1e-12);
      EXPECT_EQ(ds.y(i), i < 1 ? 1 : -1);
      for (std::size_t j = i + 1; j < n; ++j) {
        EXPECT_NEAR(numkit::dot(ds.x(i), ds.x(j)), -4.0 / (n - 1.0), 1e-12);
        EXPECT_LT(aug_dot(ds, i, j), 0.0);
      }
    }
  }
}

TEST(Repelling, ExactModeInfeasibleFromFive) {
  EXPECT_THROW(gen_mutually_repelling(5, 1, RepellingMode::exact), InfeasibleError);
}

TEST(Repelling, GeneralizedModeHasNegativeInnerProducts) {
  for (std::size_t n : {5u, 10u, 17u}) {
    Dataset ds = gen_mutually_repelling(n, 3, RepellingMode::generalized);
    EXPECT_GE(ds.d(), n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) EXPECT_NEAR(aug_dot(ds, i, j), -2.0, 1e-12);
    EXPECT_TRUE(validate_distinct(ds).ok);
  }
  EXPECT_THROW(gen_mutually_repelling(4, 5, RepellingMode::generalized), DomainError);
}

TEST(Quadratic, LabelsAgreeWithGenerator) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    QuadraticDataset qd = gen_quadratically_separable(20, 3, seed);
    double mx = 0.0;
    for (std::size_t i = 0; i < qd.data.n(); ++i) mx = std::max(mx, std::abs(qd.q(qd.data.x(i))));
    for (std::size_t i = 0; i < qd.data.n(); ++i) {
      const double q = qd.q(qd.data.x(i));
      EXPECT_GT(qd.data.y(i) * q, 0.0);
      EXPECT_GE(std::abs(q), 1e-3 * mx * (1 - 1e-12));
    }
  }
}

TEST(Quadratic, LabelByQuadraticRejectsZero) {
  Quadratic q{DenseMatrix::identity(1), Vector{0.0}, -1.0};
  EXPECT_THROW(label_by_quadratic(DenseMatrix::from_rows({{1.0}}), q), DomainError);
  Dataset ds = label_by_quadratic(DenseMatrix::from_rows({{2.0}, {0.5}}), q);
  EXPECT_EQ(ds.y(0), 1);
  EXPECT_EQ(ds.y(1), -1);
}

TEST(Random, DeterministicAndDistinct) {
  Dataset a = gen_random(15, 4, 42), b = gen_random(15, 4, 42), c = gen_random(15, 4, 43);
  EXPECT_EQ(numkit::max_abs_diff(a.features().data(), b.features().data()), 0.0);
  EXPECT_EQ(a.labels(), b.labels());
  EXPECT_GT(numkit::max_abs_diff(a.features().data(), c.features().data()), 0.0);
  EXPECT_TRUE(validate_distinct(a).ok);
}
