#include <gtest/gtest.h>

#include <cmath>

#include "coercive/constructions.hpp"
#include "coercive/objective.hpp"

using namespace coercive;

namespace {

// Stationarity of the two-variable problem forces a = r = t with
// 1 + exp(c t^3) = c / (lambda ln 2).
double subproblem_oracle(double c, double lambda) {
  return std::cbrt(std::log(c / (lambda * std::log(2.0)) - 1.0) / c);
}

}  // namespace

TEST(SeparatingDirection, ProjectionsAreDistinct) {
  Dataset ds = gen_random(12, 3, 5);
  Vector w = find_separating_direction(ds, 1);
  EXPECT_NEAR(numkit::norm2(w), 1.0, 1e-12);
  for (std::size_t i = 0; i < ds.n(); ++i)
    for (std::size_t j = i + 1; j < ds.n(); ++j)
      EXPECT_GT(std::abs(numkit::dot(w, ds.x(i)) - numkit::dot(w, ds.x(j))), 0.0);
  Dataset dup(DenseMatrix::from_rows({{1, 1}, {1, 1}}), {1, -1});
  EXPECT_THROW(find_separating_direction(dup, 0), InfeasibleError);
}

TEST(Interpolator, PositiveMarginAndSize) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 2 + seed % 15;
    Dataset ds = gen_random(n, 1 + seed % 4, seed);
    InterpolatorNet in = build_interpolating_requ(ds, seed);
    EXPECT_LE(in.net.m(), n + 1);
    EXPECT_GT(in.margin, 0.0);
    EXPECT_NEAR(in.margin, margin(Network(in.net), ds), 1e-9 * (1 + in.margin));
    EXPECT_DOUBLE_EQ(training_error(Network(in.net), ds), 0.0);
    EXPECT_GT(interpolator_lambda_hat(in), 0.0);
  }
}

TEST(Interpolator, SingleSample) {
  Dataset ds(DenseMatrix::from_rows({{0.5, -1.0}}), {-1});
  InterpolatorNet in = build_interpolating_requ(ds, 0);
  EXPECT_GT(in.margin, 0.0);
}

TEST(NeuronSubproblem, MatchesClosedForm) {
  for (double c : {2.0, 5.0, 9.0})
    for (double lambda : {0.05, 0.2, 0.45}) {
      auto [a, r] = solve_neuron_subproblem(c, lambda);
      const double t = subproblem_oracle(c, lambda);
      EXPECT_NEAR(a, t, 1e-8);
      EXPECT_NEAR(r, t, 1e-8);
    }
}

TEST(BadLocalMin, ExactModeProperties) {
  const Vector lambda{0.1, 0.3};
  BadLocalMin bad = build_bad_local_min(4, 2, lambda, RepellingMode::exact);
  const ObjectiveConfig cfg{LossKind::logistic(), bad.lambda, 1.0, 0.1};
  Network net = bad.net;
  EXPECT_LT(numkit::norm2(gradient(net, bad.data, cfg)), 1e-6);
  EXPECT_DOUBLE_EQ(training_error(net, bad.data), 0.5);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_NEAR(bad.a[j], bad.r[j], 1e-8);
    EXPECT_NEAR(bad.a[j], subproblem_oracle(5.0, lambda[j]), 1e-8);
  }
}

TEST(BadLocalMin, GeneralizedModeProperties) {
  const Vector lambda{0.1, 0.2, 0.3};
  BadLocalMin bad = build_bad_local_min(10, 3, lambda);
  const ObjectiveConfig cfg{LossKind::logistic(), bad.lambda, 1.0, 0.1};
  Network net = bad.net;
  EXPECT_LT(numkit::norm2(gradient(net, bad.data, cfg)), 1e-6);
  EXPECT_NEAR(training_error(net, bad.data), 0.7, 1e-12);
}

TEST(BadLocalMin, RejectsInvalidArguments) {
  EXPECT_THROW(build_bad_local_min(4, 2, Vector{0.1, 0.6}), DomainError);
  EXPECT_THROW(build_bad_local_min(4, 5, Vector(5, 0.1)), DomainError);
  EXPECT_THROW(build_bad_local_min(4, 2, Vector{0.1}), ShapeError);
  EXPECT_THROW(build_bad_local_min(6, 2, Vector{0.1, 0.2}, RepellingMode::exact),
               InfeasibleError);
}
