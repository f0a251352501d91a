#include <gtest/gtest.h>

#include <cmath>

#include "coercive/objective.hpp"
#include "coercive/datasets.hpp"

using namespace coercive;

namespace {

ObjectiveConfig logistic_cfg(std::size_t m, double lambda) {
  return {LossKind::logistic(), Vector(m, lambda), 1.0, 0.1};
}

// Reference regularizer written directly from the formula.
double reference_regularizer(const SingleLayerReQUNet& net, const Vector& lambda) {
  double r = 0.0;
  for (std::size_t j = 0; j < net.m(); ++j) {
    double rho2 = net.b()[j] * net.b()[j];
    for (double w : net.w(j)) rho2 += w * w;
    r += lambda[j] * (std::pow(std::abs(net.a()[j]), 3) + 2.0 * std::pow(rho2, 1.5)) / 3.0;
  }
  return r;
}

}  // namespace

TEST(Loss, LogisticValuesAreStable) {
  const LossKind l = LossKind::logistic();
  EXPECT_NEAR(loss_value(l, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(loss_value(l, 1000.0), 1000.0 / std::log(2.0), 1e-9);
  EXPECT_NEAR(loss_value(l, -30.0), std::exp(-30.0) / std::log(2.0), 1e-25);
  EXPECT_GE(loss_value(l, -800.0), 0.0);
  EXPECT_TRUE(std::isfinite(loss_value(l, 1e300)));
  EXPECT_NEAR(loss_deriv(l, 0.0), 0.5 / std::log(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(epsilon_for(l), loss_deriv(l, 0.0));
}

TEST(Loss, SmoothHinge) {
  const LossKind h = LossKind::smooth_hinge(3);
  EXPECT_DOUBLE_EQ(loss_value(h, 1.0), 8.0);
  EXPECT_DOUBLE_EQ(loss_value(h, -2.0), 0.0);
  EXPECT_DOUBLE_EQ(loss_deriv(h, 1.0), 12.0);
  EXPECT_DOUBLE_EQ(epsilon_for(h), 3.0);
  EXPECT_THROW(LossKind::smooth_hinge(2), DomainError);
}

TEST(Loss, DerivativeMatchesFiniteDifference) {
  for (LossKind k : {LossKind::logistic(), LossKind::smooth_hinge(4)})
    for (double z : {-3.0, -0.4, 0.0, 0.7, 5.0}) {
      const double fd = (loss_value(k, z + 1e-6) - loss_value(k, z - 1e-6)) / 2e-6;
      EXPECT_NEAR(fd, loss_deriv(k, z), 1e-6 * (1 + std::abs(fd)));
    }
}

TEST(Config, Validation) {
  EXPECT_THROW(validate_config(logistic_cfg(2, 0.1), 3, false), ShapeError);
  EXPECT_THROW(validate_config(logistic_cfg(3, 0.0), 3, false), DomainError);
  ObjectiveConfig deep = logistic_cfg(3, 0.1);
  deep.lambda_c = 0.0;
  EXPECT_THROW(validate_config(deep, 3, true), DomainError);
  EXPECT_NO_THROW(validate_config(deep, 3, false));
}

TEST(Regularizer, MatchesFormula) {
  Rng rng = make_rng(2);
  SingleLayerReQUNet net(5, 3);
  init_gaussian(net, rng);
  const Vector lambda{0.1, 0.2, 0.3, 0.4, 0.5};
  EXPECT_NEAR(regularizer_single(net, lambda), reference_regularizer(net, lambda), 1e-15);
  DeepConvNet deep(3, 2, 2, 2, 0.1);
  deep.v(0)[0] = 2.0;  // ||v||^2 = 4
  EXPECT_NEAR(regularizer_deep(deep, Vector{1, 1}, 2.0), 0.5 * 9.0, 1e-15);
}

TEST(Objective, ZeroNetworkLoss) {
  Dataset ds = gen_random(6, 2, 0);
  Network net = SingleLayerReQUNet(3, 2);
  // Sum over samples of l(0) = 1; the regularizer vanishes.
  EXPECT_NEAR(empirical_loss(net, ds, logistic_cfg(3, 0.1)), 6.0, 1e-14);
  EXPECT_DOUBLE_EQ(training_error(net, ds), 1.0);  // sgn(0) = 0 matches no label
  EXPECT_DOUBLE_EQ(margin(net, ds), 0.0);
}

TEST(Objective, GradientFiniteDifference) {
  Rng rng = make_rng(4);
  Dataset ds = gen_random(8, 3, 1);
  for (int t = 0; t < 5; ++t) {
    SingleLayerReQUNet s(4, 3);
    init_gaussian(s, rng);
    for (double& v : s.params()) v *= 10.0;
    EXPECT_LT(finite_diff_check(s, ds, logistic_cfg(4, 0.3)), 1e-6);
    QuadraticNet q(4, 3);
    init_gaussian(q, rng);
    EXPECT_LT(finite_diff_check(q, ds, logistic_cfg(4, 0.3)), 1e-6);
    DeepConvNet d(3, 3, 2, 4, 0.2);
    init_gaussian(d, rng);
    for (double& v : d.params().first(d.head_param_count())) v *= 10.0;
    ASSERT_GT(min_leaky_kink_distance(d, ds), 1e-5);
    EXPECT_LT(finite_diff_check(d, ds, logistic_cfg(4, 0.3)), 1e-5);
  }
}

TEST(Objective, SmoothHingeGradient) {
  Rng rng = make_rng(8);
  Dataset ds = gen_random(6, 2, 3);
  SingleLayerReQUNet s(3, 2);
  init_gaussian(s, rng);
  for (double& v : s.params()) v *= 5.0;
  ObjectiveConfig cfg{LossKind::smooth_hinge(3), Vector(3, 0.2), 1.0, 0.1};
  EXPECT_LT(finite_diff_check(s, ds, cfg), 1e-5);
}

TEST(Objective, CoercivityBoundHolds) {
  Rng rng = make_rng(6);
  Dataset ds = gen_random(10, 3, 2);
  for (int t = 0; t < 50; ++t) {
    SingleLayerReQUNet s(11, 3);
    init_gaussian(s, rng);
    const double scale = std::pow(10.0, uniform(rng, -1.0, 3.0));
    for (double& v : s.params()) v *= scale;
    Network net = s;
    const ObjectiveConfig cfg = logistic_cfg(11, 0.05);
    EXPECT_GE(empirical_loss(net, ds, cfg), coercivity_bound(net, cfg) * (1 - 1e-9));
  }
}
