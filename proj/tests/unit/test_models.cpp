#include <gtest/gtest.h>

#include <cmath>

#include "coercive/models.hpp"

using namespace coercive;

TEST(Activations, ReQUAndLeaky) {
  EXPECT_DOUBLE_EQ(requ(3.0), 9.0);
  EXPECT_DOUBLE_EQ(requ(-3.0), 0.0);
  EXPECT_DOUBLE_EQ(requ_deriv(3.0), 6.0);
  EXPECT_DOUBLE_EQ(requ_deriv(0.0), 0.0);
  EXPECT_DOUBLE_EQ(leaky_relu(-2.0, 0.1), -0.2);
  EXPECT_DOUBLE_EQ(leaky_relu(2.0, 0.1), 2.0);
  EXPECT_DOUBLE_EQ(leaky_relu_deriv(0.0, 0.1), 1.0);
  EXPECT_DOUBLE_EQ(leaky_relu_deriv(-1.0, 0.1), 0.1);
  EXPECT_THROW(leaky_relu(1.0, 1.0), DomainError);
  EXPECT_THROW(leaky_relu(1.0, 0.0), DomainError);
  EXPECT_THROW(leaky_relu_deriv(1.0, -0.5), DomainError);
}

TEST(ShallowNet, FlatLayoutAndForward) {
  // m = 2, d = 1: a = (1, -2), w = (1, 1), b = (0, -1).
  SingleLayerReQUNet net(2, 1, Vector{1, -2, 1, 1, 0, -1});
  EXPECT_DOUBLE_EQ(net.a()[1], -2.0);
  EXPECT_DOUBLE_EQ(net.w(1)[0], 1.0);
  EXPECT_DOUBLE_EQ(net.b()[1], -1.0);
  const Vector x{3.0};
  EXPECT_DOUBLE_EQ(forward_single(net, x), 9.0 - 2.0 * 4.0);
  EXPECT_DOUBLE_EQ(evaluate(Network(net), x), 1.0);
  const Vector xn{-3.0};
  EXPECT_DOUBLE_EQ(forward_single(net, xn), 0.0);
  QuadraticNet q(2, 1, Vector{1, -2, 1, 1, 0, -1});
  EXPECT_DOUBLE_EQ(forward_quadratic(q, xn), 9.0 - 2.0 * 16.0);
  EXPECT_THROW(SingleLayerReQUNet(2, 1, Vector{1, 2}), ShapeError);
}

TEST(DeepConvNet, ShapesAndLayout) {
  DeepConvNet net(4, 3, 2, 5, 0.1);
  EXPECT_EQ(net.head_dim(), 6u);
  EXPECT_EQ(net.filter_count(), 2u);
  EXPECT_EQ(net.params().size(), 5u * 8u + 4u);
  EXPECT_EQ(net.head_param_count(), 40u);
  net.v(1)[0] = 7.0;
  EXPECT_DOUBLE_EQ(net.params()[40 + 2], 7.0);
  EXPECT_THROW(DeepConvNet(4, 0, 2, 5, 0.1), DomainError);
  EXPECT_THROW(DeepConvNet(4, 2, 2, 5, 1.5), DomainError);
}

TEST(DeepConvNet, ForwardMatchesHandComputation) {
  // d = 2, l = 2, s = 2, m = 1: h1 = leaky(v * x) in R^3.
  DeepConvNet net(2, 2, 2, 1, 0.5);
  auto p = net.params();
  // a | w (3) | b | v (2)
  const Vector flat{2.0, 1.0, 0.0, -1.0, 0.5, 1.0, -1.0};
  std::copy(flat.begin(), flat.end(), p.begin());
  const Vector x{1.0, 2.0};
  // v * x with padding: out[j] = sum_i v[i] x[i + j - 1]
  //   j=0: v[1] x[0] = -1, j=1: v[0] x[0] + v[1] x[1] = -1, j=2: v[0] x[1] = 2
  DeepForward fw = forward_deep(net, x);
  ASSERT_EQ(fw.hidden.size(), 1u);
  ASSERT_EQ(fw.hidden[0].size(), 3u);
  EXPECT_DOUBLE_EQ(fw.hidden[0][0], -0.5);
  EXPECT_DOUBLE_EQ(fw.hidden[0][1], -0.5);
  EXPECT_DOUBLE_EQ(fw.hidden[0][2], 2.0);
  const double pre = 1.0 * -0.5 + 0.0 + -1.0 * 2.0 + 0.5;
  EXPECT_DOUBLE_EQ(fw.output, 2.0 * requ(pre));
  const double pre2 = -0.5 - 2.0 + 4.0;  // same w with b = 4
  net.b()[0] = 4.0;
  EXPECT_DOUBLE_EQ(forward_deep(net, x).output, 2.0 * pre2 * pre2);
}

TEST(DeepConvNet, SingleLayerReducesToShallow) {
  Rng rng = make_rng(5);
  DeepConvNet deep(3, 1, 2, 4, 0.1);
  init_gaussian(deep, rng);
  SingleLayerReQUNet shallow(4, 3, Vector(deep.params().begin(), deep.params().end()));
  const Vector x{0.3, -1.0, 2.0};
  EXPECT_NEAR(forward_deep(deep, x).output, forward_single(shallow, x), 1e-15);
  EXPECT_EQ(last_hidden(deep, x), x);
}

TEST(Homogeneity, IdentityHoldsForRandomScales) {
  Rng rng = make_rng(9);
  for (int t = 0; t < 20; ++t) {
    DeepConvNet net(3, 3, 2, 4, 0.2);
    init_gaussian(net, rng);
    const Vector x = gaussian_vector(rng, 3);
    Vector r(4);
    for (double& v : r) v = std::exp(uniform(rng, -1.0, 1.0));
    EXPECT_LT(positive_homogeneity_check(net, x, r), 1e-12);
  }
}

TEST(Init, ScaleAndFilters) {
  Rng rng = make_rng(1);
  DeepConvNet net(4, 3, 3, 50, 0.1);
  init_gaussian(net, rng);
  for (std::size_t k = 0; k < net.filter_count(); ++k)
    EXPECT_NEAR(numkit::norm2(net.v(k)), 1.0, 1e-12);
  SingleLayerReQUNet s(200, 4);
  init_gaussian(s, rng);
  double sq = 0.0;
  for (double v : s.params()) sq += v * v;
  const double var = sq / static_cast<double>(s.params().size());
  EXPECT_NEAR(var, 0.01 / 4.0, 0.0015);
}

TEST(NetworkVariant, Helpers) {
  Network n = QuadraticNet(3, 2);
  EXPECT_EQ(neuron_count(n), 3u);
  EXPECT_EQ(input_dim(n), 2u);
  params(n)[0] = 1.0;
  EXPECT_DOUBLE_EQ(std::get<QuadraticNet>(n).a()[0], 1.0);
  Network d = DeepConvNet(4, 2, 2, 3, 0.1);
  EXPECT_EQ(input_dim(d), 4u);
}
