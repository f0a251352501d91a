#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "coercive/datasets.hpp"
#include "coercive/models.hpp"

namespace coercive {

// Unit vector maximising min_{i<j} |w . (x_i - x_j)| over `budget` random
// candidates. Throws InfeasibleError if no candidate separates all pairs.
Vector find_separating_direction(const Dataset& ds, std::uint64_t seed,
                                 std::size_t budget = 1024);

struct InterpolatorNet {
  SingleLayerReQUNet net{0, 0};
  double margin = 0.0;   // min_i y_i p(x_i)
  Vector direction;      // omega_0
  Vector knots;          // z_0 .. z_{n-1}; neuron k is alpha_k (omega_0.x - z_k)_+^2
};

// Sorts the projections z_i = omega_0 . x_i, starts at z_0 < z_1 and adds one
// neuron per sample:
//   q_1 = y_1 (z - z_0)_+^2
//   q_{k+1} = q_k + 2 y_{k+1} (|q_k(z_{k+1})| + 1) / (z_{k+1} - z_k)^2 (z - z_k)_+^2
// The result has n neurons and y_i p(x_i) > 0 for every sample.
InterpolatorNet build_interpolating_requ(const Dataset& ds, std::uint64_t seed);

// min_i y_i p(x_i; theta / ||theta||) for the interpolator after each neuron
// is rebalanced to minimise its parameter norm (ReQU neurons are degree-3
// homogeneous, so this is margin / ||theta||^3). A lower bound on the
// max-min margin over unit-norm networks.
double interpolator_lambda_hat(const InterpolatorNet& interp);

struct BadLocalMin {
  Dataset data;
  SingleLayerReQUNet net{0, 0};
  Vector lambda;
  Vector a;  // per-neuron coefficient a_j
  Vector r;  // per-neuron ||(w_j; b_j)||
};

// Two-variable problem min_{a, r >= 0} l(-c a r^2) + (lambda/3)(a^3 + 2 r^3)
// for the logistic loss, solved by nested golden-section search followed by
// Newton polishing. Returns (a, r); (0, 0) only if the zero point wins.
std::pair<double, double> solve_neuron_subproblem(double c, double lambda);

// Mutually repelling data (first m labels +1) and the critical point where
// neuron j fits sample j alone: u_j = (w_j; b_j) = r_j z_j / ||z_j||.
// Samples m+1..n have f = 0, so the training error is 1 - m/n.
// Requires 0 < lambda_j < 1/2 and 1 <= m <= n. Without an explicit mode,
// n <= 4 uses the exact construction and larger n the generalized one.
BadLocalMin build_bad_local_min(std::size_t n, std::size_t m,
                                std::span<const double> lambda,
                                std::optional<RepellingMode> mode = std::nullopt);

}  // namespace coercive
