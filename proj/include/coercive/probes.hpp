#pragma once

#include <cstdint>
#include <string>

#include "coercive/datasets.hpp"
#include "coercive/objective.hpp"

// Sampled property harnesses behind the `probe` command. Each returns the
// number of violations and the worst observed statistic.
namespace coercive {

struct ProbeSummary {
  std::string kind;
  std::size_t trials = 0;
  std::size_t violations = 0;
  double worst = 0.0;  // meaning depends on the probe, see each function
  bool pass() const { return violations == 0; }
};

// Random single-layer nets (n samples in R^d, m neurons, norms log-uniform up
// to max_norm): violations of L >= (lambda_min / (3 sqrt(2m))) ||theta||^3
// beyond relative slack 1e-9. worst = min over trials of L / bound.
ProbeSummary coercivity_probe(std::size_t n, std::size_t d, std::size_t m,
                              std::size_t trials, double max_norm, std::uint64_t seed);

// Random symmetric pairs of size <= max_dim: violations of
// ||eig(A) - eig(B)||_2 <= ||A - B||_F + 1e-10. worst = max of lhs - rhs.
ProbeSummary lidskii_probe(std::size_t trials, std::size_t max_dim, std::uint64_t seed);

// Random nonzero filters (length <= max_s) and input lengths <= max_dz:
// violations of sigma_min(conv_matrix) > 0. worst = smallest sigma_min seen.
ProbeSummary conv_rank_probe(std::size_t trials, std::size_t max_s, std::size_t max_dz,
                             std::uint64_t seed);

// Random deep nets with nonzero filters on random datasets: violations of
// pairwise distinct h_{l-1}. worst = smallest pairwise distance.
ProbeSummary injectivity_probe(std::size_t trials, std::uint64_t seed);

// Random (deep net, x, r): violations of the homogeneity identity beyond
// 1e-10. worst = largest relative error.
ProbeSummary homogeneity_probe(std::size_t trials, std::uint64_t seed);

}  // namespace coercive
