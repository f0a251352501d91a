#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coercive/datasets.hpp"
#include "coercive/models.hpp"
#include "coercive/objective.hpp"

namespace coercive {

// m values drawn uniformly from (lambda0/2, lambda0), pairwise distinct.
Vector sample_lambda(std::size_t m, double lambda0, std::uint64_t seed);

// eps(kind) times the normalised margin of the interpolating ReQU network.
double estimate_lambda0(const Dataset& ds, const LossKind& kind, std::uint64_t seed = 0);

// fixed:        theta -= step * grad.
// backtracking: Armijo backtracking; the trial step grows by `grow` after
//               every accepted step.
// bb:           Armijo backtracking whose trial step is the Barzilai-Borwein
//               step s.s / s.y of the previous move (falls back to growth
//               when s.y <= 0).
enum class StepPolicy { fixed, backtracking, bb };

struct TrainOptions {
  StepPolicy policy = StepPolicy::bb;
  double step = 1.0;            // fixed step, or first trial step for backtracking
  double shrink = 0.5;          // backtracking factor
  double armijo = 1e-4;         // sufficient-decrease constant
  double grow = 2.0;            // trial step growth after an accepted step
  double max_step = 1e12;
  std::size_t max_iters = 200000;
  // Stop when ||grad|| < grad_tol_abs + grad_tol_rel * |L|.
  double grad_tol_abs = 1e-7;
  double grad_tol_rel = 1e-7;

  // Escape: fires when some sample is misclassified, an inactive (or
  // negligible) neuron exists, at least escape_spacing iterations passed
  // since the last attempt, and either ||grad|| < escape_tol_abs +
  // escape_tol_rel * |L| or the loss fell by less than stall_rel * (1 + |L|)
  // over the last stall_window iterations.
  bool escape = true;
  double escape_radius = 1e-3;
  std::size_t escape_directions = 256;
  std::size_t max_escapes = 10;
  double escape_tol_abs = 1e-6;
  double escape_tol_rel = 1e-6;
  std::size_t escape_spacing = 200;
  std::size_t stall_window = 500;
  double stall_rel = 1e-7;

  // Pruning: every prune_every iterations a neuron whose size is below
  // prune_radius * (largest neuron size) and shrinking is zeroed if that
  // strictly lowers the loss.
  bool prune = true;
  std::size_t prune_every = 50;
  double prune_radius = 0.3;

  std::size_t record_every = 1;  // trajectory sampling stride
  std::uint64_t seed = 0;
};

enum class TerminalStatus {
  converged,              // reached the gradient tolerance without escapes
  escaped_and_continued,  // reached the gradient tolerance after >= 1 escape
  budget_exhausted,
  stalled,                // backtracking could not find a decrease
  coercivity_violation,
};
std::string to_string(TerminalStatus s);
bool reached_criticality(TerminalStatus s);

struct TrajectorySample {
  std::size_t iter = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
  double param_norm = 0.0;
  std::string event = "running";  // running | escape | escape-failed | prune | <terminal>
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  TerminalStatus status = TerminalStatus::budget_exhausted;
  std::size_t iterations = 0;
  std::size_t escapes = 0;
  std::size_t escape_failures = 0;
  std::size_t prunes = 0;
  double final_loss = 0.0;
  double final_grad_norm = 0.0;
  std::string violation;  // set when status == coercivity_violation
};

struct TrainResult {
  Network net;
  Trajectory trajectory;
};

// Gradient descent with optional backtracking, pruning of vanishing neurons
// and perturbation escapes from misclassifying stationary points. Loss is
// non-increasing across accepted steps under backtracking. At every iterate
// the loss is checked against the coercivity lower bound.
TrainResult train(Network net, const Dataset& ds, const ObjectiveConfig& cfg,
                  const TrainOptions& opts = {});

struct PathRow {
  std::size_t k = 0;
  double x = 0.0, y = 0.0, z = 0.0;
  double norm = 0.0;
  double loss = 0.0;             // (xyz - 1)^2
  double regularized_loss = 0.0; // one ReQU neuron (a,w,b) = (x,y,z) on (1, +1)
  double bound = 0.0;            // (1 / (3 sqrt 2)) ||theta||^3
};

// (x_k, y_k, z_k) = (-1/k, sqrt(k), 1/k) for k = 1..K.
std::vector<PathRow> decreasing_path_demo(std::size_t K);

}  // namespace coercive
