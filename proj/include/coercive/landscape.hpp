#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coercive/datasets.hpp"
#include "coercive/models.hpp"
#include "coercive/objective.hpp"

namespace coercive {

using numkit::DenseMatrix;

// Raised by certify when the gradient is too large for first-order
// certificates to mean anything.
class NotCriticalError : public DomainError {
 public:
  NotCriticalError(const std::string& what, double grad_norm)
      : DomainError(what), grad_norm_(grad_norm) {}
  double grad_norm() const { return grad_norm_; }

 private:
  double grad_norm_;
};

// M_j = -sgn(a_j) sum_i l'_i y_i 1{u_j . z_i >= 0} z_i z_i^T + lambda_j I with
// z_i = (x_i; 1), sgn(0) = 0. For quadratic nets the indicator is 1; for deep
// nets z_i = (h_{l-1}(x_i); 1).
std::vector<DenseMatrix> build_M_matrices(const Network& net, const Dataset& ds,
                                          const ObjectiveConfig& cfg);

enum class Verdict {
  certified,            // critical point with zero training error
  escape_recommended,   // inactive neuron present but samples misclassified
  underparameterized,   // no inactive neuron, all M_j singular, m <= n
  bad_lambda_suspect,   // no inactive neuron, all M_j singular, m > n
  inconsistent,         // a certificate implication failed
};

std::string to_string(Verdict v);

struct CertificateReport {
  double loss = 0.0;
  double grad_norm = 0.0;
  double grad_tol = 0.0;
  Vector balance_residual;       // |a_j| - ||(w_j; b_j)||
  Vector sigma_min;              // sigma_min(M_j)
  Vector singular_tol;           // threshold each sigma_min is compared to
  Vector stationarity_residual;  // ||M_j u_j|| for each neuron
  std::vector<std::size_t> inactive;
  double margin = 0.0;
  double training_error = 0.0;
  double max_loss_deriv = 0.0;
  double epsilon = 0.0;
  bool lemma1_ok = true;  // some M_j nonsingular  =>  some neuron inactive
  bool step2_ok = true;   // inactive neuron and max l' < eps  =>  error 0
  Verdict verdict = Verdict::inconsistent;
};

struct CertifyOptions {
  // Gradient tolerance grad_tol_abs + grad_tol_rel * |L|.
  double grad_tol_abs = 1e-7;
  double grad_tol_rel = 1e-7;
  // A neuron is inactive when |a_j|, ||w_j|| and |b_j| are all below this.
  double inactive_tol = 1e-6;
  // M_j counts as nonsingular when sigma_min(M_j) > singular_rel * lambda_j.
  // M_j = lambda_j I for an inactive neuron, so lambda_j is the natural scale.
  double singular_rel = 1e-3;
};

CertificateReport certify(const Network& net, const Dataset& ds,
                          const ObjectiveConfig& cfg, const CertifyOptions& opts = {});

std::vector<std::size_t> inactive_neurons(const Network& net, double tol);

struct PerturbationProbe {
  double sup_estimate = 0.0;  // max over sampled unit (u, v)
  Vector direction;           // maximiser (u; v)
  double lambda_j = 0.0;
  bool descent_found = false;  // sup_estimate >= lambda_j
};

// Samples unit (u, v) and evaluates |sum_i l'_i (-y_i) (u . z_i + v)_+^2|
// where z_i is the head input of sample i. Neuron j must be inactive.
PerturbationProbe perturbation_probe(const Network& net, const Dataset& ds,
                                     const ObjectiveConfig& cfg, std::size_t j,
                                     std::size_t samples, std::uint64_t seed,
                                     double inactive_tol = 1e-6);

enum class Lemma2Mode { random, adversarial };

struct Lemma2Result {
  double min_max_sigma = 0.0;   // min over trials of max_j sigma_min(M_j)
  std::size_t all_singular_trials = 0;
  std::size_t trials = 0;
  bool hypothesis_violated = false;  // m <= n
  std::string warning;
};

// M_j = -sum_i z_i A_ij X_i + lambda_j I with X_i = (x_i;1)(x_i;1)^T.
// random:      z_i from an even normal / Cauchy mix, A_ij uniform on {-1,0,1}.
// adversarial: A_ij = 1 iff i = j mod n, z_i = lambda_i / ||(x_i;1)||^2, which
//              puts lambda_j into the spectrum of sum z_i A_ij X_i for j < n.
// A matrix counts as singular when sigma_min <= 1e-8 (1 + ||M||_F).
Lemma2Result lemma2_monte_carlo(const Dataset& ds, std::size_t m,
                                std::span<const double> lambda, std::size_t trials,
                                std::uint64_t seed, Lemma2Mode mode = Lemma2Mode::random);

// Same matrices for one explicit (z, A); returns sigma_min of each M_j.
Vector lemma2_sigmas(const Dataset& ds, std::span<const double> z, const DenseMatrix& A,
                     std::span<const double> lambda);

// Distance from lambda to {A^T alpha}: no alpha solves lambda_j = sum_i A_ij alpha_i
// exactly iff the result is positive.
double overdetermined_no_solution(const DenseMatrix& A, std::span<const double> lambda);

struct OverdeterminedSweep {
  double min_residual = 0.0;
  std::size_t trials = 0;
};
// Random A in {-1,0,1}^{n x m} and lambda uniform on (0,1)^m.
OverdeterminedSweep overdetermined_sweep(std::size_t n, std::size_t m, std::size_t trials,
                                         std::uint64_t seed);

enum class DeepCase { case1_zero_filter, case2_unit_filters, case3_active_head, unclassified };
std::string to_string(DeepCase c);

struct DeepBalanceReport {
  double sum_a3 = 0.0;         // sum_j lambda_j |a_j|^3
  double sum_rho3 = 0.0;       // sum_j lambda_j ||(w_j;b_j)||^3
  double head_term = 0.0;      // 2 sum_j lambda_j ||(w_j;b_j)|| ||w_j||^2
  Vector filter_term;          // lambda_c (||v_k||^2 - 1) ||v_k||^2
  Vector filter_norms;
  double balance_residual = 0.0;  // |sum_a3 - sum_rho3|
  Vector filter_residual;         // |filter_term_k - head_term|
  double max_residual = 0.0;
  DeepCase classification = DeepCase::unclassified;
  bool ok = false;                // max_residual < tol
};

// Scaling v_k -> r v_k, b -> r b, a -> a / r^2 leaves f unchanged, so at a
// critical point the regularizer is stationary along it; combined with the
// per-neuron balance |a_j| = ||(w_j;b_j)|| this gives
//   lambda_c (||v_k||^2 - 1) ||v_k||^2 = 2 sum_j lambda_j ||(w_j;b_j)|| ||w_j||^2
// for every k. Case bands: `band` around 0 and 1.
DeepBalanceReport deep_balance_check(const DeepConvNet& net, const ObjectiveConfig& cfg,
                                     double tol, double band = 1e-4);

struct InjectivityReport {
  bool ok = true;
  std::optional<std::pair<std::size_t, std::size_t>> pair;
  double min_distance = 0.0;
};

// Pairwise distinctness of h_{l-1}(x_i). Throws DomainError if some
// ||v_k|| <= tol.
InjectivityReport hidden_injectivity_check(const DeepConvNet& net, const Dataset& ds,
                                           double tol = 1e-12);

}  // namespace coercive
