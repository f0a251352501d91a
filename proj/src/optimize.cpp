#include "coercive/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "coercive/constructions.hpp"
#include "coercive/random.hpp"

namespace coercive {

Vector sample_lambda(std::size_t m, double lambda0, std::uint64_t seed) {
  if (!(lambda0 > 0.0) || !std::isfinite(lambda0))
    throw DomainError("sample_lambda: lambda0 must be positive and finite");
  Rng rng = make_rng(seed, 0x1a3bda);
  Vector out;
  out.reserve(m);
  while (out.size() < m) {
    const double v = uniform(rng, 0.5 * lambda0, lambda0);
    if (!(v > 0.5 * lambda0 && v < lambda0)) continue;
    if (std::find(out.begin(), out.end(), v) != out.end()) continue;
    out.push_back(v);
  }
  return out;
}

double estimate_lambda0(const Dataset& ds, const LossKind& kind, std::uint64_t seed) {
  const InterpolatorNet interp = build_interpolating_requ(ds, seed);
  const double lam = interpolator_lambda_hat(interp);
  if (!(lam > 0.0)) throw InfeasibleError("estimate_lambda0: non-positive margin");
  return epsilon_for(kind) * lam;
}

std::string to_string(TerminalStatus s) {
  switch (s) {
    case TerminalStatus::converged: return "converged";
    case TerminalStatus::escaped_and_continued: return "escaped-and-continued";
    case TerminalStatus::budget_exhausted: return "budget-exhausted";
    case TerminalStatus::stalled: return "stalled";
    case TerminalStatus::coercivity_violation: return "coercivity-violation";
  }
  return "unknown";
}

bool reached_criticality(TerminalStatus s) {
  return s == TerminalStatus::converged || s == TerminalStatus::escaped_and_continued;
}

namespace {

struct NeuronView {
  std::span<double> a;
  std::vector<std::span<double>> w;
  std::span<double> b;
  std::size_t dim;
};

NeuronView view(Network& net) {
  return std::visit(
      [](auto& n) {
        NeuronView v{n.a(), {}, n.b(), 0};
        for (std::size_t j = 0; j < n.m(); ++j) v.w.push_back(n.w(j));
        v.dim = n.m() == 0 ? 0 : n.w(0).size();
        return v;
      },
      net);
}

double neuron_size(const NeuronView& v, std::size_t j) {
  const double wn = numkit::norm2(v.w[j]);
  return std::sqrt(v.a[j] * v.a[j] + wn * wn + v.b[j] * v.b[j]);
}

void set_neuron(NeuronView& v, std::size_t j, double a, std::span<const double> u) {
  v.a[j] = a;
  for (std::size_t t = 0; t < v.dim; ++t) v.w[j][t] = u[t];
  v.b[j] = u[v.dim];
}

// Index of the smallest neuron if it is negligible next to the largest.
std::optional<std::size_t> escape_candidate(Network& net, double radius) {
  NeuronView v = view(net);
  const std::size_t m = v.a.size();
  if (m == 0) return std::nullopt;
  std::size_t best = 0;
  double smallest = neuron_size(v, 0);
  double largest = smallest;
  for (std::size_t j = 1; j < m; ++j) {
    const double s = neuron_size(v, j);
    largest = std::max(largest, s);
    if (s < smallest) {
      smallest = s;
      best = j;
    }
  }
  if (smallest == 0.0 || smallest <= radius * largest) return best;
  return std::nullopt;
}

// Replaces neuron j by (delta s, delta u, delta v) for the sampled unit
// direction and sign that give the lowest loss; keeps it only on a strict
// decrease.
bool try_escape(Network& net, std::size_t j, const Dataset& ds, const ObjectiveConfig& cfg,
                const TrainOptions& opts, double current, Rng& rng) {
  NeuronView v = view(net);
  const double saved_a = v.a[j];
  Vector saved_u(v.w[j].begin(), v.w[j].end());
  saved_u.push_back(v.b[j]);

  const double delta = opts.escape_radius;
  double best_loss = current;
  double best_a = 0.0;
  Vector best_u;
  for (std::size_t s = 0; s < opts.escape_directions; ++s) {
    Vector dir = random_unit_vector(rng, v.dim + 1);
    for (double& c : dir) c *= delta;
    for (double sign : {1.0, -1.0}) {
      set_neuron(v, j, sign * delta, dir);
      const double l = empirical_loss(net, ds, cfg);
      if (l < best_loss) {
        best_loss = l;
        best_a = sign * delta;
        best_u = dir;
      }
    }
  }
  if (best_u.empty()) {
    set_neuron(v, j, saved_a, saved_u);
    return false;
  }
  set_neuron(v, j, best_a, best_u);
  return true;
}

// Zeroes shrinking neurons that are small next to the largest, one at a
// time, whenever that strictly lowers the loss.
std::size_t prune_neurons(Network& net, const Dataset& ds, const ObjectiveConfig& cfg,
                          const TrainOptions& opts, double& current, Vector& last_size) {
  NeuronView v = view(net);
  const std::size_t m = v.a.size();
  Vector size(m);
  double largest = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    size[j] = neuron_size(v, j);
    largest = std::max(largest, size[j]);
  }
  std::size_t pruned = 0;
  Vector zero(v.dim + 1, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const bool shrinking = last_size.size() == m && size[j] < last_size[j];
    if (size[j] == 0.0 || !shrinking || size[j] > opts.prune_radius * largest) continue;
    const double saved_a = v.a[j];
    Vector saved_u(v.w[j].begin(), v.w[j].end());
    saved_u.push_back(v.b[j]);
    set_neuron(v, j, 0.0, zero);
    const double l = empirical_loss(net, ds, cfg);
    if (l < current) {
      current = l;
      size[j] = 0.0;
      ++pruned;
    } else {
      set_neuron(v, j, saved_a, saved_u);
    }
  }
  last_size = std::move(size);
  return pruned;
}

void check_options(const TrainOptions& o) {
  if (!(o.step > 0.0)) throw DomainError("train: step must be positive");
  if (!(o.grad_tol_abs >= 0.0 && o.grad_tol_rel >= 0.0 && o.grad_tol_abs + o.grad_tol_rel > 0.0))
    throw DomainError("train: gradient tolerance must be positive");
  if (!(o.escape_radius > 0.0)) throw DomainError("train: escape radius must be positive");
  if (o.policy != StepPolicy::fixed &&
      !(o.shrink > 0.0 && o.shrink < 1.0 && o.armijo > 0.0 && o.armijo < 1.0))
    throw DomainError("train: backtracking needs shrink and armijo in (0,1)");
  if (o.record_every == 0) throw DomainError("train: record_every must be positive");
}

}  // namespace

TrainResult train(Network net, const Dataset& ds, const ObjectiveConfig& cfg,
                  const TrainOptions& opts) {
  check_options(opts);
  if (ds.empty()) throw DomainError("train: empty dataset");
  Rng rng = make_rng(opts.seed, 0xe5c);
  Trajectory traj;
  LossAndGradient lg = loss_and_gradient(net, ds, cfg);
  double eta = opts.step;
  bool escapes_enabled = opts.escape;
  Vector last_size;
  std::size_t last_escape = 0;
  bool escaped_before = false;
  double window_loss = lg.loss;
  bool stalled_window = false;

  auto record = [&](std::size_t iter, double gn, std::string event) {
    traj.samples.push_back({iter, lg.loss, gn, numkit::norm2(params(net)), std::move(event)});
  };
  auto finish = [&](std::size_t iter, double gn, TerminalStatus status) {
    traj.status = status;
    traj.iterations = iter;
    traj.final_loss = lg.loss;
    traj.final_grad_norm = gn;
    record(iter, gn, to_string(status));
    return TrainResult{std::move(net), std::move(traj)};
  };
  auto attempt_escape = [&](std::size_t iter, double gn) -> bool {
    if (!escapes_enabled || traj.escapes >= opts.max_escapes) return false;
    if (escaped_before && iter < last_escape + opts.escape_spacing) return false;
    if (training_error(net, ds) == 0.0) return false;
    const auto j = escape_candidate(net, opts.prune_radius);
    if (!j) return false;
    escaped_before = true;
    last_escape = iter;
    stalled_window = false;
    if (try_escape(net, *j, ds, cfg, opts, lg.loss, rng)) {
      ++traj.escapes;
      lg = loss_and_gradient(net, ds, cfg);
      record(iter, numkit::norm2(lg.grad), "escape");
      return true;
    }
    ++traj.escape_failures;
    escapes_enabled = false;
    record(iter, gn, "escape-failed");
    return false;
  };

  for (std::size_t iter = 0;; ++iter) {
    const double gn = numkit::norm2(lg.grad);
    const double bound = coercivity_bound(net, cfg);
    if (lg.loss < bound * (1.0 - 1e-9)) {
      std::ostringstream msg;
      msg << "loss " << lg.loss << " fell below the coercivity bound " << bound
          << " at iteration " << iter;
      traj.violation = msg.str();
      return finish(iter, gn, TerminalStatus::coercivity_violation);
    }

    const double tol = opts.grad_tol_abs + opts.grad_tol_rel * std::abs(lg.loss);
    const double escape_tol = opts.escape_tol_abs + opts.escape_tol_rel * std::abs(lg.loss);
    if (opts.stall_window > 0 && iter > 0 && iter % opts.stall_window == 0) {
      stalled_window = window_loss - lg.loss < opts.stall_rel * (1.0 + std::abs(lg.loss));
      window_loss = lg.loss;
    }
    if (iter < opts.max_iters && (gn < std::max(tol, escape_tol) || stalled_window) &&
        attempt_escape(iter, gn))
      continue;
    if (gn < tol) {
      return finish(iter, gn, traj.escapes > 0 ? TerminalStatus::escaped_and_continued
                                               : TerminalStatus::converged);
    }
    if (iter >= opts.max_iters) return finish(iter, gn, TerminalStatus::budget_exhausted);
    if (iter % opts.record_every == 0) record(iter, gn, "running");

    if (opts.prune && iter > 0 && iter % opts.prune_every == 0) {
      double current = lg.loss;
      const std::size_t pruned = prune_neurons(net, ds, cfg, opts, current, last_size);
      if (pruned > 0) {
        traj.prunes += pruned;
        lg = loss_and_gradient(net, ds, cfg);
        record(iter, numkit::norm2(lg.grad), "prune");
        continue;
      }
    }

    const Vector theta(params(net).begin(), params(net).end());
    auto apply = [&](double h) {
      std::span<double> p = params(net);
      for (std::size_t k = 0; k < p.size(); ++k) p[k] = theta[k] - h * lg.grad[k];
    };
    if (opts.policy == StepPolicy::fixed) {
      apply(opts.step);
      lg = loss_and_gradient(net, ds, cfg);
      continue;
    }
    const double gn2 = gn * gn;
    const Vector grad_before = lg.grad;
    bool accepted = false;
    while (eta > 1e-300) {
      apply(eta);
      LossAndGradient trial = loss_and_gradient(net, ds, cfg);
      if (trial.loss <= lg.loss - opts.armijo * eta * gn2) {
        lg = std::move(trial);
        accepted = true;
        break;
      }
      eta *= opts.shrink;
    }
    if (!accepted) {
      std::copy(theta.begin(), theta.end(), params(net).begin());
      return finish(iter, gn, TerminalStatus::stalled);
    }
    double next = eta * opts.grow;
    if (opts.policy == StepPolicy::bb) {
      double ss = 0.0;
      double sy = 0.0;
      const auto p = params(net);
      for (std::size_t k = 0; k < p.size(); ++k) {
        const double sk = p[k] - theta[k];
        ss += sk * sk;
        sy += sk * (lg.grad[k] - grad_before[k]);
      }
      if (sy > 0.0) next = ss / sy;
    }
    eta = std::min(next, opts.max_step);
  }
}

std::vector<PathRow> decreasing_path_demo(std::size_t K) {
  if (K == 0) throw DomainError("decreasing_path_demo: K must be at least 1");
  std::vector<PathRow> rows;
  rows.reserve(K);
  const Dataset one(DenseMatrix(1, 1, 1.0), {1});
  const ObjectiveConfig cfg{LossKind::logistic(), {1.0}, 1.0, 0.1};
  for (std::size_t k = 1; k <= K; ++k) {
    const double kk = static_cast<double>(k);
    PathRow r;
    r.k = k;
    r.x = -1.0 / kk;
    r.y = std::sqrt(kk);
    r.z = 1.0 / kk;
    r.norm = std::sqrt(r.x * r.x + r.y * r.y + r.z * r.z);
    const double prod = r.x * r.y * r.z - 1.0;
    r.loss = prod * prod;
    SingleLayerReQUNet net(1, 1, Vector{r.x, r.y, r.z});
    r.regularized_loss = empirical_loss(Network(net), one, cfg);
    r.bound = r.norm * r.norm * r.norm / (3.0 * std::sqrt(2.0));
    rows.push_back(r);
  }
  return rows;
}

}  // namespace coercive
