#include "coercive/probes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coercive/landscape.hpp"
#include "coercive/optimize.hpp"
#include "coercive/parallel.hpp"
#include "coercive/random.hpp"

namespace coercive {

namespace {

// Runs body(t) -> (violated, statistic) in parallel and folds the results in
// index order.
template <class Body, class Fold>
ProbeSummary run_probe(std::string kind, std::size_t trials, double init, Body body, Fold fold) {
  std::vector<std::pair<bool, double>> out(trials);
  parallel_for(trials, [&](std::size_t t) { out[t] = body(t); });
  ProbeSummary s{std::move(kind), trials, 0, init};
  for (const auto& [bad, stat] : out) {
    if (bad) ++s.violations;
    s.worst = fold(s.worst, stat);
  }
  return s;
}

DenseMatrix random_symmetric(Rng& rng, std::size_t d) {
  DenseMatrix a(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      const double v = standard_normal(rng);
      a(i, j) = v;
      a(j, i) = v;
    }
  return a;
}

}  // namespace

ProbeSummary coercivity_probe(std::size_t n, std::size_t d, std::size_t m,
                              std::size_t trials, double max_norm, std::uint64_t seed) {
  const Dataset ds = gen_random(n, d, seed);
  const ObjectiveConfig cfg{LossKind::logistic(), sample_lambda(m, 1.0, seed), 1.0, 0.1};
  return run_probe(
      "coercivity", trials, std::numeric_limits<double>::infinity(),
      [&](std::size_t t) {
        Rng rng = make_rng(seed, t);
        SingleLayerReQUNet net(m, d);
        const Vector dir = random_unit_vector(rng, net.params().size());
        const double r = std::pow(10.0, uniform(rng, -3.0, std::log10(max_norm)));
        for (std::size_t k = 0; k < dir.size(); ++k) net.params()[k] = r * dir[k];
        const Network nn(net);
        const double loss = empirical_loss(nn, ds, cfg);
        const double bound = coercivity_bound(nn, cfg);
        return std::pair{loss < bound * (1.0 - 1e-9), loss / bound};
      },
      [](double a, double b) { return std::min(a, b); });
}

ProbeSummary lidskii_probe(std::size_t trials, std::size_t max_dim, std::uint64_t seed) {
  return run_probe(
      "lidskii", trials, -std::numeric_limits<double>::infinity(),
      [&](std::size_t t) {
        Rng rng = make_rng(seed, t);
        const auto d = static_cast<std::size_t>(
            std::uniform_int_distribution<std::size_t>(1, max_dim)(rng));
        const DenseMatrix a = random_symmetric(rng, d);
        DenseMatrix b = a;
        // Mix of small and large perturbations.
        const double scale = std::pow(10.0, uniform(rng, -6.0, 1.0));
        b += random_symmetric(rng, d) * scale;
        const Vector ea = numkit::sym_eigvals(a).values;
        const Vector eb = numkit::sym_eigvals(b).values;
        Vector diff(d);
        for (std::size_t i = 0; i < d; ++i) diff[i] = ea[i] - eb[i];
        const double gap = numkit::norm2(diff) - (a - b).frobenius_norm();
        return std::pair{gap > 1e-10, gap};
      },
      [](double a, double b) { return std::max(a, b); });
}

ProbeSummary conv_rank_probe(std::size_t trials, std::size_t max_s, std::size_t max_dz,
                             std::uint64_t seed) {
  return run_probe(
      "conv-rank", trials, std::numeric_limits<double>::infinity(),
      [&](std::size_t t) {
        Rng rng = make_rng(seed, t);
        const auto s = std::uniform_int_distribution<std::size_t>(1, max_s)(rng);
        const auto dz = std::uniform_int_distribution<std::size_t>(1, max_dz)(rng);
        Vector v;
        do {
          v = gaussian_vector(rng, s);
        } while (numkit::norm2(v) == 0.0);
        const double sigma = numkit::min_singular_value(numkit::conv_matrix(v, dz));
        return std::pair{!(sigma > 0.0), sigma};
      },
      [](double a, double b) { return std::min(a, b); });
}

ProbeSummary injectivity_probe(std::size_t trials, std::uint64_t seed) {
  return run_probe(
      "injectivity", trials, std::numeric_limits<double>::infinity(),
      [&](std::size_t t) {
        Rng rng = make_rng(seed, t);
        const auto d = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
        const auto l = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        const auto s = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        const Dataset ds = gen_random(12, d, seed * 7919 + t);
        DeepConvNet net(d, l, s, 3, uniform(rng, 0.05, 0.95));
        init_gaussian(net, rng);
        const InjectivityReport r = hidden_injectivity_check(net, ds);
        return std::pair{!r.ok, r.min_distance};
      },
      [](double a, double b) { return std::min(a, b); });
}

ProbeSummary homogeneity_probe(std::size_t trials, std::uint64_t seed) {
  return run_probe(
      "homogeneity", trials, 0.0,
      [&](std::size_t t) {
        Rng rng = make_rng(seed, t);
        const auto d = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
        const auto l = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        const auto s = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        const auto m = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
        DeepConvNet net(d, l, s, m, uniform(rng, 0.05, 0.95));
        for (double& p : net.params()) p = standard_normal(rng);
        const Vector x = gaussian_vector(rng, d);
        Vector r(l + 1);
        for (double& ri : r) ri = std::exp(uniform(rng, -1.0, 1.0));
        const double err = positive_homogeneity_check(net, x, r);
        return std::pair{!(err < 1e-10), err};
      },
      [](double a, double b) { return std::max(a, b); });
}

}  // namespace coercive
