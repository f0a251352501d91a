// Experiment harness: train, certify, probe, counterexample, demo-path, sweep.
// Exit codes: 0 certified / pass, 2 certificate or property failure,
// 1 usage or I/O error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#if __has_include("CLI11.hpp")
#include "CLI11.hpp"
#else
#include <CLI/CLI.hpp>
#endif

#include "coercive/constructions.hpp"
#include "coercive/landscape.hpp"
#include "coercive/optimize.hpp"
#include "coercive/parallel.hpp"
#include "coercive/probes.hpp"
#include "coercive/serialization.hpp"

namespace {

using namespace coercive;
using io::Json;
namespace fs = std::filesystem;

constexpr int kPass = 0;
constexpr int kUsage = 1;
constexpr int kFail = 2;

// Usage/config problems that should exit with code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config key '") + key + "': " + e.what());
  }
}

Json load_config(const std::string& path) {
  if (path.empty()) return Json::object();
  return io::read_json_file(path);
}

// ---------------------------------------------------------------- datasets

Dataset dataset_from_spec(const Json& spec, const fs::path& base) {
  if (spec.contains("path")) {
    fs::path p = spec.at("path").get<std::string>();
    if (p.is_relative()) p = base / p;
    return io::load_dataset(p);
  }
  const std::string gen = get_or<std::string>(spec, "generator", "random");
  const auto n = get_or<std::size_t>(spec, "n", 10);
  const auto d = get_or<std::size_t>(spec, "d", 3);
  const auto seed = get_or<std::uint64_t>(spec, "seed", 0);
  if (gen == "random") return gen_random(n, d, seed);
  if (gen == "quadratic") return gen_quadratically_separable(n, d, seed).data;
  if (gen == "repelling") {
    const std::string mode = get_or<std::string>(spec, "mode", n <= 4 ? "exact" : "generalized");
    if (mode != "exact" && mode != "generalized")
      throw UsageError("dataset: mode must be exact or generalized");
    return gen_mutually_repelling(n, get_or<std::size_t>(spec, "positives", 1),
                                  mode == "exact" ? RepellingMode::exact
                                                  : RepellingMode::generalized,
                                  get_or<std::size_t>(spec, "d", 0));
  }
  throw UsageError("dataset: unknown generator '" + gen + "'");
}

// ---------------------------------------------------------------- networks

Network network_from_spec(const Json& spec, const Dataset& ds, double slope, const fs::path& base) {
  if (spec.contains("init_checkpoint")) {
    fs::path p = spec.at("init_checkpoint").get<std::string>();
    if (p.is_relative()) p = base / p;
    return io::load_checkpoint(p);
  }
  const std::string kind = get_or<std::string>(spec, "kind", "requ");
  const auto m = get_or<std::size_t>(spec, "m", ds.n() + 1);
  Rng rng = make_rng(get_or<std::uint64_t>(spec, "init_seed", 0), 7);
  const bool zero = get_or<bool>(spec, "zero_init", false);
  if (kind == "requ") {
    SingleLayerReQUNet net(m, ds.d());
    if (!zero) init_gaussian(net, rng);
    return net;
  }
  if (kind == "quadratic") {
    QuadraticNet net(m, ds.d());
    if (!zero) init_gaussian(net, rng);
    return net;
  }
  if (kind == "deep") {
    DeepConvNet net(ds.d(), get_or<std::size_t>(spec, "layers", 2),
                    get_or<std::size_t>(spec, "filter_len", 2), m, slope);
    if (!zero) init_gaussian(net, rng);
    return net;
  }
  throw UsageError("network: unknown kind '" + kind + "'");
}

ObjectiveConfig resolve_objective(const io::ObjectiveSpec& spec, const Dataset& ds,
                                  std::size_t m, double* lambda0_out) {
  ObjectiveConfig cfg{spec.loss, {}, spec.lambda_c, spec.leaky_slope};
  if (spec.lambda.values) {
    cfg.lambda = *spec.lambda.values;
    if (lambda0_out) *lambda0_out = std::nan("");
  } else {
    const double l0 = spec.lambda.lambda0 ? *spec.lambda.lambda0
                                          : estimate_lambda0(ds, spec.loss, spec.lambda.seed);
    cfg.lambda = sample_lambda(m, l0, spec.lambda.seed);
    if (lambda0_out) *lambda0_out = l0;
  }
  return cfg;
}

CertifyOptions certify_options(const Json& j, const TrainOptions* train) {
  CertifyOptions o;
  if (train) {
    o.grad_tol_abs = train->grad_tol_abs;
    o.grad_tol_rel = train->grad_tol_rel;
  }
  o.grad_tol_abs = get_or(j, "grad_tol_abs", o.grad_tol_abs);
  o.grad_tol_rel = get_or(j, "grad_tol_rel", o.grad_tol_rel);
  o.inactive_tol = get_or(j, "inactive_tol", o.inactive_tol);
  o.singular_rel = get_or(j, "singular_rel", o.singular_rel);
  return o;
}

Json certify_options_json(const CertifyOptions& o) {
  return Json{{"grad_tol_abs", o.grad_tol_abs},
              {"grad_tol_rel", o.grad_tol_rel},
              {"inactive_tol", o.inactive_tol},
              {"singular_rel", o.singular_rel}};
}

// Certificate plus deep-net diagnostics; verdict "not-critical" when the
// point is too far from stationarity.
struct Certification {
  Json report;
  bool certified = false;
};

Certification run_certificate(const Network& net, const Dataset& ds, const ObjectiveConfig& cfg,
                              const CertifyOptions& opts) {
  Certification c;
  try {
    const CertificateReport r = certify(net, ds, cfg, opts);
    c.report = io::certificate_to_json(r);
    c.certified = r.verdict == Verdict::certified;
  } catch (const NotCriticalError& e) {
    c.report = Json{{"verdict", "not-critical"},
                    {"grad_norm", e.grad_norm()},
                    {"training_error", training_error(net, ds)},
                    {"message", e.what()}};
  }
  if (const auto* deep = std::get_if<DeepConvNet>(&net)) {
    c.report["deep_balance"] = io::deep_balance_to_json(deep_balance_check(*deep, cfg, 1e-4));
    try {
      const InjectivityReport inj = hidden_injectivity_check(*deep, ds);
      c.report["hidden_injective"] = inj.ok;
    } catch (const DomainError& e) {
      c.report["hidden_injective"] = e.what();
    }
  }
  return c;
}

void print_verdict(const std::string& cmd, const Json& report) {
  std::cout << cmd << ": verdict=" << report.value("verdict", "?")
            << " training_error=" << report.value("training_error", -1.0)
            << " grad_norm=" << report.value("grad_norm", -1.0) << '\n';
}

// ---------------------------------------------------------------- commands

int cmd_train(const std::string& config_path, std::string out_dir,
              std::optional<std::uint64_t> seed) {
  Json cfg_json = load_config(config_path);
  const fs::path base = config_path.empty() ? fs::current_path() : fs::path(config_path).parent_path();
  if (seed) {
    cfg_json["train"]["seed"] = *seed;
    cfg_json["network"]["init_seed"] = *seed;
  }
  if (out_dir.empty()) out_dir = get_or<std::string>(cfg_json, "out", "train-out");
  const Json ds_spec = cfg_json.value("dataset", Json::object());
  const Dataset ds = dataset_from_spec(ds_spec, base);
  const io::ObjectiveSpec spec = io::objective_spec_from_json(cfg_json.value("objective", Json::object()));
  Network net = network_from_spec(cfg_json.value("network", Json::object()), ds, spec.leaky_slope, base);
  double lambda0 = 0.0;
  const ObjectiveConfig cfg = resolve_objective(spec, ds, neuron_count(net), &lambda0);
  const TrainOptions opts = io::train_options_from_json(cfg_json.value("train", Json::object()));
  const CertifyOptions copts = certify_options(cfg_json.value("certify", Json::object()), &opts);

  // Resolved config: re-running it reproduces every artifact.
  Json resolved = cfg_json;
  resolved["objective"] = io::objective_to_json(cfg);
  resolved["train"] = io::train_options_to_json(opts);
  resolved["certify"] = certify_options_json(copts);
  resolved["out"] = out_dir;
  if (resolved["dataset"].contains("path")) {
    fs::path p = resolved["dataset"]["path"].get<std::string>();
    if (p.is_relative()) resolved["dataset"]["path"] = fs::absolute(base / p).string();
  }
  if (resolved["network"].contains("init_checkpoint")) {
    fs::path p = resolved["network"]["init_checkpoint"].get<std::string>();
    if (p.is_relative()) resolved["network"]["init_checkpoint"] = fs::absolute(base / p).string();
  }
  const fs::path out(out_dir);
  io::write_json_file(out / "config.json", resolved);
  io::save_dataset(out / "dataset.csv", ds);

  TrainResult res = train(std::move(net), ds, cfg, opts);
  io::save_trajectory(out / "trajectory.csv", res.trajectory);
  io::save_checkpoint(out / "checkpoint.json", res.net);

  Certification c = run_certificate(res.net, ds, cfg, copts);
  c.report["status"] = to_string(res.trajectory.status);
  c.report["iterations"] = res.trajectory.iterations;
  c.report["escapes"] = res.trajectory.escapes;
  c.report["prunes"] = res.trajectory.prunes;
  if (std::isfinite(lambda0)) c.report["lambda0"] = lambda0;
  if (!res.trajectory.violation.empty()) c.report["violation"] = res.trajectory.violation;
  io::write_json_file(out / "certificate.json", c.report);
  print_verdict("train", c.report);
  if (res.trajectory.status == TerminalStatus::coercivity_violation) {
    std::cerr << "coercivity violation: " << res.trajectory.violation << '\n';
    return kFail;
  }
  return c.certified ? kPass : kFail;
}

int cmd_certify(const std::string& checkpoint, const std::string& dataset,
                const std::string& config_path, const std::string& out_path) {
  const Network net = io::load_checkpoint(checkpoint);
  const Dataset ds = io::load_dataset(dataset);
  Json cfg_json = load_config(config_path);
  // Accept either a full experiment config or a bare objective block.
  const Json obj = cfg_json.contains("objective") ? cfg_json["objective"] : cfg_json;
  const io::ObjectiveSpec spec = io::objective_spec_from_json(obj);
  const ObjectiveConfig cfg = resolve_objective(spec, ds, neuron_count(net), nullptr);
  const CertifyOptions copts = certify_options(cfg_json.value("certify", Json::object()), nullptr);
  Certification c = run_certificate(net, ds, cfg, copts);
  if (!out_path.empty()) io::write_json_file(out_path, c.report);
  print_verdict("certify", c.report);
  std::cout << c.report.dump(2) << '\n';
  return c.certified ? kPass : kFail;
}

Json summary_json(const ProbeSummary& s) {
  return Json{{"kind", s.kind}, {"trials", s.trials}, {"violations", s.violations},
              {"worst", s.worst}, {"pass", s.pass()}};
}

int cmd_probe(const std::string& kind, const std::string& config_path,
              std::optional<std::size_t> trials_flag, std::optional<std::uint64_t> seed_flag,
              const std::string& out_path) {
  const Json cfg = load_config(config_path);
  const auto seed = seed_flag.value_or(get_or<std::uint64_t>(cfg, "seed", 0));
  auto trials = [&](std::size_t fallback) {
    return trials_flag.value_or(get_or<std::size_t>(cfg, "trials", fallback));
  };
  Json report;
  bool pass = false;
  if (kind == "coercivity") {
    const ProbeSummary s = coercivity_probe(get_or<std::size_t>(cfg, "n", 10),
                                            get_or<std::size_t>(cfg, "d", 3),
                                            get_or<std::size_t>(cfg, "m", 11), trials(1000),
                                            get_or<double>(cfg, "max_norm", 1e3), seed);
    report = summary_json(s);
    pass = s.pass();
  } else if (kind == "lidskii") {
    const ProbeSummary s = lidskii_probe(trials(10000), get_or<std::size_t>(cfg, "max_dim", 20), seed);
    report = summary_json(s);
    pass = s.pass();
  } else if (kind == "conv-rank") {
    const ProbeSummary s = conv_rank_probe(trials(1000), get_or<std::size_t>(cfg, "max_s", 8),
                                           get_or<std::size_t>(cfg, "max_dz", 32), seed);
    report = summary_json(s);
    pass = s.pass();
  } else if (kind == "injectivity") {
    const ProbeSummary s = injectivity_probe(trials(1000), seed);
    report = summary_json(s);
    pass = s.pass();
  } else if (kind == "lemma2") {
    const auto n = get_or<std::size_t>(cfg, "n", 5);
    const auto m = get_or<std::size_t>(cfg, "m", n + 1);
    const Dataset ds = gen_random(n, get_or<std::size_t>(cfg, "d", 3), seed);
    const Vector lambda = sample_lambda(m, get_or<double>(cfg, "lambda0", 1.0), seed);
    const std::string mode = get_or<std::string>(cfg, "mode", "random");
    if (mode != "random" && mode != "adversarial")
      throw UsageError("lemma2: mode must be random or adversarial");
    const Lemma2Result r = lemma2_monte_carlo(
        ds, m, lambda, trials(1000), seed,
        mode == "random" ? Lemma2Mode::random : Lemma2Mode::adversarial);
    report = Json{{"kind", "lemma2"}, {"mode", mode}, {"n", n}, {"m", m},
                  {"trials", r.trials}, {"min_max_sigma", r.min_max_sigma},
                  {"all_singular_trials", r.all_singular_trials},
                  {"hypothesis_violated", r.hypothesis_violated}};
    if (!r.warning.empty()) {
      report["warning"] = r.warning;
      std::cerr << "warning: " << r.warning << '\n';
    }
    // With m <= n nothing is claimed; the run only reports what it found.
    pass = r.hypothesis_violated || (r.min_max_sigma > 0.0 && r.all_singular_trials == 0);
    report["pass"] = pass;
  } else if (kind == "overdetermined") {
    const auto n = get_or<std::size_t>(cfg, "n", 5);
    const auto m = get_or<std::size_t>(cfg, "m", n + 1);
    const OverdeterminedSweep r = overdetermined_sweep(n, m, trials(1000), seed);
    pass = r.min_residual > 1e-10;
    report = Json{{"kind", "overdetermined"}, {"n", n}, {"m", m}, {"trials", r.trials},
                  {"min_residual", r.min_residual}, {"pass", pass}};
  } else {
    throw UsageError("probe: unknown kind '" + kind + "'");
  }
  Json resolved = cfg;
  resolved["kind"] = kind;
  resolved["seed"] = seed;
  resolved["trials"] = report["trials"];
  report["config"] = resolved;
  if (!out_path.empty()) io::write_json_file(out_path, report);
  std::cout << report.dump() << '\n';
  return pass ? kPass : kFail;
}

int cmd_counterexample(std::size_t n, std::size_t m, std::uint64_t seed, std::string mode,
                       Vector lambda, std::size_t perturbations, const std::string& out_dir) {
  if (lambda.empty()) lambda = sample_lambda(m, 0.5, seed);
  std::optional<RepellingMode> rm;
  if (mode == "exact") rm = RepellingMode::exact;
  else if (mode == "generalized") rm = RepellingMode::generalized;
  else if (mode != "auto") throw UsageError("counterexample: mode must be exact, generalized or auto");

  const BadLocalMin bad = build_bad_local_min(n, m, lambda, rm);
  const ObjectiveConfig cfg{LossKind::logistic(), bad.lambda, 1.0, 0.1};
  const Network net(bad.net);
  const LossAndGradient lg = loss_and_gradient(net, bad.data, cfg);
  const double gn = numkit::norm2(lg.grad);
  const double err = training_error(net, bad.data);
  const double expected = 1.0 - static_cast<double>(m) / static_cast<double>(n);

  Rng rng = make_rng(seed, 0xbad);
  std::size_t decreases = 0;
  double min_change = std::numeric_limits<double>::infinity();
  Network probe = net;
  const auto theta = params(net);
  for (std::size_t t = 0; t < perturbations; ++t) {
    const Vector dir = random_unit_vector(rng, theta.size());
    auto p = params(probe);
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = theta[k] + 1e-3 * dir[k];
    const double change = empirical_loss(probe, bad.data, cfg) - lg.loss;
    min_change = std::min(min_change, change);
    if (change < 0.0) ++decreases;
  }
  Certification cert = run_certificate(net, bad.data, cfg, CertifyOptions{1e-10, 0.0, 1e-6, 1e-3});

  const bool pass = gn < 1e-6 && std::abs(err - expected) < 1e-12 && decreases == 0;
  Json report{{"n", n}, {"m", m}, {"lambda", bad.lambda}, {"loss", lg.loss},
              {"grad_norm", gn}, {"training_error", err}, {"expected_error", expected},
              {"perturbations", perturbations}, {"perturbation_radius", 1e-3},
              {"loss_decreases", decreases}, {"min_loss_change", min_change},
              {"certificate", cert.report}, {"pass", pass}};
  const fs::path out(out_dir);
  io::save_dataset(out / "dataset.csv", bad.data);
  io::save_checkpoint(out / "checkpoint.json", net);
  io::write_json_file(out / "report.json", report);
  io::write_json_file(out / "config.json",
                      Json{{"command", "counterexample"}, {"n", n}, {"m", m}, {"seed", seed},
                           {"mode", mode}, {"lambda", bad.lambda},
                           {"perturbations", perturbations}});
  std::cout << "counterexample: grad_norm=" << gn << " training_error=" << err
            << " expected=" << expected << " loss_decreases=" << decreases
            << (pass ? " pass" : " FAIL") << '\n';
  return pass ? kPass : kFail;
}

int cmd_demo_path(std::size_t K, const std::string& out_path) {
  const std::vector<PathRow> rows = decreasing_path_demo(K);
  std::ostringstream csv;
  csv << "k,x,y,z,norm,loss,regularized_loss,bound\n";
  bool above = true;
  for (const PathRow& r : rows) {
    csv << r.k << ',' << io::format_double(r.x) << ',' << io::format_double(r.y) << ','
        << io::format_double(r.z) << ',' << io::format_double(r.norm) << ','
        << io::format_double(r.loss) << ',' << io::format_double(r.regularized_loss) << ','
        << io::format_double(r.bound) << '\n';
    above = above && r.regularized_loss > r.bound;
  }
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    io::write_text_file(out_path, csv.str());
    const PathRow& last = rows.back();
    std::cout << "demo-path: k=" << last.k << " norm=" << last.norm << " loss=" << last.loss
              << " regularized_loss=" << last.regularized_loss << '\n';
  }
  return above ? kPass : kFail;
}

std::vector<std::size_t> size_list(const Json& cfg, const char* key, std::vector<std::size_t> fallback) {
  if (!cfg.contains(key)) return fallback;
  const Json& v = cfg.at(key);
  if (v.is_array()) return v.get<std::vector<std::size_t>>();
  if (v.is_object()) {
    const auto lo = get_or<std::size_t>(v, "from", 0);
    const auto hi = get_or<std::size_t>(v, "to", 0);
    std::vector<std::size_t> out;
    for (std::size_t i = lo; i <= hi && hi >= lo; ++i) out.push_back(i);
    return out;
  }
  return {v.get<std::size_t>()};
}

int cmd_sweep(const std::string& config_path, const std::string& out_override) {
  const Json cfg = load_config(config_path);
  const auto ns = size_list(cfg, "n", {});
  const auto ms = size_list(cfg, "m", {});
  const auto seeds = size_list(cfg, "seeds", {});
  const auto d = get_or<std::size_t>(cfg, "d", 3);
  TrainOptions opts = io::train_options_from_json(cfg.value("train", Json::object()));
  const std::string out_path = out_override.empty() ? get_or<std::string>(cfg, "out", "") : out_override;

  struct Cell {
    std::size_t m, n, seed;
  };
  std::vector<Cell> cells;
  for (std::size_t n : ns)
    for (std::size_t m : ms)
      for (std::size_t s : seeds) cells.push_back({m, n, s});
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    return std::tie(a.m, a.n, a.seed) < std::tie(b.m, b.n, b.seed);
  });

  std::vector<std::string> rows(cells.size());
  parallel_for(cells.size(), [&](std::size_t c) {
    const Cell cell = cells[c];
    if (cell.m == 0 || cell.n == 0) {
      rows[c] = std::to_string(cell.m) + ',' + std::to_string(cell.n) + ',' +
                std::to_string(cell.seed) + ",nan,nan,false";
      return;
    }
    const Dataset ds = gen_random(cell.n, d, cell.seed);
    const double l0 = estimate_lambda0(ds, LossKind::logistic(), cell.seed);
    const ObjectiveConfig ocfg{LossKind::logistic(), sample_lambda(cell.m, l0, cell.seed), 1.0, 0.1};
    SingleLayerReQUNet net(cell.m, d);
    Rng rng = make_rng(cell.seed, 7);
    init_gaussian(net, rng);
    TrainOptions o = opts;
    o.seed = cell.seed;
    TrainResult res = train(Network(net), ds, ocfg, o);
    bool certified = false;
    if (reached_criticality(res.trajectory.status)) {
      try {
        CertifyOptions co;
        co.grad_tol_abs = o.grad_tol_abs;
        co.grad_tol_rel = o.grad_tol_rel;
        certified = certify(res.net, ds, ocfg, co).verdict == Verdict::certified;
      } catch (const NotCriticalError&) {
      }
    }
    std::ostringstream row;
    row << cell.m << ',' << cell.n << ',' << cell.seed << ',' << io::format_double(l0) << ','
        << io::format_double(training_error(res.net, ds)) << ',' << (certified ? "true" : "false");
    rows[c] = row.str();
  });

  std::ostringstream csv;
  csv << "m,n,seed,lambda0,terminal_error,certified\n";
  for (const auto& r : rows) csv << r << '\n';
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    io::write_text_file(out_path, csv.str());
    Json resolved = cfg;
    resolved["train"] = io::train_options_to_json(opts);
    io::write_json_file(fs::path(out_path).replace_extension(".config.json"), resolved);
    std::cout << "sweep: " << rows.size() << " cells written to " << out_path << '\n';
  }
  return kPass;
}

Vector parse_lambda_list(const std::string& text) {
  Vector out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError("cannot parse lambda value '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coercive ReQU network experiments"};
  app.require_subcommand(1);

  std::string config, out, checkpoint, dataset, kind, mode = "auto", lambda_text;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::size_t n = 4, m = 2, K = 10000, perturbations = 1000;

  auto* train_cmd = app.add_subcommand("train", "train a network and certify the terminal point");
  train_cmd->add_option("-c,--config", config, "experiment config (JSON)");
  train_cmd->add_option("-o,--out", out, "artifact directory (overrides config 'out')");
  train_cmd->add_option("--seed", seed, "overrides train and init seeds");

  auto* certify_cmd = app.add_subcommand("certify", "certify a checkpoint on a dataset");
  certify_cmd->add_option("--checkpoint", checkpoint, "network checkpoint (JSON)")->required();
  certify_cmd->add_option("--dataset", dataset, "dataset CSV")->required();
  certify_cmd->add_option("-c,--config", config, "objective or experiment config (JSON)");
  certify_cmd->add_option("-o,--out", out, "write the report here");

  auto* probe_cmd = app.add_subcommand("probe", "sampled property checks");
  probe_cmd->add_option("kind", kind, "coercivity|lemma2|lidskii|overdetermined|conv-rank|injectivity")
      ->required();
  probe_cmd->add_option("-c,--config", config, "probe parameters (JSON)");
  probe_cmd->add_option("--trials", trials, "number of trials");
  probe_cmd->add_option("--seed", seed, "seed");
  probe_cmd->add_option("-o,--out", out, "write the report here");

  auto* cx_cmd = app.add_subcommand("counterexample", "construct the bad local minimum");
  cx_cmd->add_option("--n", n, "samples");
  cx_cmd->add_option("--m", m, "neurons (<= n)");
  cx_cmd->add_option("--seed", seed, "seed for lambda and perturbations");
  cx_cmd->add_option("--mode", mode, "exact|generalized|auto");
  cx_cmd->add_option("--lambda", lambda_text, "comma-separated lambda in (0, 1/2)");
  cx_cmd->add_option("--perturbations", perturbations, "random perturbations of radius 1e-3");
  cx_cmd->add_option("-o,--out", out, "artifact directory (default counterexample-out)");

  auto* path_cmd = app.add_subcommand("demo-path", "decreasing path to infinity for (xyz-1)^2");
  path_cmd->add_option("--K", K, "number of path points");
  path_cmd->add_option("-o,--out", out, "CSV output (stdout if omitted)");

  auto* sweep_cmd = app.add_subcommand("sweep", "grid of (m, n, seed) training runs");
  sweep_cmd->add_option("-c,--config", config, "grid config (JSON)")->required();
  sweep_cmd->add_option("-o,--out", out, "CSV output (overrides config 'out')");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kPass : kUsage;
  }

  try {
    if (*train_cmd) return cmd_train(config, out, seed);
    if (*certify_cmd) return cmd_certify(checkpoint, dataset, config, out);
    if (*probe_cmd) return cmd_probe(kind, config, trials, seed, out);
    if (*cx_cmd)
      return cmd_counterexample(n, m, seed.value_or(0), mode, parse_lambda_list(lambda_text),
                                perturbations, out.empty() ? "counterexample-out" : out);
    if (*path_cmd) return cmd_demo_path(K, out);
    if (*sweep_cmd) return cmd_sweep(config, out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const coercive::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
