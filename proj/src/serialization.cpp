#include "coercive/serialization.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace coercive::io {

namespace {

constexpr const char* kCheckpointFormat = "coercive-checkpoint";
constexpr int kCheckpointVersion = 1;

double parse_double(std::string_view text, std::size_t line) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  double v = 0.0;
  const auto* first = text.data();
  if (!text.empty() && text.front() == '+') ++first;
  const auto res = std::from_chars(first, text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    std::ostringstream msg;
    msg << "dataset csv: cannot parse number '" << text << "' on line " << line;
    throw FormatError(msg.str());
  }
  return v;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("config key '") + key + "': " + e.what());
  }
}

Json vec(std::span<const double> v) { return Json(std::vector<double>(v.begin(), v.end())); }

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void write_dataset_csv(std::ostream& out, const Dataset& ds) {
  for (std::size_t t = 0; t < ds.d(); ++t) out << 'x' << (t + 1) << ',';
  out << "y\n";
  for (std::size_t i = 0; i < ds.n(); ++i) {
    for (double v : ds.x(i)) out << format_double(v) << ',';
    out << ds.y(i) << '\n';
  }
}

Dataset read_dataset_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw FormatError("dataset csv: missing header");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  const auto cols = split_commas(header);
  if (cols.empty() || cols.back() != "y")
    throw FormatError("dataset csv: header must end with column 'y'");
  const std::size_t d = cols.size() - 1;
  for (std::size_t t = 0; t < d; ++t)
    if (cols[t] != "x" + std::to_string(t + 1))
      throw FormatError("dataset csv: header must be x1,...,xd,y");

  std::vector<double> entries;
  std::vector<int> labels;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != d + 1)
      throw FormatError("dataset csv: wrong field count on line " + std::to_string(lineno));
    for (std::size_t t = 0; t < d; ++t) entries.push_back(parse_double(fields[t], lineno));
    const double y = parse_double(fields[d], lineno);
    if (y != 1.0 && y != -1.0)
      throw FormatError("dataset csv: label must be -1 or 1 on line " + std::to_string(lineno));
    labels.push_back(static_cast<int>(y));
  }
  DenseMatrix features(labels.size(), d, std::move(entries));
  return Dataset(std::move(features), std::move(labels));
}

void save_dataset(const fs::path& path, const Dataset& ds) {
  std::ostringstream s;
  write_dataset_csv(s, ds);
  write_text_file(path, s.str());
}

Dataset load_dataset(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open dataset file " + path.string());
  return read_dataset_csv(in);
}

Json network_to_json(const Network& net) {
  Json j;
  j["format"] = kCheckpointFormat;
  j["version"] = kCheckpointVersion;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, DeepConvNet>) {
          j["kind"] = "deep";
          j["d"] = n.d();
          j["m"] = n.m();
          j["layers"] = n.layers();
          j["filter_len"] = n.filter_len();
          j["slope"] = n.slope();
        } else {
          j["kind"] = std::is_same_v<T, QuadraticNet> ? "quadratic" : "requ";
          j["d"] = n.d();
          j["m"] = n.m();
        }
        j["params"] = vec(n.params());
      },
      net);
  return j;
}

Network network_from_json(const Json& j) {
  try {
    if (j.at("format").get<std::string>() != kCheckpointFormat)
      throw FormatError("checkpoint: unexpected format tag");
    if (j.at("version").get<int>() != kCheckpointVersion)
      throw FormatError("checkpoint: unsupported version");
    const std::string kind = j.at("kind").get<std::string>();
    const auto d = j.at("d").get<std::size_t>();
    const auto m = j.at("m").get<std::size_t>();
    Vector p = j.at("params").get<Vector>();
    if (kind == "requ") return SingleLayerReQUNet(m, d, std::move(p));
    if (kind == "quadratic") return QuadraticNet(m, d, std::move(p));
    if (kind == "deep")
      return DeepConvNet(d, j.at("layers").get<std::size_t>(),
                         j.at("filter_len").get<std::size_t>(), m,
                         j.at("slope").get<double>(), std::move(p));
    throw FormatError("checkpoint: unknown network kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  } catch (const ShapeError& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const fs::path& path, const Network& net) {
  write_json_file(path, network_to_json(net));
}

Network load_checkpoint(const fs::path& path) { return network_from_json(read_json_file(path)); }

ObjectiveSpec objective_spec_from_json(const Json& j) {
  ObjectiveSpec s;
  const std::string loss = get_or<std::string>(j, "loss", "logistic");
  const int p = get_or<int>(j, "p", 3);
  if (loss == "logistic") {
    s.loss = LossKind::logistic();
  } else if (loss == "smooth-hinge") {
    s.loss = LossKind::smooth_hinge(p);
  } else {
    throw FormatError("objective: unknown loss '" + loss + "'");
  }
  s.lambda_c = get_or<double>(j, "lambda_c", 1.0);
  s.leaky_slope = get_or<double>(j, "leaky_slope", 0.1);
  if (j.contains("lambda")) {
    const Json& l = j.at("lambda");
    if (l.is_array()) {
      s.lambda.values = l.get<Vector>();
    } else if (l.is_object()) {
      if (l.contains("lambda0") && !(l.at("lambda0").is_string() &&
                                     l.at("lambda0").get<std::string>() == "auto"))
        s.lambda.lambda0 = get_or<double>(l, "lambda0", 0.0);
      s.lambda.seed = get_or<std::uint64_t>(l, "seed", 0);
    } else {
      throw FormatError("objective: lambda must be an array or an object");
    }
  }
  return s;
}

Json objective_to_json(const ObjectiveConfig& cfg) {
  Json j;
  j["loss"] = cfg.loss.name();
  j["p"] = cfg.loss.p;
  j["lambda"] = vec(cfg.lambda);
  j["lambda_c"] = cfg.lambda_c;
  j["leaky_slope"] = cfg.leaky_slope;
  return j;
}

ObjectiveConfig objective_from_json(const Json& j) {
  const ObjectiveSpec s = objective_spec_from_json(j);
  if (!s.lambda.values) throw FormatError("objective: explicit lambda array required");
  return {s.loss, *s.lambda.values, s.lambda_c, s.leaky_slope};
}

Json train_options_to_json(const TrainOptions& o) {
  Json j;
  j["policy"] = o.policy == StepPolicy::fixed          ? "fixed"
                : o.policy == StepPolicy::backtracking ? "backtracking"
                                                       : "bb";
  j["step"] = o.step;
  j["shrink"] = o.shrink;
  j["armijo"] = o.armijo;
  j["grow"] = o.grow;
  j["max_step"] = o.max_step;
  j["max_iters"] = o.max_iters;
  j["grad_tol_abs"] = o.grad_tol_abs;
  j["grad_tol_rel"] = o.grad_tol_rel;
  j["escape"] = o.escape;
  j["escape_radius"] = o.escape_radius;
  j["escape_directions"] = o.escape_directions;
  j["max_escapes"] = o.max_escapes;
  j["escape_tol_abs"] = o.escape_tol_abs;
  j["escape_tol_rel"] = o.escape_tol_rel;
  j["escape_spacing"] = o.escape_spacing;
  j["stall_window"] = o.stall_window;
  j["stall_rel"] = o.stall_rel;
  j["prune"] = o.prune;
  j["prune_every"] = o.prune_every;
  j["prune_radius"] = o.prune_radius;
  j["record_every"] = o.record_every;
  j["seed"] = o.seed;
  return j;
}

TrainOptions train_options_from_json(const Json& j, TrainOptions o) {
  if (j.contains("policy")) {
    const std::string p = get_or<std::string>(j, "policy", "bb");
    if (p == "fixed") o.policy = StepPolicy::fixed;
    else if (p == "backtracking") o.policy = StepPolicy::backtracking;
    else if (p == "bb") o.policy = StepPolicy::bb;
    else throw FormatError("train: unknown step policy '" + p + "'");
  }
  o.step = get_or(j, "step", o.step);
  o.shrink = get_or(j, "shrink", o.shrink);
  o.armijo = get_or(j, "armijo", o.armijo);
  o.grow = get_or(j, "grow", o.grow);
  o.max_step = get_or(j, "max_step", o.max_step);
  o.max_iters = get_or(j, "max_iters", o.max_iters);
  o.grad_tol_abs = get_or(j, "grad_tol_abs", o.grad_tol_abs);
  o.grad_tol_rel = get_or(j, "grad_tol_rel", o.grad_tol_rel);
  o.escape = get_or(j, "escape", o.escape);
  o.escape_radius = get_or(j, "escape_radius", o.escape_radius);
  o.escape_directions = get_or(j, "escape_directions", o.escape_directions);
  o.max_escapes = get_or(j, "max_escapes", o.max_escapes);
  o.escape_tol_abs = get_or(j, "escape_tol_abs", o.escape_tol_abs);
  o.escape_tol_rel = get_or(j, "escape_tol_rel", o.escape_tol_rel);
  o.escape_spacing = get_or(j, "escape_spacing", o.escape_spacing);
  o.stall_window = get_or(j, "stall_window", o.stall_window);
  o.stall_rel = get_or(j, "stall_rel", o.stall_rel);
  o.prune = get_or(j, "prune", o.prune);
  o.prune_every = get_or(j, "prune_every", o.prune_every);
  o.prune_radius = get_or(j, "prune_radius", o.prune_radius);
  o.record_every = get_or(j, "record_every", o.record_every);
  o.seed = get_or(j, "seed", o.seed);
  return o;
}

Json certificate_to_json(const CertificateReport& r) {
  Json j;
  j["verdict"] = to_string(r.verdict);
  j["loss"] = r.loss;
  j["grad_norm"] = r.grad_norm;
  j["grad_tol"] = r.grad_tol;
  j["training_error"] = r.training_error;
  j["margin"] = r.margin;
  j["max_loss_deriv"] = r.max_loss_deriv;
  j["epsilon"] = r.epsilon;
  j["inactive"] = r.inactive;
  j["lemma1_ok"] = r.lemma1_ok;
  j["step2_ok"] = r.step2_ok;
  j["balance_residual"] = vec(r.balance_residual);
  j["sigma_min"] = vec(r.sigma_min);
  j["singular_tol"] = vec(r.singular_tol);
  j["stationarity_residual"] = vec(r.stationarity_residual);
  return j;
}

Json deep_balance_to_json(const DeepBalanceReport& r) {
  Json j;
  j["case"] = to_string(r.classification);
  j["ok"] = r.ok;
  j["sum_a3"] = r.sum_a3;
  j["sum_rho3"] = r.sum_rho3;
  j["head_term"] = r.head_term;
  j["filter_term"] = vec(r.filter_term);
  j["filter_norms"] = vec(r.filter_norms);
  j["balance_residual"] = r.balance_residual;
  j["filter_residual"] = vec(r.filter_residual);
  j["max_residual"] = r.max_residual;
  return j;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& t) {
  out << "iter,loss,grad_norm,param_norm,status\n";
  for (const auto& s : t.samples)
    out << s.iter << ',' << format_double(s.loss) << ',' << format_double(s.grad_norm) << ','
        << format_double(s.param_norm) << ',' << s.event << '\n';
}

void save_trajectory(const fs::path& path, const Trajectory& t) {
  std::ostringstream s;
  write_trajectory_csv(s, t);
  write_text_file(path, s.str());
}

Json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
  if (!out) throw FormatError("write failed for " + path.string());
}

}  // namespace coercive::io
