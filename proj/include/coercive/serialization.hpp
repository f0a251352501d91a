#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#if __has_include("json.hpp")
#include "json.hpp"
#else
#include <nlohmann/json.hpp>
#endif

#include "coercive/datasets.hpp"
#include "coercive/landscape.hpp"
#include "coercive/models.hpp"
#include "coercive/objective.hpp"
#include "coercive/optimize.hpp"

namespace coercive::io {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// CSV with header x1,...,xd,y.
void write_dataset_csv(std::ostream& out, const Dataset& ds);
Dataset read_dataset_csv(std::istream& in);
void save_dataset(const fs::path& path, const Dataset& ds);
Dataset load_dataset(const fs::path& path);

// {"format": "coercive-checkpoint", "version": 1, "kind": requ|quadratic|deep,
//  shape fields, "params": [...]}
Json network_to_json(const Network& net);
Network network_from_json(const Json& j);
void save_checkpoint(const fs::path& path, const Network& net);
Network load_checkpoint(const fs::path& path);

// Lambda either explicit or drawn with sample_lambda(m, lambda0, seed);
// lambda0 absent means "estimate from the dataset".
struct LambdaSpec {
  std::optional<Vector> values;
  std::optional<double> lambda0;
  std::uint64_t seed = 0;
};

struct ObjectiveSpec {
  LossKind loss;
  LambdaSpec lambda;
  double lambda_c = 1.0;
  double leaky_slope = 0.1;
};

// {"loss": "logistic"|"smooth-hinge", "p": 3, "lambda": [..] | {"lambda0": x|"auto",
//  "seed": s}, "lambda_c": 1, "leaky_slope": 0.1}
ObjectiveSpec objective_spec_from_json(const Json& j);
Json objective_to_json(const ObjectiveConfig& cfg);
ObjectiveConfig objective_from_json(const Json& j);  // needs an explicit lambda array

Json train_options_to_json(const TrainOptions& o);
// Missing keys keep the defaults of `base`.
TrainOptions train_options_from_json(const Json& j, TrainOptions base = {});

Json certificate_to_json(const CertificateReport& r);
Json deep_balance_to_json(const DeepBalanceReport& r);

// CSV columns iter,loss,grad_norm,param_norm,status.
void write_trajectory_csv(std::ostream& out, const Trajectory& t);
void save_trajectory(const fs::path& path, const Trajectory& t);

Json read_json_file(const fs::path& path);
void write_json_file(const fs::path& path, const Json& j);
void write_text_file(const fs::path& path, const std::string& text);

}  // namespace coercive::io
