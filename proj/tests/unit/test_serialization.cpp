#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "coercive/serialization.hpp"

using namespace coercive;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("coercive_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, 0.0}) {
    EXPECT_EQ(std::stod(io::format_double(v)), v);
  }
}

TEST(DatasetCsv, RoundTripExact) {
  Dataset ds = gen_random(7, 3, 1);
  std::stringstream ss;
  io::write_dataset_csv(ss, ds);
  Dataset back = io::read_dataset_csv(ss);
  EXPECT_EQ(back.labels(), ds.labels());
  EXPECT_EQ(numkit::max_abs_diff(back.features().data(), ds.features().data()), 0.0);
}

TEST(DatasetCsv, MalformedInputThrows) {
  std::stringstream bad("x1,y\n1.0\n");
  EXPECT_THROW(io::read_dataset_csv(bad), FormatError);
  std::stringstream label("x1,y\n1.0,2\n");
  EXPECT_THROW(io::read_dataset_csv(label), Error);
  EXPECT_THROW(io::load_dataset("/nonexistent/file.csv"), Error);
}

TEST(Checkpoint, RoundTripAllKinds) {
  Rng rng = make_rng(0);
  SingleLayerReQUNet s(3, 2);
  init_gaussian(s, rng);
  QuadraticNet q(2, 4);
  init_gaussian(q, rng);
  DeepConvNet d(4, 3, 2, 5, 0.2);
  init_gaussian(d, rng);
  const fs::path dir = temp_dir("ckpt");
  for (const Network& net : {Network(s), Network(q), Network(d)}) {
    io::save_checkpoint(dir / "c.json", net);
    Network back = io::load_checkpoint(dir / "c.json");
    EXPECT_EQ(back.index(), net.index());
    EXPECT_EQ(numkit::max_abs_diff(params(back), params(net)), 0.0);
  }
  const DeepConvNet& dd = std::get<DeepConvNet>(io::load_checkpoint(dir / "c.json"));
  EXPECT_EQ(dd.layers(), 3u);
  EXPECT_DOUBLE_EQ(dd.slope(), 0.2);
  fs::remove_all(dir);
}

TEST(Checkpoint, CorruptInputThrows) {
  EXPECT_THROW(io::network_from_json(io::Json{{"format", "other"}}), FormatError);
  io::Json j = io::network_to_json(SingleLayerReQUNet(2, 2));
  j["params"].erase(0);
  EXPECT_THROW(io::network_from_json(j), Error);
  const fs::path dir = temp_dir("corrupt");
  io::write_text_file(dir / "c.json", "{not json");
  EXPECT_THROW(io::load_checkpoint(dir / "c.json"), FormatError);
  fs::remove_all(dir);
}

TEST(Objective, ExplicitAndSampledLambda) {
  io::ObjectiveSpec a = io::objective_spec_from_json(io::Json::parse(R"({"lambda":[0.1,0.2]})"));
  ASSERT_TRUE(a.lambda.values);
  EXPECT_EQ(a.lambda.values->size(), 2u);
  io::ObjectiveSpec b = io::objective_spec_from_json(
      io::Json::parse(R"({"loss":"smooth-hinge","p":4,"lambda":{"lambda0":0.5,"seed":3}})"));
  EXPECT_EQ(b.loss.family, LossFamily::smooth_hinge);
  EXPECT_EQ(b.loss.p, 4);
  ASSERT_TRUE(b.lambda.lambda0);
  EXPECT_DOUBLE_EQ(*b.lambda.lambda0, 0.5);
  EXPECT_EQ(b.lambda.seed, 3u);
  io::ObjectiveSpec c = io::objective_spec_from_json(io::Json::parse(R"({"lambda":{"lambda0":"auto"}})"));
  EXPECT_FALSE(c.lambda.lambda0);
  EXPECT_THROW(io::objective_spec_from_json(io::Json::parse(R"({"loss":"hinge"})")), FormatError);

  ObjectiveConfig cfg{LossKind::logistic(), {0.25, 0.5}, 2.0, 0.3};
  ObjectiveConfig back = io::objective_from_json(io::objective_to_json(cfg));
  EXPECT_EQ(back.lambda, cfg.lambda);
  EXPECT_DOUBLE_EQ(back.lambda_c, 2.0);
  EXPECT_DOUBLE_EQ(back.leaky_slope, 0.3);
}

TEST(TrainOptionsJson, RoundTripAndPartialOverride) {
  TrainOptions o;
  o.policy = StepPolicy::fixed;
  o.step = 0.01;
  o.max_iters = 77;
  TrainOptions back = io::train_options_from_json(io::train_options_to_json(o));
  EXPECT_EQ(back.policy, StepPolicy::fixed);
  EXPECT_DOUBLE_EQ(back.step, 0.01);
  EXPECT_EQ(back.max_iters, 77u);
  TrainOptions partial = io::train_options_from_json(io::Json::parse(R"({"grad_tol_rel":1e-6})"));
  EXPECT_DOUBLE_EQ(partial.grad_tol_rel, 1e-6);
  EXPECT_EQ(partial.max_iters, TrainOptions{}.max_iters);
  EXPECT_THROW(io::train_options_from_json(io::Json::parse(R"({"policy":"newton"})")), FormatError);
}

TEST(Trajectory, CsvHeaderAndRows) {
  Trajectory t;
  t.samples.push_back({0, 1.0, 0.5, 0.1, "running"});
  t.samples.push_back({1, 0.9, 0.4, 0.2, "converged"});
  std::stringstream ss;
  io::write_trajectory_csv(ss, t);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "iter,loss,grad_norm,param_norm,status");
  std::getline(ss, line);
  EXPECT_EQ(line, "0,1,0.5,0.1,running");
}
