#include "vrstab/config.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace vrstab;
using nlohmann::json;

namespace {

bool has_error(const ConfigError& e, const std::string& text) {
  return std::any_of(e.errors().begin(), e.errors().end(),
                     [&](const std::string& s) { return s.find(text) != std::string::npos; });
}

std::vector<std::string> errors_of(const std::string& text) {
  try {
    validate_config(parse_config_text(text));
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}

}  // namespace

TEST(Config, MinimalConfigGetsDefaults) {
  const ValidatedConfig vc =
      validate_config(parse_config_text(R"({"method": "svrg", "dataset": "data/mushrooms", "eta": 0.1})"));
  const ExperimentConfig& c = vc.config;
  EXPECT_EQ(c.replicates, 100u);
  EXPECT_EQ(c.epochs, 8u);
  EXPECT_EQ(c.inner_length, 0u);
  EXPECT_EQ(c.inner_factor, 1.0);
  EXPECT_EQ(c.step_sizes, std::vector<double>{0.1});
  EXPECT_EQ(c.source.path, "data/mushrooms");
  EXPECT_TRUE(c.source.preprocess);
  EXPECT_EQ(c.train_fraction, 0.8);
  EXPECT_EQ(c.checkpoints, 50u);
  EXPECT_EQ(c.initial_point, InitialPoint::kZero);
  EXPECT_EQ(c.effective_init_option(), InitOption::kI);
  EXPECT_TRUE(vc.warnings.empty());
}

TEST(Config, NegativeStepSize) {
  const auto errors = errors_of(R"({"method": "svrg", "dataset": "d", "eta": -0.1})");
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_EQ(errors[0], "step_size must be positive");
}

TEST(Config, ErrorsAreCollected) {
  const auto errors = errors_of(
      R"({"method": "adam", "dataset": "d", "step_sizes": [0.1, 0], "m": 0, "train_fraction": 1.5,
          "colour": "red", "replicates": "many"})");
  EXPECT_GE(errors.size(), 6u);
  const ConfigError e(errors);
  EXPECT_TRUE(has_error(e, "unknown key 'colour'"));
  EXPECT_TRUE(has_error(e, "step_size must be positive"));
  EXPECT_TRUE(has_error(e, "m must be positive"));
  EXPECT_TRUE(has_error(e, "train_fraction must lie in (0, 1]"));
  EXPECT_TRUE(has_error(e, "replicates: expected an integer"));
  EXPECT_TRUE(has_error(e, "method"));
  EXPECT_FALSE(errors_of(R"({"dataset": "d"})").size());
  EXPECT_TRUE(has_error(ConfigError(errors_of("{}")), "dataset is required"));
  EXPECT_THROW(parse_config_text("{oops"), ConfigError);
  EXPECT_THROW(validate_config(json::array()), ConfigError);
}

TEST(Config, StepSizePreconditionWarning) {
  const std::string base = R"({"dataset": {"synthetic": {"n": 10, "dimension": 3, "labels": "logistic", "unit_norm": true}}, )";
  // α = 0.25 for unit-norm logistic data, so η up to 2 is covered.
  EXPECT_TRUE(validate_config(parse_config_text(base + R"("eta": 1.0})")).warnings.empty());
  EXPECT_TRUE(validate_config(parse_config_text(base + R"("eta": 2.0})")).warnings.empty());
  const auto vc = validate_config(parse_config_text(base + R"("step_sizes": [0.5, 2.5]})"));
  ASSERT_EQ(vc.warnings.size(), 1u);
  EXPECT_NE(vc.warnings[0].find("2.5"), std::string::npos);
  // Unnormalized regression data has no prediction.
  EXPECT_FALSE(predicted_alpha(validate_config(parse_config_text(
                                   R"({"dataset": {"synthetic": {"n": 10, "unit_norm": true}}, "loss": "least_squares"})"))
                                   .config));
}

TEST(Config, InnerLengthForms) {
  auto m_of = [](const std::string& m) {
    return validate_config(parse_config_text(R"({"dataset": "d", "m": )" + m + "}")).config;
  };
  EXPECT_EQ(m_of("25").inner_length, 25u);
  EXPECT_EQ(m_of(R"("n")").inner_factor, 1.0);
  EXPECT_EQ(m_of(R"("0.1n")").inner_factor, 0.1);
  EXPECT_EQ(m_of(R"("10n")").inner_factor, 10.0);
  EXPECT_FALSE(errors_of(R"({"dataset": "d", "m": "xn"})").empty());
  EXPECT_FALSE(errors_of(R"({"dataset": "d", "m": 2.5})").empty());
  EXPECT_FALSE(errors_of(R"({"dataset": "d", "m": "-1n"})").empty());
}

TEST(Config, SyntheticDataset) {
  const auto c = validate_config(parse_config_text(
                                     R"({"dataset": {"synthetic": {"n": 50, "dimension": 4, "noise": 0.5,
                                         "weight_value": 2, "variance_decay": 0.25, "seed": 9}}})"))
                     .config;
  EXPECT_TRUE(c.source.is_synthetic());
  EXPECT_EQ(c.source.train_size, 50u);
  EXPECT_EQ(c.source.synthetic.true_weights, Weights::Constant(4, 2.0));
  EXPECT_EQ(c.source.synthetic.feature_scales, (std::vector<double>{1.0, 0.5, 0.25, 0.125}));
  EXPECT_EQ(c.source.synthetic.seed, 9u);
  EXPECT_FALSE(errors_of(R"({"dataset": {"synthetic": {"dimension": 4}}})").empty());
  EXPECT_FALSE(errors_of(R"({"dataset": {"path": "a", "synthetic": {"n": 3}}})").empty());
  EXPECT_FALSE(errors_of(R"({"dataset": {"synthetic": {"n": 3, "dimension": 2, "true_weights": [1]}}})").empty());
}

TEST(Config, InitialPointAndOptions) {
  const auto c = validate_config(parse_config_text(
                                     R"({"dataset": "d", "initial_point": [1, 2], "init_option": "II",
                                         "regime": "strongly_convex", "select_params": true})"))
                     .config;
  EXPECT_EQ(c.initial_point, InitialPoint::kExplicit);
  EXPECT_EQ(c.initial_weights, (std::vector<double>{1, 2}));
  EXPECT_EQ(c.effective_init_option(), InitOption::kII);
  EXPECT_TRUE(c.select_from_regime);
  EXPECT_FALSE(errors_of(R"({"dataset": "d", "init_option": "III"})").empty());
}

TEST(Overrides, LastWriteWinsAndNestedKeys) {
  json doc = parse_config_text(R"({"dataset": "d", "eta": 0.1})");
  apply_override(doc, "eta=0.2");
  apply_override(doc, "eta=0.3");
  apply_override(doc, "method=saga");
  apply_override(doc, "dataset={\"synthetic\":{\"n\":5}}");
  apply_override(doc, "dataset.synthetic.dimension=3");
  const ExperimentConfig c = validate_config(doc).config;
  EXPECT_EQ(c.step_sizes, std::vector<double>{0.3});
  EXPECT_EQ(c.method, Method::kSaga);
  EXPECT_EQ(c.source.synthetic.dimension, 3u);
  EXPECT_THROW(apply_override(doc, "noequals"), ConfigError);
  EXPECT_THROW(apply_override(doc, "eta.x=1"), ConfigError);
  EXPECT_THROW(apply_override(doc, "a..b=1"), ConfigError);
}
