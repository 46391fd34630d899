#include "support.hpp"

#include "vrstab/checks.hpp"
#include "vrstab/losses.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace vrstab;

namespace {

Sample make_sample(std::vector<std::uint32_t> idx, std::vector<double> val, double y) {
  Sample z;
  z.features.index = std::move(idx);
  z.features.value = std::move(val);
  z.label = y;
  return z;
}

LossModel model_of(LossKind kind, double l2 = 0.0, double delta = 1.0) {
  LossModel m;
  m.kind = kind;
  m.l2_coefficient = l2;
  m.strong_convexity_mu = l2;
  m.delta = delta;
  m.smoothness_alpha = 1.0;
  return m;
}

constexpr LossKind kAllKinds[] = {LossKind::kLogistic, LossKind::kLeastSquares,
                                  LossKind::kSmoothedHinge, LossKind::kHuber};

}  // namespace

TEST(Losses, LogisticAtZeroIsLogTwo) {
  const Sample z = make_sample({0, 2}, {0.3, -1.7}, -1.0);
  EXPECT_NEAR(loss_value(model_of(LossKind::kLogistic), Weights::Zero(3), z), std::log(2.0), 1e-15);
}

TEST(Losses, LeastSquaresAtZero) {
  const Sample z = make_sample({1}, {2.0}, 3.0);
  EXPECT_DOUBLE_EQ(loss_value(model_of(LossKind::kLeastSquares), Weights::Zero(2), z), 4.5);
}

TEST(Losses, LogisticHandValue) {
  const Sample z = make_sample({0}, {1.0}, 1.0);
  Weights w(2);
  w << 1.0, 0.0;
  EXPECT_NEAR(loss_value(model_of(LossKind::kLogistic), w, z), 0.3132616875182228, 1e-15);
}

TEST(Losses, LogisticGradientAtZero) {
  const Sample z = make_sample({0, 1}, {0.6, -0.8}, 1.0);
  const Weights g = loss_gradient(model_of(LossKind::kLogistic), Weights::Zero(2), z);
  EXPECT_DOUBLE_EQ(g[0], -0.3);
  EXPECT_DOUBLE_EQ(g[1], 0.4);
}

TEST(Losses, LeastSquaresGradientHand) {
  const Sample z = make_sample({0}, {1.0}, 0.0);
  Weights w(2);
  w << 1.0, 1.0;
  const Weights g = loss_gradient(model_of(LossKind::kLeastSquares), w, z);
  EXPECT_DOUBLE_EQ(g[0], 1.0);
  EXPECT_DOUBLE_EQ(g[1], 0.0);
}

TEST(Losses, HuberGradientSaturatesBeyondThreshold) {
  const Sample z = make_sample({0, 1}, {0.6, 0.8}, 0.0);
  Weights w(2);
  w << 3.0, 4.0;  // residual 5
  const Weights g = loss_gradient(model_of(LossKind::kHuber, 0.0, 1.0), w, z);
  EXPECT_DOUBLE_EQ(g[0], 0.6);
  EXPECT_DOUBLE_EQ(g[1], 0.8);
  w *= -1.0;
  const Weights h = loss_gradient(model_of(LossKind::kHuber, 0.0, 1.0), w, z);
  EXPECT_DOUBLE_EQ(h[0], -0.6);
  // Inside the threshold the gradient is the residual times x.
  w << 0.3, 0.4;
  const Weights q = loss_gradient(model_of(LossKind::kHuber, 0.0, 1.0), w, z);
  EXPECT_NEAR(q[0], 0.5 * 0.6, 1e-15);
}

TEST(Losses, RiskOfTwoIdenticalSamplesIsSingleLoss) {
  Dataset d;
  d.dimension = 2;
  d.samples = {make_sample({0, 1}, {0.5, 1.5}, 1.0), make_sample({0, 1}, {0.5, 1.5}, 1.0)};
  Weights w(2);
  w << 0.2, -0.7;
  for (LossKind kind : kAllKinds) {
    const LossModel m = model_of(kind, 0.1);
    EXPECT_NEAR(empirical_risk(m, w, d), loss_value(m, w, d.samples[0]), 1e-15);
  }
}

TEST(Losses, RiskHandValues) {
  Dataset d;
  d.dimension = 2;
  d.samples = {make_sample({0}, {1.0}, 1.0), make_sample({1}, {1.0}, 0.0)};
  EXPECT_DOUBLE_EQ(empirical_risk(model_of(LossKind::kLeastSquares), Weights::Zero(2), d), 0.25);
  EXPECT_NEAR(empirical_risk(model_of(LossKind::kLogistic), Weights::Zero(2), d), std::log(2.0), 1e-15);
}

TEST(Losses, CertifiedConstants) {
  std::mt19937_64 rng(4);
  const Dataset unit = oracle::random_dataset(rng, 50, 5, true, true);
  const auto logistic = certify_constants(LossKind::kLogistic, unit, 0.0);
  EXPECT_NEAR(logistic.alpha, 0.25, 1e-12);
  EXPECT_EQ(logistic.mu, 0.0);
  const auto ls = certify_constants(LossKind::kLeastSquares, unit, 0.1);
  EXPECT_NEAR(ls.alpha, 1.1, 1e-12);
  EXPECT_DOUBLE_EQ(ls.mu, 0.1);

  Dataset empty_features;
  empty_features.dimension = 3;
  empty_features.samples = {make_sample({}, {}, 1.0), make_sample({}, {}, -1.0)};
  for (LossKind kind : kAllKinds) {
    const auto c = certify_constants(kind, empty_features, 0.3);
    EXPECT_DOUBLE_EQ(c.alpha, 0.3);
    EXPECT_DOUBLE_EQ(c.mu, 0.3);
  }
}

TEST(Losses, CertifiedAlphaBoundsSampledCurvature) {
  // Secant slopes of the gradient along random directions never exceed α.
  std::mt19937_64 rng(8);
  const Dataset data = oracle::random_dataset(rng, 30, 4, true, false);
  for (LossKind kind : kAllKinds) {
    const LossModel m = make_model(kind, data, 0.05, 0.5);
    for (int trial = 0; trial < 200; ++trial) {
      const Weights a = oracle::random_weights(rng, 4, 2.0);
      const Weights b = oracle::random_weights(rng, 4, 2.0);
      const Sample& z = data.samples[static_cast<std::size_t>(trial) % data.size()];
      const double lipschitz = (loss_gradient(m, a, z) - loss_gradient(m, b, z)).norm() / (a - b).norm();
      EXPECT_LE(lipschitz, m.smoothness_alpha * (1.0 + 1e-12));
    }
  }
}

TEST(Losses, GradientMatchesIndependentOracle) {
  std::mt19937_64 rng(15);
  for (LossKind kind : kAllKinds) {
    const bool binary = kind == LossKind::kLogistic || kind == LossKind::kSmoothedHinge;
    const Dataset data = oracle::random_dataset(rng, 40, 6, binary, false);
    for (double l2 : {0.0, 0.2}) {
      const LossModel m = model_of(kind, l2, 0.7);
      const oracle::Loss ref = oracle::from_model(m);
      for (const Sample& z : data.samples) {
        const Weights w = oracle::random_weights(rng, 6, 1.0);
        const Eigen::VectorXd x = oracle::dense(z, 6);
        EXPECT_NEAR(loss_value(m, w, z), ref.value(w, x, z.label), 1e-12);
        EXPECT_LE((loss_gradient(m, w, z) - ref.gradient(w, x, z.label)).norm(), 1e-12);
      }
    }
  }
}

TEST(Losses, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(16);
  for (LossKind kind : kAllKinds) {
    const bool binary = kind == LossKind::kLogistic || kind == LossKind::kSmoothedHinge;
    const Dataset data = oracle::random_dataset(rng, 25, 5, binary, true);
    const LossModel m = model_of(kind, 0.1, 0.5);
    for (const Sample& z : data.samples) {
      const Weights w = oracle::random_weights(rng, 5, 1.0);
      const Weights g = loss_gradient(m, w, z);
      for (Eigen::Index k = 0; k < w.size(); ++k) {
        const double h = 1e-6;
        Weights up = w, down = w;
        up[k] += h;
        down[k] -= h;
        const double fd = (loss_value(m, up, z) - loss_value(m, down, z)) / (2 * h);
        EXPECT_LE(std::abs(fd - g[k]) / std::max({1.0, std::abs(fd), std::abs(g[k])}), 1e-5);
      }
      EXPECT_LE(finite_difference_error(m, w, z), 1e-5);
    }
  }
}

TEST(Losses, ValuesAreFiniteForExtremeScores) {
  const Sample z = make_sample({0}, {1.0}, 1.0);
  Weights w(1);
  for (double s : {-1e6, -800.0, 0.0, 800.0, 1e6}) {
    w[0] = s;
    const double v = loss_value(model_of(LossKind::kLogistic), w, z);
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GE(v, 0.0);
    EXPECT_TRUE(std::isfinite(loss_gradient(model_of(LossKind::kLogistic), w, z)[0]));
  }
}

TEST(Losses, DimensionTooSmallIsContractViolation) {
  const Sample z = make_sample({4}, {1.0}, 1.0);
  EXPECT_THROW(loss_value(model_of(LossKind::kLogistic), Weights::Zero(3), z), ContractViolation);
}

TEST(Losses, ParseKind) {
  for (LossKind kind : kAllKinds) EXPECT_EQ(parse_loss_kind(to_string(kind)), kind);
  EXPECT_THROW(parse_loss_kind("hinge"), std::invalid_argument);
}

TEST(LossChecks, AllLossesPassPropertyChecks) {
  for (LossKind kind : kAllKinds) {
    const LossCheck c = check_loss(kind, 2000, 100, 21);
    EXPECT_TRUE(c.passed) << to_string(kind) << " self=" << c.worst_self_bounding
                          << " coer=" << c.worst_coercivity << " conv=" << c.worst_convexity
                          << " fd=" << c.worst_gradient_error;
  }
}

TEST(LossChecks, GapsDetectAWrongAlpha) {
  // Understating α must break self-bounding somewhere.
  std::mt19937_64 rng(3);
  const Dataset data = oracle::random_dataset(rng, 50, 3, false, false);
  LossModel m = make_model(LossKind::kLeastSquares, data, 0.0);
  m.smoothness_alpha *= 0.01;
  double worst = 0.0;
  for (const Sample& z : data.samples) {
    worst = std::min(worst, self_bounding_gap(m, oracle::random_weights(rng, 3, 2.0), z));
  }
  EXPECT_LT(worst, 0.0);
}
