#pragma once

// Independent reference implementations for tests. Nothing here calls into
// the library's loss or kernel code; losses are written out from their
// textbook definitions on dense vectors.

#include "vrstab/losses.hpp"
#include "vrstab/sample.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using vrstab::Dataset;
using vrstab::LossKind;
using vrstab::Sample;
using vrstab::Weights;

inline Eigen::VectorXd dense(const Sample& z, std::size_t dim) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t k = 0; k < z.features.nnz(); ++k) x[z.features.index[k]] = z.features.value[k];
  return x;
}

struct Loss {
  LossKind kind = LossKind::kLogistic;
  double l2 = 0.0;
  double delta = 1.0;

  double value(const Weights& w, const Eigen::VectorXd& x, double y) const {
    const double u = w.dot(x);
    double v = 0.0;
    switch (kind) {
      case LossKind::kLogistic:
        v = std::log(1.0 + std::exp(-y * u));
        break;
      case LossKind::kLeastSquares:
        v = 0.5 * (u - y) * (u - y);
        break;
      case LossKind::kSmoothedHinge: {
        const double s = y * u;
        if (s >= 1.0) {
          v = 0.0;
        } else if (s <= 1.0 - delta) {
          v = 1.0 - s - delta / 2.0;
        } else {
          v = (1.0 - s) * (1.0 - s) / (2.0 * delta);
        }
        break;
      }
      case LossKind::kHuber: {
        const double r = u - y;
        v = std::abs(r) <= delta ? 0.5 * r * r : delta * std::abs(r) - 0.5 * delta * delta;
        break;
      }
    }
    return v + 0.5 * l2 * w.squaredNorm();
  }

  Eigen::VectorXd gradient(const Weights& w, const Eigen::VectorXd& x, double y) const {
    const double u = w.dot(x);
    double d = 0.0;
    switch (kind) {
      case LossKind::kLogistic:
        d = -y / (1.0 + std::exp(y * u));
        break;
      case LossKind::kLeastSquares:
        d = u - y;
        break;
      case LossKind::kSmoothedHinge: {
        const double s = y * u;
        if (s >= 1.0) {
          d = 0.0;
        } else if (s <= 1.0 - delta) {
          d = -y;
        } else {
          d = -y * (1.0 - s) / delta;
        }
        break;
      }
      case LossKind::kHuber: {
        const double r = u - y;
        d = std::abs(r) <= delta ? r : (r > 0 ? delta : -delta);
        break;
      }
    }
    return d * x + l2 * w;
  }

  double risk(const Weights& w, const Dataset& data) const {
    long double s = 0.0L;
    for (const auto& z : data.samples) s += value(w, dense(z, data.dimension), z.label);
    return static_cast<double>(s / static_cast<long double>(data.size()));
  }

  Eigen::VectorXd full_gradient(const Weights& w, const Dataset& data) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(w.size());
    for (const auto& z : data.samples) g += gradient(w, dense(z, data.dimension), z.label);
    return g / static_cast<double>(data.size());
  }
};

inline Loss from_model(const vrstab::LossModel& m) { return {m.kind, m.l2_coefficient, m.delta}; }

/// Dense Gaussian features, optionally unit-normalized; labels ±1 for margin
/// losses and real-valued otherwise.
inline Dataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t dim, bool binary,
                              bool unit_norm) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  Dataset data;
  data.dimension = dim;
  for (std::size_t i = 0; i < n; ++i) {
    Sample z;
    Eigen::VectorXd x(static_cast<Eigen::Index>(dim));
    for (auto& v : x) v = normal(rng);
    if (unit_norm) x.normalize();
    for (std::size_t k = 0; k < dim; ++k) {
      z.features.index.push_back(static_cast<std::uint32_t>(k));
      z.features.value.push_back(x[static_cast<Eigen::Index>(k)]);
    }
    z.label = binary ? (coin(rng) ? 1.0 : -1.0) : normal(rng);
    data.samples.push_back(std::move(z));
  }
  return data;
}

inline Weights random_weights(std::mt19937_64& rng, std::size_t dim, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Weights w(static_cast<Eigen::Index>(dim));
  for (auto& v : w) v = normal(rng);
  return w;
}

/// Full-gradient descent with a fixed step, `steps` iterations.
inline Weights gradient_descent(const Loss& loss, const Dataset& data, Weights w, double step,
                                std::size_t steps) {
  for (std::size_t k = 0; k < steps; ++k) w -= step * loss.full_gradient(w, data);
  return w;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const char* root = std::getenv("VRSTAB_TEST_TMP");
  std::filesystem::path base = root ? root : std::filesystem::temp_directory_path() / "vrstab_tests";
  auto dir = base / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace oracle
