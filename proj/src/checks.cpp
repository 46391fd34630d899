#include "vrstab/checks.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace vrstab {

double self_bounding_gap(const LossModel& model, const Weights& w, const Sample& z) {
  return 2.0 * model.smoothness_alpha * loss_value(model, w, z) - loss_gradient(model, w, z).squaredNorm();
}

double coercivity_gap(const LossModel& model, const Weights& w, const Weights& w_prime,
                      const Sample& z) {
  const Weights dg = loss_gradient(model, w, z) - loss_gradient(model, w_prime, z);
  return (w - w_prime).dot(dg) - dg.squaredNorm() / model.smoothness_alpha;
}

double convexity_gap(const LossModel& model, const Weights& w, const Weights& w_prime,
                     const Sample& z) {
  const Weights diff = w - w_prime;
  return loss_value(model, w, z) - loss_value(model, w_prime, z) -
         diff.dot(loss_gradient(model, w_prime, z)) -
         0.5 * model.strong_convexity_mu * diff.squaredNorm();
}

double finite_difference_error(const LossModel& model, const Weights& w, const Sample& z,
                               double step) {
  const Weights g = loss_gradient(model, w, z);
  double worst = 0.0;
  Weights probe = w;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    probe[i] = w[i] + step;
    const double up = loss_value(model, probe, z);
    probe[i] = w[i] - step;
    const double down = loss_value(model, probe, z);
    probe[i] = w[i];
    const double fd = (up - down) / (2.0 * step);
    worst = std::max(worst, std::abs(g[i] - fd) / std::max({1.0, std::abs(g[i]), std::abs(fd)}));
  }
  return worst;
}

namespace {

constexpr std::size_t kDim = 6;
constexpr std::size_t kPool = 64;

bool is_classification(LossKind kind) {
  return kind == LossKind::kLogistic || kind == LossKind::kSmoothedHinge;
}

Dataset random_pool(LossKind kind, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  Dataset data;
  data.dimension = kDim;
  for (std::size_t j = 0; j < kPool; ++j) {
    Sample z;
    for (std::uint32_t i = 0; i < kDim; ++i) {
      if (coin(rng) || i == 0) {
        z.features.index.push_back(i);
        z.features.value.push_back(normal(rng));
      }
    }
    z.label = is_classification(kind) ? (coin(rng) ? 1.0 : -1.0) : 2.0 * normal(rng);
    data.samples.push_back(std::move(z));
  }
  return data;
}

Weights random_weights(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Weights w(kDim);
  for (std::size_t i = 0; i < kDim; ++i) w[static_cast<Eigen::Index>(i)] = normal(rng);
  return w;
}

}  // namespace

LossCheck check_loss(LossKind kind, std::size_t pairs, std::size_t gradient_pairs,
                     std::uint64_t seed, double slack, double gradient_tol) {
  std::mt19937_64 rng(seed);
  const Dataset pool = random_pool(kind, rng);
  const LossModel plain = make_model(kind, pool, 0.0);
  const LossModel ridge = make_model(kind, pool, 0.3);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::uniform_real_distribution<double> scale(0.1, 3.0);

  LossCheck out;
  out.kind = kind;
  out.pairs = pairs;
  for (std::size_t p = 0; p < pairs; ++p) {
    const LossModel& model = (p % 2 == 0) ? plain : ridge;
    const Sample& z = pool[pick(rng)];
    const double s = scale(rng);
    const Weights w = random_weights(rng, s);
    const Weights w_prime = random_weights(rng, s);
    out.worst_self_bounding = std::min(out.worst_self_bounding, self_bounding_gap(model, w, z));
    out.worst_coercivity = std::min(out.worst_coercivity, coercivity_gap(model, w, w_prime, z));
    out.worst_convexity = std::min(out.worst_convexity, convexity_gap(model, w, w_prime, z));
    if (p < gradient_pairs) {
      out.worst_gradient_error = std::max(out.worst_gradient_error, finite_difference_error(model, w, z));
    }
  }
  out.passed = out.worst_self_bounding >= -slack && out.worst_coercivity >= -slack &&
               out.worst_convexity >= -slack && out.worst_gradient_error <= gradient_tol;
  return out;
}

}  // namespace vrstab
