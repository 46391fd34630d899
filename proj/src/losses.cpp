#include "vrstab/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vrstab {

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::kLogistic: return "logistic";
    case LossKind::kLeastSquares: return "least_squares";
    case LossKind::kSmoothedHinge: return "smoothed_hinge";
    case LossKind::kHuber: return "huber";
  }
  return "unknown";
}

LossKind parse_loss_kind(std::string_view name) {
  if (name == "logistic") return LossKind::kLogistic;
  if (name == "least_squares") return LossKind::kLeastSquares;
  if (name == "smoothed_hinge") return LossKind::kSmoothedHinge;
  if (name == "huber") return LossKind::kHuber;
  throw std::invalid_argument("unknown loss kind '" + std::string(name) + "'");
}

namespace {

void check_dimension(const Weights& w, const Sample& z) {
  if (z.features.extent() > static_cast<std::size_t>(w.size())) {
    throw ContractViolation("weight dimension " + std::to_string(w.size()) +
                            " is smaller than feature extent " +
                            std::to_string(z.features.extent()));
  }
}

// log(1 + exp(-u)) without overflow.
double softplus_neg(double u) { return std::max(0.0, -u) + std::log1p(std::exp(-std::abs(u))); }

// d/du log(1 + exp(-u)) = -1 / (1 + exp(u)).
double softplus_neg_slope(double u) {
  if (u >= 0.0) {
    const double e = std::exp(-u);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(u));
}

}  // namespace

double base_loss(const LossModel& model, double inner, double label) {
  switch (model.kind) {
    case LossKind::kLogistic:
      return softplus_neg(label * inner);
    case LossKind::kLeastSquares: {
      const double r = inner - label;
      return 0.5 * r * r;
    }
    case LossKind::kSmoothedHinge: {
      const double margin = label * inner;
      const double delta = model.delta;
      if (margin >= 1.0) return 0.0;
      if (margin >= 1.0 - delta) return (1.0 - margin) * (1.0 - margin) / (2.0 * delta);
      return 1.0 - margin - 0.5 * delta;
    }
    case LossKind::kHuber: {
      const double r = std::abs(inner - label);
      const double delta = model.delta;
      if (r <= delta) return 0.5 * r * r;
      return delta * (r - 0.5 * delta);
    }
  }
  return 0.0;
}

double loss_slope(const LossModel& model, double inner, double label) {
  switch (model.kind) {
    case LossKind::kLogistic:
      return label * softplus_neg_slope(label * inner);
    case LossKind::kLeastSquares:
      return inner - label;
    case LossKind::kSmoothedHinge: {
      const double margin = label * inner;
      const double delta = model.delta;
      if (margin >= 1.0) return 0.0;
      if (margin >= 1.0 - delta) return -label * (1.0 - margin) / delta;
      return -label;
    }
    case LossKind::kHuber:
      return std::clamp(inner - label, -model.delta, model.delta);
  }
  return 0.0;
}

double loss_value(const LossModel& model, const Weights& w, const Sample& z) {
  check_dimension(w, z);
  double value = base_loss(model, z.features.dot(w), z.label);
  if (model.l2_coefficient > 0.0) value += 0.5 * model.l2_coefficient * w.squaredNorm();
  return value;
}

void add_loss_gradient(const LossModel& model, const Weights& w, const Sample& z,
                       double scale, Weights& out) {
  check_dimension(w, z);
  const double slope = loss_slope(model, z.features.dot(w), z.label);
  z.features.add_to(out, scale * slope);
  if (model.l2_coefficient > 0.0) out.noalias() += (scale * model.l2_coefficient) * w;
}

Weights loss_gradient(const LossModel& model, const Weights& w, const Sample& z) {
  Weights g = Weights::Zero(w.size());
  add_loss_gradient(model, w, z, 1.0, g);
  return g;
}

CurvatureConstants certify_constants(LossKind kind, const Dataset& data, double l2,
                                     double delta) {
  if (data.empty()) throw ContractViolation("certify_constants: empty dataset");
  if (l2 < 0.0) throw ContractViolation("certify_constants: negative l2 coefficient");
  double max_sq = 0.0;
  for (const Sample& z : data.samples) {
    double sq = z.features.squared_norm();
    // Margin losses see y·x, so the curvature scales with y².
    if (kind == LossKind::kLogistic || kind == LossKind::kSmoothedHinge) sq *= z.label * z.label;
    max_sq = std::max(max_sq, sq);
  }
  double curvature = 0.0;
  switch (kind) {
    case LossKind::kLogistic: curvature = max_sq / 4.0; break;
    case LossKind::kLeastSquares: curvature = max_sq; break;
    case LossKind::kSmoothedHinge: curvature = max_sq / delta; break;
    case LossKind::kHuber: curvature = max_sq; break;
  }
  return {curvature + l2, l2};
}

LossModel make_model(LossKind kind, const Dataset& data, double l2, double delta) {
  const CurvatureConstants c = certify_constants(kind, data, l2, delta);
  LossModel model;
  model.kind = kind;
  model.smoothness_alpha = c.alpha;
  model.strong_convexity_mu = c.mu;
  model.l2_coefficient = l2;
  model.delta = delta;
  return model;
}

}  // namespace vrstab
