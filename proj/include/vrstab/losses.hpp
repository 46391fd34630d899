#pragma once

#include "vrstab/sample.hpp"

#include <string>
#include <string_view>

namespace vrstab {

enum class LossKind { kLogistic, kLeastSquares, kSmoothedHinge, kHuber };

std::string_view to_string(LossKind kind);
/// Parses "logistic", "least_squares", "smoothed_hinge" or "huber".
LossKind parse_loss_kind(std::string_view name);

/// Per-example loss with certified curvature constants. Every per-example
/// loss carries the explicit term (l2/2)‖w‖², which is the only source of
/// strong convexity.
struct LossModel {
  LossKind kind = LossKind::kLogistic;
  double smoothness_alpha = 0.0;
  double strong_convexity_mu = 0.0;
  double l2_coefficient = 0.0;
  // Huber threshold, or smoothing width of the smoothed hinge.
  double delta = 1.0;
};

struct CurvatureConstants {
  double alpha = 0.0;
  double mu = 0.0;
};

/// ℓ(w; z). Finite and nonnegative for finite inputs.
double loss_value(const LossModel& model, const Weights& w, const Sample& z);

/// ∇_w ℓ(w; z) as a dense vector.
Weights loss_gradient(const LossModel& model, const Weights& w, const Sample& z);

/// out += scale * ∇_w ℓ(w; z), without allocating.
void add_loss_gradient(const LossModel& model, const Weights& w, const Sample& z,
                       double scale, Weights& out);

/// Unregularized loss as a function of the linear score ⟨w, x⟩.
double base_loss(const LossModel& model, double inner, double label);

/// Derivative of the unregularized loss with respect to ⟨w, x⟩, so that
/// ∇ℓ(w; z) = loss_slope(...) * x + l2 * w.
double loss_slope(const LossModel& model, double inner, double label);

/// L_S(w): mean per-example loss, accumulated in extended precision in a
/// fixed order (see kernels.hpp for the blocked evaluation order).
double empirical_risk(const LossModel& model, const Weights& w, const Dataset& data);

/// ∇L_S(w) written into `out` (resized to w's dimension).
void full_gradient(const LossModel& model, const Weights& w, const Dataset& data,
                   Weights& out);

/// Uniform smoothness and strong convexity valid for every example in `data`.
CurvatureConstants certify_constants(LossKind kind, const Dataset& data, double l2,
                                     double delta = 1.0);

/// Convenience: certify constants and return a ready-to-use model.
LossModel make_model(LossKind kind, const Dataset& data, double l2, double delta = 1.0);

}  // namespace vrstab
