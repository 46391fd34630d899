#pragma once

#include "vrstab/losses.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace vrstab {

/// 2αℓ(w;z) − ‖∇ℓ(w;z)‖². Nonnegative for a nonnegative α-smooth loss.
double self_bounding_gap(const LossModel& model, const Weights& w, const Sample& z);

/// ⟨w−w', ∇ℓ(w)−∇ℓ(w')⟩ − ‖∇ℓ(w)−∇ℓ(w')‖²/α. Nonnegative for convex α-smooth ℓ.
double coercivity_gap(const LossModel& model, const Weights& w, const Weights& w_prime,
                      const Sample& z);

/// ℓ(w) − ℓ(w') − ⟨w−w', ∇ℓ(w')⟩ − (μ/2)‖w−w'‖². Nonnegative for μ-strongly convex ℓ.
double convexity_gap(const LossModel& model, const Weights& w, const Weights& w_prime,
                     const Sample& z);

/// Largest relative error between loss_gradient and central differences of
/// loss_value over all coordinates: |g − fd| / max(1, |g|, |fd|).
double finite_difference_error(const LossModel& model, const Weights& w, const Sample& z,
                               double step = 1e-6);

struct LossCheck {
  LossKind kind = LossKind::kLogistic;
  std::size_t pairs = 0;
  double worst_self_bounding = 0.0;  // most negative gap seen
  double worst_coercivity = 0.0;
  double worst_convexity = 0.0;
  double worst_gradient_error = 0.0;
  bool passed = false;
};

/// Samples `pairs` random (w, w', z) triples for `kind` (with and without an
/// l2 term) and checks the three inequalities with `slack`, plus the
/// gradient against finite differences on the first `gradient_pairs`.
LossCheck check_loss(LossKind kind, std::size_t pairs, std::size_t gradient_pairs,
                     std::uint64_t seed, double slack = 1e-12, double gradient_tol = 1e-5);

}  // namespace vrstab
