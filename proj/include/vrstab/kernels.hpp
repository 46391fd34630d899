#pragma once

#include "vrstab/losses.hpp"

#include <Eigen/Core>

namespace vrstab::kernels {

/// Samples per reduction block. The partition depends only on n, so the
/// parallel kernels return the same bits for every thread count.
inline constexpr std::size_t kBlockSize = 256;

// Serial references: one left-to-right pass. Kept for tests and benchmarks.
double empirical_risk_serial(const LossModel& model, const Weights& w, const Dataset& data);
void full_gradient_serial(const LossModel& model, const Weights& w, const Dataset& data,
                          Weights& out);

// OpenMP kernels over fixed blocks; block partials are combined in block order.
double empirical_risk_parallel(const LossModel& model, const Weights& w, const Dataset& data);
void full_gradient_parallel(const LossModel& model, const Weights& w, const Dataset& data,
                            Weights& out);

/// Per-example gradients as the columns of a d×n matrix.
Eigen::MatrixXd component_gradients(const LossModel& model, const Weights& w,
                                    const Dataset& data);

}  // namespace vrstab::kernels
