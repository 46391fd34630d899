#include "vrstab/kernels.hpp"

#include <omp.h>

#include <vector>

namespace vrstab::kernels {

namespace {

void require_nonempty(const Dataset& data, const char* what) {
  if (data.empty()) throw ContractViolation(std::string(what) + ": empty dataset");
}

void require_dimension(const Weights& w, const Dataset& data) {
  if (data.dimension > static_cast<std::size_t>(w.size())) {
    throw ContractViolation("weight dimension " + std::to_string(w.size()) +
                            " is smaller than dataset dimension " +
                            std::to_string(data.dimension));
  }
}

std::size_t block_count(std::size_t n) { return (n + kBlockSize - 1) / kBlockSize; }

double add_regularizer(const LossModel& model, const Weights& w, long double mean) {
  if (model.l2_coefficient > 0.0) mean += 0.5L * model.l2_coefficient * w.squaredNorm();
  return static_cast<double>(mean);
}

}  // namespace

double empirical_risk_serial(const LossModel& model, const Weights& w, const Dataset& data) {
  require_nonempty(data, "empirical_risk");
  require_dimension(w, data);
  long double sum = 0.0L;
  for (const Sample& z : data.samples) sum += base_loss(model, z.features.dot(w), z.label);
  return add_regularizer(model, w, sum / static_cast<long double>(data.size()));
}

double empirical_risk_parallel(const LossModel& model, const Weights& w, const Dataset& data) {
  require_nonempty(data, "empirical_risk");
  require_dimension(w, data);
  const std::size_t n = data.size();
  const std::size_t blocks = block_count(n);
  std::vector<long double> partial(blocks, 0.0L);

#pragma omp parallel for schedule(static) if (blocks > 1)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kBlockSize;
    const std::size_t end = std::min(n, begin + kBlockSize);
    long double s = 0.0L;
    for (std::size_t j = begin; j < end; ++j) {
      const Sample& z = data.samples[j];
      s += base_loss(model, z.features.dot(w), z.label);
    }
    partial[static_cast<std::size_t>(b)] = s;
  }

  long double sum = 0.0L;
  for (long double s : partial) sum += s;
  return add_regularizer(model, w, sum / static_cast<long double>(n));
}

void full_gradient_serial(const LossModel& model, const Weights& w, const Dataset& data,
                          Weights& out) {
  require_nonempty(data, "full_gradient");
  require_dimension(w, data);
  out = Weights::Zero(w.size());
  for (const Sample& z : data.samples) {
    z.features.add_to(out, loss_slope(model, z.features.dot(w), z.label));
  }
  out /= static_cast<double>(data.size());
  if (model.l2_coefficient > 0.0) out.noalias() += model.l2_coefficient * w;
}

void full_gradient_parallel(const LossModel& model, const Weights& w, const Dataset& data,
                            Weights& out) {
  require_nonempty(data, "full_gradient");
  require_dimension(w, data);
  const std::size_t n = data.size();
  const std::size_t blocks = block_count(n);
  if (blocks == 1) {
    full_gradient_serial(model, w, data, out);
    return;
  }
  std::vector<Weights> partial(blocks, Weights::Zero(w.size()));

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kBlockSize;
    const std::size_t end = std::min(n, begin + kBlockSize);
    Weights& acc = partial[static_cast<std::size_t>(b)];
    for (std::size_t j = begin; j < end; ++j) {
      const Sample& z = data.samples[j];
      z.features.add_to(acc, loss_slope(model, z.features.dot(w), z.label));
    }
  }

  out = Weights::Zero(w.size());
  for (const Weights& p : partial) out += p;
  out /= static_cast<double>(n);
  if (model.l2_coefficient > 0.0) out.noalias() += model.l2_coefficient * w;
}

Eigen::MatrixXd component_gradients(const LossModel& model, const Weights& w,
                                    const Dataset& data) {
  require_dimension(w, data);
  Eigen::MatrixXd grads = Eigen::MatrixXd::Zero(w.size(), static_cast<Eigen::Index>(data.size()));
  for (std::size_t j = 0; j < data.size(); ++j) {
    Weights col = Weights::Zero(w.size());
    add_loss_gradient(model, w, data.samples[j], 1.0, col);
    grads.col(static_cast<Eigen::Index>(j)) = col;
  }
  return grads;
}

}  // namespace vrstab::kernels

namespace vrstab {

double empirical_risk(const LossModel& model, const Weights& w, const Dataset& data) {
  return kernels::empirical_risk_parallel(model, w, data);
}

void full_gradient(const LossModel& model, const Weights& w, const Dataset& data, Weights& out) {
  kernels::full_gradient_parallel(model, w, data, out);
}

}  // namespace vrstab
