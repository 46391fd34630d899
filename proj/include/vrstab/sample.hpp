#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace vrstab {

/// Dense model parameters.
using Weights = Eigen::VectorXd;

/// Raised when a caller breaks a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Sparse feature vector. Indices are zero-based and strictly increasing;
/// the LIBSVM reader converts from the one-based file convention.
struct SparseVector {
  std::vector<std::uint32_t> index;
  std::vector<double> value;

  std::size_t nnz() const { return index.size(); }
  bool empty() const { return index.empty(); }

  /// One past the largest index, 0 for an empty vector.
  std::size_t extent() const {
    return index.empty() ? 0 : static_cast<std::size_t>(index.back()) + 1;
  }

  double dot(const Weights& w) const {
    double s = 0.0;
    for (std::size_t k = 0; k < index.size(); ++k) s += value[k] * w[index[k]];
    return s;
  }

  double squared_norm() const {
    double s = 0.0;
    for (double v : value) s += v * v;
    return s;
  }

  // out += scale * x
  void add_to(Weights& out, double scale) const {
    for (std::size_t k = 0; k < index.size(); ++k) out[index[k]] += scale * value[k];
  }

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

struct Sample {
  SparseVector features;
  double label = 0.0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Ordered training set. `dimension` is at least every feature extent.
struct Dataset {
  std::vector<Sample> samples;
  std::size_t dimension = 0;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  const Sample& operator[](std::size_t i) const { return samples[i]; }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

}  // namespace vrstab
