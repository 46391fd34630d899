#pragma once

#include "vrstab/losses.hpp"
#include "vrstab/sample.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vrstab {

/// LIBSVM syntax or invariant violation. `line()` is one-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : std::runtime_error("line " + std::to_string(line) + ": " + reason),
        line_(line),
        reason_(reason) {}

  std::size_t line() const { return line_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

class PreprocessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads "label idx:val idx:val ..." lines. Indices are one-based in the
/// text; '#' starts a comment that runs to the end of the line.
Dataset parse_libsvm(std::istream& in);
Dataset parse_libsvm(std::string_view text);
/// Throws std::runtime_error if the file cannot be opened.
Dataset load_libsvm(const std::filesystem::path& path);

/// Shortest round-trip decimal rendering, one line per sample.
std::string serialize_libsvm(const Dataset& data);

/// Binarizes labels (lower half of `class_labels` -> -1, upper half -> +1,
/// the median of an odd count joins the lower half) and scales every
/// nonzero feature vector to unit ℓ2 norm.
Dataset preprocess(const Dataset& data, std::span<const double> class_labels);
/// Same, with the class list taken from the sorted distinct labels of `data`.
Dataset preprocess(const Dataset& data);

struct Split {
  Dataset train;
  Dataset holdout;
};

/// Seeded shuffle; the first ⌊fraction·n⌋ samples form the training set.
Split split_train(const Dataset& data, double fraction, std::uint64_t seed);

/// S and S^(i): identical except at `replaced_index` (zero-based).
struct NeighborPair {
  Dataset base;
  Dataset neighbor;
  std::size_t replaced_index = 0;
  Sample replacement;
};

NeighborPair make_neighbor(const Dataset& train, const Dataset& pool, std::uint64_t seed);

/// Gaussian design with a linear teacher. Coordinates of x are independent
/// N(0, s_i²); `feature_scales` holds the s_i and defaults to all ones.
struct SyntheticSpec {
  std::size_t dimension = 1;
  Weights true_weights;
  double noise_std = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> feature_scales;

  double feature_scale(std::size_t i) const {
    return feature_scales.empty() ? 1.0 : feature_scales[i];
  }
};

/// y = ⟨w°, x⟩ + ε with ε ~ N(0, σ²). Deterministic in spec.seed.
Dataset generate_synthetic(const SyntheticSpec& spec, std::size_t n);

/// Binary labels: y = +1 with probability sigmoid(⟨w°, x⟩), else -1.
/// With `unit_norm`, each feature vector is rescaled to norm 1 before the
/// label is drawn.
Dataset generate_synthetic_logistic(const SyntheticSpec& spec, std::size_t n, bool unit_norm);

/// Exact population risk of the least-squares loss under generate_synthetic:
/// ½(Σ s_i²(w_i − w°_i)² + σ²) + (l2/2)‖w‖².
double population_risk_ls(const SyntheticSpec& spec, const LossModel& model, const Weights& w);

/// Minimizer of population_risk_ls.
Weights population_minimizer_ls(const SyntheticSpec& spec, const LossModel& model);

}  // namespace vrstab
