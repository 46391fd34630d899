#include "vrstab/data.hpp"

#include "vrstab/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

namespace vrstab {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

// from_chars rejects a leading '+', which LIBSVM labels commonly carry.
bool parse_double(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

bool parse_index(std::string_view text, std::uint64_t& out) {
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

Sample parse_line(std::string_view line, std::size_t line_no) {
  const std::vector<std::string_view> tokens = tokenize(line);
  Sample sample;
  if (!parse_double(tokens.front(), sample.label)) {
    throw ParseError(line_no, "malformed label '" + std::string(tokens.front()) + "'");
  }
  if (!std::isfinite(sample.label)) throw ParseError(line_no, "non-finite value");

  std::uint64_t previous = 0;
  for (std::size_t t = 1; t < tokens.size(); ++t) {
    const std::string_view token = tokens[t];
    const std::size_t colon = token.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(line_no, "malformed token '" + std::string(token) + "'");
    }
    std::uint64_t index = 0;
    double value = 0.0;
    if (!parse_index(token.substr(0, colon), index) || index == 0 ||
        index > std::numeric_limits<std::uint32_t>::max()) {
      throw ParseError(line_no, "malformed token '" + std::string(token) + "'");
    }
    if (!parse_double(token.substr(colon + 1), value)) {
      throw ParseError(line_no, "malformed token '" + std::string(token) + "'");
    }
    if (!std::isfinite(value)) throw ParseError(line_no, "non-finite value");
    if (index == previous) throw ParseError(line_no, "duplicate index");
    if (index < previous) throw ParseError(line_no, "non-increasing index");
    previous = index;
    sample.features.index.push_back(static_cast<std::uint32_t>(index - 1));
    sample.features.value.push_back(value);
  }
  return sample;
}

void append_number(std::string& out, double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, ptr);
}

}  // namespace

Dataset parse_libsvm(std::istream& in) {
  Dataset data;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const std::size_t hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    if (tokenize(view).empty()) continue;
    Sample sample = parse_line(view, line_no);
    data.dimension = std::max(data.dimension, sample.features.extent());
    data.samples.push_back(std::move(sample));
  }
  return data;
}

Dataset parse_libsvm(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_libsvm(in);
}

Dataset load_libsvm(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset '" + path.string() + "'");
  return parse_libsvm(in);
}

std::string serialize_libsvm(const Dataset& data) {
  std::string out;
  for (const Sample& z : data.samples) {
    append_number(out, z.label);
    for (std::size_t k = 0; k < z.features.nnz(); ++k) {
      out.push_back(' ');
      out.append(std::to_string(static_cast<std::uint64_t>(z.features.index[k]) + 1));
      out.push_back(':');
      append_number(out, z.features.value[k]);
    }
    out.push_back('\n');
  }
  return out;
}

Dataset preprocess(const Dataset& data, std::span<const double> class_labels) {
  if (data.empty()) throw ContractViolation("preprocess: empty dataset");
  std::vector<double> classes(class_labels.begin(), class_labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) {
    throw PreprocessError("need at least two distinct labels, got " +
                          std::to_string(classes.size()));
  }
  // Odd counts put the median in the lower half.
  const std::size_t lower_count = (classes.size() + 1) / 2;

  Dataset out;
  out.dimension = data.dimension;
  out.samples.reserve(data.size());
  for (const Sample& z : data.samples) {
    const auto it = std::lower_bound(classes.begin(), classes.end(), z.label);
    if (it == classes.end() || *it != z.label) {
      std::ostringstream msg;
      msg << "label " << z.label << " is not in the class list";
      throw PreprocessError(msg.str());
    }
    Sample s = z;
    s.label = static_cast<std::size_t>(it - classes.begin()) < lower_count ? -1.0 : 1.0;
    const double norm = std::sqrt(s.features.squared_norm());
    if (norm > 0.0) {
      for (double& v : s.features.value) v /= norm;
    }
    out.samples.push_back(std::move(s));
  }
  return out;
}

Dataset preprocess(const Dataset& data) {
  std::vector<double> labels;
  labels.reserve(data.size());
  for (const Sample& z : data.samples) labels.push_back(z.label);
  return preprocess(data, labels);
}

Split split_train(const Dataset& data, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ContractViolation("split_train: fraction must lie in (0, 1]");
  }
  const std::size_t n = data.size();
  // The small offset keeps products such as 0.8 * 625 from flooring to 499.
  const auto train_size = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
  if (train_size < 1) throw ContractViolation("split_train: fraction * n must be at least 1");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  IndexStream stream(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[stream.next_below(i)]);

  Split split;
  split.train.dimension = data.dimension;
  split.holdout.dimension = data.dimension;
  split.train.samples.reserve(train_size);
  split.holdout.samples.reserve(n - train_size);
  for (std::size_t i = 0; i < n; ++i) {
    (i < train_size ? split.train : split.holdout).samples.push_back(data.samples[order[i]]);
  }
  return split;
}

NeighborPair make_neighbor(const Dataset& train, const Dataset& pool, std::uint64_t seed) {
  if (pool.empty()) throw ContractViolation("make_neighbor: empty replacement pool");
  if (train.empty()) throw ContractViolation("make_neighbor: empty training set");
  IndexStream stream(seed);
  NeighborPair pair;
  pair.replaced_index = stream.next_below(train.size());
  pair.replacement = pool.samples[stream.next_below(pool.size())];
  pair.base = train;
  pair.neighbor = train;
  pair.neighbor.samples[pair.replaced_index] = pair.replacement;
  const std::size_t dim = std::max(train.dimension, pool.dimension);
  pair.base.dimension = dim;
  pair.neighbor.dimension = dim;
  return pair;
}

namespace {

void check_spec(const SyntheticSpec& spec) {
  if (spec.dimension < 1) throw ContractViolation("synthetic: dimension must be >= 1");
  if (static_cast<std::size_t>(spec.true_weights.size()) != spec.dimension) {
    throw ContractViolation("synthetic: true_weights must have length dimension");
  }
  if (!(spec.noise_std >= 0.0)) throw ContractViolation("synthetic: noise_std must be >= 0");
  if (!spec.feature_scales.empty() && spec.feature_scales.size() != spec.dimension) {
    throw ContractViolation("synthetic: feature_scales must be empty or have length dimension");
  }
}

SparseVector draw_features(const SyntheticSpec& spec, std::mt19937_64& rng,
                           std::normal_distribution<double>& normal) {
  SparseVector x;
  x.index.resize(spec.dimension);
  x.value.resize(spec.dimension);
  for (std::size_t i = 0; i < spec.dimension; ++i) {
    x.index[i] = static_cast<std::uint32_t>(i);
    x.value[i] = spec.feature_scale(i) * normal(rng);
  }
  return x;
}

}  // namespace

Dataset generate_synthetic(const SyntheticSpec& spec, std::size_t n) {
  check_spec(spec);
  if (n < 1) throw ContractViolation("generate_synthetic: n must be >= 1");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset data;
  data.dimension = spec.dimension;
  data.samples.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    Sample z;
    z.features = draw_features(spec, rng, normal);
    const double noise = normal(rng);
    z.label = z.features.dot(spec.true_weights) + spec.noise_std * noise;
    data.samples.push_back(std::move(z));
  }
  return data;
}

Dataset generate_synthetic_logistic(const SyntheticSpec& spec, std::size_t n, bool unit_norm) {
  check_spec(spec);
  if (n < 1) throw ContractViolation("generate_synthetic_logistic: n must be >= 1");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Dataset data;
  data.dimension = spec.dimension;
  data.samples.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    Sample z;
    z.features = draw_features(spec, rng, normal);
    if (unit_norm) {
      const double norm = std::sqrt(z.features.squared_norm());
      if (norm > 0.0) {
        for (double& v : z.features.value) v /= norm;
      }
    }
    const double p = 1.0 / (1.0 + std::exp(-z.features.dot(spec.true_weights)));
    z.label = uniform(rng) < p ? 1.0 : -1.0;
    data.samples.push_back(std::move(z));
  }
  return data;
}

double population_risk_ls(const SyntheticSpec& spec, const LossModel& model, const Weights& w) {
  if (model.kind != LossKind::kLeastSquares) {
    throw ContractViolation("population_risk_ls requires the least-squares loss");
  }
  check_spec(spec);
  if (static_cast<std::size_t>(w.size()) != spec.dimension) {
    throw ContractViolation("population_risk_ls: dimension mismatch");
  }
  long double excess = 0.0L;
  for (std::size_t i = 0; i < spec.dimension; ++i) {
    const double s = spec.feature_scale(i);
    const double diff = w[static_cast<Eigen::Index>(i)] - spec.true_weights[static_cast<Eigen::Index>(i)];
    excess += static_cast<long double>(s * s) * diff * diff;
  }
  long double risk = 0.5L * (excess + static_cast<long double>(spec.noise_std) * spec.noise_std);
  if (model.l2_coefficient > 0.0) risk += 0.5L * model.l2_coefficient * w.squaredNorm();
  return static_cast<double>(risk);
}

Weights population_minimizer_ls(const SyntheticSpec& spec, const LossModel& model) {
  if (model.kind != LossKind::kLeastSquares) {
    throw ContractViolation("population_minimizer_ls requires the least-squares loss");
  }
  check_spec(spec);
  Weights w(static_cast<Eigen::Index>(spec.dimension));
  for (std::size_t i = 0; i < spec.dimension; ++i) {
    const double var = spec.feature_scale(i) * spec.feature_scale(i);
    const auto k = static_cast<Eigen::Index>(i);
    const double curvature = var + model.l2_coefficient;
    w[k] = curvature > 0.0 ? var * spec.true_weights[k] / curvature : 0.0;
  }
  return w;
}

}  // namespace vrstab
