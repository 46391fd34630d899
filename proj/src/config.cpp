#include "vrstab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace vrstab {

using nlohmann::json;

json parse_config_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("invalid JSON: ") + e.what()});
  }
}

void apply_override(json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError({"override '" + std::string(assignment) + "' must look like key=value"});
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }

  if (!doc.is_object()) doc = json::object();
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError({"override key '" + key + "' has an empty component"});
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    json& child = (*node)[part];
    if (child.is_null()) child = json::object();
    if (!child.is_object()) {
      throw ConfigError({"cannot set '" + key + "': '" + part + "' is not an object"});
    }
    node = &child;
    start = dot + 1;
  }
}

namespace {

class Reader {
 public:
  Reader(const json& obj, std::string where, std::vector<std::string>& errors)
      : obj_(obj), where_(std::move(where)), errors_(errors) {}

  void allow(std::initializer_list<const char*> keys) {
    std::set<std::string> known(keys.begin(), keys.end());
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!known.count(it.key())) errors_.push_back("unknown key '" + path(it.key()) + "'");
    }
  }

  bool has(const char* key) const { return obj_.contains(key) && !obj_.at(key).is_null(); }
  const json& at(const char* key) const { return obj_.at(key); }

  std::optional<double> number(const char* key) {
    if (!has(key)) return std::nullopt;
    const json& v = obj_.at(key);
    if (!v.is_number()) {
      errors_.push_back(path(key) + ": expected a number");
      return std::nullopt;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      errors_.push_back(path(key) + ": must be finite");
      return std::nullopt;
    }
    return x;
  }

  std::optional<std::uint64_t> count(const char* key) {
    if (!has(key)) return std::nullopt;
    const json& v = obj_.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
      errors_.push_back(path(key) + ": must be nonnegative");
      return std::nullopt;
    }
    errors_.push_back(path(key) + ": expected an integer");
    return std::nullopt;
  }

  std::optional<bool> boolean(const char* key) {
    if (!has(key)) return std::nullopt;
    const json& v = obj_.at(key);
    if (!v.is_boolean()) {
      errors_.push_back(path(key) + ": expected true or false");
      return std::nullopt;
    }
    return v.get<bool>();
  }

  std::optional<std::string> string(const char* key) {
    if (!has(key)) return std::nullopt;
    const json& v = obj_.at(key);
    if (!v.is_string()) {
      errors_.push_back(path(key) + ": expected a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  std::optional<std::vector<double>> numbers(const char* key) {
    if (!has(key)) return std::nullopt;
    const json& v = obj_.at(key);
    if (!v.is_array()) {
      errors_.push_back(path(key) + ": expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) {
        errors_.push_back(path(key) + ": expected an array of numbers");
        return std::nullopt;
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::string path(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }
  void error(const std::string& msg) { errors_.push_back(msg); }

 private:
  const json& obj_;
  std::string where_;
  std::vector<std::string>& errors_;
};

template <class T, class Parse>
std::optional<T> parse_enum(Reader& r, const char* key, Parse parse) {
  const auto s = r.string(key);
  if (!s) return std::nullopt;
  try {
    return parse(*s);
  } catch (const std::invalid_argument& e) {
    r.error(r.path(key) + ": " + e.what());
    return std::nullopt;
  }
}

void read_synthetic(const json& node, DataSource& src, std::vector<std::string>& errors) {
  if (!node.is_object()) {
    errors.push_back("dataset.synthetic: expected an object");
    return;
  }
  Reader r(node, "dataset.synthetic", errors);
  r.allow({"n", "dimension", "labels", "unit_norm", "noise", "weight_value", "true_weights",
           "variance_decay", "feature_scales", "seed"});
  SyntheticSpec& spec = src.synthetic;
  if (const auto n = r.count("n")) {
    src.train_size = *n;
    if (*n == 0) r.error("dataset.synthetic.n must be positive");
  } else {
    r.error("dataset.synthetic.n is required");
  }
  spec.dimension = 1;
  if (const auto d = r.count("dimension")) {
    spec.dimension = *d;
    if (*d == 0) r.error("dataset.synthetic.dimension must be positive");
  }
  if (const auto labels = r.string("labels")) {
    if (*labels == "regression") {
      src.labels = LabelModel::kRegression;
    } else if (*labels == "logistic") {
      src.labels = LabelModel::kLogistic;
    } else {
      r.error("dataset.synthetic.labels must be 'regression' or 'logistic'");
    }
  }
  if (const auto u = r.boolean("unit_norm")) src.unit_norm = *u;
  if (const auto noise = r.number("noise")) {
    spec.noise_std = *noise;
    if (*noise < 0.0) r.error("dataset.synthetic.noise must be nonnegative");
  }
  if (const auto seed = r.count("seed")) spec.seed = *seed;

  const std::size_t d = spec.dimension;
  if (const auto w = r.numbers("true_weights")) {
    if (w->size() != d) r.error("dataset.synthetic.true_weights must have 'dimension' entries");
    spec.true_weights = Eigen::Map<const Weights>(w->data(), static_cast<Eigen::Index>(w->size()));
  } else {
    const double value = r.number("weight_value").value_or(1.0);
    spec.true_weights = Weights::Constant(static_cast<Eigen::Index>(d), value);
  }
  if (const auto scales = r.numbers("feature_scales")) {
    if (scales->size() != d) r.error("dataset.synthetic.feature_scales must have 'dimension' entries");
    spec.feature_scales = *scales;
  } else if (const auto decay = r.number("variance_decay")) {
    if (!(*decay > 0.0)) {
      r.error("dataset.synthetic.variance_decay must be positive");
    } else {
      // Coordinate i has variance decay^i.
      for (std::size_t i = 0; i < d; ++i) spec.feature_scales.push_back(std::sqrt(std::pow(*decay, static_cast<double>(i))));
    }
  }
}

void read_dataset(const json& node, DataSource& src, std::vector<std::string>& errors) {
  if (node.is_string()) {
    src.path = node.get<std::string>();
    if (src.path.empty()) errors.push_back("dataset: path must not be empty");
    return;
  }
  if (!node.is_object()) {
    errors.push_back("dataset: expected a path or an object");
    return;
  }
  Reader r(node, "dataset", errors);
  r.allow({"path", "preprocess", "dimension", "synthetic"});
  if (const auto p = r.boolean("preprocess")) src.preprocess = *p;
  if (const auto d = r.count("dimension")) src.dimension = *d;
  const bool has_path = r.has("path");
  const bool has_synth = r.has("synthetic");
  if (has_path == has_synth) {
    r.error("dataset: give exactly one of 'path' and 'synthetic'");
    return;
  }
  if (has_path) {
    if (const auto p = r.string("path")) {
      src.path = *p;
      if (src.path.empty()) r.error("dataset.path must not be empty");
    }
  } else {
    read_synthetic(r.at("synthetic"), src, errors);
  }
}

void read_inner_length(const json& v, ExperimentConfig& cfg, std::vector<std::string>& errors) {
  if (v.is_number_integer()) {
    if (v.get<std::int64_t>() <= 0) {
      errors.push_back("m must be positive");
    } else {
      cfg.inner_length = v.get<std::uint64_t>();
    }
    return;
  }
  if (v.is_string()) {
    // "n", "0.1n", "10n": a multiple of the training-set size.
    const std::string s = v.get<std::string>();
    if (!s.empty() && s.back() == 'n') {
      const std::string factor = s.substr(0, s.size() - 1);
      double f = 1.0;
      bool ok = true;
      if (!factor.empty()) {
        std::istringstream in(factor);
        ok = static_cast<bool>(in >> f) && in.peek() == std::char_traits<char>::eof();
      }
      if (ok && f > 0.0 && std::isfinite(f)) {
        cfg.inner_length = 0;
        cfg.inner_factor = f;
        return;
      }
      if (ok) {
        errors.push_back("m must be positive");
        return;
      }
    }
  }
  if (v.is_number()) {
    errors.push_back(v.get<double>() <= 0.0 ? "m must be positive" : "m: expected an integer or a multiple of n such as \"0.1n\"");
    return;
  }
  errors.push_back("m: expected an integer or a multiple of n such as \"0.1n\"");
}

}  // namespace

ValidatedConfig validate_config(const json& doc) {
  std::vector<std::string> errors;
  if (!doc.is_object()) throw ConfigError({"configuration must be a JSON object"});
  ValidatedConfig out;
  ExperimentConfig& cfg = out.config;
  Reader r(doc, "", errors);
  r.allow({"name", "description", "method", "loss", "l2", "delta", "dataset", "train_fraction",
           "step_size", "eta", "step_sizes", "m", "epochs", "outer_loops", "iterations",
           "init_option", "regime", "replicates", "seed", "checkpoints", "workers", "n_grid",
           "initial_point", "select_params", "output_dir"});
  r.string("name");
  r.string("description");

  if (const auto m = parse_enum<Method>(r, "method", parse_method)) cfg.method = *m;
  if (const auto l = parse_enum<LossKind>(r, "loss", parse_loss_kind)) cfg.loss = *l;
  if (const auto reg = parse_enum<Regime>(r, "regime", parse_regime)) cfg.regime = *reg;
  if (const auto l2 = r.number("l2")) {
    cfg.l2 = *l2;
    if (*l2 < 0.0) r.error("l2 must be nonnegative");
  }
  if (const auto delta = r.number("delta")) {
    cfg.delta = *delta;
    if (!(*delta > 0.0)) r.error("delta must be positive");
  }

  if (r.has("dataset")) {
    read_dataset(r.at("dataset"), cfg.source, errors);
  } else {
    r.error("dataset is required");
  }
  if (const auto f = r.number("train_fraction")) {
    cfg.train_fraction = *f;
    if (!(*f > 0.0 && *f <= 1.0)) r.error("train_fraction must lie in (0, 1]");
  }

  const int step_keys = r.has("step_size") + r.has("eta") + r.has("step_sizes");
  if (step_keys > 1) r.error("give only one of 'step_size', 'eta' and 'step_sizes'");
  if (const auto eta = r.number(r.has("eta") ? "eta" : "step_size")) cfg.step_sizes = {*eta};
  if (const auto etas = r.numbers("step_sizes")) {
    cfg.step_sizes = *etas;
    if (etas->empty()) r.error("step_sizes must not be empty");
  }
  for (double eta : cfg.step_sizes) {
    if (!(eta > 0.0)) {
      r.error("step_size must be positive");
      break;
    }
  }

  if (r.has("m")) read_inner_length(r.at("m"), cfg, errors);
  if (const auto e = r.count("epochs")) {
    cfg.epochs = *e;
    if (*e == 0) r.error("epochs must be at least 1");
  }
  if (const auto t = r.count("outer_loops")) cfg.outer_loops = *t;
  if (const auto t = r.count("iterations")) cfg.iterations = *t;
  if (const auto opt = r.string("init_option")) {
    if (*opt == "I") {
      cfg.init_option = InitOption::kI;
    } else if (*opt == "II") {
      cfg.init_option = InitOption::kII;
    } else {
      r.error("init_option must be 'I' or 'II'");
    }
  }
  if (const auto rep = r.count("replicates")) {
    cfg.replicates = *rep;
    if (*rep == 0) r.error("replicates must be at least 1");
  }
  if (const auto seed = r.count("seed")) cfg.base_seed = *seed;
  if (const auto c = r.count("checkpoints")) {
    cfg.checkpoints = *c;
    if (*c == 0) r.error("checkpoints must be at least 1");
  }
  if (const auto w = r.count("workers")) cfg.workers = static_cast<int>(*w);
  if (const auto grid = r.numbers("n_grid")) {
    for (double n : *grid) {
      if (!(n >= 2.0) || n != std::floor(n)) {
        r.error("n_grid entries must be integers of at least 2");
        break;
      }
      cfg.n_grid.push_back(static_cast<std::size_t>(n));
    }
  }
  if (r.has("initial_point")) {
    const json& ip = r.at("initial_point");
    if (ip.is_string() && ip.get<std::string>() == "zero") {
      cfg.initial_point = InitialPoint::kZero;
    } else if (ip.is_string() && ip.get<std::string>() == "minimizer") {
      cfg.initial_point = InitialPoint::kMinimizer;
    } else if (const auto w = r.numbers("initial_point")) {
      cfg.initial_point = InitialPoint::kExplicit;
      cfg.initial_weights = *w;
    }
  }
  if (const auto sel = r.boolean("select_params")) cfg.select_from_regime = *sel;
  if (const auto dir = r.string("output_dir")) cfg.output_dir = *dir;

  if (!errors.empty()) throw ConfigError(errors);

  if (!cfg.select_from_regime) {
    if (const auto alpha = predicted_alpha(cfg)) out.warnings = step_size_warnings(cfg, *alpha);
  }
  return out;
}

ValidatedConfig load_config(const std::filesystem::path& path,
                            const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  json doc = parse_config_text(text.str());
  for (const auto& o : overrides) apply_override(doc, o);
  return validate_config(doc);
}

std::optional<double> predicted_alpha(const ExperimentConfig& cfg) {
  const DataSource& src = cfg.source;
  // Only the logistic-label generator rescales its features.
  const bool unit_norm =
      src.is_synthetic() ? src.unit_norm && src.labels == LabelModel::kLogistic : src.preprocess;
  if (!unit_norm) return std::nullopt;
  // Labels are ±1 whenever the data is unit norm here, so margin losses
  // share the feature-norm constant.
  switch (cfg.loss) {
    case LossKind::kLogistic: return 0.25 + cfg.l2;
    case LossKind::kLeastSquares: return 1.0 + cfg.l2;
    case LossKind::kSmoothedHinge: return 1.0 / cfg.delta + cfg.l2;
    case LossKind::kHuber: return 1.0 + cfg.l2;
  }
  return std::nullopt;
}

std::vector<std::string> step_size_warnings(const ExperimentConfig& cfg, double alpha) {
  std::vector<std::string> out;
  const double limit = 1.0 / (2.0 * alpha);
  for (double eta : cfg.step_sizes) {
    if (eta > limit) {
      std::ostringstream msg;
      msg << "step size " << eta << " exceeds 1/(2 alpha) = " << limit
          << "; bound comparison disabled for this run";
      out.push_back(msg.str());
    }
  }
  return out;
}

}  // namespace vrstab
