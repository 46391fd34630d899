#include "vrstab/cli.hpp"

#include "vrstab/bounds.hpp"
#include "vrstab/checks.hpp"
#include "vrstab/config.hpp"
#include "vrstab/data.hpp"
#include "vrstab/harness.hpp"
#include "vrstab/report.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <optional>

namespace vrstab {

namespace {

struct RunOptions {
  std::string config;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::optional<std::size_t> replicates;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

void add_run_options(CLI::App* cmd, RunOptions& opts) {
  cmd->add_option("--config", opts.config, "JSON experiment file")->required();
  cmd->add_option("--set", opts.overrides, "key=value override, applied in order");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--replicates", opts.replicates, "replicate count");
  cmd->add_option("--seed", opts.seed, "base seed");
  cmd->add_option("--workers", opts.workers, "worker threads (default: VRSTAB_WORKERS)");
}

ValidatedConfig resolve_config(const RunOptions& opts) {
  ValidatedConfig vc = load_config(opts.config, opts.overrides);
  ExperimentConfig& cfg = vc.config;
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  if (opts.replicates) {
    if (*opts.replicates == 0) throw ConfigError({"replicates must be at least 1"});
    cfg.replicates = *opts.replicates;
  }
  if (opts.seed) cfg.base_seed = *opts.seed;
  if (opts.workers) {
    cfg.workers = *opts.workers;
  } else if (const char* env = std::getenv("VRSTAB_WORKERS")) {
    try {
      cfg.workers = std::stoi(env);
    } catch (const std::exception&) {
      throw ConfigError({"VRSTAB_WORKERS must be an integer"});
    }
  }
  if (cfg.workers < 0) throw ConfigError({"workers must be nonnegative"});
  return vc;
}

std::string eta_tag(double eta) { return "eta" + format_number(eta); }

void print_manifest(std::ostream& out, const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) out << f.string() << '\n';
}

void warn_step_sizes(const ValidatedConfig& vc, const LossModel& model, std::ostream& err) {
  for (const auto& w : vc.warnings) err << "warning: " << w << '\n';
  if (vc.warnings.empty() && !vc.config.select_from_regime) {
    for (const auto& w : step_size_warnings(vc.config, model.smoothness_alpha)) err << "warning: " << w << '\n';
  }
}

int run_stability(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  const ValidatedConfig vc = resolve_config(opts);
  const ExperimentConfig& cfg = vc.config;
  const PreparedData prepared = prepare_data(cfg);
  warn_step_sizes(vc, prepared.model, err);
  std::vector<std::filesystem::path> files;
  const std::size_t runs = cfg.select_from_regime ? 1 : cfg.step_sizes.size();
  for (std::size_t k = 0; k < runs; ++k) {
    const StabilityResult res = run_coupled_stability(cfg, prepared, k);
    const std::string stem = "stability_" + std::string(to_string(cfg.method)) + "_" + eta_tag(res.step_size);
    auto written = emit_results(cfg.output_dir, stem, stability_csv(res),
                                stability_series(res, stem));
    files.insert(files.end(), written.begin(), written.end());
    err << stem << ": bound dominated " << res.comparison.dominated << "/" << res.comparison.compared
        << " checkpoints";
    if (!res.bound_note.empty()) err << " (" << res.bound_note << ")";
    err << '\n';
  }
  print_manifest(out, files);
  return kExitOk;
}

int run_convergence_cmd(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  const ValidatedConfig vc = resolve_config(opts);
  const ExperimentConfig& cfg = vc.config;
  for (const auto& w : vc.warnings) err << "warning: " << w << '\n';
  std::vector<std::filesystem::path> files;
  const std::size_t runs = cfg.select_from_regime ? 1 : cfg.step_sizes.size();
  for (std::size_t k = 0; k < runs; ++k) {
    const ConvergenceResult res = run_convergence(cfg, k);
    const std::string stem = "convergence_" + std::string(to_string(cfg.method)) + "_" + eta_tag(res.step_size);
    auto written = emit_results(cfg.output_dir, stem, convergence_csv(res),
                                convergence_series(res, stem));
    files.insert(files.end(), written.begin(), written.end());
    if (!res.bound_note.empty()) err << stem << ": " << res.bound_note << '\n';
  }
  print_manifest(out, files);
  return kExitOk;
}

int run_epr_cmd(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  const ValidatedConfig vc = resolve_config(opts);
  const ExperimentConfig& cfg = vc.config;
  const EprResult res = run_epr_sweep(cfg);
  const std::string stem = "epr_" + std::string(to_string(cfg.method)) + "_" + std::string(to_string(cfg.regime));
  const auto files = emit_results(cfg.output_dir, stem, epr_csv(res), epr_series(res, stem));
  err << stem << ": log-log slope " << format_number(res.slope) << '\n';
  print_manifest(out, files);
  return kExitOk;
}

int run_check_losses(std::size_t pairs, std::uint64_t seed, std::ostream& out) {
  bool all = true;
  for (LossKind kind : {LossKind::kLogistic, LossKind::kLeastSquares, LossKind::kSmoothedHinge, LossKind::kHuber}) {
    const LossCheck c = check_loss(kind, pairs, std::min<std::size_t>(pairs, 100), seed);
    out << (c.passed ? "PASS " : "FAIL ") << to_string(kind) << " pairs=" << c.pairs
        << " self_bounding_min=" << format_number(c.worst_self_bounding)
        << " coercivity_min=" << format_number(c.worst_coercivity)
        << " convexity_min=" << format_number(c.worst_convexity)
        << " gradient_rel_err=" << format_number(c.worst_gradient_error) << '\n';
    all = all && c.passed;
  }
  return all ? kExitOk : kExitRuntime;
}

int run_parse_data(const std::string& input, bool normalize, const std::string& output,
                   std::ostream& out) {
  Dataset data = load_libsvm(input);
  if (normalize) data = preprocess(data);
  std::size_t nnz = 0;
  for (const auto& z : data.samples) nnz += z.features.nnz();
  out << "samples=" << data.size() << " dimension=" << data.dimension << " nnz=" << nnz << '\n';
  if (!output.empty()) {
    const std::filesystem::path p(output);
    const auto dir = p.has_parent_path() ? p.parent_path() : std::filesystem::path(".");
    out << write_file(dir, p.filename().string(), serialize_libsvm(data)).string() << '\n';
  }
  return kExitOk;
}

int run_select_params(const std::string& method, const std::string& regime, std::size_t n,
                      double initial_risk, double alpha, double mu, std::ostream& out) {
  const RegimeParams p = select_params(parse_method(method), parse_regime(regime), n, initial_risk, alpha, mu);
  out << "method=" << to_string(p.method) << '\n'
      << "regime=" << to_string(p.regime) << '\n'
      << "eta=" << format_number(p.eta) << '\n';
  if (p.method == Method::kSvrg) out << "m=" << p.m << '\n';
  out << "t=" << p.t << '\n' << "gamma=" << format_number(p.gamma) << '\n';
  if (p.method == Method::kSvrg && p.regime == Regime::kStronglyConvex) {
    out << "c=" << format_number(p.c) << '\n' << "rho=" << format_number(p.rho) << '\n';
  }
  for (const auto& c : p.side_conditions) {
    out << "condition " << (c.holds ? "holds" : "fails") << ": " << c.name << '\n';
  }
  return kExitOk;
}

int fail(std::ostream& err, int code, const char* tag, const std::string& message) {
  err << "error_code=" << tag << '\n' << "error: " << message << '\n';
  return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Variance-reduced optimizers with stability and bound verification", "vrstab"};
  app.require_subcommand(1);

  RunOptions stab_opts, conv_opts, epr_opts;
  add_run_options(app.add_subcommand("stability", "coupled runs on neighboring datasets"), stab_opts);
  add_run_options(app.add_subcommand("convergence", "suboptimality against the optimization bounds"), conv_opts);
  add_run_options(app.add_subcommand("epr", "excess population risk sweep over n"), epr_opts);

  std::size_t pairs = 10000;
  std::uint64_t check_seed = 1;
  auto* check = app.add_subcommand("check-losses", "gradient, self-bounding and coercivity checks for every loss");
  check->add_option("--pairs", pairs, "random pairs per loss");
  check->add_option("--seed", check_seed, "sampling seed");

  std::string input, output;
  bool normalize = false;
  auto* parse = app.add_subcommand("parse-data", "parse a LIBSVM file and report its shape");
  parse->add_option("input", input, "LIBSVM file")->required();
  parse->add_flag("--preprocess", normalize, "binarize labels and unit-normalize");
  parse->add_option("--output", output, "write the parsed data back out");

  std::string method = "svrg", regime = "convex";
  std::size_t n = 0;
  double initial_risk = 0.0, alpha = 0.0, mu = 0.0;
  auto* select = app.add_subcommand("select-params", "step size and run length for a regime");
  select->add_option("--method", method, "svrg or saga");
  select->add_option("--regime", regime, "convex or strongly_convex");
  select->add_option("--n", n, "training-set size")->required();
  select->add_option("--initial-risk", initial_risk, "estimate of L(w1)");
  select->add_option("--alpha", alpha, "smoothness constant")->required();
  select->add_option("--mu", mu, "strong convexity constant");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return fail(err, kExitValidation, "usage", e.what());
  }

  try {
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "stability") return run_stability(stab_opts, out, err);
    if (cmd == "convergence") return run_convergence_cmd(conv_opts, out, err);
    if (cmd == "epr") return run_epr_cmd(epr_opts, out, err);
    if (cmd == "check-losses") {
      const int code = run_check_losses(pairs, check_seed, out);
      if (code != kExitOk) return fail(err, code, "check_failed", "a loss property check failed");
      return code;
    }
    if (cmd == "parse-data") return run_parse_data(input, normalize, output, out);
    return run_select_params(method, regime, n, initial_risk, alpha, mu, out);
  } catch (const ConfigError& e) {
    err << "error_code=validation\n";
    for (const auto& msg : e.errors()) err << "error: " << msg << '\n';
    return kExitValidation;
  } catch (const RegimeError& e) {
    return fail(err, kExitValidation, "regime", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(err, kExitValidation, "validation", e.what());
  } catch (const ContractViolation& e) {
    return fail(err, kExitValidation, "validation", e.what());
  } catch (const DivergenceError& e) {
    return fail(err, kExitDivergence, "divergence", e.what());
  } catch (const ParseError& e) {
    return fail(err, kExitRuntime, "parse", e.what());
  } catch (const IoError& e) {
    return fail(err, kExitRuntime, "io", e.what());
  } catch (const OracleError& e) {
    return fail(err, kExitRuntime, "oracle", e.what());
  } catch (const std::exception& e) {
    return fail(err, kExitRuntime, "runtime", e.what());
  }
}

}  // namespace vrstab
