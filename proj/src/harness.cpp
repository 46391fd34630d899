#include "vrstab/harness.hpp"

#include "vrstab/random.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

namespace vrstab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Sub-stream ids under a replicate seed.
constexpr std::uint64_t kSplitStream = 1;
constexpr std::uint64_t kNeighborStream = 2;
constexpr std::uint64_t kIndexStream = 3;
constexpr std::uint64_t kDataStream = 4;
// Replicate-independent id for the single training set of convergence runs.
constexpr std::uint64_t kFixedDataset = 0xDA7A;

template <class Fn>
void for_each_replicate(std::size_t count, int workers, Fn&& fn) {
  std::vector<std::exception_ptr> errors(count);
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(count); ++r) {
    const auto id = static_cast<std::size_t>(r);
    try {
      fn(id);
    } catch (const DivergenceError& e) {
      errors[id] = std::make_exception_ptr(DivergenceError(e.outer(), e.inner(), id));
    } catch (...) {
      errors[id] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::size_t resolve_inner_length(const ExperimentConfig& cfg, std::size_t n) {
  if (cfg.inner_length > 0) return cfg.inner_length;
  const auto m = static_cast<std::size_t>(std::llround(cfg.inner_factor * static_cast<double>(n)));
  return std::max<std::size_t>(1, m);
}

std::size_t resolve_outer_loops(const ExperimentConfig& cfg, std::size_t n, std::size_t m) {
  if (cfg.outer_loops > 0) return cfg.outer_loops;
  return std::max<std::size_t>(1, (cfg.epochs * n + m - 1) / m);
}

std::size_t resolve_iterations(const ExperimentConfig& cfg, std::size_t n) {
  if (cfg.iterations > 0) return cfg.iterations;
  return std::max<std::size_t>(1, cfg.epochs * n);
}

Weights initial_weights(const ExperimentConfig& cfg, std::size_t dim) {
  if (cfg.initial_point == InitialPoint::kExplicit) {
    if (cfg.initial_weights.size() != dim) {
      throw ContractViolation("initial_point has " + std::to_string(cfg.initial_weights.size()) +
                              " coordinates, expected " + std::to_string(dim));
    }
    return Eigen::Map<const Weights>(cfg.initial_weights.data(), static_cast<Eigen::Index>(dim));
  }
  return Weights::Zero(static_cast<Eigen::Index>(dim));
}

// Smallest pool size whose training split has exactly `train` examples.
std::size_t pool_size(std::size_t train, double fraction) {
  auto total = static_cast<std::size_t>(std::ceil(static_cast<double>(train) / fraction - 1e-9));
  total = std::max(total, train);
  while (static_cast<std::size_t>(std::floor(fraction * static_cast<double>(total) + 1e-9)) < train) ++total;
  while (total > train &&
         static_cast<std::size_t>(std::floor(fraction * static_cast<double>(total - 1) + 1e-9)) >= train) {
    --total;
  }
  return total;
}

std::vector<double> mean_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  std::vector<double> out(rows.front().size());
  std::vector<double> column(rows.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    for (std::size_t r = 0; r < rows.size(); ++r) column[r] = rows[r][j];
    out[j] = aggregate(column).mean;
  }
  return out;
}

std::vector<double> prefix(const std::vector<double>& v, std::size_t len) {
  return {v.begin(), v.begin() + static_cast<std::ptrdiff_t>(len)};
}

}  // namespace

AggregateStats aggregate(const std::vector<double>& values) {
  if (values.empty()) throw ContractViolation("aggregate: no values");
  AggregateStats s;
  s.count = values.size();
  long double sum = 0.0L;
  for (double v : values) sum += v;
  const long double mean = sum / static_cast<long double>(values.size());
  s.mean = static_cast<double>(mean);
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  // Rounding can push the mean of equal values a hair outside [min, max].
  s.mean = std::clamp(s.mean, s.min, s.max);
  if (values.size() > 1) {
    long double ss = 0.0L;
    for (double v : values) {
      const long double d = v - mean;
      ss += d * d;
    }
    s.std = static_cast<double>(std::sqrt(ss / static_cast<long double>(values.size() - 1)));
    s.std_defined = true;
  }
  return s;
}

std::vector<std::uint64_t> checkpoint_steps(std::uint64_t total, std::size_t count) {
  std::vector<std::uint64_t> steps;
  if (total == 0 || count == 0) return steps;
  for (std::uint64_t j = 1; j <= count; ++j) {
    const std::uint64_t s = (j * total + count - 1) / count;
    if (steps.empty() || steps.back() != s) steps.push_back(s);
  }
  return steps;
}

BoundComparison compare_bound(const std::vector<double>& mean_sq_distances,
                              const std::vector<double>& bound_values,
                              const std::vector<double>& slack) {
  if (mean_sq_distances.size() != bound_values.size() ||
      (!slack.empty() && slack.size() != bound_values.size())) {
    throw ContractViolation("compare_bound: checkpoint grids differ in length");
  }
  BoundComparison c;
  c.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < bound_values.size(); ++j) {
    if (std::isnan(bound_values[j])) continue;
    const double margin = bound_values[j] - mean_sq_distances[j];
    ++c.compared;
    if (margin + (slack.empty() ? 0.0 : slack[j]) >= 0.0) ++c.dominated;
    c.min_margin = std::min(c.min_margin, margin);
  }
  if (c.compared == 0) {
    c.fraction = kNaN;
    c.min_margin = kNaN;
  } else {
    c.fraction = static_cast<double>(c.dominated) / static_cast<double>(c.compared);
  }
  return c;
}

PreparedData prepare_data(const ExperimentConfig& cfg) {
  PreparedData out;
  const DataSource& src = cfg.source;
  if (src.is_synthetic()) {
    if (src.train_size == 0) throw ContractViolation("synthetic source needs a training size");
    const std::size_t total = pool_size(src.train_size, cfg.train_fraction);
    out.pool = src.labels == LabelModel::kLogistic
                   ? generate_synthetic_logistic(src.synthetic, total, src.unit_norm)
                   : generate_synthetic(src.synthetic, total);
  } else {
    out.pool = load_libsvm(src.path);
    if (src.preprocess) out.pool = preprocess(out.pool);
  }
  if (src.dimension > 0) {
    if (src.dimension < out.pool.dimension) {
      throw ContractViolation("dimension override " + std::to_string(src.dimension) +
                              " is below the data dimension " + std::to_string(out.pool.dimension));
    }
    out.pool.dimension = src.dimension;
  }
  if (out.pool.empty()) throw ContractViolation("dataset is empty");
  out.model = make_model(cfg.loss, out.pool, cfg.l2, cfg.delta);
  return out;
}

namespace {

struct StabilityReplicate {
  DistanceTrace trace;
  std::vector<double> risk_log;
  std::vector<double> reference_risk;
  double initial_risk = 0.0;
};

struct RunShape {
  double eta = 0.0;
  std::size_t m = 0;       // SVRG inner length
  std::size_t loops = 0;   // SVRG outer loops
  std::uint64_t total = 0; // stochastic steps
};

RunShape resolve_shape(const ExperimentConfig& cfg, const LossModel& model, std::size_t n,
                       double initial_risk, std::size_t step_index) {
  RunShape shape;
  if (cfg.select_from_regime) {
    const RegimeParams p = select_params(cfg.method, cfg.regime, n, initial_risk,
                                         model.smoothness_alpha, model.strong_convexity_mu);
    shape.eta = p.eta;
    if (cfg.method == Method::kSvrg) {
      shape.m = p.m;
      shape.loops = cfg.outer_loops > 0 ? cfg.outer_loops : p.t;
      shape.total = static_cast<std::uint64_t>(shape.m) * shape.loops;
    } else {
      shape.total = cfg.iterations > 0 ? cfg.iterations : p.t;
    }
    return shape;
  }
  if (step_index >= cfg.step_sizes.size()) throw ContractViolation("step size index out of range");
  shape.eta = cfg.step_sizes[step_index];
  if (cfg.method == Method::kSvrg) {
    shape.m = resolve_inner_length(cfg, n);
    shape.loops = resolve_outer_loops(cfg, n, shape.m);
    shape.total = static_cast<std::uint64_t>(shape.m) * shape.loops;
  } else {
    shape.total = resolve_iterations(cfg, n);
  }
  return shape;
}

StabilityReplicate coupled_svrg(const ExperimentConfig& cfg, const LossModel& model,
                                const NeighborPair& pair, const RunShape& shape,
                                std::uint64_t stream_seed, const Weights& w1,
                                const std::vector<std::uint64_t>& grid) {
  SvrgConfig base_cfg;
  base_cfg.step_size = shape.eta;
  base_cfg.inner_length = shape.m;
  base_cfg.outer_iters = shape.loops;
  base_cfg.init_option = cfg.effective_init_option();
  base_cfg.seed = stream_seed;
  SvrgConfig neighbor_cfg = base_cfg;
  base_cfg.record_inner_risks = cfg.regime == Regime::kConvex;

  SvrgStepper a(model, pair.base, base_cfg, IndexStream(stream_seed), w1);
  SvrgStepper b(model, pair.neighbor, neighbor_cfg, IndexStream(stream_seed), w1);
  const bool by_reference = cfg.regime == Regime::kStronglyConvex;
  const double n = static_cast<double>(pair.base.size());

  StabilityReplicate out;
  std::size_t next = 0;
  for (std::uint64_t s = 1; s <= shape.total; ++s) {
    a.step();
    b.step();
    if (next < grid.size() && grid[next] == s) {
      const double d = by_reference ? (a.reference() - b.reference()).norm()
                                    : (a.iterate() - b.iterate()).norm();
      out.trace.epoch.push_back(static_cast<double>(a.gradient_evals()) / n);
      out.trace.distance.push_back(d);
      out.trace.sq_distance.push_back(d * d);
      ++next;
    }
  }
  Trajectory traj = a.take_trajectory();
  out.initial_risk = empirical_risk(model, traj.outer_iterates.front(), pair.base);
  for (const auto& loop : traj.inner_risks) {
    long double sum = 0.0L;
    for (double r : loop) sum += r;
    out.risk_log.push_back(static_cast<double>(sum));
  }
  if (by_reference) {
    for (std::size_t l = 1; l < traj.outer_iterates.size(); ++l) {
      out.reference_risk.push_back(empirical_risk(model, traj.outer_iterates[l], pair.base));
    }
  }
  return out;
}

template <class Stepper>
StabilityReplicate coupled_single_loop(const LossModel& model, const NeighborPair& pair,
                                       const RunShape& shape, std::uint64_t stream_seed,
                                       const Weights& w1, const std::vector<std::uint64_t>& grid) {
  LoopConfig base_cfg;
  base_cfg.step_size = shape.eta;
  base_cfg.total_iters = shape.total;
  base_cfg.seed = stream_seed;
  base_cfg.record_iterates = false;
  LoopConfig neighbor_cfg = base_cfg;
  base_cfg.record_risks = true;

  Stepper a(model, pair.base, base_cfg, IndexStream(stream_seed), w1);
  Stepper b(model, pair.neighbor, neighbor_cfg, IndexStream(stream_seed), w1);
  const double n = static_cast<double>(pair.base.size());

  StabilityReplicate out;
  std::size_t next = 0;
  for (std::uint64_t s = 1; s <= shape.total; ++s) {
    a.step();
    b.step();
    if (next < grid.size() && grid[next] == s) {
      const double d = (a.iterate() - b.iterate()).norm();
      out.trace.epoch.push_back(static_cast<double>(a.gradient_evals()) / n);
      out.trace.distance.push_back(d);
      out.trace.sq_distance.push_back(d * d);
      ++next;
    }
  }
  Trajectory traj = a.take_trajectory();
  out.initial_risk = empirical_risk(model, traj.outer_iterates.front(), pair.base);
  out.risk_log = std::move(traj.inner_risks.front());
  return out;
}

std::vector<double> stability_bounds(const ExperimentConfig& cfg, const StabilityResult& res,
                                     const RunShape& shape, std::string& note) {
  std::vector<double> bounds(res.steps.size(), kNaN);
  if (cfg.method == Method::kSgd) {
    note = "no stability bound for sgd";
    return bounds;
  }
  if (!(shape.eta > 0.0)) {
    note = "bounds need a positive step size";
    return bounds;
  }
  BoundInputs in;
  in.alpha = res.model.smoothness_alpha;
  in.mu = res.model.strong_convexity_mu;
  in.eta = shape.eta;
  in.m = std::max<std::size_t>(1, shape.m);
  in.n = res.n;
  in.initial_risk = res.initial_risk;

  for (std::size_t j = 0; j < res.steps.size(); ++j) {
    const std::uint64_t s = res.steps[j];
    std::function<double()> fn;
    if (cfg.method == Method::kSvrg && cfg.regime == Regime::kConvex) {
      // Mid-loop checkpoints use the whole loop's risk sum.
      in.t = static_cast<std::size_t>((s + shape.m - 1) / shape.m);
      in.inner_risk_sums = prefix(res.mean_risk_log, in.t);
      fn = [&] { return svrg_stability_convex(in); };
    } else if (cfg.method == Method::kSvrg) {
      in.t = static_cast<std::size_t>(s / shape.m);
      if (in.t == 0) continue;
      in.inner_risk_sums = prefix(res.mean_reference_risk, in.t);
      fn = [&] { return svrg_stability_sc(in); };
    } else {
      in.t = static_cast<std::size_t>(s);
      in.inner_risk_sums = prefix(res.mean_risk_log, in.t);
      if (cfg.regime == Regime::kConvex) {
        fn = [&] { return saga_stability_convex(in); };
      } else {
        fn = [&] { return saga_stability_sc(in); };
      }
    }
    const BoundReport report = evaluate_bound("stability", fn);
    if (report.applicable) {
      bounds[j] = report.value;
    } else if (note.empty()) {
      note = report.reason;
    }
  }
  return bounds;
}

}  // namespace

StabilityResult run_coupled_stability(const ExperimentConfig& cfg, std::size_t step_index) {
  return run_coupled_stability(cfg, prepare_data(cfg), step_index);
}

StabilityResult run_coupled_stability(const ExperimentConfig& cfg, const PreparedData& prepared,
                                      std::size_t step_index) {
  if (cfg.replicates == 0) throw ContractViolation("replicates must be at least 1");
  if (cfg.initial_point == InitialPoint::kMinimizer) {
    throw ContractViolation("initial_point=minimizer is only available for convergence runs");
  }
  const LossModel& model = prepared.model;
  const std::size_t dim = prepared.pool.dimension;
  const Weights w1 = initial_weights(cfg, dim);

  // The training size is the same for every replicate; probe it once.
  const Split probe = split_train(prepared.pool, cfg.train_fraction, 0);
  if (probe.holdout.empty()) throw ContractViolation("stability runs need a nonempty held-out pool");
  const std::size_t n = probe.train.size();
  const double probe_risk = empirical_risk(model, w1, probe.train);
  const RunShape shape = resolve_shape(cfg, model, n, probe_risk, step_index);

  StabilityResult res;
  res.step_size = shape.eta;
  res.n = n;
  res.inner_length = shape.m;
  res.total_steps = shape.total;
  res.steps = checkpoint_steps(shape.total, cfg.checkpoints);
  res.model = model;

  std::vector<StabilityReplicate> reps(cfg.replicates);
  for_each_replicate(cfg.replicates, cfg.workers, [&](std::size_t r) {
    const std::uint64_t seed = derive_seed(cfg.base_seed, r);
    const Split split = split_train(prepared.pool, cfg.train_fraction, derive_seed(seed, kSplitStream));
    const NeighborPair pair = make_neighbor(split.train, split.holdout, derive_seed(seed, kNeighborStream));
    const std::uint64_t stream_seed = derive_seed(seed, kIndexStream);
    switch (cfg.method) {
      case Method::kSvrg:
        reps[r] = coupled_svrg(cfg, model, pair, shape, stream_seed, w1, res.steps);
        break;
      case Method::kSaga:
        reps[r] = coupled_single_loop<SagaStepper>(model, pair, shape, stream_seed, w1, res.steps);
        break;
      case Method::kSgd:
        reps[r] = coupled_single_loop<SgdStepper>(model, pair, shape, stream_seed, w1, res.steps);
        break;
    }
  });

  res.epoch = reps.front().trace.epoch;
  std::vector<double> column(cfg.replicates);
  for (std::size_t j = 0; j < res.steps.size(); ++j) {
    for (std::size_t r = 0; r < cfg.replicates; ++r) column[r] = reps[r].trace.distance[j];
    res.distance.push_back(aggregate(column));
    for (std::size_t r = 0; r < cfg.replicates; ++r) column[r] = reps[r].trace.sq_distance[j];
    res.sq_distance.push_back(aggregate(column));
  }
  for (auto& rep : reps) {
    res.traces.push_back(std::move(rep.trace));
    res.initial_risks.push_back(rep.initial_risk);
    res.risk_logs.push_back(std::move(rep.risk_log));
  }
  res.initial_risk = aggregate(res.initial_risks).mean;
  res.mean_risk_log = mean_rows(res.risk_logs);
  {
    std::vector<std::vector<double>> ref;
    for (const auto& rep : reps) ref.push_back(rep.reference_risk);
    res.mean_reference_risk = mean_rows(ref);
  }

  res.bound_sq = stability_bounds(cfg, res, shape, res.bound_note);
  std::vector<double> mean_sq;
  std::vector<double> slack;
  for (const auto& s : res.sq_distance) {
    mean_sq.push_back(s.mean);
    slack.push_back(2.0 * s.standard_error());
  }
  res.comparison = compare_bound(mean_sq, res.bound_sq, slack);
  return res;
}

Weights gd_minimizer(const LossModel& model, const Dataset& data, double tol, std::size_t max_iters) {
  if (!(model.smoothness_alpha > 0.0)) throw OracleError("gd oracle: smoothness constant must be positive");
  const double step = 1.0 / model.smoothness_alpha;
  Weights w = Weights::Zero(static_cast<Eigen::Index>(data.dimension));
  Weights g;
  for (std::size_t it = 0; it < max_iters; ++it) {
    full_gradient(model, w, data, g);
    if (g.norm() <= tol) return w;
    w.noalias() -= step * g;
  }
  throw OracleError("gd oracle: gradient norm above " + std::to_string(tol) + " after " +
                    std::to_string(max_iters) + " iterations");
}

ConvergenceResult run_convergence(const ExperimentConfig& cfg, std::size_t step_index) {
  if (cfg.replicates == 0) throw ContractViolation("replicates must be at least 1");
  const PreparedData prepared = prepare_data(cfg);
  const LossModel& model = prepared.model;
  const Dataset train =
      split_train(prepared.pool, cfg.train_fraction, derive_seed(cfg.base_seed, kFixedDataset)).train;
  const std::size_t n = train.size();
  const Weights w_s = gd_minimizer(model, train);
  const double risk_s = empirical_risk(model, w_s, train);
  const Weights w1 = cfg.initial_point == InitialPoint::kMinimizer ? w_s : initial_weights(cfg, train.dimension);
  const RunShape shape = resolve_shape(cfg, model, n, empirical_risk(model, w1, train), step_index);
  const bool convex = cfg.regime == Regime::kConvex;

  ConvergenceResult res;
  res.step_size = shape.eta;
  res.n = n;
  res.inner_length = shape.m;
  res.model = model;
  res.init_dist_sq = (w1 - w_s).squaredNorm();
  res.initial_subopt = std::max(0.0, empirical_risk(model, w1, train) - risk_s);

  // Rows: SVRG t = 1..T (convex) or 1..T+1 (strongly convex); single-loop
  // methods use the checkpoint grid.
  std::vector<std::uint64_t> rows;
  if (cfg.method == Method::kSvrg) {
    for (std::uint64_t t = 1; t <= shape.loops + (convex ? 0 : 1); ++t) rows.push_back(t);
  } else {
    rows = checkpoint_steps(shape.total, cfg.checkpoints);
  }
  res.outer_step = rows;

  std::vector<std::vector<double>> values(cfg.replicates);
  for_each_replicate(cfg.replicates, cfg.workers, [&](std::size_t r) {
    const std::uint64_t stream_seed = derive_seed(derive_seed(cfg.base_seed, r), kIndexStream);
    std::vector<double>& out = values[r];
    if (cfg.method == Method::kSvrg) {
      SvrgConfig sc;
      sc.step_size = shape.eta;
      sc.inner_length = shape.m;
      sc.outer_iters = shape.loops;
      sc.init_option = cfg.effective_init_option();
      sc.seed = stream_seed;
      SvrgStepper stepper(model, train, sc, IndexStream(stream_seed), w1);
      if (!convex) out.push_back(empirical_risk(model, w1, train) - risk_s);
      while (!stepper.finished()) {
        const std::size_t done = stepper.completed_outer();
        stepper.step();
        if (stepper.completed_outer() != done) {
          const Weights& w = convex ? stepper.average().mean() : stepper.reference();
          out.push_back(empirical_risk(model, w, train) - risk_s);
        }
      }
      return;
    }
    LoopConfig lc;
    lc.step_size = shape.eta;
    lc.total_iters = shape.total;
    lc.seed = stream_seed;
    lc.record_iterates = false;
    auto drive = [&](auto& stepper) {
      std::size_t next = 0;
      for (std::uint64_t s = 1; s <= shape.total; ++s) {
        stepper.step();
        if (next < rows.size() && rows[next] == s) {
          const Weights& w = convex ? stepper.average().mean() : stepper.iterate();
          out.push_back(empirical_risk(model, w, train) - risk_s);
          ++next;
        }
      }
    };
    if (cfg.method == Method::kSaga) {
      SagaStepper stepper(model, train, lc, IndexStream(stream_seed), w1);
      drive(stepper);
    } else {
      SgdStepper stepper(model, train, lc, IndexStream(stream_seed), w1);
      drive(stepper);
    }
  });

  std::vector<double> column(cfg.replicates);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t r = 0; r < cfg.replicates; ++r) column[r] = values[r][j];
    res.subopt.push_back(aggregate(column));
  }

  res.bound.assign(rows.size(), kNaN);
  BoundInputs in;
  in.alpha = model.smoothness_alpha;
  in.mu = model.strong_convexity_mu;
  in.eta = shape.eta;
  in.m = std::max<std::size_t>(1, shape.m);
  in.n = n;
  if (cfg.method == Method::kSgd) {
    res.bound_note = "no optimization bound for sgd";
  } else if (!(shape.eta > 0.0)) {
    res.bound_note = "bounds need a positive step size";
  } else if (convex) {
    for (std::size_t j = 0; j < rows.size(); ++j) {
      in.t = static_cast<std::size_t>(rows[j]);
      in.inner_risk_sums.assign(in.t, 0.0);
      const BoundReport rep = evaluate_bound("optimization", [&] {
        return cfg.method == Method::kSvrg ? svrg_opt_convex(in, res.init_dist_sq, res.initial_subopt)
                                           : saga_opt_convex(in, res.init_dist_sq, res.initial_subopt);
      });
      if (rep.applicable) {
        res.bound[j] = rep.value;
      } else if (res.bound_note.empty()) {
        res.bound_note = rep.reason;
      }
    }
  } else if (cfg.method == Method::kSvrg) {
    const double c = static_cast<double>(shape.m) * shape.eta * model.strong_convexity_mu;
    const BoundReport rep =
        evaluate_bound("rho", [&] { return svrg_rho_sc(shape.eta, model.smoothness_alpha, c); });
    if (rep.applicable && c > 0.0) {
      res.rho = rep.value;
      for (std::size_t j = 0; j < rows.size(); ++j) {
        res.bound[j] = std::pow(res.rho, static_cast<double>(rows[j] - 1)) * res.initial_subopt;
      }
    } else {
      res.bound_note = rep.applicable ? "rate needs mu > 0" : rep.reason;
    }
  } else {
    res.bound_note = "no strongly convex optimization bound for saga";
  }
  return res;
}

double loglog_slope(const std::vector<double>& n, const std::vector<double>& value) {
  if (n.size() != value.size() || n.size() < 2) {
    throw ContractViolation("loglog_slope: need at least two aligned points");
  }
  long double sx = 0, sy = 0;
  const auto k = static_cast<long double>(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    sx += std::log(n[i]);
    sy += std::log(value[i]);
  }
  const long double mx = sx / k, my = sy / k;
  long double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const long double dx = std::log(n[i]) - mx;
    sxy += dx * (std::log(value[i]) - my);
    sxx += dx * dx;
  }
  return static_cast<double>(sxy / sxx);
}

EprResult run_epr_sweep(const ExperimentConfig& cfg) {
  if (!cfg.source.is_synthetic() || cfg.source.labels != LabelModel::kRegression ||
      cfg.loss != LossKind::kLeastSquares) {
    throw ContractViolation("epr sweeps need the synthetic least-squares source");
  }
  if (cfg.n_grid.empty()) throw ContractViolation("epr sweeps need a nonempty n_grid");
  if (cfg.replicates == 0) throw ContractViolation("replicates must be at least 1");
  if (cfg.method == Method::kSgd) throw ContractViolation("epr sweeps support svrg and saga");
  const bool convex = cfg.regime == Regime::kConvex;

  EprResult res;
  std::vector<double> ns, means;
  for (std::size_t n : cfg.n_grid) {
    std::vector<double> excess(cfg.replicates);
    for_each_replicate(cfg.replicates, cfg.workers, [&](std::size_t r) {
      const std::uint64_t seed = derive_seed(derive_seed(cfg.base_seed, n), r);
      SyntheticSpec spec = cfg.source.synthetic;
      spec.seed = derive_seed(seed, kDataStream);
      const Dataset data = generate_synthetic(spec, n);
      const LossModel model = make_model(cfg.loss, data, cfg.l2, cfg.delta);
      const Weights w1 = Weights::Zero(static_cast<Eigen::Index>(spec.dimension));
      const double risk_w1 = population_risk_ls(spec, model, w1);
      const RegimeParams p = select_params(cfg.method, cfg.regime, n, risk_w1,
                                           model.smoothness_alpha, model.strong_convexity_mu);
      const std::uint64_t stream_seed = derive_seed(seed, kIndexStream);
      Weights out;
      if (cfg.method == Method::kSvrg) {
        SvrgConfig sc;
        sc.step_size = p.eta;
        sc.inner_length = p.m;
        sc.outer_iters = p.t;
        sc.init_option = cfg.effective_init_option();
        sc.seed = stream_seed;
        const Trajectory traj = svrg_run(model, data, sc, IndexStream(stream_seed), w1);
        out = convex ? average_iterate(traj) : traj.outer_iterates.back();
      } else {
        LoopConfig lc;
        lc.step_size = p.eta;
        lc.total_iters = p.t;
        lc.seed = stream_seed;
        lc.record_iterates = false;
        const Trajectory traj = saga_run(model, data, lc, IndexStream(stream_seed), w1);
        out = convex ? average_iterate(traj) : traj.outer_iterates.back();
      }
      const Weights w_star = population_minimizer_ls(spec, model);
      excess[r] = population_risk_ls(spec, model, out) - population_risk_ls(spec, model, w_star);
    });

    EprPoint point;
    point.n = n;
    point.excess = aggregate(excess);
    {
      const Weights zero = Weights::Zero(static_cast<Eigen::Index>(cfg.source.synthetic.dimension));
      LossModel unit;
      unit.kind = cfg.loss;
      unit.l2_coefficient = cfg.l2;
      unit.strong_convexity_mu = cfg.l2;
      point.order_rate = convex ? epr_order_convex(population_risk_ls(cfg.source.synthetic, unit, zero), n)
                         : cfg.method == Method::kSvrg ? epr_order_svrg_sc(cfg.l2, n)
                                                       : epr_order_saga_sc(cfg.l2, n);
    }
    ns.push_back(static_cast<double>(n));
    means.push_back(point.excess.mean);
    point.slope_to_date = ns.size() >= 2 ? loglog_slope(ns, means) : kNaN;
    res.points.push_back(point);
  }
  res.slope = ns.size() >= 2 ? loglog_slope(ns, means) : kNaN;
  return res;
}

}  // namespace vrstab
