#pragma once

#include "vrstab/bounds.hpp"
#include "vrstab/data.hpp"
#include "vrstab/losses.hpp"
#include "vrstab/optim.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vrstab {

enum class LabelModel { kRegression, kLogistic };

/// Where the examples come from. A synthetic source generates its own pool;
/// `train_size` is the size of the training set after the split.
struct DataSource {
  std::string path;  // LIBSVM file; empty selects the synthetic source
  bool preprocess = true;
  std::size_t dimension = 0;  // 0 infers from the data

  SyntheticSpec synthetic;
  std::size_t train_size = 0;
  LabelModel labels = LabelModel::kRegression;
  bool unit_norm = false;

  bool is_synthetic() const { return path.empty(); }
};

enum class InitialPoint { kZero, kMinimizer, kExplicit };

struct ExperimentConfig {
  Method method = Method::kSvrg;
  LossKind loss = LossKind::kLogistic;
  double l2 = 0.0;
  double delta = 1.0;
  DataSource source;
  double train_fraction = 0.8;
  std::vector<double> step_sizes{0.1};

  // Inner-loop length: `inner_length` if nonzero, else round(inner_factor·n).
  std::size_t inner_length = 0;
  double inner_factor = 1.0;

  // Run length: one epoch is n stochastic steps. `outer_loops` (SVRG) and
  // `iterations` (SAGA/SGD) override the epoch count when nonzero.
  std::size_t epochs = 8;
  std::size_t outer_loops = 0;
  std::size_t iterations = 0;

  std::optional<InitOption> init_option;  // default: I convex, II strongly convex
  Regime regime = Regime::kConvex;
  std::size_t replicates = 100;
  std::uint64_t base_seed = 0;
  std::size_t checkpoints = 50;
  int workers = 0;  // 0 leaves the OpenMP default
  std::vector<std::size_t> n_grid;
  InitialPoint initial_point = InitialPoint::kZero;
  std::vector<double> initial_weights;  // for InitialPoint::kExplicit
  bool select_from_regime = false;     // take η, m, t from select_params
  std::string output_dir = "results";

  InitOption effective_init_option() const {
    if (init_option) return *init_option;
    return regime == Regime::kConvex ? InitOption::kI : InitOption::kII;
  }
};

/// Distances of one coupled run at the checkpoint grid.
struct DistanceTrace {
  std::vector<double> epoch;
  std::vector<double> distance;
  std::vector<double> sq_distance;
};

struct AggregateStats {
  double mean = 0.0;
  double std = 0.0;  // sample std, divisor R−1; 0 with std_defined = false when R = 1
  std::size_t count = 0;
  bool std_defined = false;
  double min = 0.0;
  double max = 0.0;

  double standard_error() const {
    return count > 1 ? std / std::sqrt(static_cast<double>(count)) : 0.0;
  }
};

/// Fixed-order extended-precision mean and sample standard deviation.
AggregateStats aggregate(const std::vector<double>& values);

/// Steps after which a checkpoint is taken: ⌈j·total/count⌉ for j = 1..count,
/// without repeats.
std::vector<std::uint64_t> checkpoint_steps(std::uint64_t total, std::size_t count);

struct BoundComparison {
  std::size_t compared = 0;    // checkpoints with a finite bound
  std::size_t dominated = 0;   // margin + slack ≥ 0
  double fraction = 0.0;       // dominated / compared (NaN if nothing compared)
  double min_margin = 0.0;     // min over compared of bound − mean_sq_distance
};

/// Margins are taken in squared distance. `slack` is added to each margin
/// and may be empty (no slack). Checkpoints with a NaN bound are skipped.
BoundComparison compare_bound(const std::vector<double>& mean_sq_distances,
                              const std::vector<double>& bound_values,
                              const std::vector<double>& slack = {});

/// Everything a run needs after data loading and model certification.
struct PreparedData {
  Dataset pool;     // all examples: the split source
  LossModel model;  // constants certified on the full pool
};

PreparedData prepare_data(const ExperimentConfig& cfg);

struct StabilityResult {
  double step_size = 0.0;
  std::size_t n = 0;
  std::size_t inner_length = 0;     // SVRG
  std::uint64_t total_steps = 0;
  std::vector<std::uint64_t> steps;  // checkpoint grid
  std::vector<double> epoch;
  std::vector<DistanceTrace> traces;  // by replicate id
  std::vector<AggregateStats> distance;
  std::vector<AggregateStats> sq_distance;
  std::vector<double> bound_sq;  // NaN where the bound does not apply
  std::string bound_note;        // why the bound is missing, if it is
  BoundComparison comparison;    // with 2·std/√R slack
  LossModel model;

  // Bound inputs, as replicate means.
  double initial_risk = 0.0;
  std::vector<double> mean_risk_log;  // per-loop Σ_k L_S(x_k) (SVRG) or L_S(w_k) (SAGA/SGD)
  std::vector<double> mean_reference_risk;  // L_S(w_{l+1}), SVRG only
  // Per replicate, for re-deriving the means.
  std::vector<std::vector<double>> risk_logs;
  std::vector<double> initial_risks;
};

/// Coupled runs on S and S^(i) sharing one index stream, one per replicate
/// and step size (the first step size unless `step_index` says otherwise).
StabilityResult run_coupled_stability(const ExperimentConfig& cfg, const PreparedData& prepared,
                                      std::size_t step_index = 0);
StabilityResult run_coupled_stability(const ExperimentConfig& cfg, std::size_t step_index = 0);

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deterministic full-gradient descent with step 1/α until ‖∇L_S‖ ≤ tol.
Weights gd_minimizer(const LossModel& model, const Dataset& data, double tol = 1e-10,
                     std::size_t max_iters = 2'000'000);

struct ConvergenceResult {
  double step_size = 0.0;
  std::size_t n = 0;
  std::size_t inner_length = 0;
  std::vector<std::uint64_t> outer_step;  // t
  std::vector<AggregateStats> subopt;
  std::vector<double> bound;
  std::string bound_note;
  double initial_subopt = 0.0;
  double init_dist_sq = 0.0;
  double rho = 0.0;  // SVRG strongly convex only
  LossModel model;
};

/// Convex: L_S(w̄_t) − L_S(w_S); strongly convex: L_S(w_t) − L_S(w_S) at the
/// reference points. S is drawn once; replicates vary the algorithm seed.
ConvergenceResult run_convergence(const ExperimentConfig& cfg, std::size_t step_index = 0);

struct EprPoint {
  std::size_t n = 0;
  AggregateStats excess;
  double slope_to_date = 0.0;  // NaN for the first point
  double order_rate = 0.0;     // unit-constant rate, diagnostic only
};

struct EprResult {
  std::vector<EprPoint> points;
  double slope = 0.0;
};

/// Least-squares fit of log(mean excess risk) against log n.
double loglog_slope(const std::vector<double>& n, const std::vector<double>& value);

/// Excess population risk of the output over fresh synthetic datasets, with
/// parameters from select_params at every n.
EprResult run_epr_sweep(const ExperimentConfig& cfg);

}  // namespace vrstab
