#pragma once

#include "vrstab/losses.hpp"
#include "vrstab/random.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vrstab {

/// A non-finite iterate appeared. `outer` is the 1-based outer loop (the
/// step counter for single-loop methods) and `inner` the inner position.
/// The harness re-raises it with the replicate id attached.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t outer, std::size_t inner, std::optional<std::size_t> replicate = {})
      : std::runtime_error((replicate ? "replicate " + std::to_string(*replicate) + ": " : std::string()) +
                           "non-finite iterate at outer=" + std::to_string(outer) +
                           " inner=" + std::to_string(inner)),
        outer_(outer),
        inner_(inner),
        replicate_(replicate) {}

  std::size_t outer() const { return outer_; }
  std::size_t inner() const { return inner_; }
  std::optional<std::size_t> replicate() const { return replicate_; }

 private:
  std::size_t outer_;
  std::size_t inner_;
  std::optional<std::size_t> replicate_;
};

/// Inner-loop start: option I continues from x_m^t, option II restarts at w_t.
enum class InitOption { kI, kII };

/// Candidates for the next reference point. kLeading is {x_0, ..., x_{m-1}}
/// (the standard rule). kTrailing is {x_1, ..., x_m}, under which m = 1 is
/// exactly full gradient descent.
enum class ReferenceWindow { kLeading, kTrailing };

struct SvrgConfig {
  double step_size = 0.1;
  std::size_t inner_length = 1;
  InitOption init_option = InitOption::kI;
  std::size_t outer_iters = 1;
  std::uint64_t seed = 0;
  bool record_inner_risks = false;
  ReferenceWindow reference_window = ReferenceWindow::kLeading;
};

/// Shared by SAGA and SGD.
struct LoopConfig {
  double step_size = 0.1;
  std::size_t total_iters = 1;
  std::uint64_t seed = 0;
  bool record_risks = false;
  bool record_iterates = true;
};
using SagaConfig = LoopConfig;
using SgdConfig = LoopConfig;

/// Output of a run.
///
/// SVRG: `outer_iterates` holds the reference points w_1..w_{T+1},
/// `inner_endpoints` the x_m^{t+1}, `inner_risks[t]` the values L_S(x_k^{t+1})
/// for k = 0..m-1 and `reference_choices[t]` the drawn k.
/// SAGA/SGD: `outer_iterates` holds w_1..w_{T+1} (first and last only when
/// iterates are not recorded) and `inner_risks` a single row L_S(w_1..w_T).
/// `gradient_evals[j]` is the cumulative component-gradient count at
/// outer_iterates[j]. The running average covers the iterates the
/// convergence guarantees average over.
struct Trajectory {
  std::vector<Weights> outer_iterates;
  std::vector<Weights> inner_endpoints;
  std::vector<std::vector<double>> inner_risks;
  std::vector<std::size_t> reference_choices;
  std::vector<std::uint64_t> gradient_evals;
  Weights running_average;
  std::uint64_t averaged_count = 0;
};

/// Online mean; never stores the averaged points.
class RunningMean {
 public:
  void add(const Weights& x) {
    if (count_ == 0) mean_ = Weights::Zero(x.size());
    ++count_;
    mean_ += (x - mean_) / static_cast<double>(count_);
  }
  const Weights& mean() const { return mean_; }
  std::uint64_t count() const { return count_; }

 private:
  Weights mean_;
  std::uint64_t count_ = 0;
};

/// Algorithm-level stepping of SVRG, one inner update per call. Coupled runs
/// drive two steppers in lockstep with streams built from the same seed.
class SvrgStepper {
 public:
  SvrgStepper(const LossModel& model, const Dataset& data, const SvrgConfig& cfg,
              IndexStream stream, Weights w1);

  /// Takes x_k -> x_{k+1}; closes the outer loop after the m-th update.
  void step();

  bool finished() const { return completed_outer_ >= cfg_.outer_iters; }
  std::size_t completed_outer() const { return completed_outer_; }
  /// Position k of iterate() inside the current loop (m right after a loop closes).
  std::size_t inner_position() const { return inner_; }
  std::uint64_t total_inner_steps() const { return total_steps_; }

  /// Current inner iterate.
  const Weights& iterate() const { return x_; }
  /// Most recent reference point (w_t during loop t, w_{t+1} once it closes).
  const Weights& reference() const { return reference_; }
  /// ∇L_S at the reference used by the last inner update.
  const Weights& reference_gradient() const { return reference_gradient_; }
  std::uint64_t gradient_evals() const { return gradient_evals_; }
  const RunningMean& average() const { return average_; }
  const IndexStream& stream() const { return stream_; }
  const SvrgConfig& config() const { return cfg_; }

  /// Observer for each averaged inner iterate x_k^{t+1}, k = 0..m-1.
  using InnerObserver = std::function<void(std::size_t outer, std::size_t inner, const Weights& x)>;
  void set_observer(InnerObserver observer) { observer_ = std::move(observer); }

  Trajectory take_trajectory();

 private:
  void begin_loop();
  void end_loop();

  const LossModel& model_;
  const Dataset& data_;
  SvrgConfig cfg_;
  IndexStream stream_;
  Weights x_;
  Weights reference_;
  Weights reference_gradient_;
  Weights candidate_;
  Weights direction_;
  std::size_t chosen_ = 0;
  std::size_t inner_ = 0;
  bool loop_open_ = false;
  std::size_t completed_outer_ = 0;
  std::uint64_t total_steps_ = 0;
  std::uint64_t gradient_evals_ = 0;
  RunningMean average_;
  Trajectory trajectory_;
  InnerObserver observer_;
};

/// SAGA. The stored gradient ∇ℓ(φ_j; z_j) of a linear model is kept as the
/// scalar slope at φ_j plus, when l2 > 0, the anchor φ_j itself.
class SagaStepper {
 public:
  SagaStepper(const LossModel& model, const Dataset& data, const SagaConfig& cfg,
              IndexStream stream, Weights w1);

  void step();

  bool finished() const { return steps_ >= cfg_.total_iters; }
  std::uint64_t steps() const { return steps_; }
  const Weights& iterate() const { return w_; }
  /// Materialized table; column j is ∇ℓ(φ_j; z_j).
  Eigen::MatrixXd table() const;
  /// Incrementally maintained mean of the table columns.
  const Weights& table_mean() const { return table_mean_; }
  std::uint64_t gradient_evals() const { return gradient_evals_; }
  const RunningMean& average() const { return average_; }
  const IndexStream& stream() const { return stream_; }

  Trajectory take_trajectory();

 private:
  const LossModel& model_;
  const Dataset& data_;
  SagaConfig cfg_;
  IndexStream stream_;
  Weights w_;
  Eigen::VectorXd slopes_;
  Eigen::MatrixXd anchors_;
  Weights table_mean_;
  Weights direction_;
  std::uint64_t steps_ = 0;
  std::uint64_t gradient_evals_ = 0;
  RunningMean average_;
  Trajectory trajectory_;
};

/// Plain SGD with the same recording contract as SAGA.
class SgdStepper {
 public:
  SgdStepper(const LossModel& model, const Dataset& data, const SgdConfig& cfg,
             IndexStream stream, Weights w1);

  void step();

  bool finished() const { return steps_ >= cfg_.total_iters; }
  std::uint64_t steps() const { return steps_; }
  const Weights& iterate() const { return w_; }
  std::uint64_t gradient_evals() const { return steps_; }
  const RunningMean& average() const { return average_; }

  Trajectory take_trajectory();

 private:
  const LossModel& model_;
  const Dataset& data_;
  SgdConfig cfg_;
  IndexStream stream_;
  Weights w_;
  Weights gradient_;
  std::uint64_t steps_ = 0;
  RunningMean average_;
  Trajectory trajectory_;
};

Trajectory svrg_run(const LossModel& model, const Dataset& data, const SvrgConfig& cfg,
                    IndexStream stream, const Weights& w1,
                    SvrgStepper::InnerObserver observer = {});
Trajectory saga_run(const LossModel& model, const Dataset& data, const SagaConfig& cfg,
                    IndexStream stream, const Weights& w1);
Trajectory sgd_run(const LossModel& model, const Dataset& data, const SgdConfig& cfg,
                   IndexStream stream, const Weights& w1);

/// w̄: mean of all inner iterates (SVRG) or of w_1..w_T (SAGA/SGD).
Weights average_iterate(const Trajectory& traj);

}  // namespace vrstab
