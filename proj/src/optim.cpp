#include "vrstab/optim.hpp"

#include "vrstab/kernels.hpp"

#include <cmath>
#include <utility>

namespace vrstab {

namespace {

void require_problem(const Dataset& data, const Weights& w1, double step_size, const char* who) {
  if (data.empty()) throw ContractViolation(std::string(who) + ": empty dataset");
  if (static_cast<std::size_t>(w1.size()) < data.dimension) {
    throw ContractViolation(std::string(who) + ": initial point has dimension " +
                            std::to_string(w1.size()) + ", data needs " +
                            std::to_string(data.dimension));
  }
  if (!(step_size >= 0.0) || !std::isfinite(step_size)) {
    throw ContractViolation(std::string(who) + ": step size must be finite and nonnegative");
  }
}

void finish(Trajectory& traj, const RunningMean& average) {
  traj.running_average = average.mean();
  traj.averaged_count = average.count();
}

}  // namespace

SvrgStepper::SvrgStepper(const LossModel& model, const Dataset& data, const SvrgConfig& cfg,
                         IndexStream stream, Weights w1)
    : model_(model), data_(data), cfg_(cfg), stream_(stream) {
  require_problem(data, w1, cfg.step_size, "svrg");
  if (cfg.inner_length == 0) throw ContractViolation("svrg: inner_length must be positive");
  x_ = w1;
  reference_ = std::move(w1);
  candidate_ = reference_;
  direction_ = Weights::Zero(reference_.size());
  trajectory_.outer_iterates.push_back(reference_);
  trajectory_.gradient_evals.push_back(0);
}

void SvrgStepper::begin_loop() {
  full_gradient(model_, reference_, data_, reference_gradient_);
  gradient_evals_ += data_.size();
  if (cfg_.init_option == InitOption::kII) x_ = reference_;
  // The reference draw sits right after the m index draws of this loop.
  chosen_ = stream_.peek_below(cfg_.inner_length, cfg_.inner_length);
  inner_ = 0;
  loop_open_ = true;
  if (cfg_.record_inner_risks) trajectory_.inner_risks.emplace_back();
}

void SvrgStepper::step() {
  if (finished()) throw ContractViolation("svrg: stepping past the last outer loop");
  if (!loop_open_) begin_loop();

  average_.add(x_);
  if (observer_) observer_(completed_outer_ + 1, inner_, x_);
  if (cfg_.record_inner_risks) trajectory_.inner_risks.back().push_back(empirical_risk(model_, x_, data_));
  if (cfg_.reference_window == ReferenceWindow::kLeading && inner_ == chosen_) candidate_ = x_;

  const Sample& z = data_[stream_.next_below(data_.size())];
  direction_ = reference_gradient_;
  add_loss_gradient(model_, x_, z, 1.0, direction_);
  add_loss_gradient(model_, reference_, z, -1.0, direction_);
  x_.noalias() -= cfg_.step_size * direction_;
  gradient_evals_ += 2;
  ++inner_;
  ++total_steps_;
  if (!x_.allFinite()) throw DivergenceError(completed_outer_ + 1, inner_);

  if (cfg_.reference_window == ReferenceWindow::kTrailing && inner_ == chosen_ + 1) candidate_ = x_;
  if (inner_ == cfg_.inner_length) end_loop();
}

void SvrgStepper::end_loop() {
  const std::size_t drawn = stream_.next_below(cfg_.inner_length);
  reference_ = candidate_;
  trajectory_.outer_iterates.push_back(reference_);
  trajectory_.inner_endpoints.push_back(x_);
  trajectory_.reference_choices.push_back(drawn);
  trajectory_.gradient_evals.push_back(gradient_evals_);
  ++completed_outer_;
  loop_open_ = false;
}

SagaStepper::SagaStepper(const LossModel& model, const Dataset& data, const SagaConfig& cfg,
                         IndexStream stream, Weights w1)
    : model_(model), data_(data), cfg_(cfg), stream_(stream), w_(std::move(w1)) {
  require_problem(data, w_, cfg.step_size, "saga");
  const std::size_t n = data.size();
  slopes_.resize(static_cast<Eigen::Index>(n));
  table_mean_ = Weights::Zero(w_.size());
  for (std::size_t j = 0; j < n; ++j) {
    const Sample& z = data[j];
    const double s = loss_slope(model, z.features.dot(w_), z.label);
    slopes_[static_cast<Eigen::Index>(j)] = s;
    z.features.add_to(table_mean_, s);
  }
  table_mean_ /= static_cast<double>(n);
  if (model.l2_coefficient > 0.0) {
    anchors_ = w_.replicate(1, static_cast<Eigen::Index>(n));
    table_mean_.noalias() += model.l2_coefficient * w_;
  }
  gradient_evals_ = n;
  direction_ = Weights::Zero(w_.size());
  trajectory_.outer_iterates.push_back(w_);
  trajectory_.gradient_evals.push_back(gradient_evals_);
  if (cfg.record_risks) trajectory_.inner_risks.emplace_back();
}

Eigen::MatrixXd SagaStepper::table() const {
  const auto n = static_cast<Eigen::Index>(data_.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(w_.size(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Weights col = Weights::Zero(w_.size());
    data_[static_cast<std::size_t>(j)].features.add_to(col, slopes_[j]);
    if (model_.l2_coefficient > 0.0) col.noalias() += model_.l2_coefficient * anchors_.col(j);
    out.col(j) = col;
  }
  return out;
}

void SagaStepper::step() {
  if (finished()) throw ContractViolation("saga: stepping past the last iteration");
  average_.add(w_);
  if (cfg_.record_risks) trajectory_.inner_risks.back().push_back(empirical_risk(model_, w_, data_));

  const std::size_t i = stream_.next_below(data_.size());
  const auto col = static_cast<Eigen::Index>(i);
  const Sample& z = data_[i];
  const double fresh = loss_slope(model_, z.features.dot(w_), z.label);
  const double stale = slopes_[col];

  // fresh gradient minus stored gradient, shared by the step and the mean update
  direction_.setZero();
  z.features.add_to(direction_, fresh - stale);
  if (model_.l2_coefficient > 0.0) {
    direction_.noalias() += model_.l2_coefficient * (w_ - anchors_.col(col));
    anchors_.col(col) = w_;
  }
  slopes_[col] = fresh;
  const Weights delta = direction_;
  direction_ += table_mean_;
  table_mean_.noalias() += delta / static_cast<double>(data_.size());

  w_.noalias() -= cfg_.step_size * direction_;
  ++gradient_evals_;
  ++steps_;
  if (!w_.allFinite()) throw DivergenceError(steps_, 0);
  if (cfg_.record_iterates) {
    trajectory_.outer_iterates.push_back(w_);
    trajectory_.gradient_evals.push_back(gradient_evals_);
  }
}

Trajectory SagaStepper::take_trajectory() {
  if (!cfg_.record_iterates && steps_ > 0) {
    trajectory_.outer_iterates.push_back(w_);
    trajectory_.gradient_evals.push_back(gradient_evals_);
  }
  finish(trajectory_, average_);
  return std::move(trajectory_);
}

SgdStepper::SgdStepper(const LossModel& model, const Dataset& data, const SgdConfig& cfg,
                       IndexStream stream, Weights w1)
    : model_(model), data_(data), cfg_(cfg), stream_(stream), w_(std::move(w1)) {
  require_problem(data, w_, cfg.step_size, "sgd");
  gradient_ = Weights::Zero(w_.size());
  trajectory_.outer_iterates.push_back(w_);
  trajectory_.gradient_evals.push_back(0);
  if (cfg.record_risks) trajectory_.inner_risks.emplace_back();
}

void SgdStepper::step() {
  if (finished()) throw ContractViolation("sgd: stepping past the last iteration");
  average_.add(w_);
  if (cfg_.record_risks) trajectory_.inner_risks.back().push_back(empirical_risk(model_, w_, data_));
  const Sample& z = data_[stream_.next_below(data_.size())];
  gradient_.setZero();
  add_loss_gradient(model_, w_, z, 1.0, gradient_);
  w_.noalias() -= cfg_.step_size * gradient_;
  ++steps_;
  if (!w_.allFinite()) throw DivergenceError(steps_, 0);
  if (cfg_.record_iterates) {
    trajectory_.outer_iterates.push_back(w_);
    trajectory_.gradient_evals.push_back(steps_);
  }
}

Trajectory SgdStepper::take_trajectory() {
  if (!cfg_.record_iterates && steps_ > 0) {
    trajectory_.outer_iterates.push_back(w_);
    trajectory_.gradient_evals.push_back(steps_);
  }
  finish(trajectory_, average_);
  return std::move(trajectory_);
}

Trajectory SvrgStepper::take_trajectory() {
  finish(trajectory_, average_);
  return std::move(trajectory_);
}

Trajectory svrg_run(const LossModel& model, const Dataset& data, const SvrgConfig& cfg,
                    IndexStream stream, const Weights& w1, SvrgStepper::InnerObserver observer) {
  SvrgStepper stepper(model, data, cfg, stream, w1);
  if (observer) stepper.set_observer(std::move(observer));
  while (!stepper.finished()) stepper.step();
  return stepper.take_trajectory();
}

Trajectory saga_run(const LossModel& model, const Dataset& data, const SagaConfig& cfg,
                    IndexStream stream, const Weights& w1) {
  SagaStepper stepper(model, data, cfg, stream, w1);
  while (!stepper.finished()) stepper.step();
  return stepper.take_trajectory();
}

Trajectory sgd_run(const LossModel& model, const Dataset& data, const SgdConfig& cfg,
                   IndexStream stream, const Weights& w1) {
  SgdStepper stepper(model, data, cfg, stream, w1);
  while (!stepper.finished()) stepper.step();
  return stepper.take_trajectory();
}

Weights average_iterate(const Trajectory& traj) {
  if (traj.averaged_count == 0) {
    if (traj.outer_iterates.empty()) throw ContractViolation("average_iterate: empty trajectory");
    return traj.outer_iterates.front();
  }
  return traj.running_average;
}

}  // namespace vrstab
