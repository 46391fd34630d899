#pragma once

#include "vrstab/sample.hpp"

#include <Eigen/Core>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vrstab {

/// A step-size or regime precondition of the bound does not hold; the bound
/// says nothing for these inputs.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// select_params cannot satisfy the regime's side conditions.
class RegimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Measured quantities consumed by the bound evaluators. Expectations are
/// replicate means computed by the harness.
///
/// `inner_risk_sums[l]` is Σ_k L_S(x_k^{l+1}) for the SVRG convex bound,
/// L_S(w_{l+2}) for the SVRG strongly convex bound and L_S(w_{l+1}) for
/// SAGA. Its length must equal `t`.
struct BoundInputs {
  double alpha = 0.0;
  double mu = 0.0;
  double eta = 0.0;
  std::size_t m = 1;
  std::size_t n = 1;
  std::size_t t = 1;
  std::vector<double> inner_risk_sums;
  double initial_risk = 0.0;
  double gamma = 1.0;
};

/// Outcome of evaluating one bound on measured inputs.
struct BoundReport {
  std::string name;
  double value = 0.0;
  bool applicable = false;
  std::string reason;  // domain error message when not applicable
};

/// Runs `fn` and turns a DomainError into an inapplicable report.
BoundReport evaluate_bound(const std::string& name, const std::function<double()>& fn);

/// 1 for η ≤ 1/(4α), 2(1−2αη) for 1/(4α) < η < 1/(2α).
double m_factor(double eta, double alpha);

/// SVRG, convex: bound on E‖x_m^{t+1} − x̃_m^{t+1}‖². Needs η ≤ 1/(2α).
double svrg_stability_convex(const BoundInputs& in);
/// SAGA, convex: bound on E‖w_{t+1} − w_{t+1}'‖². Needs η ≤ 1/(2α).
double saga_stability_convex(const BoundInputs& in);

/// SVRG, convex: bound on E[L_S(w̄_t)] − L_S(w_S). Needs 0 < η < 1/(2α).
double svrg_opt_convex(const BoundInputs& in, double init_dist_sq, double init_subopt);
/// SAGA, convex: bound on E[L_S(w̄_t)] − L_S(w_S). Needs 0 < η < 1/(2α).
double saga_opt_convex(const BoundInputs& in, double init_dist_sq, double init_subopt);

/// SVRG option II, μ-strongly convex: bound on E‖w_{t+1} − w_{t+1}'‖² with
/// c = mημ. Needs c > 2 and η ≤ (n−2)/(2α(1+c)(n−1)).
double svrg_stability_sc(const BoundInputs& in);

/// SAGA, μ-strongly convex. Needs η ≤ min{1/(2μn), (n−2)/(6α(n−1))}.
double saga_stability_sc(const BoundInputs& in);
/// The same expression without the step-size check.
double saga_stability_sc_formula(const BoundInputs& in);

/// Linear rate of SVRG option II on strongly convex L_S:
/// 1/(c(1−2αη)) + 2αη/(1−2αη). Needs η < 1/(2α).
double svrg_rho_sc(double eta, double alpha, double c);

/// (α/γ)·risk + ((α+γ)/2)·mean_sq_stability.
double generalization_gap_bound(double alpha, double gamma, double mean_train_risk,
                                double mean_sq_stability);

enum class Method { kSvrg, kSaga, kSgd };
enum class Regime { kConvex, kStronglyConvex };

std::string_view to_string(Method method);
std::string_view to_string(Regime regime);
/// "svrg", "saga" or "sgd".
Method parse_method(std::string_view name);
/// "convex" or "strongly_convex".
Regime parse_regime(std::string_view name);

struct SideCondition {
  std::string name;
  bool holds = false;
};

/// Regime parameters with every "≍" taken as equality.
struct RegimeParams {
  Method method = Method::kSvrg;
  Regime regime = Regime::kConvex;
  double eta = 0.0;
  std::size_t m = 0;  // SVRG only
  std::size_t t = 0;  // outer loops (SVRG) or steps (SAGA)
  double gamma = 0.0;
  double c = 0.0;     // mημ, SVRG strongly convex only
  double rho = 0.0;   // SVRG strongly convex only
  std::vector<SideCondition> side_conditions;

  bool all_conditions_hold() const;
};

/// `mu` is ignored in the convex regime. Throws RegimeError when the regime
/// cannot be instantiated (μn ≤ 1 when strongly convex, L(w₁) ≤ 0 when convex).
RegimeParams select_params(Method method, Regime regime, std::size_t n, double initial_risk,
                           double alpha, double mu = 0.0);

/// ‖x − x̃‖² + (2mη²/n)·‖G − G̃‖_F², where G holds the component gradients
/// at the reference point column by column.
double lyapunov_svrg_U(const Weights& x, const Weights& x_tilde, const Eigen::MatrixXd& ref_grads,
                       const Eigen::MatrixXd& ref_grads_tilde, std::size_t m, double eta,
                       std::size_t n);

/// ‖w − w'‖² + 2η²·‖T − T'‖_F² for SAGA tables T, T'.
double lyapunov_saga_Phi(const Weights& w, const Weights& w_prime, const Eigen::MatrixXd& table,
                         const Eigen::MatrixXd& table_prime, double eta);

// Order-level excess-risk rates with unit constants. Diagnostic only; the
// hidden constants are unknown, so these never serve as asserted bounds.
double epr_order_convex(double initial_risk, std::size_t n);
double epr_order_svrg_sc(double mu, std::size_t n);
double epr_order_saga_sc(double mu, std::size_t n);

}  // namespace vrstab
