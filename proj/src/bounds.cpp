#include "vrstab/bounds.hpp"

#include <cmath>
#include <numbers>

namespace vrstab {

namespace {

std::string fmt(double x) { return std::to_string(x); }

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) throw ContractViolation(std::string(what) + " must be positive");
}

void validate(const BoundInputs& in) {
  require_positive(in.alpha, "alpha");
  require_positive(in.eta, "eta");
  if (!(in.mu >= 0.0)) throw ContractViolation("mu must be nonnegative");
  if (in.m == 0 || in.n == 0 || in.t == 0) throw ContractViolation("m, n and t must be positive");
  if (in.inner_risk_sums.size() != in.t) {
    throw ContractViolation("risk list has " + std::to_string(in.inner_risk_sums.size()) +
                            " entries, expected t = " + std::to_string(in.t));
  }
  for (double r : in.inner_risk_sums) {
    if (!(r >= 0.0)) throw ContractViolation("risk entries must be nonnegative");
  }
  if (!(in.initial_risk >= 0.0)) throw ContractViolation("initial risk must be nonnegative");
}

void require_step_le_half_inverse(const BoundInputs& in) {
  if (in.eta > 1.0 / (2.0 * in.alpha)) {
    throw DomainError("step size " + fmt(in.eta) + " exceeds 1/(2 alpha) = " + fmt(1.0 / (2.0 * in.alpha)));
  }
}

double risk_total(const BoundInputs& in) {
  double s = 0.0;
  for (double r : in.inner_risk_sums) s += r;
  return s;
}

double eta_sq(const BoundInputs& in) { return in.eta * in.eta; }

}  // namespace

BoundReport evaluate_bound(const std::string& name, const std::function<double()>& fn) {
  BoundReport report{name, 0.0, false, {}};
  try {
    report.value = fn();
    report.applicable = true;
  } catch (const DomainError& e) {
    report.value = std::nan("");
    report.reason = e.what();
  }
  return report;
}

double m_factor(double eta, double alpha) {
  require_positive(alpha, "alpha");
  if (!(eta > 0.0) || !(eta < 1.0 / (2.0 * alpha))) {
    throw DomainError("M(eta) needs 0 < eta < 1/(2 alpha), got eta = " + fmt(eta));
  }
  if (eta <= 1.0 / (4.0 * alpha)) return 1.0;
  return 2.0 * (1.0 - 2.0 * alpha * eta);
}

double svrg_stability_convex(const BoundInputs& in) {
  validate(in);
  require_step_le_half_inverse(in);
  const double e = std::numbers::e;
  const double n = static_cast<double>(in.n);
  const double m = static_cast<double>(in.m);
  const double t = static_cast<double>(in.t);
  const double first = 16.0 * e * in.alpha * m / n * in.initial_risk;
  const double second = 8.0 * e * in.alpha * (4.0 + m * t / n) / n * risk_total(in);
  return (first + second) * eta_sq(in);
}

double saga_stability_convex(const BoundInputs& in) {
  validate(in);
  require_step_le_half_inverse(in);
  const double e = std::numbers::e;
  const double n = static_cast<double>(in.n);
  const double t = static_cast<double>(in.t);
  const double first = 8.0 * e * in.alpha * (4.0 + t / n) / n * risk_total(in);
  const double second = 16.0 * e * in.alpha * in.initial_risk;
  return (first + second) * eta_sq(in);
}

double svrg_opt_convex(const BoundInputs& in, double init_dist_sq, double init_subopt) {
  validate(in);
  if (!(init_dist_sq >= 0.0) || !(init_subopt >= 0.0)) {
    throw ContractViolation("initial distance and suboptimality must be nonnegative");
  }
  const double big_m = m_factor(in.eta, in.alpha);
  const double m = static_cast<double>(in.m);
  const double t = static_cast<double>(in.t);
  return (init_dist_sq + 4.0 * in.alpha * m * eta_sq(in) * init_subopt) /
         (2.0 * big_m * m * in.eta * t);
}

double saga_opt_convex(const BoundInputs& in, double init_dist_sq, double init_subopt) {
  validate(in);
  if (!(init_dist_sq >= 0.0) || !(init_subopt >= 0.0)) {
    throw ContractViolation("initial distance and suboptimality must be nonnegative");
  }
  const double big_m = m_factor(in.eta, in.alpha);
  const double n = static_cast<double>(in.n);
  const double t = static_cast<double>(in.t);
  return (init_dist_sq + 4.0 * n * in.alpha * eta_sq(in) * init_subopt) / (2.0 * big_m * in.eta * t);
}

double svrg_stability_sc(const BoundInputs& in) {
  validate(in);
  const double n = static_cast<double>(in.n);
  const double m = static_cast<double>(in.m);
  const double t = static_cast<double>(in.t);
  const double c = m * in.eta * in.mu;
  if (!(c > 2.0)) throw DomainError("c = m eta mu = " + fmt(c) + " must exceed 2");
  const double limit = (n - 2.0) / (2.0 * in.alpha * (1.0 + c) * (n - 1.0));
  if (in.n < 3 || in.eta > limit) {
    throw DomainError("step size " + fmt(in.eta) + " exceeds (n-2)/(2 alpha (1+c)(n-1)) = " + fmt(limit));
  }
  const double ratio = 1.0 / (c - 1.0);
  double weighted = 0.0;
  for (std::size_t l = 1; l <= in.t; ++l) {
    weighted += std::pow(ratio, static_cast<double>(in.t - l)) * in.inner_risk_sums[l - 1];
  }
  const double first = 16.0 * in.alpha * m / n * std::pow(ratio, t) * in.initial_risk;
  const double second = 8.0 * in.alpha * m * (4.0 + m * t / n) / n * weighted;
  return (first + second) * eta_sq(in);
}

double saga_stability_sc_formula(const BoundInputs& in) {
  validate(in);
  const double n = static_cast<double>(in.n);
  const double t = static_cast<double>(in.t);
  const double base = 1.0 + 1.0 / t - in.eta * in.mu;
  double weighted = 0.0;
  for (std::size_t k = 1; k <= in.t; ++k) {
    weighted += std::pow(base, static_cast<double>(in.t - k)) * in.inner_risk_sums[k - 1];
  }
  const double first = 8.0 * in.alpha * (6.0 + t / n) / n * weighted;
  const double second = 32.0 * in.alpha * std::pow(base, t) * in.initial_risk;
  return (first + second) * eta_sq(in);
}

double saga_stability_sc(const BoundInputs& in) {
  validate(in);
  require_positive(in.mu, "mu");
  const double n = static_cast<double>(in.n);
  const double by_mu = 1.0 / (2.0 * in.mu * n);
  const double by_alpha = (n - 2.0) / (6.0 * in.alpha * (n - 1.0));
  if (in.n < 3 || in.eta > by_mu || in.eta > by_alpha) {
    throw DomainError("step size " + fmt(in.eta) + " exceeds min{1/(2 mu n), (n-2)/(6 alpha (n-1))} = " +
                      fmt(std::min(by_mu, by_alpha)));
  }
  return saga_stability_sc_formula(in);
}

double svrg_rho_sc(double eta, double alpha, double c) {
  require_positive(alpha, "alpha");
  require_positive(c, "c");
  if (!(eta > 0.0) || !(eta < 1.0 / (2.0 * alpha))) {
    throw DomainError("rho needs 0 < eta < 1/(2 alpha), got eta = " + fmt(eta));
  }
  const double shrink = 1.0 - 2.0 * alpha * eta;
  return 1.0 / (c * shrink) + 2.0 * alpha * eta / shrink;
}

double generalization_gap_bound(double alpha, double gamma, double mean_train_risk,
                                double mean_sq_stability) {
  require_positive(gamma, "gamma");
  if (!(alpha >= 0.0) || !(mean_train_risk >= 0.0) || !(mean_sq_stability >= 0.0)) {
    throw ContractViolation("generalization_gap_bound: inputs must be nonnegative");
  }
  return alpha / gamma * mean_train_risk + (alpha + gamma) / 2.0 * mean_sq_stability;
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kSvrg: return "svrg";
    case Method::kSaga: return "saga";
    case Method::kSgd: return "sgd";
  }
  return "?";
}

std::string_view to_string(Regime regime) {
  return regime == Regime::kConvex ? "convex" : "strongly_convex";
}

Method parse_method(std::string_view name) {
  if (name == "svrg") return Method::kSvrg;
  if (name == "saga") return Method::kSaga;
  if (name == "sgd") return Method::kSgd;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

Regime parse_regime(std::string_view name) {
  if (name == "convex") return Regime::kConvex;
  if (name == "strongly_convex") return Regime::kStronglyConvex;
  throw std::invalid_argument("unknown regime '" + std::string(name) + "'");
}

bool RegimeParams::all_conditions_hold() const {
  for (const auto& c : side_conditions) {
    if (!c.holds) return false;
  }
  return true;
}

namespace {

// ⌈x⌉, except that values within rounding noise of an integer map to it.
std::size_t ceil_guarded(double x) {
  const double r = std::nearbyint(x);
  if (std::fabs(x - r) <= 1e-9 * std::max(1.0, std::fabs(x))) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::ceil(x));
}

}  // namespace

RegimeParams select_params(Method method, Regime regime, std::size_t n, double initial_risk,
                           double alpha, double mu) {
  if (method == Method::kSgd) throw RegimeError("select_params: no parameter regime for sgd");
  if (n < 2) throw RegimeError("select_params: need n >= 2");
  require_positive(alpha, "alpha");
  const double nd = static_cast<double>(n);
  RegimeParams p;
  p.method = method;
  p.regime = regime;

  if (regime == Regime::kConvex) {
    if (!(initial_risk > 0.0)) throw RegimeError("convex regime needs L(w1) > 0");
    p.eta = 1.0 / std::sqrt(nd * initial_risk);
    p.gamma = std::sqrt(nd * initial_risk);
    if (method == Method::kSvrg) {
      p.m = n;
      p.t = 1;
    } else {
      p.t = n;
    }
    p.side_conditions.push_back({"eta < 1/(2 alpha)", p.eta < 1.0 / (2.0 * alpha)});
    return p;
  }

  if (!(mu > 0.0) || !(mu * nd > 1.0)) {
    throw RegimeError("strongly convex regime needs mu > 1/n, got mu*n = " + fmt(mu * nd));
  }
  p.side_conditions.push_back({"mu > 1/n", true});
  if (method == Method::kSvrg) {
    p.eta = 1.0 / (mu * nd + 18.0 * alpha);
    p.m = ceil_guarded(3.0 / (p.eta * mu));
    const double lg = std::log2(mu * nd);
    p.t = std::max<std::size_t>(1, ceil_guarded(lg));
    p.gamma = mu * nd / std::sqrt(lg);
    p.c = static_cast<double>(p.m) * p.eta * mu;
    p.rho = svrg_rho_sc(p.eta, alpha, p.c);
    p.side_conditions.push_back({"c >= 3", p.c >= 3.0});
    p.side_conditions.push_back({"alpha eta <= 1/18", alpha * p.eta <= 1.0 / 18.0});
    p.side_conditions.push_back({"rho < 1", p.rho < 1.0});
    p.side_conditions.push_back(
        {"eta <= (n-2)/(2 alpha (1+c)(n-1))",
         n >= 3 && p.eta <= (nd - 2.0) / (2.0 * alpha * (1.0 + p.c) * (nd - 1.0))});
  } else {
    p.eta = 1.0 / (2.0 * mu * nd + 12.0 * alpha);
    const double ln = std::log(nd);
    p.t = ceil_guarded(nd * ln);
    p.gamma = mu * nd / std::pow(ln, 2.0 / 3.0);
    p.side_conditions.push_back({"mu n >= (ln n)^(2/3)", mu * nd >= std::pow(ln, 2.0 / 3.0)});
    p.side_conditions.push_back({"eta <= 1/(2 mu n)", p.eta <= 1.0 / (2.0 * mu * nd)});
    p.side_conditions.push_back(
        {"eta <= (n-2)/(6 alpha (n-1))", n >= 3 && p.eta <= (nd - 2.0) / (6.0 * alpha * (nd - 1.0))});
  }
  return p;
}

double lyapunov_svrg_U(const Weights& x, const Weights& x_tilde, const Eigen::MatrixXd& ref_grads,
                       const Eigen::MatrixXd& ref_grads_tilde, std::size_t m, double eta,
                       std::size_t n) {
  if (n == 0) throw ContractViolation("lyapunov_svrg_U: n must be positive");
  const double gap = (ref_grads - ref_grads_tilde).squaredNorm();
  return (x - x_tilde).squaredNorm() +
         2.0 * static_cast<double>(m) * eta * eta / static_cast<double>(n) * gap;
}

double lyapunov_saga_Phi(const Weights& w, const Weights& w_prime, const Eigen::MatrixXd& table,
                         const Eigen::MatrixXd& table_prime, double eta) {
  return (w - w_prime).squaredNorm() + 2.0 * eta * eta * (table - table_prime).squaredNorm();
}

double epr_order_convex(double initial_risk, std::size_t n) {
  return std::sqrt(initial_risk / static_cast<double>(n));
}

double epr_order_svrg_sc(double mu, std::size_t n) {
  const double mn = mu * static_cast<double>(n);
  return std::sqrt(std::log2(mn)) / mn;
}

double epr_order_saga_sc(double mu, std::size_t n) {
  const double nd = static_cast<double>(n);
  return std::pow(std::log(nd), 2.0 / 3.0) / (mu * nd);
}

}  // namespace vrstab
