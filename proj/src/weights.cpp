#include "latqmc/weights.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "latqmc/zeta.hpp"
#include "nlohmann/json.hpp"

namespace latqmc::weights {

namespace {
constexpr double kLn2 = 0.6931471805599453;
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kLambdaEdgeTol = 1e-12;

void check_lambda(double lambda) {
  if (!(lambda > 0.5 + kLambdaEdgeTol) || !(lambda <= 1.0)) {
    throw std::invalid_argument("lambda must lie in (1/2, 1]");
  }
}

// Geometric tail estimate for a decreasing positive series given its last
// two terms; returns 0 when no decrease is observed.
double geometric_tail(double second_last, double last, bool* extrapolated) {
  *extrapolated = false;
  if (!(last > 0.0) || !(second_last > 0.0) || !(last < second_last)) return 0.0;
  const double r = last / second_last;
  *extrapolated = true;
  return last * r / (1.0 - r);
}
}  // namespace

void SmoothnessParams::validate() const {
  if (!(q > 0.0) || !(q <= 1.0)) throw std::invalid_argument("q must lie in (0,1]");
  if (!(delta > 0.0) || !(delta <= 0.5)) throw std::invalid_argument("delta must lie in (0,1/2]");
  if (rho.empty()) throw std::invalid_argument("rho sequence must be nonempty");
  for (double r : rho) {
    if (!(r > 0.0)) throw std::invalid_argument("rho entries must be positive");
  }
}

double SmoothnessParams::rho_inv_q_sum() const {
  double s = 0.0;
  for (double r : rho) s += std::pow(r, -q);
  return s;
}

double choose_lambda(double q, double delta) {
  if (!(q > 0.0) || !(q <= 1.0)) throw std::invalid_argument("choose_lambda: q must lie in (0,1]");
  if (!(delta > 0.0) || !(delta <= 0.5)) {
    throw std::invalid_argument("choose_lambda: delta must lie in (0,1/2]");
  }
  return q <= 2.0 / 3.0 ? 1.0 / (2.0 - 2.0 * delta) : q / (2.0 - q);
}

double log_varsigma(double lambda, double alpha_j) {
  check_lambda(lambda);
  if (!(alpha_j > 0.0)) throw std::invalid_argument("varsigma: alpha must be positive");
  const double lam_star = (2.0 * lambda - 1.0) / (4.0 * lambda);
  const double log_inner = 0.5 * std::log(2.0 * kPi) + alpha_j * alpha_j / lam_star -
                           (2.0 - 2.0 * lam_star) * std::log(kPi) -
                           std::log((1.0 - lam_star) * lam_star);
  return kLn2 + lambda * log_inner + std::log(riemann_zeta(lambda + 0.5));
}

double varsigma(double lambda, double alpha_j) {
  return std::exp(log_varsigma(lambda, alpha_j));
}

double default_alpha(double rho_j) {
  if (!(rho_j > 0.0)) throw std::invalid_argument("default_alpha: rho must be positive");
  return 1.0 + kLn2 / rho_j;
}

double log_product_gamma(double lambda, double rho_j, double alpha_j, double log_varsigma_j) {
  check_lambda(lambda);
  if (!(rho_j > 0.0)) throw std::invalid_argument("product_gamma: rho must be positive");
  const double excess = alpha_j - kLn2 / rho_j;
  if (!(excess > 0.0)) {
    throw std::invalid_argument("product_gamma: alpha_j must exceed ln2/rho_j");
  }
  return -(2.0 * std::log(rho_j) + log_varsigma_j + std::log(excess)) / (1.0 + lambda);
}

double product_gamma(double lambda, double rho_j, double alpha_j, double varsigma_j) {
  const double lg = log_product_gamma(lambda, rho_j, alpha_j, std::log(varsigma_j));
  return std::max(std::exp(lg), DBL_MIN);
}

double rho_only_gamma(double lambda, double rho_j) {
  check_lambda(lambda);
  if (!(rho_j > 0.0)) throw std::invalid_argument("rho_only_gamma: rho must be positive");
  return std::max(std::pow(rho_j, -2.0 / (1.0 + lambda)), DBL_MIN);
}

double c_zero(double kappa) {
  if (!(kappa >= 0.0)) throw std::invalid_argument("c_zero: kappa must be nonnegative");
  if (!(kappa < kLn2)) throw std::domain_error("c_zero: kappa must be below ln 2");
  const double ratio = kappa / kLn2;
  const double pad = std::min(1e-6, (1.0 - ratio) / 2.0);
  return 1.0 / (1.0 - (ratio + pad));
}

TailedConstant constant_c_rho_q(double lambda, std::span<const double> rho,
                                std::span<const double> log_varsigma) {
  check_lambda(lambda);
  if (rho.size() != log_varsigma.size() || rho.empty()) {
    throw std::invalid_argument("constant_c_rho_q: rho/varsigma length mismatch");
  }
  std::vector<double> log_beta(rho.size());
  double log_prod = 0.0;  // sum of ln(1 + beta_j)
  for (std::size_t j = 0; j < rho.size(); ++j) {
    if (!(rho[j] > 0.0)) throw std::invalid_argument("constant_c_rho_q: rho must be positive");
    log_beta[j] = (log_varsigma[j] - 2.0 * lambda * std::log(rho[j])) / (1.0 + lambda);
    log_prod += log_beta[j] > 35.0 ? log_beta[j] : std::log1p(std::exp(log_beta[j]));
  }
  TailedConstant out;
  if (rho.size() >= 2) {
    const double b_last = std::exp(log_beta[rho.size() - 1]);
    const double b_prev = std::exp(log_beta[rho.size() - 2]);
    out.tail_log = geometric_tail(b_prev, b_last, &out.tail_extrapolated);
    log_prod += out.tail_log;
  }
  // value = (P - 1)^{1/(2 lambda)} * P^{1/2} with ln P = log_prod
  const double pm1 = std::expm1(log_prod);
  if (pm1 <= 0.0) {
    out.value = 0.0;
    out.log_value = -std::numeric_limits<double>::infinity();
    return out;
  }
  out.log_value = std::log(pm1) / (2.0 * lambda) + 0.5 * log_prod;
  out.value = std::exp(out.log_value);
  return out;
}

TailedConstant constant_c_star(double f_dual_norm, double g_dual_norm, double c0,
                               double a0_inf, std::span<const double> rho) {
  if (!(a0_inf > 0.0)) throw std::invalid_argument("constant_c_star: inf a0 must be positive");
  if (!(c0 > 0.0) || !(f_dual_norm > 0.0) || !(g_dual_norm > 0.0)) {
    throw std::invalid_argument("constant_c_star: norms and C0 must be positive");
  }
  if (rho.empty()) throw std::invalid_argument("constant_c_star: rho must be nonempty");
  double sum_sq = 0.0;
  double sum_lin = 0.0;
  for (double r : rho) {
    if (!(r > 0.0)) throw std::invalid_argument("constant_c_star: rho must be positive");
    sum_sq += (kLn2 * kLn2) / (r * r);
    sum_lin += kLn2 / r;
  }
  TailedConstant out;
  if (rho.size() >= 2) {
    const double rl = rho[rho.size() - 1];
    const double rp = rho[rho.size() - 2];
    bool e1 = false, e2 = false;
    const double tail_sq = geometric_tail(kLn2 * kLn2 / (rp * rp), kLn2 * kLn2 / (rl * rl), &e1);
    const double tail_lin = geometric_tail(kLn2 / rp, kLn2 / rl, &e2);
    out.tail_log = 0.5 * tail_sq + 2.0 / std::sqrt(2.0 * kPi) * tail_lin;
    out.tail_extrapolated = e1 || e2;
  }
  out.log_value = std::log(f_dual_norm) + std::log(g_dual_norm) + 0.5 * std::log(c0) -
                  std::log(a0_inf) + 0.5 * sum_sq + 2.0 / std::sqrt(2.0 * kPi) * sum_lin +
                  out.tail_log;
  out.value = std::exp(out.log_value);
  return out;
}

GammaPolicy gamma_policy_from_string(const std::string& s) {
  if (s == "paper") return GammaPolicy::kPaper;
  if (s == "rho") return GammaPolicy::kRhoOnly;
  if (s == "unit") return GammaPolicy::kUnit;
  throw std::invalid_argument("unknown gamma policy: " + s);
}

std::string to_string(GammaPolicy p) {
  switch (p) {
    case GammaPolicy::kPaper:
      return "paper";
    case GammaPolicy::kRhoOnly:
      return "rho";
    case GammaPolicy::kUnit:
      return "unit";
  }
  return "unknown";
}

double WeightScheme::gamma_of_subset(std::span<const std::size_t> u) const {
  double g = 1.0;
  for (std::size_t j : u) {
    if (j >= gamma.size()) throw std::out_of_range("gamma_of_subset: index out of range");
    g *= gamma[j];
  }
  return g;
}

WeightScheme build_scheme(const SmoothnessParams& params, double kappa, GammaPolicy policy) {
  params.validate();
  WeightScheme s;
  s.lambda = choose_lambda(params.q, params.delta);
  s.kappa = kappa;
  s.b1_verified = kappa >= 0.0 && kappa < kLn2;
  s.rho = params.rho;
  const std::size_t n = s.rho.size();
  s.alpha.resize(n);
  s.gamma.resize(n);
  s.log_gamma.resize(n);
  s.log_varsigma.resize(n);
  double sup_ratio = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    s.alpha[j] = default_alpha(s.rho[j]);
    sup_ratio = std::max(sup_ratio, kLn2 / s.rho[j]);
    s.log_varsigma[j] = log_varsigma(s.lambda, s.alpha[j]);
    switch (policy) {
      case GammaPolicy::kPaper:
        s.log_gamma[j] = log_product_gamma(s.lambda, s.rho[j], s.alpha[j], s.log_varsigma[j]);
        break;
      case GammaPolicy::kRhoOnly:
        s.log_gamma[j] = -2.0 / (1.0 + s.lambda) * std::log(s.rho[j]);
        break;
      case GammaPolicy::kUnit:
        s.log_gamma[j] = 0.0;
        break;
    }
    s.gamma[j] = std::max(std::exp(s.log_gamma[j]), DBL_MIN);
  }
  s.alpha_min = 1.0;
  s.alpha_max = 1.0 + sup_ratio;
  return s;
}

nlohmann::json export_constants(const WeightScheme& scheme, const SmoothnessParams& params,
                                double f_dual_norm, double g_dual_norm, double a0_inf) {
  const double c0 = c_zero(scheme.kappa);
  const TailedConstant cs =
      constant_c_star(f_dual_norm, g_dual_norm, c0, a0_inf, scheme.rho);
  const TailedConstant crq =
      constant_c_rho_q(scheme.lambda, scheme.rho, scheme.log_varsigma);
  constexpr double kLog10E = 0.4342944819032518;
  nlohmann::ordered_json j;
  j["lambda"] = scheme.lambda;
  j["q"] = params.q;
  j["delta"] = params.delta;
  j["kappa"] = scheme.kappa;
  j["C0"] = c0;
  j["C_star"] = std::isfinite(cs.value) ? nlohmann::ordered_json(cs.value)
                                        : nlohmann::ordered_json(nullptr);
  j["log10_C_star"] = cs.log_value * kLog10E;
  j["C_rho_q"] = std::isfinite(crq.value) ? nlohmann::ordered_json(crq.value)
                                          : nlohmann::ordered_json(nullptr);
  j["log10_C_rho_q"] = crq.log_value * kLog10E;
  j["rho_inv_q_sum"] = params.rho_inv_q_sum();
  j["gamma"] = scheme.gamma;
  j["alpha"] = scheme.alpha;
  j["rho"] = scheme.rho;
  return j;
}

}  // namespace latqmc::weights
