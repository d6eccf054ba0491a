#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nlohmann/json_fwd.hpp"

namespace latqmc::weights {

// Summability data behind the weight machinery: exponent q in (0,1],
// rate-loss delta in (0,1/2] (consumed only on the q <= 2/3 branch), and
// the finite positive sequence rho_1..rho_smax.
struct SmoothnessParams {
  double q = 0.5;
  double delta = 0.25;
  std::vector<double> rho;

  void validate() const;  // throws std::invalid_argument on violation
  double rho_inv_q_sum() const;
};

// lambda = 1/(2-2 delta) for q <= 2/3, q/(2-q) otherwise; lies in (1/2, 1].
double choose_lambda(double q, double delta);

// varsigma_j(lambda) = 2 ( sqrt(2 pi) e^{alpha^2/Lam} / (pi^{2-2 Lam} (1-Lam) Lam) )^lambda
//                      * zeta(lambda + 1/2),   Lam = (2 lambda - 1)/(4 lambda).
// Overflows to +inf for large alpha; log_varsigma stays finite.
double varsigma(double lambda, double alpha_j);
double log_varsigma(double lambda, double alpha_j);

// alpha_j = 1 + ln2 / rho_j
double default_alpha(double rho_j);

// gamma_j = [ 1 / (rho_j^2 varsigma_j (alpha_j - ln2/rho_j)) ]^{1/(1+lambda)}.
// Requires alpha_j > ln2/rho_j. Results that underflow double are clamped
// to the smallest positive normal so that gamma stays strictly positive.
double product_gamma(double lambda, double rho_j, double alpha_j, double varsigma_j);
double log_product_gamma(double lambda, double rho_j, double alpha_j, double log_varsigma_j);

// Constant-robust product-weight variant gamma_j = rho_j^{-2/(1+lambda)}:
// the closed-form weight with the per-dimension worst-case-kernel factor
// dropped. Same summability class, so the dimension-independent error
// constant stays finite; unlike the closed form it keeps the coarse
// (small-rho) dimensions dominant when alpha_j = 1 + ln2/rho_j blows up.
double rho_only_gamma(double lambda, double rho_j);

// C0 = 1/(1 - delta) with delta = kappa/ln2 + pad, pad = min(1e-6, (1-kappa/ln2)/2).
// Throws std::domain_error when kappa >= ln2.
double c_zero(double kappa);

// A truncated product/sum constant together with its natural log and the
// log of the multiplicative tail estimate folded into `value`. The tail is
// extrapolated geometrically from the last two terms when they decrease;
// otherwise it is reported as zero and `tail_extrapolated` is false.
struct TailedConstant {
  double value = 0.0;        // includes the tail factor; +inf if out of range
  double log_value = 0.0;    // natural log, always finite unless value == 0
  double tail_log = 0.0;     // ln of the tail inflation factor
  bool tail_extrapolated = false;
};

// C_{rho,q} = (prod(1+beta_j) - 1)^{1/(2 lambda)} * (prod(1+beta_j))^{1/2},
// beta_j = (varsigma_j / rho_j^{2 lambda})^{1/(1+lambda)}.
TailedConstant constant_c_rho_q(double lambda, std::span<const double> rho,
                                std::span<const double> log_varsigma);

// C* = (f_dual * g_dual * sqrt(C0) / a0_inf)
//      * exp( (1/2) sum (ln2)^2/rho_j^2 + (2/sqrt(2 pi)) sum ln2/rho_j ).
TailedConstant constant_c_star(double f_dual_norm, double g_dual_norm, double c0,
                               double a0_inf, std::span<const double> rho);

enum class GammaPolicy { kPaper, kRhoOnly, kUnit };

GammaPolicy gamma_policy_from_string(const std::string& s);
std::string to_string(GammaPolicy p);

// Per-dimension weight data assembled from a smoothness specification.
struct WeightScheme {
  double lambda = 1.0;
  double kappa = 0.0;
  double alpha_min = 1.0;
  double alpha_max = 1.0;
  bool b1_verified = false;  // kappa < ln2
  std::vector<double> rho;
  std::vector<double> alpha;
  std::vector<double> gamma;      // per policy, strictly positive
  std::vector<double> log_gamma;  // exact logs (policy kPaper may clamp gamma)
  std::vector<double> log_varsigma;

  // gamma_u = prod_{j in u} gamma_j; empty set gives 1
  double gamma_of_subset(std::span<const std::size_t> u) const;
};

WeightScheme build_scheme(const SmoothnessParams& params, double kappa,
                          GammaPolicy policy = GammaPolicy::kPaper);

// Constants JSON: {lambda, q, delta, kappa, C0, C_star, C_rho_q,
// gamma: [...], alpha: [...], rho: [...]} plus log10 companions for the
// constants that can leave double range.
nlohmann::json export_constants(const WeightScheme& scheme, const SmoothnessParams& params,
                                double f_dual_norm, double g_dual_norm, double a0_inf);

}  // namespace latqmc::weights
