#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace latqmc::wavelet {

enum class Basis { kHaar, kHierarchicalHat };

Basis basis_from_string(const std::string& s);
std::string to_string(Basis b);

// Level-structured stochastic model on [0,1]^d:
//   T(x, y) = sum_{ell <= L} sum_k y_{ell,k} sigma_ell phi_{ell,k}(x),
//   sigma_ell = 2^{-beta1 d ell / 2},  rho_{ell,k} = c_rho 2^{theta ell}.
// Haar supports d in {1,2}; the hierarchical hat family is 1-D.
struct WaveletModel {
  int d = 1;
  double beta0 = 1.0;
  double beta1 = 4.0;
  double theta = 1.0;
  double c_rho = 0.0;   // must respect c_rho_upper_bound
  int ell0 = 0;
  int L = 4;
  Basis basis = Basis::kHaar;
  double sigma_scale = 1.0;  // multiplies every sigma_ell; 0 freezes the field
  double t_star = 0.0;       // Besov characterisation cap; 0 = per-basis default

  int overlap_bound() const;              // M
  double sup_constant() const;            // C_phi
  int level_cardinality_constant() const; // C_nabla (1 for the built-in bases)
  double holder_floor() const;            // 0 for Haar, 1 for hat

  std::uint64_t level_count(int ell) const;  // #nabla_ell = C_nabla 2^{ell d}
  std::uint64_t dim() const;                 // s(L)
  double besov_cap() const;                  // resolved t_star

  void validate() const;  // throws std::invalid_argument / std::domain_error
};

// ln2 / (M C_phi sum_{ell >= ell0} 2^{ell (theta - d (beta1-beta0)/2)}), the
// admissible ceiling for c_rho.
double c_rho_upper_bound(const WaveletModel& m);

struct LevelIndex {
  int ell = 0;
  std::uint64_t k = 0;
  std::uint64_t j = 0;  // 1-based lexicographic position
};

std::vector<LevelIndex> enumerate_indices(const WaveletModel& m);
LevelIndex index_of(const WaveletModel& m, std::uint64_t j);
std::uint64_t linear_index(const WaveletModel& m, int ell, std::uint64_t k);

// phi_{ell,k}(x) (without sigma); k is the flattened translation index,
// row-major over axes for d = 2.
double basis_eval(const WaveletModel& m, int ell, std::uint64_t k, std::span<const double> x);

double sigma_level(const WaveletModel& m, int ell);   // includes sigma_scale
double rho_of_level(const WaveletModel& m, int ell);  // c_rho 2^{theta ell}
std::vector<double> rho_sequence(const WaveletModel& m);  // reordered, length s(L)

struct B1Report {
  double analytic = 0.0;   // closed-form bound including the geometric tail
  double empirical = 0.0;  // grid sup of sum rho sigma |phi|
  bool analytic_ok = false;
  bool empirical_ok = false;
};

// Both values must come out below ln 2 for a verified scheme; reports, never throws.
B1Report check_assumption_b1(const WaveletModel& m, std::size_t grid_resolution);

// Closed form for sum_j rho_j^{-q} (all levels, infinite tail); +inf when
// q theta <= d.
double rho_inv_q_sum_closed_form(const WaveletModel& m, double q);

// 2/q < beta1 - beta0 and theta in (d/q, d (beta1-beta0)/2) and c_rho valid.
bool qmc_ready(const WaveletModel& m, double q);

struct FieldRealization {
  WaveletModel model;
  std::vector<double> y;  // length s(L), lexicographic order

  void validate() const;
};

FieldRealization sample_realization(const WaveletModel& m, std::uint64_t seed,
                                    std::uint64_t sample_index);

// T^L(x,y); support locality makes this O(M (L - ell0 + 1)) per point.
double field_eval(const FieldRealization& r, std::span<const double> x);
// Serial reference summing every index; kept for cross-checking.
double field_eval_full(const FieldRealization& r, std::span<const double> x);

using SpatialFn = std::function<double(std::span<const double>)>;

// a(x,y) = a_*(x) + a_0(x) exp(T^L(x,y))
double coefficient_eval(const FieldRealization& r, const SpatialFn& a_star, const SpatialFn& a0,
                        std::span<const double> x);

// Truncated covariance sum_{ell <= L} sigma_ell^2 sum_k phi(x1) phi(x2).
double covariance(const WaveletModel& m, std::span<const double> x1, std::span<const double> x2);

// ( sum_ell 2^{ell (t + d(1/2 - 1/p)) q} (sum_k |y sigma|^p)^{q/p} )^{1/q}
// with the model's own coefficients; t must satisfy
// d max{1/p - 1, 0} < t < besov_cap().
double besov_norm(const FieldRealization& r, double t, double p, double q_besov);

// d (beta1 - 1) / 2
double besov_threshold(int d, double beta1);

// sup over grid pairs of |T(x1)-T(x2)| / |x1-x2|^t1 (d = 1); diagnostic only.
double holder_quotient(const FieldRealization& r, double t1, std::size_t grid_n);

}  // namespace latqmc::wavelet
