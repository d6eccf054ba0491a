#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nlohmann/json_fwd.hpp"

namespace latqmc::lattice {

// Rank-1 lattice rule: n points generated by z, entries coprime to n.
struct LatticeRule {
  std::uint32_t n = 0;
  std::vector<std::uint32_t> z;

  std::size_t dim() const { return z.size(); }
  void validate() const;  // throws std::invalid_argument

  nlohmann::json to_json() const;
  static LatticeRule from_json(const nlohmann::json& j);
};

struct CbcOptions {
  bool force_slow = false;  // run the O(s n^2) reference path
  int threads = 0;          // 0: current OpenMP default (slow path scan only)
};

// Component-by-component construction minimizing the shift-averaged
// squared worst-case error surrogate
//   e^2(z_1..z_d) = -1 + (1/n) sum_k prod_j (1 + gamma_j B2(frac(k z_j / n))),
// B2(x) = x^2 - x + 1/6. Prime n uses the generator-permutation circulant
// structure and an FFT (O(s n log n)); composite n routes to the slow path.
// Both paths resolve the per-component argmin identically: candidates whose
// raw node sums lie within 1e-9 * max(|min|, n) of the minimum count as
// tied, and the smallest z among them wins.
LatticeRule cbc_construct(std::uint32_t n, std::size_t s, std::span<const double> gamma,
                          const CbcOptions& options = {});

// e^2(z) for a finished rule; mathematically nonnegative, clipped at zero.
double worst_case_error(const LatticeRule& rule, std::span<const double> gamma);

// Point i (1 <= i <= n) of the shifted rule: frac(i z / n + shift).
// i z mod n is carried in integer arithmetic before the division.
void lattice_point(const LatticeRule& rule, std::span<const double> shift, std::uint64_t i,
                   std::span<double> out);

// Same point mapped through the inverse normal CDF coordinate-wise.
void gaussian_node(const LatticeRule& rule, std::span<const double> shift, std::uint64_t i,
                   std::span<double> out);

bool is_prime(std::uint32_t n);

}  // namespace latqmc::lattice
