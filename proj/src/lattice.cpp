#include "latqmc/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "latqmc/fft.hpp"
#include "latqmc/normal.hpp"
#include "nlohmann/json.hpp"

#ifdef LATQMC_HAVE_OPENMP
#include <omp.h>
#endif

namespace latqmc::lattice {

namespace {

double bernoulli_b2(double x) { return (x - 1.0) * x + 1.0 / 6.0; }

std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
  std::uint64_t r = 1 % mod;
  base %= mod;
  while (exp) {
    if (exp & 1) r = r * base % mod;
    base = base * base % mod;
    exp >>= 1;
  }
  return r;
}

std::vector<std::uint32_t> prime_factors(std::uint32_t m) {
  std::vector<std::uint32_t> f;
  for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= m; ++d) {
    if (m % d == 0) {
      f.push_back(d);
      while (m % d == 0) m /= d;
    }
  }
  if (m > 1) f.push_back(m);
  return f;
}

std::uint32_t primitive_root(std::uint32_t n) {
  const std::uint32_t m = n - 1;
  const auto factors = prime_factors(m);
  for (std::uint32_t g = 2; g < n; ++g) {
    bool ok = true;
    for (std::uint32_t p : factors) {
      if (mod_pow(g, m / p, n) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  throw std::logic_error("primitive_root: none found (n not prime?)");
}

// Smallest candidate within 1e-9 * max(|min|, n) of the minimal score.
std::size_t select_min_with_ties(const std::vector<double>& scores, double n) {
  double mn = scores[0];
  for (double s : scores) mn = std::min(mn, s);
  const double tol = 1e-9 * std::max(std::abs(mn), n);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] <= mn + tol) return i;
  }
  return 0;  // unreachable
}

void check_inputs(std::uint32_t n, std::size_t s, std::span<const double> gamma) {
  if (n < 2) throw std::invalid_argument("cbc_construct: n must be at least 2");
  if (s < 1) throw std::invalid_argument("cbc_construct: dimension must be positive");
  if (gamma.size() < s) throw std::invalid_argument("cbc_construct: gamma too short");
  for (std::size_t j = 0; j < s; ++j) {
    if (!(gamma[j] > 0.0)) throw std::invalid_argument("cbc_construct: gamma must be positive");
  }
}

LatticeRule cbc_slow(std::uint32_t n, std::size_t s, std::span<const double> gamma,
                     int threads) {
  std::vector<std::uint32_t> cand;
  for (std::uint32_t z = 1; z < n; ++z) {
    if (std::gcd(z, n) == 1) cand.push_back(z);
  }
  std::vector<double> kernel(n);
  for (std::uint32_t k = 0; k < n; ++k) {
    kernel[k] = bernoulli_b2(static_cast<double>(k) / n);
  }
  std::vector<double> prod(n, 1.0);
  std::vector<double> scores(cand.size());
  LatticeRule rule;
  rule.n = n;
  rule.z.reserve(s);

#ifdef LATQMC_HAVE_OPENMP
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#else
  (void)threads;
#endif

  for (std::size_t d = 0; d < s; ++d) {
    const double g = gamma[d];
    const std::int64_t m = static_cast<std::int64_t>(cand.size());
#ifdef LATQMC_HAVE_OPENMP
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
    for (std::int64_t c = 0; c < m; ++c) {
      const std::uint32_t z = cand[static_cast<std::size_t>(c)];
      std::uint32_t r = 0;
      double sum = 0.0;
      for (std::uint32_t k = 0; k < n; ++k) {
        sum += prod[k] * (1.0 + g * kernel[r]);
        r += z;
        if (r >= n) r -= n;
      }
      scores[static_cast<std::size_t>(c)] = sum;
    }
    const std::uint32_t zd = cand[select_min_with_ties(scores, n)];
    rule.z.push_back(zd);
    std::uint32_t r = 0;
    for (std::uint32_t k = 0; k < n; ++k) {
      prod[k] *= 1.0 + g * kernel[r];
      r += zd;
      if (r >= n) r -= n;
    }
  }
  return rule;
}

LatticeRule cbc_fast(std::uint32_t n, std::size_t s, std::span<const double> gamma) {
  const std::uint32_t m = n - 1;
  const std::uint32_t g0 = primitive_root(n);
  std::vector<std::uint32_t> pow_g(m);
  {
    std::uint64_t x = 1;
    for (std::uint32_t t = 0; t < m; ++t) {
      pow_g[t] = static_cast<std::uint32_t>(x);
      x = x * g0 % n;
    }
  }
  std::vector<double> kernel(n);
  for (std::uint32_t k = 0; k < n; ++k) {
    kernel[k] = bernoulli_b2(static_cast<double>(k) / n);
  }
  std::vector<double> kappa(m);
  for (std::uint32_t t = 0; t < m; ++t) kappa[t] = kernel[pow_g[t]];
  CircularCorrelation corr(kappa);

  std::vector<double> prod(n, 1.0);
  std::vector<double> p(m), corr_out(m);
  std::vector<double> scores_by_z(n);  // index z = 1..n-1
  LatticeRule rule;
  rule.n = n;
  rule.z.reserve(s);

  for (std::size_t d = 0; d < s; ++d) {
    const double g = gamma[d];
    double sum_prod = prod[0];
    for (std::uint32_t t = 0; t < m; ++t) {
      p[t] = prod[pow_g[t]];
      sum_prod += p[t];
    }
    corr.apply(p, corr_out);
    // score(z = g^a) = sum_k prod[k] (1 + g B2(k z / n))
    //               = sum_prod + g (B2(0) prod[0] + corr_out[a])
    const double base = sum_prod + g * kernel[0] * prod[0];
    for (std::uint32_t a = 0; a < m; ++a) {
      scores_by_z[pow_g[a]] = base + g * corr_out[a];
    }
    double mn = scores_by_z[1];
    for (std::uint32_t z = 1; z < n; ++z) mn = std::min(mn, scores_by_z[z]);
    const double tol = 1e-9 * std::max(std::abs(mn), static_cast<double>(n));
    std::uint32_t zd = 1;
    for (std::uint32_t z = 1; z < n; ++z) {
      if (scores_by_z[z] <= mn + tol) {
        zd = z;
        break;
      }
    }
    rule.z.push_back(zd);
    std::uint32_t r = 0;
    for (std::uint32_t k = 0; k < n; ++k) {
      prod[k] *= 1.0 + g * kernel[r];
      r += zd;
      if (r >= n) r -= n;
    }
  }
  return rule;
}

}  // namespace

void LatticeRule::validate() const {
  if (n < 2) throw std::invalid_argument("LatticeRule: n must be at least 2");
  if (z.empty()) throw std::invalid_argument("LatticeRule: empty generating vector");
  for (std::uint32_t zj : z) {
    if (zj < 1 || zj > n - 1) throw std::invalid_argument("LatticeRule: z_j out of range");
    if (std::gcd(zj, n) != 1) throw std::invalid_argument("LatticeRule: z_j not coprime to n");
  }
}

nlohmann::json LatticeRule::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n;
  j["s"] = z.size();
  j["z"] = z;
  return j;
}

LatticeRule LatticeRule::from_json(const nlohmann::json& j) {
  LatticeRule r;
  r.n = j.at("n").get<std::uint32_t>();
  r.z = j.at("z").get<std::vector<std::uint32_t>>();
  if (j.contains("s") && j.at("s").get<std::size_t>() != r.z.size()) {
    throw std::invalid_argument("LatticeRule: s field disagrees with z length");
  }
  r.validate();
  return r;
}

bool is_prime(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

LatticeRule cbc_construct(std::uint32_t n, std::size_t s, std::span<const double> gamma,
                          const CbcOptions& options) {
  check_inputs(n, s, gamma);
  if (options.force_slow || !is_prime(n)) {
    return cbc_slow(n, s, gamma, options.threads);
  }
  if (n == 2) {
    LatticeRule r;
    r.n = 2;
    r.z.assign(s, 1);
    return r;
  }
  return cbc_fast(n, s, gamma);
}

double worst_case_error(const LatticeRule& rule, std::span<const double> gamma) {
  rule.validate();
  if (gamma.size() < rule.dim()) throw std::invalid_argument("worst_case_error: gamma too short");
  const std::uint32_t n = rule.n;
  std::vector<double> kernel(n);
  for (std::uint32_t k = 0; k < n; ++k) {
    kernel[k] = bernoulli_b2(static_cast<double>(k) / n);
  }
  double total = 0.0;
  for (std::uint32_t k = 0; k < n; ++k) {
    double prod = 1.0;
    for (std::size_t j = 0; j < rule.dim(); ++j) {
      const std::uint32_t r =
          static_cast<std::uint32_t>(static_cast<std::uint64_t>(k) * rule.z[j] % n);
      prod *= 1.0 + gamma[j] * kernel[r];
    }
    total += prod;
  }
  const double e2 = total / n - 1.0;
  if (e2 <= -1e-12) throw std::runtime_error("worst_case_error: negative beyond tolerance");
  return std::max(e2, 0.0);
}

void lattice_point(const LatticeRule& rule, std::span<const double> shift, std::uint64_t i,
                   std::span<double> out) {
  const std::size_t s = rule.dim();
  if (shift.size() != s || out.size() != s) {
    throw std::invalid_argument("lattice_point: dimension mismatch");
  }
  if (i < 1 || i > rule.n) throw std::out_of_range("lattice_point: index out of range");
  for (std::size_t j = 0; j < s; ++j) {
    const double dj = shift[j];
    if (!(dj >= 0.0) || !(dj < 1.0)) {
      throw std::invalid_argument("lattice_point: shift outside [0,1)");
    }
    const std::uint64_t r = i * rule.z[j] % rule.n;
    const double v = static_cast<double>(r) / rule.n + dj;
    out[j] = v >= 1.0 ? v - 1.0 : v;
  }
}

void gaussian_node(const LatticeRule& rule, std::span<const double> shift, std::uint64_t i,
                   std::span<double> out) {
  lattice_point(rule, shift, i, out);
  for (double& v : out) v = inverse_normal_cdf(v);
}

}  // namespace latqmc::lattice
