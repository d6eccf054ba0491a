#include "latqmc/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "latqmc/rng.hpp"

namespace latqmc::wavelet {

namespace {
constexpr double kLn2 = 0.6931471805599453;

double haar_mother(double t) {
  if (t >= 0.0 && t < 0.5) return 1.0;
  if (t >= 0.5 && t < 1.0) return -1.0;
  return 0.0;
}

double hat_mother(double t) { return std::max(0.0, 1.0 - std::abs(t)); }

// geometric sum r^a + ... + r^b, plus optional tail to infinity
double geometric_sum(double r, int a, int b) {
  double s = 0.0;
  double term = std::pow(r, a);
  for (int i = a; i <= b; ++i) {
    s += term;
    term *= r;
  }
  return s;
}
}  // namespace

Basis basis_from_string(const std::string& s) {
  if (s == "haar") return Basis::kHaar;
  if (s == "hat") return Basis::kHierarchicalHat;
  throw std::invalid_argument("unknown basis: " + s + " (expected haar|hat)");
}

std::string to_string(Basis b) {
  return b == Basis::kHaar ? "haar" : "hat";
}

int WaveletModel::overlap_bound() const { return basis == Basis::kHaar ? 1 : 2; }

double WaveletModel::sup_constant() const { return 1.0; }

int WaveletModel::level_cardinality_constant() const { return 1; }

double WaveletModel::holder_floor() const { return basis == Basis::kHaar ? 0.0 : 1.0; }

std::uint64_t WaveletModel::level_count(int ell) const {
  return std::uint64_t{1} << (ell * d);
}

std::uint64_t WaveletModel::dim() const {
  std::uint64_t s = 0;
  for (int ell = ell0; ell <= L; ++ell) s += level_count(ell);
  return s;
}

double WaveletModel::besov_cap() const {
  if (t_star > 0.0) return t_star;
  return basis == Basis::kHaar ? 0.5 : 1.5;
}

void WaveletModel::validate() const {
  if (d != 1 && d != 2) throw std::invalid_argument("WaveletModel: d must be 1 or 2");
  if (basis == Basis::kHierarchicalHat && d != 1) {
    throw std::invalid_argument("WaveletModel: hat basis is 1-D only");
  }
  if (!(beta1 > 1.0)) throw std::invalid_argument("WaveletModel: beta1 must exceed 1");
  if (!(beta0 >= 0.0)) throw std::invalid_argument("WaveletModel: beta0 must be nonnegative");
  const double theta_cap = d * (beta1 - beta0) / 2.0;
  if (!(theta > 0.0) || !(theta < theta_cap)) {
    throw std::invalid_argument("WaveletModel: theta must lie in (0, d(beta1-beta0)/2)");
  }
  if (ell0 < 0 || L < ell0) throw std::invalid_argument("WaveletModel: need 0 <= ell0 <= L");
  if (L * d > 48) throw std::invalid_argument("WaveletModel: truncation level too large");
  if (!(sigma_scale >= 0.0)) throw std::invalid_argument("WaveletModel: sigma_scale < 0");
  const double cap = c_rho_upper_bound(*this);
  if (!(c_rho > 0.0) || !(c_rho < cap)) {
    throw std::domain_error("WaveletModel: c_rho violates its admissible bound");
  }
}

double c_rho_upper_bound(const WaveletModel& m) {
  const double r = std::pow(2.0, m.theta - m.d * (m.beta1 - m.beta0) / 2.0);
  if (!(r < 1.0)) return 0.0;
  // sum_{ell >= ell0} r^ell in closed form
  const double total = std::pow(r, m.ell0) / (1.0 - r);
  return kLn2 / (m.overlap_bound() * m.sup_constant() * total);
}

std::vector<LevelIndex> enumerate_indices(const WaveletModel& m) {
  std::vector<LevelIndex> out;
  out.reserve(m.dim());
  std::uint64_t j = 1;
  for (int ell = m.ell0; ell <= m.L; ++ell) {
    const std::uint64_t count = m.level_count(ell);
    for (std::uint64_t k = 0; k < count; ++k) {
      out.push_back({ell, k, j});
      ++j;
    }
  }
  return out;
}

LevelIndex index_of(const WaveletModel& m, std::uint64_t j) {
  if (j < 1 || j > m.dim()) throw std::out_of_range("index_of: j out of range");
  std::uint64_t offset = 0;
  for (int ell = m.ell0; ell <= m.L; ++ell) {
    const std::uint64_t count = m.level_count(ell);
    if (j <= offset + count) return {ell, j - offset - 1, j};
    offset += count;
  }
  throw std::logic_error("index_of: unreachable");
}

std::uint64_t linear_index(const WaveletModel& m, int ell, std::uint64_t k) {
  if (ell < m.ell0 || ell > m.L) throw std::out_of_range("linear_index: level out of range");
  if (k >= m.level_count(ell)) throw std::out_of_range("linear_index: k out of range");
  std::uint64_t offset = 0;
  for (int l = m.ell0; l < ell; ++l) offset += m.level_count(l);
  return offset + k + 1;
}

double basis_eval(const WaveletModel& m, int ell, std::uint64_t k, std::span<const double> x) {
  if (ell < m.ell0 || ell > m.L) throw std::out_of_range("basis_eval: level out of range");
  if (k >= m.level_count(ell)) throw std::out_of_range("basis_eval: k out of range");
  if (x.size() != static_cast<std::size_t>(m.d)) {
    throw std::invalid_argument("basis_eval: point dimension mismatch");
  }
  const double scale = std::pow(2.0, 0.5 * ell * m.d);
  const std::uint64_t per_axis = std::uint64_t{1} << ell;
  double value = scale;
  for (int axis = 0; axis < m.d; ++axis) {
    const std::uint64_t ki = (m.d == 1) ? k : (axis == 0 ? k % per_axis : k / per_axis);
    const double t = std::ldexp(x[axis], ell) - static_cast<double>(ki);
    value *= (m.basis == Basis::kHaar) ? haar_mother(t) : hat_mother(t);
    if (value == 0.0) return 0.0;
  }
  return value;
}

double sigma_level(const WaveletModel& m, int ell) {
  if (ell < m.ell0) throw std::out_of_range("sigma_level: level below ell0");
  return m.sigma_scale * std::pow(2.0, -0.5 * m.beta1 * m.d * ell);
}

double rho_of_level(const WaveletModel& m, int ell) {
  if (ell < m.ell0) throw std::out_of_range("rho_of_level: level below ell0");
  const double cap = c_rho_upper_bound(m);
  if (!(m.c_rho > 0.0) || !(m.c_rho < cap)) {
    throw std::domain_error("rho_of_level: c_rho violates its admissible bound");
  }
  return m.c_rho * std::pow(2.0, m.theta * ell);
}

std::vector<double> rho_sequence(const WaveletModel& m) {
  std::vector<double> rho;
  rho.reserve(m.dim());
  for (int ell = m.ell0; ell <= m.L; ++ell) {
    const double r = rho_of_level(m, ell);
    rho.insert(rho.end(), m.level_count(ell), r);
  }
  return rho;
}

B1Report check_assumption_b1(const WaveletModel& m, std::size_t grid_resolution) {
  B1Report rep;
  const double r = std::pow(2.0, m.theta - m.d * (m.beta1 - m.beta0) / 2.0);
  const double truncated = geometric_sum(r, m.ell0, m.L);
  const double tail = std::pow(r, m.L + 1) / (1.0 - r);
  rep.analytic = m.c_rho * m.overlap_bound() * m.sup_constant() * m.sigma_scale *
                 (truncated + tail);
  // grid sup of sum_{ell <= L} rho_ell sigma_ell sum_k |phi_{ell,k}(x)|
  const std::size_t per_axis =
      m.d == 1 ? grid_resolution
               : static_cast<std::size_t>(std::sqrt(static_cast<double>(grid_resolution))) + 1;
  std::vector<double> x(m.d);
  double sup = 0.0;
  std::vector<std::size_t> idx(m.d, 0);
  const std::size_t total = m.d == 1 ? per_axis : per_axis * per_axis;
  for (std::size_t g = 0; g < total; ++g) {
    if (m.d == 1) {
      x[0] = (static_cast<double>(g) + 0.5) / per_axis;
    } else {
      x[0] = (static_cast<double>(g % per_axis) + 0.5) / per_axis;
      x[1] = (static_cast<double>(g / per_axis) + 0.5) / per_axis;
    }
    double sum = 0.0;
    for (int ell = m.ell0; ell <= m.L; ++ell) {
      const double w = rho_of_level(m, ell) * sigma_level(m, ell);
      const std::uint64_t per = std::uint64_t{1} << ell;
      if (m.basis == Basis::kHaar) {
        std::uint64_t k = 0;
        bool in = true;
        for (int axis = 0; axis < m.d; ++axis) {
          const double t = std::ldexp(x[axis], ell);
          const auto ki = static_cast<std::uint64_t>(t);
          if (ki >= per) {
            in = false;
            break;
          }
          k += axis == 0 ? ki : ki * per;
        }
        if (in) sum += w * std::abs(basis_eval(m, ell, k, x));
      } else {
        const double t = std::ldexp(x[0], ell);
        const auto k0 = static_cast<std::int64_t>(std::floor(t));
        for (std::int64_t k = k0; k <= k0 + 1; ++k) {
          if (k < 0 || k >= static_cast<std::int64_t>(per)) continue;
          sum += w * std::abs(basis_eval(m, ell, static_cast<std::uint64_t>(k), x));
        }
      }
    }
    sup = std::max(sup, sum);
  }
  rep.empirical = sup;
  rep.analytic_ok = rep.analytic < kLn2;
  rep.empirical_ok = rep.empirical < kLn2;
  return rep;
}

double rho_inv_q_sum_closed_form(const WaveletModel& m, double q) {
  if (!(q > 0.0)) throw std::invalid_argument("rho_inv_q_sum_closed_form: q must be positive");
  const double ratio = std::pow(2.0, m.d - q * m.theta);
  if (!(ratio < 1.0)) return std::numeric_limits<double>::infinity();
  return std::pow(m.c_rho, -q) * m.level_cardinality_constant() * std::pow(ratio, m.ell0) /
         (1.0 - ratio);
}

bool qmc_ready(const WaveletModel& m, double q) {
  if (!(q > 0.0) || !(q <= 1.0)) return false;
  if (!(2.0 / q < m.beta1 - m.beta0)) return false;
  if (!(m.theta > m.d / q)) return false;
  if (!(m.theta < m.d * (m.beta1 - m.beta0) / 2.0)) return false;
  return m.c_rho > 0.0 && m.c_rho < c_rho_upper_bound(m);
}

void FieldRealization::validate() const {
  model.validate();
  if (y.size() != model.dim()) {
    throw std::invalid_argument("FieldRealization: parameter vector length mismatch");
  }
}

FieldRealization sample_realization(const WaveletModel& m, std::uint64_t seed,
                                    std::uint64_t sample_index) {
  FieldRealization r;
  r.model = m;
  const std::uint64_t s = m.dim();
  r.y.resize(s);
  CounterRng rng(seed, 0xF1E1Dull ^ (sample_index * 0x9E3779B97F4A7C15ull));
  for (std::uint64_t j = 0; j < s; ++j) r.y[j] = rng.gaussian(j);
  return r;
}

double field_eval(const FieldRealization& r, std::span<const double> x) {
  const WaveletModel& m = r.model;
  double sum = 0.0;
  for (int ell = m.ell0; ell <= m.L; ++ell) {
    const double sig = sigma_level(m, ell);
    if (sig == 0.0) continue;
    const std::uint64_t per = std::uint64_t{1} << ell;
    if (m.basis == Basis::kHaar) {
      std::uint64_t k = 0;
      bool in = true;
      for (int axis = 0; axis < m.d; ++axis) {
        const double t = std::ldexp(x[axis], ell);
        const auto ki = static_cast<std::uint64_t>(t);
        if (t < 0.0 || ki >= per) {
          in = false;
          break;
        }
        k += axis == 0 ? ki : ki * per;
      }
      if (!in) continue;
      const double phi = basis_eval(m, ell, k, x);
      if (phi != 0.0) sum += r.y[linear_index(m, ell, k) - 1] * sig * phi;
    } else {
      const double t = std::ldexp(x[0], ell);
      const auto k0 = static_cast<std::int64_t>(std::floor(t));
      for (std::int64_t k = k0; k <= k0 + 1; ++k) {
        if (k < 0 || k >= static_cast<std::int64_t>(per)) continue;
        const double phi = basis_eval(m, ell, static_cast<std::uint64_t>(k), x);
        if (phi != 0.0) sum += r.y[linear_index(m, ell, static_cast<std::uint64_t>(k)) - 1] * sig * phi;
      }
    }
  }
  return sum;
}

double field_eval_full(const FieldRealization& r, std::span<const double> x) {
  const WaveletModel& m = r.model;
  double sum = 0.0;
  std::uint64_t j = 0;
  for (int ell = m.ell0; ell <= m.L; ++ell) {
    const double sig = sigma_level(m, ell);
    const std::uint64_t count = m.level_count(ell);
    for (std::uint64_t k = 0; k < count; ++k, ++j) {
      sum += r.y[j] * sig * basis_eval(m, ell, k, x);
    }
  }
  return sum;
}

double coefficient_eval(const FieldRealization& r, const SpatialFn& a_star, const SpatialFn& a0,
                        std::span<const double> x) {
  return a_star(x) + a0(x) * std::exp(field_eval(r, x));
}

double covariance(const WaveletModel& m, std::span<const double> x1,
                  std::span<const double> x2) {
  double sum = 0.0;
  for (int ell = m.ell0; ell <= m.L; ++ell) {
    const double sig2 = sigma_level(m, ell) * sigma_level(m, ell);
    const std::uint64_t per = std::uint64_t{1} << ell;
    if (m.basis == Basis::kHaar) {
      std::uint64_t k = 0;
      bool in = true;
      for (int axis = 0; axis < m.d; ++axis) {
        const double t = std::ldexp(x1[axis], ell);
        const auto ki = static_cast<std::uint64_t>(t);
        if (t < 0.0 || ki >= per) {
          in = false;
          break;
        }
        k += axis == 0 ? ki : ki * per;
      }
      if (!in) continue;
      sum += sig2 * basis_eval(m, ell, k, x1) * basis_eval(m, ell, k, x2);
    } else {
      const double t = std::ldexp(x1[0], ell);
      const auto k0 = static_cast<std::int64_t>(std::floor(t));
      for (std::int64_t k = k0; k <= k0 + 1; ++k) {
        if (k < 0 || k >= static_cast<std::int64_t>(per)) continue;
        sum += sig2 * basis_eval(m, ell, static_cast<std::uint64_t>(k), x1) *
               basis_eval(m, ell, static_cast<std::uint64_t>(k), x2);
      }
    }
  }
  return sum;
}

double besov_norm(const FieldRealization& r, double t, double p, double q_besov) {
  const WaveletModel& m = r.model;
  if (!(p >= 1.0) || !(q_besov >= 1.0)) {
    throw std::invalid_argument("besov_norm: p and q must be at least 1");
  }
  const double lower = m.d * std::max(1.0 / p - 1.0, 0.0);
  if (!(t > lower) || !(t < m.besov_cap())) {
    throw std::invalid_argument("besov_norm: t outside the characterised range");
  }
  double outer = 0.0;
  std::uint64_t j = 0;
  for (int ell = m.ell0; ell <= m.L; ++ell) {
    const double sig = sigma_level(m, ell);
    const std::uint64_t count = m.level_count(ell);
    double inner = 0.0;
    for (std::uint64_t k = 0; k < count; ++k, ++j) {
      inner += std::pow(std::abs(r.y[j] * sig), p);
    }
    const double level_weight =
        std::pow(2.0, ell * (t + m.d * (0.5 - 1.0 / p)) * q_besov);
    outer += level_weight * std::pow(inner, q_besov / p);
  }
  return std::pow(outer, 1.0 / q_besov);
}

double besov_threshold(int d, double beta1) { return d * (beta1 - 1.0) / 2.0; }

double holder_quotient(const FieldRealization& r, double t1, std::size_t grid_n) {
  if (r.model.d != 1) throw std::invalid_argument("holder_quotient: d = 1 only");
  if (!(t1 > 0.0) || !(t1 <= 1.0)) throw std::invalid_argument("holder_quotient: t1 in (0,1]");
  double sup = 0.0;
  double prev_x = 0.5 / grid_n;
  double prev_v = field_eval(r, std::span<const double>(&prev_x, 1));
  for (std::size_t i = 1; i < grid_n; ++i) {
    const double x = (static_cast<double>(i) + 0.5) / grid_n;
    const double v = field_eval(r, std::span<const double>(&x, 1));
    sup = std::max(sup, std::abs(v - prev_v) / std::pow(x - prev_x, t1));
    prev_x = x;
    prev_v = v;
  }
  return sup;
}

}  // namespace latqmc::wavelet
