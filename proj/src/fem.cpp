#include "latqmc/fem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "latqmc/weights.hpp"

namespace latqmc::fem {

namespace {

constexpr double kGaussOffset = 0.2886751345948129;  // 1/(2 sqrt 3)

void gauss_nodes(Mesh1D mesh, std::uint32_t element, double* g1, double* g2) {
  const double h = mesh.h();
  const double mid = (element + 0.5) * h;
  *g1 = mid - kGaussOffset * h;
  *g2 = mid + kGaussOffset * h;
}

double field_at(const wavelet::FieldRealization& r, double x) {
  return wavelet::field_eval(r, std::span<const double>(&x, 1));
}

FemSolution solve_for_field(const wavelet::FieldRealization& r, Mesh1D mesh) {
  return assemble_solve([&](double x) { return std::exp(field_at(r, x)); },
                        [](double) { return 1.0; }, mesh);
}

}  // namespace

void Mesh1D::validate() const {
  if (elements < 2) throw std::invalid_argument("Mesh1D: need at least 2 elements");
}

FemSolution assemble_solve(const ScalarFn& coeff, const ScalarFn& rhs, Mesh1D mesh) {
  mesh.validate();
  const std::uint32_t n_el = mesh.elements;
  const std::uint32_t n = mesh.interior_nodes();
  const double h = mesh.h();

  std::vector<double> a_bar(n_el);  // per-element Gauss mean of the coefficient
  std::vector<double> load(n, 0.0);
  for (std::uint32_t e = 0; e < n_el; ++e) {
    double g1, g2;
    gauss_nodes(mesh, e, &g1, &g2);
    const double a1 = coeff(g1);
    const double a2 = coeff(g2);
    if (!(a1 > 0.0) || !(a2 > 0.0)) {
      throw std::domain_error("assemble_solve: nonpositive coefficient at quadrature node");
    }
    a_bar[e] = 0.5 * (a1 + a2);
    const double f1 = rhs(g1);
    const double f2 = rhs(g2);
    const double left = e * h;
    // hat-function values at the Gauss nodes
    const double w1l = (left + h - g1) / h, w1r = (g1 - left) / h;
    const double w2l = (left + h - g2) / h, w2r = (g2 - left) / h;
    if (e >= 1) load[e - 1] += 0.5 * h * (f1 * w1l + f2 * w2l);
    if (e + 1 <= n) load[e] += 0.5 * h * (f1 * w1r + f2 * w2r);
  }

  std::vector<double> diag(n), upper(n > 0 ? n - 1 : 0);
  for (std::uint32_t i = 0; i < n; ++i) {
    diag[i] = (a_bar[i] + a_bar[i + 1]) / h;
    if (i + 1 < n) upper[i] = -a_bar[i + 1] / h;
  }

  // Thomas elimination; the matrix is symmetric so lower == upper.
  std::vector<double> d = diag, b = load;
  for (std::uint32_t i = 1; i < n; ++i) {
    if (!(d[i - 1] > 0.0)) throw std::runtime_error("assemble_solve: nonpositive pivot");
    const double w = upper[i - 1] / d[i - 1];
    d[i] -= w * upper[i - 1];
    b[i] -= w * b[i - 1];
  }
  if (!(d[n - 1] > 0.0)) throw std::runtime_error("assemble_solve: nonpositive pivot");

  FemSolution sol;
  sol.mesh = mesh;
  sol.u.resize(n);
  sol.u[n - 1] = b[n - 1] / d[n - 1];
  for (std::int64_t i = static_cast<std::int64_t>(n) - 2; i >= 0; --i) {
    sol.u[i] = (b[i] - upper[i] * sol.u[i + 1]) / d[i];
  }

  double res = 0.0, bmax = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) {
    double ax = diag[i] * sol.u[i];
    if (i > 0) ax += upper[i - 1] * sol.u[i - 1];
    if (i + 1 < n) ax += upper[i] * sol.u[i + 1];
    res = std::max(res, std::abs(ax - load[i]));
    bmax = std::max(bmax, std::abs(load[i]));
  }
  sol.residual = bmax > 0.0 ? res / bmax : res;
  return sol;
}

double functional_g(const FemSolution& sol) {
  double s = 0.0;
  for (double v : sol.u) s += v;
  return s * sol.mesh.h();
}

double v_norm(const FemSolution& sol) {
  const double h = sol.mesh.h();
  double s = 0.0;
  double prev = 0.0;
  for (double v : sol.u) {
    const double d = v - prev;
    s += d * d;
    prev = v;
  }
  s += prev * prev;  // last element down to the zero boundary
  return std::sqrt(s / h);
}

double v_norm_diff(const FemSolution& a, const FemSolution& b) {
  if (a.mesh.elements != b.mesh.elements) {
    throw std::invalid_argument("v_norm_diff: mesh mismatch");
  }
  FemSolution d;
  d.mesh = a.mesh;
  d.u.resize(a.u.size());
  for (std::size_t i = 0; i < a.u.size(); ++i) d.u[i] = a.u[i] - b.u[i];
  return v_norm(d);
}

double min_coeff_at_quadrature(const ScalarFn& coeff, Mesh1D mesh) {
  mesh.validate();
  double mn = std::numeric_limits<double>::infinity();
  for (std::uint32_t e = 0; e < mesh.elements; ++e) {
    double g1, g2;
    gauss_nodes(mesh, e, &g1, &g2);
    mn = std::min({mn, coeff(g1), coeff(g2)});
  }
  return mn;
}

DerivativeBoundReport derivative_bound_check(const wavelet::WaveletModel& model,
                                             std::span<const double> y,
                                             std::span<const std::size_t> j_set,
                                             double fd_step, Mesh1D mesh) {
  model.validate();
  if (y.size() != model.dim()) throw std::invalid_argument("derivative_bound_check: bad y");
  if (j_set.size() > 3) throw std::invalid_argument("derivative_bound_check: |j_set| <= 3");
  for (std::size_t j : j_set) {
    if (j < 1 || j > model.dim()) {
      throw std::invalid_argument("derivative_bound_check: index out of range");
    }
  }
  if (!(fd_step > 0.0)) throw std::invalid_argument("derivative_bound_check: bad step");

  wavelet::FieldRealization base;
  base.model = model;
  base.y.assign(y.begin(), y.end());

  const std::size_t m = j_set.size();
  auto fd_vector = [&](double step) {
    FemSolution acc;
    const std::size_t combos = std::size_t{1} << m;
    for (std::size_t mask = 0; mask < combos; ++mask) {
      wavelet::FieldRealization r = base;
      int sign = 1;
      for (std::size_t b = 0; b < m; ++b) {
        const double eps = (mask >> b) & 1 ? step : -step;
        if (eps < 0) sign = -sign;
        r.y[j_set[b] - 1] += eps;
      }
      FemSolution s = solve_for_field(r, mesh);
      if (acc.u.empty()) {
        acc = s;
        for (double& v : acc.u) v *= sign;
      } else {
        for (std::size_t i = 0; i < acc.u.size(); ++i) acc.u[i] += sign * s.u[i];
      }
    }
    const double denom = std::pow(2.0 * step, static_cast<double>(m));
    for (double& v : acc.u) v /= denom;
    return acc;
  };

  DerivativeBoundReport rep;
  const FemSolution coarse = fd_vector(fd_step);
  const FemSolution fine = fd_vector(0.5 * fd_step);
  rep.fd_norm_coarse = v_norm(coarse);
  rep.fd_norm = v_norm(fine);
  const double scale = std::max(rep.fd_norm, 1e-300);
  if (std::abs(rep.fd_norm - rep.fd_norm_coarse) / scale > 0.10) {
    throw std::runtime_error("derivative_bound_check: step-halving disagreement above 10%");
  }

  const wavelet::B1Report b1 = wavelet::check_assumption_b1(model, 1);
  const double c0 = weights::c_zero(b1.analytic);
  rep.min_coeff = min_coeff_at_quadrature(
      [&](double x) { return std::exp(field_at(base, x)); }, mesh);
  double inv_rho = 1.0;
  for (std::size_t j : j_set) {
    inv_rho /= wavelet::rho_of_level(model, wavelet::index_of(model, j).ell);
  }
  rep.bound = std::sqrt(c0) * kFDualSurrogate / rep.min_coeff * inv_rho;
  rep.pass = rep.fd_norm <= rep.bound * 1.05;
  return rep;
}

StrangReport strang_truncation_gap(const wavelet::WaveletModel& model,
                                   std::span<const double> y_full, int L_small, Mesh1D mesh) {
  model.validate();
  if (y_full.size() != model.dim()) throw std::invalid_argument("strang: bad y length");
  if (L_small < model.ell0 || L_small > model.L) {
    throw std::invalid_argument("strang: L_small outside [ell0, L]");
  }
  wavelet::FieldRealization full;
  full.model = model;
  full.y.assign(y_full.begin(), y_full.end());
  wavelet::FieldRealization trunc = full;
  std::uint64_t keep = 0;
  for (int ell = model.ell0; ell <= L_small; ++ell) keep += model.level_count(ell);
  std::fill(trunc.y.begin() + static_cast<std::ptrdiff_t>(keep), trunc.y.end(), 0.0);

  const FemSolution u_full = solve_for_field(full, mesh);
  const FemSolution u_trunc = solve_for_field(trunc, mesh);

  StrangReport rep;
  rep.lhs = v_norm_diff(u_full, u_trunc);

  double gap = 0.0, mn_full = std::numeric_limits<double>::infinity(),
         mn_trunc = mn_full;
  for (std::uint32_t e = 0; e < mesh.elements; ++e) {
    double g1, g2;
    gauss_nodes(mesh, e, &g1, &g2);
    for (double x : {g1, g2}) {
      const double af = std::exp(field_at(full, x));
      const double at = std::exp(field_at(trunc, x));
      gap = std::max(gap, std::abs(af - at));
      mn_full = std::min(mn_full, af);
      mn_trunc = std::min(mn_trunc, at);
    }
  }
  rep.rhs = gap * kFDualSurrogate / (mn_full * mn_trunc);
  rep.pass = rep.lhs <= rep.rhs * 1.05;
  return rep;
}

}  // namespace latqmc::fem
