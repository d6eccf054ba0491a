#include "latqmc/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "latqmc/fem.hpp"
#include "latqmc/rng.hpp"
#include "nlohmann/json.hpp"

#ifdef LATQMC_HAVE_OPENMP
#include <omp.h>
#endif

namespace latqmc::harness {

namespace {

constexpr std::uint64_t kTagShift = 0x51F7ull;
constexpr std::uint64_t kTagRefShift = 0x5EEFull;
constexpr std::uint64_t kTagMc = 0x3C4Dull;
constexpr std::uint64_t kTagTrunc = 0x7A11ull;

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

int apply_thread_cap() {
#ifdef LATQMC_HAVE_OPENMP
  if (const char* env = std::getenv("QMC_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) omp_set_num_threads(cap);
  }
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void ExperimentConfig::validate() const {
  model.validate();
  if (mesh_elements < 2) throw std::invalid_argument("ExperimentConfig: mesh too coarse");
  if (shifts < 8) throw std::invalid_argument("ExperimentConfig: R must be at least 8");
  if (shifts_ref < 1) throw std::invalid_argument("ExperimentConfig: R_ref must be positive");
  if (n_list.empty()) throw std::invalid_argument("ExperimentConfig: empty n list");
  for (std::size_t i = 1; i < n_list.size(); ++i) {
    if (n_list[i] <= n_list[i - 1]) {
      throw std::invalid_argument("ExperimentConfig: n list must increase strictly");
    }
  }
  if (static_cast<std::uint64_t>(n_ref) < 8ull * n_list.back()) {
    throw std::invalid_argument("ExperimentConfig: n_ref must be at least 8 * max(n)");
  }
  if (!(q > 0.0) || !(q <= 1.0)) throw std::invalid_argument("ExperimentConfig: q in (0,1]");
  if (!(delta > 0.0) || !(delta <= 0.5)) {
    throw std::invalid_argument("ExperimentConfig: delta in (0,1/2]");
  }
}

std::string ExperimentConfig::canonical() const {
  std::string out;
  out += "L = " + std::to_string(model.L) + "\n";
  out += "R = " + std::to_string(shifts) + "\n";
  out += "R_ref = " + std::to_string(shifts_ref) + "\n";
  out += "basis = " + wavelet::to_string(model.basis) + "\n";
  out += "beta0 = " + format_double(model.beta0) + "\n";
  out += "beta1 = " + format_double(model.beta1) + "\n";
  out += "c_rho = " + format_double(model.c_rho) + "\n";
  out += "d = " + std::to_string(model.d) + "\n";
  out += "delta = " + format_double(delta) + "\n";
  out += "ell0 = " + std::to_string(model.ell0) + "\n";
  out += "mesh_n = " + std::to_string(mesh_elements) + "\n";
  std::string ns;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (i) ns += ",";
    ns += std::to_string(n_list[i]);
  }
  out += "n_list = " + ns + "\n";
  out += "n_ref = " + std::to_string(n_ref) + "\n";
  out += "q = " + format_double(q) + "\n";
  out += "seed = " + std::to_string(seed) + "\n";
  out += "sigma_scale = " + format_double(model.sigma_scale) + "\n";
  out += "t_star = " + format_double(model.besov_cap()) + "\n";
  out += "theta = " + format_double(model.theta) + "\n";
  out += "weights = " + weights::to_string(policy) + "\n";
  return out;
}

std::string ExperimentConfig::hash() const {
  return config::hex64(config::fnv1a64(canonical()));
}

ExperimentConfig ExperimentConfig::from_config(const config::KeyValue& kv) {
  ExperimentConfig cfg;
  cfg.model = config::model_from_config(kv);
  cfg.seed = kv.get_uint("seed", 1);
  cfg.mesh_elements = static_cast<std::uint32_t>(kv.get_int("mesh_n", 256));
  cfg.n_list = kv.has("n_list") ? kv.get_uint_list("n_list")
                                : std::vector<std::uint32_t>{31, 61, 127, 251, 509, 1021};
  cfg.shifts = static_cast<int>(kv.get_int("R", 16));
  cfg.n_ref = static_cast<std::uint32_t>(kv.get_int("n_ref", 8191));
  cfg.shifts_ref = static_cast<int>(kv.get_int("R_ref", 32));
  cfg.q = kv.get_double("q", 0.5);
  cfg.delta = kv.get_double("delta", 0.25);
  cfg.policy = weights::gamma_policy_from_string(kv.get_string("weights", "rho"));
  cfg.out_prefix = kv.get_string("out", "experiment");
  cfg.validate();
  return cfg;
}

PdeFunctional::PdeFunctional(const wavelet::WaveletModel& model, std::uint32_t mesh_elements) {
  model.validate();
  if (model.d != 1) throw std::invalid_argument("PdeFunctional: PDE solver is 1-D");
  if (mesh_elements < 2) throw std::invalid_argument("PdeFunctional: mesh too coarse");
  elements_ = mesh_elements;
  dim_ = model.dim();
  const double h = 1.0 / mesh_elements;
  constexpr double kGaussOffset = 0.2886751345948129;
  offsets_.push_back(0);
  wavelet::FieldRealization probe;
  probe.model = model;
  for (std::uint32_t e = 0; e < mesh_elements; ++e) {
    const double mid = (e + 0.5) * h;
    for (const double x : {mid - kGaussOffset * h, mid + kGaussOffset * h}) {
      for (int ell = model.ell0; ell <= model.L; ++ell) {
        const double sig = wavelet::sigma_level(model, ell);
        const std::uint64_t per = std::uint64_t{1} << ell;
        if (model.basis == wavelet::Basis::kHaar) {
          const double t = std::ldexp(x, ell);
          const auto k = static_cast<std::uint64_t>(t);
          if (k >= per) continue;
          const double phi = wavelet::basis_eval(model, ell, k, std::span<const double>(&x, 1));
          if (phi != 0.0) {
            entries_.push_back({static_cast<std::uint32_t>(
                                    wavelet::linear_index(model, ell, k) - 1),
                                sig * phi});
          }
        } else {
          const double t = std::ldexp(x, ell);
          const auto k0 = static_cast<std::int64_t>(std::floor(t));
          for (std::int64_t k = k0; k <= k0 + 1; ++k) {
            if (k < 0 || k >= static_cast<std::int64_t>(per)) continue;
            const double phi = wavelet::basis_eval(model, ell, static_cast<std::uint64_t>(k),
                                                   std::span<const double>(&x, 1));
            if (phi != 0.0) {
              entries_.push_back(
                  {static_cast<std::uint32_t>(
                       wavelet::linear_index(model, ell, static_cast<std::uint64_t>(k)) - 1),
                   sig * phi});
            }
          }
        }
      }
      offsets_.push_back(static_cast<std::uint32_t>(entries_.size()));
    }
  }
}

double PdeFunctional::operator()(std::span<const double> y) const {
  if (y.size() != dim_) throw std::invalid_argument("PdeFunctional: bad parameter length");
  const std::uint32_t n_el = elements_;
  const double h = 1.0 / n_el;
  std::vector<double> a_bar(n_el);
  for (std::uint32_t e = 0; e < n_el; ++e) {
    double acc = 0.0;
    for (int gp = 0; gp < 2; ++gp) {
      const std::uint32_t p = 2 * e + gp;
      double t = 0.0;
      for (std::uint32_t idx = offsets_[p]; idx < offsets_[p + 1]; ++idx) {
        t += entries_[idx].value * y[entries_[idx].index];
      }
      acc += std::exp(t);
    }
    a_bar[e] = 0.5 * acc;
  }
  // tridiagonal solve, f == 1 so every load entry is h
  const std::uint32_t n = n_el - 1;
  std::vector<double> d(n), b(n, h), upper(n - 1);
  for (std::uint32_t i = 0; i < n; ++i) {
    d[i] = (a_bar[i] + a_bar[i + 1]) / h;
    if (i + 1 < n) upper[i] = -a_bar[i + 1] / h;
  }
  for (std::uint32_t i = 1; i < n; ++i) {
    const double w = upper[i - 1] / d[i - 1];
    d[i] -= w * upper[i - 1];
    b[i] -= w * b[i - 1];
  }
  double g = 0.0;
  double next = b[n - 1] / d[n - 1];
  g += next;
  for (std::int64_t i = static_cast<std::int64_t>(n) - 2; i >= 0; --i) {
    next = (b[i] - upper[i] * next) / d[i];
    g += next;
  }
  return g * h;
}

double qmc_mean(const lattice::LatticeRule& rule, std::span<const double> shift,
                const Integrand& f) {
  const std::size_t s = rule.dim();
  std::vector<double> node(s);
  double acc = 0.0;
  for (std::uint64_t i = 1; i <= rule.n; ++i) {
    lattice::gaussian_node(rule, shift, i, node);
    acc += f(node);
  }
  return acc / rule.n;
}

std::vector<double> random_shift(std::uint64_t seed, std::uint64_t tag, std::uint64_t index,
                                 std::size_t s) {
  CounterRng rng(seed, tag * 0x100000001B3ull + index);
  std::vector<double> shift(s);
  for (std::size_t j = 0; j < s; ++j) shift[j] = rng.uniform(j);
  return shift;
}

weights::WeightScheme experiment_scheme(const ExperimentConfig& cfg) {
  weights::SmoothnessParams params;
  params.q = cfg.q;
  params.delta = cfg.delta;
  params.rho = wavelet::rho_sequence(cfg.model);
  const wavelet::B1Report b1 = wavelet::check_assumption_b1(cfg.model, 1);
  return weights::build_scheme(params, b1.analytic, cfg.policy);
}

FitResult fit_rate(std::span<const double> n_values, std::span<const double> rms_values) {
  if (n_values.size() != rms_values.size()) throw std::invalid_argument("fit_rate: size mismatch");
  if (n_values.size() < 4) throw std::invalid_argument("fit_rate: need at least 4 points");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    if (rms_values[i] <= 0.0) continue;  // excluded point
    x.push_back(std::log(n_values[i]));
    y.push_back(std::log(rms_values[i]));
  }
  FitResult fit;
  fit.points_used = x.size();
  if (x.size() < 2) throw std::invalid_argument("fit_rate: fewer than 2 usable points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - (fit.intercept + fit.slope * x[i]);
      ss += r * r;
    }
    fit.stderr_slope = std::sqrt(ss / (x.size() - 2) / sxx);
  } else {
    fit.stderr_slope = std::numeric_limits<double>::infinity();
  }
  return fit;
}

namespace {

double mc_replicate(const PdeFunctional& f, std::uint64_t seed, std::uint64_t stream_index,
                    std::uint32_t n) {
  CounterRng rng(seed, kTagMc * 0x100000001B3ull + stream_index);
  const std::size_t s = f.dim();
  std::vector<double> y(s);
  double acc = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < s; ++j) y[j] = rng.gaussian(static_cast<std::uint64_t>(i) * s + j);
    acc += f(y);
  }
  return acc / n;
}

}  // namespace

ConvergeResult run_rate_experiment(const ExperimentConfig& cfg, bool mc_baseline) {
  cfg.validate();
  apply_thread_cap();
  const double t_start = now_seconds();

  ConvergeResult result;
  result.mc = mc_baseline;
  result.config_hash = cfg.hash();

  const PdeFunctional functional(cfg.model, cfg.mesh_elements);
  const std::size_t s = functional.dim();
  const weights::WeightScheme scheme = experiment_scheme(cfg);
  const Integrand integrand = [&functional](std::span<const double> y) { return functional(y); };

  // common high-n QMC reference
  const double t_ref = now_seconds();
  const lattice::LatticeRule ref_rule = lattice::cbc_construct(cfg.n_ref, s, scheme.gamma);
  std::vector<double> ref_estimates(cfg.shifts_ref);
#ifdef LATQMC_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int r = 0; r < cfg.shifts_ref; ++r) {
    const auto shift = random_shift(cfg.seed, kTagRefShift, static_cast<std::uint64_t>(r), s);
    ref_estimates[r] = qmc_mean(ref_rule, shift, integrand);
  }
  double ref = 0.0;
  for (double v : ref_estimates) ref += v;
  ref /= cfg.shifts_ref;
  result.reference = ref;
  result.reference_seconds = now_seconds() - t_ref;

  for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
    const std::uint32_t n = cfg.n_list[ni];
    RatePoint point;
    point.n = n;
    point.estimates.resize(cfg.shifts);
    const double t0 = now_seconds();
    if (mc_baseline) {
#ifdef LATQMC_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
      for (int r = 0; r < cfg.shifts; ++r) {
        point.estimates[r] =
            mc_replicate(functional, cfg.seed, ni * 65536ull + static_cast<std::uint64_t>(r), n);
      }
    } else {
      const lattice::LatticeRule rule = lattice::cbc_construct(n, s, scheme.gamma);
#ifdef LATQMC_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
      for (int r = 0; r < cfg.shifts; ++r) {
        const auto shift = random_shift(cfg.seed, kTagShift,
                                        ni * 65536ull + static_cast<std::uint64_t>(r), s);
        point.estimates[r] = qmc_mean(rule, shift, integrand);
      }
    }
    point.wall_seconds = now_seconds() - t0;
    double mean = 0.0, sq = 0.0;
    for (double v : point.estimates) mean += v;
    mean /= point.estimates.size();
    for (double v : point.estimates) sq += (v - ref) * (v - ref);
    point.mean_estimate = mean;
    point.rms = std::sqrt(sq / point.estimates.size());
    result.points.push_back(std::move(point));
  }

  std::vector<double> ns, rms;
  for (const auto& p : result.points) {
    ns.push_back(static_cast<double>(p.n));
    rms.push_back(p.rms);
  }
  result.fit = fit_rate(ns, rms);
  result.total_seconds = now_seconds() - t_start;
  return result;
}

TruncationResult truncation_study(const ExperimentConfig& cfg, std::span<const int> levels,
                                  int samples) {
  cfg.validate();
  apply_thread_cap();
  if (levels.empty()) throw std::invalid_argument("truncation_study: empty level list");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < cfg.model.ell0 || levels[i] >= cfg.model.L) {
      throw std::invalid_argument("truncation_study: levels must lie in [ell0, L)");
    }
    if (i > 0 && levels[i] <= levels[i - 1]) {
      throw std::invalid_argument("truncation_study: levels must increase");
    }
  }
  if (samples < 1) throw std::invalid_argument("truncation_study: samples must be positive");

  const fem::Mesh1D mesh{cfg.mesh_elements};
  const std::size_t nl = levels.size();
  std::vector<double> sums(nl, 0.0);
#ifdef LATQMC_HAVE_OPENMP
#pragma omp parallel
#endif
  {
    std::vector<double> local(nl, 0.0);
#ifdef LATQMC_HAVE_OPENMP
#pragma omp for schedule(dynamic)
#endif
    for (int sample = 0; sample < samples; ++sample) {
      wavelet::FieldRealization full = wavelet::sample_realization(
          cfg.model, cfg.seed, kTagTrunc + static_cast<std::uint64_t>(sample));
      const fem::FemSolution u_full = fem::assemble_solve(
          [&](double x) {
            return std::exp(wavelet::field_eval(full, std::span<const double>(&x, 1)));
          },
          [](double) { return 1.0; }, mesh);
      for (std::size_t li = 0; li < nl; ++li) {
        wavelet::FieldRealization trunc = full;
        std::uint64_t keep = 0;
        for (int ell = cfg.model.ell0; ell <= levels[li]; ++ell) {
          keep += cfg.model.level_count(ell);
        }
        std::fill(trunc.y.begin() + static_cast<std::ptrdiff_t>(keep), trunc.y.end(), 0.0);
        const fem::FemSolution u_trunc = fem::assemble_solve(
            [&](double x) {
              return std::exp(wavelet::field_eval(trunc, std::span<const double>(&x, 1)));
            },
            [](double) { return 1.0; }, mesh);
        local[li] += fem::v_norm_diff(u_full, u_trunc);
      }
    }
#ifdef LATQMC_HAVE_OPENMP
#pragma omp critical
#endif
    for (std::size_t li = 0; li < nl; ++li) sums[li] += local[li];
  }

  TruncationResult out;
  out.samples = samples;
  out.levels.assign(levels.begin(), levels.end());
  out.mean_gap.resize(nl);
  for (std::size_t li = 0; li < nl; ++li) out.mean_gap[li] = sums[li] / samples;

  // least squares of log2(gap) on L
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < nl; ++i) {
    mx += levels[i];
    my += std::log2(out.mean_gap[i]);
  }
  mx /= nl;
  my /= nl;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < nl; ++i) {
    sxx += (levels[i] - mx) * (levels[i] - mx);
    sxy += (levels[i] - mx) * (std::log2(out.mean_gap[i]) - my);
  }
  out.per_level_log2_slope = sxy / sxx;
  out.bound_rate = wavelet::besov_threshold(cfg.model.d, cfg.model.beta1) -
                   cfg.model.holder_floor();
  return out;
}

std::vector<BenchRow> cbc_cost_benchmark(std::span<const std::uint32_t> n_list,
                                         std::span<const std::size_t> s_list, int repeats) {
  if (repeats < 1) throw std::invalid_argument("cbc_cost_benchmark: repeats must be positive");
  std::vector<BenchRow> rows;
  std::size_t s_max = 0;
  for (std::size_t s : s_list) s_max = std::max(s_max, s);
  std::vector<double> gamma(s_max);
  for (std::size_t j = 0; j < s_max; ++j) gamma[j] = 1.0 / ((j + 1.0) * (j + 1.0));
  for (std::uint32_t n : n_list) {
    if (!lattice::is_prime(n)) throw std::invalid_argument("cbc_cost_benchmark: n must be prime");
    for (std::size_t s : s_list) {
      double best = std::numeric_limits<double>::infinity();
      for (int rep = 0; rep < repeats; ++rep) {
        const double t0 = now_seconds();
        const lattice::LatticeRule rule =
            lattice::cbc_construct(n, s, std::span<const double>(gamma.data(), s));
        const double dt = now_seconds() - t0;
        if (rule.z.size() != s) throw std::logic_error("cbc_cost_benchmark: bad rule");
        best = std::min(best, dt);
      }
      rows.push_back({n, s, best});
    }
  }
  return rows;
}

void write_rate_csv(const ConvergeResult& r, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << (r.mc ? "n,replicate,estimate\n" : "n,shift,estimate\n");
  for (const auto& p : r.points) {
    for (std::size_t i = 0; i < p.estimates.size(); ++i) {
      out << p.n << ',' << i << ',' << format_double(p.estimates[i]) << '\n';
    }
  }
}

void write_rate_json(const ConvergeResult& r, const ExperimentConfig& cfg,
                     const std::string& path) {
  nlohmann::ordered_json j;
  j["kind"] = r.mc ? "mc" : "qmc";
  j["config_hash"] = r.config_hash;
  j["seed"] = cfg.seed;
  j["config"] = cfg.canonical();
  j["reference"] = r.reference;
  j["points"] = nlohmann::ordered_json::array();
  for (const auto& p : r.points) {
    nlohmann::ordered_json pj;
    pj["n"] = p.n;
    pj["rms_error"] = p.rms;
    pj["mean_estimate"] = p.mean_estimate;
    pj["estimates"] = p.estimates;
    j["points"].push_back(pj);
  }
  j["fit"] = {{"slope", r.fit.slope},
              {"intercept", r.fit.intercept},
              {"stderr", r.fit.stderr_slope},
              {"points_used", r.fit.points_used}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << '\n';
}

void write_timings_json(const ConvergeResult& r, const std::string& path) {
  nlohmann::ordered_json j;
  j["reference_seconds"] = r.reference_seconds;
  j["total_seconds"] = r.total_seconds;
  j["points"] = nlohmann::ordered_json::array();
  for (const auto& p : r.points) {
    j["points"].push_back({{"n", p.n}, {"wall_seconds", p.wall_seconds}});
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << '\n';
}

}  // namespace latqmc::harness
