#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "latqmc/config.hpp"
#include "latqmc/lattice.hpp"
#include "latqmc/wavelet.hpp"
#include "latqmc/weights.hpp"

namespace latqmc::harness {

// Applies the QMC_THREADS cap to OpenMP (no-op without OpenMP); returns the
// effective thread count.
int apply_thread_cap();

struct ExperimentConfig {
  wavelet::WaveletModel model;
  std::uint64_t seed = 1;
  std::uint32_t mesh_elements = 256;
  std::vector<std::uint32_t> n_list;
  int shifts = 16;  // R
  std::uint32_t n_ref = 8191;
  int shifts_ref = 32;
  double q = 0.5;
  double delta = 0.25;
  weights::GammaPolicy policy = weights::GammaPolicy::kRhoOnly;
  std::string out_prefix = "experiment";

  void validate() const;
  std::string canonical() const;
  std::string hash() const;

  static ExperimentConfig from_config(const config::KeyValue& kv);
};

// G(u^s(., y)) with the experiment defaults a_* == 0, a_0 == 1, f == 1.
// Basis values at the quadrature nodes are tabulated once; each call does
// one tridiagonal solve.
class PdeFunctional {
 public:
  PdeFunctional(const wavelet::WaveletModel& model, std::uint32_t mesh_elements);

  std::size_t dim() const { return dim_; }
  std::uint32_t elements() const { return elements_; }
  double operator()(std::span<const double> y) const;

 private:
  struct Entry {
    std::uint32_t index;  // 0-based position in y
    double value;         // sigma_ell * phi_{ell,k}(x)
  };
  std::uint32_t elements_;
  std::size_t dim_;
  std::vector<Entry> entries_;
  std::vector<std::uint32_t> offsets_;  // per quadrature point, size 2*elements+1
};

using Integrand = std::function<double(std::span<const double>)>;

// Equal-weight average of f over the n shifted-lattice Gaussian nodes.
double qmc_mean(const lattice::LatticeRule& rule, std::span<const double> shift,
                const Integrand& f);

// Uniform shift in [0,1)^s drawn from the counter-based stream
// (seed, tag, index); deterministic and thread-safe.
std::vector<double> random_shift(std::uint64_t seed, std::uint64_t tag, std::uint64_t index,
                                 std::size_t s);

// Weight scheme for the experiment: rho from the model, analytic kappa,
// lambda from (q, delta), gamma per policy.
weights::WeightScheme experiment_scheme(const ExperimentConfig& cfg);

struct RatePoint {
  std::uint32_t n = 0;
  double rms = 0.0;
  double mean_estimate = 0.0;
  double wall_seconds = 0.0;
  std::vector<double> estimates;  // one per shift / replicate
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  std::size_t points_used = 0;
};

// Least squares of log(rms) against log(n); zero-rms points are dropped.
FitResult fit_rate(std::span<const double> n_values, std::span<const double> rms_values);

struct ConvergeResult {
  bool mc = false;
  double reference = 0.0;
  std::vector<RatePoint> points;
  FitResult fit;
  std::string config_hash;
  double reference_seconds = 0.0;
  double total_seconds = 0.0;
};

// QMC rate experiment (mc_baseline = false) or the i.i.d. Monte Carlo
// baseline (true); both measure shift/replicate RMS against a common
// high-n QMC reference.
ConvergeResult run_rate_experiment(const ExperimentConfig& cfg, bool mc_baseline);

struct TruncationResult {
  std::vector<int> levels;
  std::vector<double> mean_gap;   // mean over samples of ||u_ref - u^{s(L)}||_V
  double per_level_log2_slope = 0.0;
  double bound_rate = 0.0;        // d (beta1 - 1)/2 - t at the basis Holder floor
  int samples = 0;
};

TruncationResult truncation_study(const ExperimentConfig& cfg, std::span<const int> levels,
                                  int samples);

struct BenchRow {
  std::uint32_t n = 0;
  std::size_t s = 0;
  double seconds = 0.0;  // fast-path CBC, best of the repeats
};

std::vector<BenchRow> cbc_cost_benchmark(std::span<const std::uint32_t> n_list,
                                         std::span<const std::size_t> s_list, int repeats);

// CSV (one row per point/shift) and deterministic JSON summary; wall-clock
// readings go to a separate "<prefix>.timings.json" so the primary outputs
// are byte-stable across reruns of the same seed.
void write_rate_csv(const ConvergeResult& r, const std::string& path);
void write_rate_json(const ConvergeResult& r, const ExperimentConfig& cfg,
                     const std::string& path);
void write_timings_json(const ConvergeResult& r, const std::string& path);

}  // namespace latqmc::harness
