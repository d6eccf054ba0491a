#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace latqmc {

// Complex DFT of fixed length. Power-of-two lengths run the iterative
// radix-2 transform; everything else goes through Bluestein's chirp-z
// reduction onto a padded power-of-two transform.
class Dft {
 public:
  explicit Dft(std::size_t size);

  std::size_t size() const { return size_; }

  // X[f] = sum_t x[t] exp(-2 pi i f t / m)
  void forward(std::vector<std::complex<double>>& a) const;
  // x[t] = (1/m) sum_f X[f] exp(+2 pi i f t / m)
  void inverse(std::vector<std::complex<double>>& a) const;

 private:
  void pow2(std::vector<std::complex<double>>& a, bool invert) const;
  void bluestein(std::vector<std::complex<double>>& a, bool invert) const;

  std::size_t size_;
  bool is_pow2_;
  // radix-2 tables (for size_ when pow2, else for the Bluestein pad length)
  std::size_t pad_;
  std::vector<std::complex<double>> chirp_;      // w[t] = exp(+i pi t^2 / m)
  std::vector<std::complex<double>> chirp_fft_;  // forward FFT of padded chirp
};

// Circular cross-correlation against a fixed real kernel:
//   out[a] = sum_b kernel[(a + b) mod m] * p[b].
// The kernel transform is precomputed; each call costs two transforms.
class CircularCorrelation {
 public:
  explicit CircularCorrelation(const std::vector<double>& kernel);

  std::size_t size() const { return dft_.size(); }
  void apply(const std::vector<double>& p, std::vector<double>& out) const;

 private:
  Dft dft_;
  std::vector<std::complex<double>> kernel_fft_;
};

}  // namespace latqmc
