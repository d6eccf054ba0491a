#include "latqmc/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace latqmc {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// In-place iterative radix-2 transform, size must be a power of two.
void radix2(std::vector<std::complex<double>>& a, bool invert) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * kPi / static_cast<double>(len) * (invert ? 1.0 : -1.0);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (invert) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv;
  }
}

}  // namespace

Dft::Dft(std::size_t size) : size_(size), is_pow2_(is_power_of_two(size)), pad_(0) {
  if (size == 0) throw std::invalid_argument("Dft: size must be positive");
  if (is_pow2_) return;
  const std::size_t m = size_;
  pad_ = next_power_of_two(2 * m - 1);
  chirp_.resize(m);
  for (std::size_t t = 0; t < m; ++t) {
    // exp(i pi t^2 / m); t^2 reduced mod 2m keeps the phase argument exact
    const unsigned long long r = (static_cast<unsigned long long>(t) * t) % (2ull * m);
    const double ang = kPi * static_cast<double>(r) / static_cast<double>(m);
    chirp_[t] = std::complex<double>(std::cos(ang), std::sin(ang));
  }
  chirp_fft_.assign(pad_, std::complex<double>(0.0, 0.0));
  chirp_fft_[0] = chirp_[0];
  for (std::size_t t = 1; t < m; ++t) {
    chirp_fft_[t] = chirp_[t];
    chirp_fft_[pad_ - t] = chirp_[t];
  }
  radix2(chirp_fft_, false);
}

void Dft::pow2(std::vector<std::complex<double>>& a, bool invert) const { radix2(a, invert); }

void Dft::bluestein(std::vector<std::complex<double>>& a, bool invert) const {
  const std::size_t m = size_;
  std::vector<std::complex<double>> buf(pad_, std::complex<double>(0.0, 0.0));
  for (std::size_t t = 0; t < m; ++t) {
    const std::complex<double> c = invert ? chirp_[t] : std::conj(chirp_[t]);
    buf[t] = a[t] * c;
  }
  radix2(buf, false);
  if (invert) {
    for (std::size_t i = 0; i < pad_; ++i) buf[i] *= std::conj(chirp_fft_[i]);
  } else {
    for (std::size_t i = 0; i < pad_; ++i) buf[i] *= chirp_fft_[i];
  }
  radix2(buf, true);
  for (std::size_t f = 0; f < m; ++f) {
    const std::complex<double> c = invert ? chirp_[f] : std::conj(chirp_[f]);
    a[f] = buf[f] * c;
  }
  if (invert) {
    const double inv = 1.0 / static_cast<double>(m);
    for (auto& x : a) x *= inv;
  }
}

void Dft::forward(std::vector<std::complex<double>>& a) const {
  if (a.size() != size_) throw std::invalid_argument("Dft::forward: size mismatch");
  if (is_pow2_) {
    pow2(a, false);
  } else {
    bluestein(a, false);
  }
}

void Dft::inverse(std::vector<std::complex<double>>& a) const {
  if (a.size() != size_) throw std::invalid_argument("Dft::inverse: size mismatch");
  if (is_pow2_) {
    pow2(a, true);
  } else {
    bluestein(a, true);
  }
}

CircularCorrelation::CircularCorrelation(const std::vector<double>& kernel)
    : dft_(kernel.size()) {
  kernel_fft_.assign(kernel.begin(), kernel.end());
  dft_.forward(kernel_fft_);
}

void CircularCorrelation::apply(const std::vector<double>& p, std::vector<double>& out) const {
  const std::size_t m = size();
  if (p.size() != m) throw std::invalid_argument("CircularCorrelation: size mismatch");
  std::vector<std::complex<double>> buf(p.begin(), p.end());
  dft_.forward(buf);
  for (std::size_t i = 0; i < m; ++i) buf[i] = kernel_fft_[i] * std::conj(buf[i]);
  dft_.inverse(buf);
  out.resize(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = buf[i].real();
}

}  // namespace latqmc
