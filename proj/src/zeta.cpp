#include "latqmc/zeta.hpp"

#include <cmath>
#include <stdexcept>

namespace latqmc {

double riemann_zeta(double x) {
  if (!(x > 1.0)) {
    throw std::invalid_argument("riemann_zeta: argument must be > 1");
  }
  // B_{2i} for i = 1..7
  static constexpr double kBernoulli[] = {
      1.0 / 6.0,   -1.0 / 30.0,    1.0 / 42.0,  -1.0 / 30.0,
      5.0 / 66.0,  -691.0 / 2730.0, 7.0 / 6.0,
  };
  const int n = 48;
  double sum = 0.0;
  for (int k = n; k >= 1; --k) {  // ascending magnitude
    sum += std::pow(static_cast<double>(k), -x);
  }
  sum += std::pow(static_cast<double>(n), 1.0 - x) / (x - 1.0);
  sum -= 0.5 * std::pow(static_cast<double>(n), -x);
  // correction terms B_{2i}/(2i)! * x(x+1)...(x+2i-2) * n^{-x-2i+1}
  double poly = x;                 // rising product
  double fact = 2.0;               // (2i)!
  double npow = std::pow(static_cast<double>(n), -x - 1.0);
  for (int i = 1; i <= 7; ++i) {
    sum += kBernoulli[i - 1] / fact * poly * npow;
    // advance to i+1
    poly *= (x + 2.0 * i - 1.0) * (x + 2.0 * i);
    fact *= (2.0 * i + 1.0) * (2.0 * i + 2.0);
    npow /= static_cast<double>(n) * static_cast<double>(n);
  }
  return sum;
}

}  // namespace latqmc
