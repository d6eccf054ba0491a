#pragma once

namespace latqmc {

// Standard normal density.
double normal_pdf(double x);

// Standard normal CDF via erfc; accurate into the far tails.
double normal_cdf(double x);

// Inverse standard normal CDF on (0,1). Rational initial approximation
// refined by one Halley step against the erfc-based CDF; absolute error
// below 1e-9 (in practice ~1e-15 away from the extreme tails).
// Throws std::domain_error for v outside (0,1).
double inverse_normal_cdf(double v);

}  // namespace latqmc
