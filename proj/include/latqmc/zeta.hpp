#pragma once

namespace latqmc {

// Riemann zeta on (1, inf), Euler-Maclaurin summation.
// Relative accuracy better than 1e-12 for x >= 1.01; the argument range
// used by the weight machinery is x = lambda + 1/2 in (1, 1.5].
double riemann_zeta(double x);

}  // namespace latqmc
