#ifndef HEUN_ORACLES_HPP
#define HEUN_ORACLES_HPP

#include <vector>

#include "heun/params.hpp"
#include "heun/types.hpp"

// Independent verification implementations used by tests, the acceptance
// suite and the hidden CLI diagnostics. Nothing here is called from the
// production evaluation paths, and no numerical kernel is shared with them:
// agreement between the two sides is evidence, not tautology.

namespace heun::oracles {

/// Gauss hypergeometric series sum_k (a)_k (b)_k / ((c)_k k!) z^k for
/// |z| <= 0.75, tail-bounded to 1e-13 relative.
Complex gauss_2f1(Complex a, Complex b, Complex c, Complex z);

/// d/dz of gauss_2f1 via the contiguous relation.
Complex gauss_2f1_deriv(Complex a, Complex b, Complex c, Complex z);

/// State of the hypergeometric ODE z(1-z) y'' + [c - (a+b+1) z] y' - a b y = 0.
struct OdeState {
  Complex z;
  Complex y;
  Complex yp;
};

/// Continue a solution of the hypergeometric ODE along a polyline with an
/// embedded Dormand-Prince 5(4) integrator (oracle-local implementation).
OdeState hyp2f1_ode_run(Complex a, Complex b, Complex c, OdeState start,
                        const std::vector<Complex>& waypoints, double rtol);

/// Quasinormal frequency of the Schwarzschild Regge-Wheeler problem from
/// Leaver's three-term-recurrence continued fraction, with the n-fold
/// inversion for overtone conditioning. Returns omega in units 1/M.
/// Self-validates by a depth-doubling test (<= 1e-8 movement).
Complex leaver_qnm(double M, int ell, int s, int n, int depth = 24000);

/// Scale-free residual |h'' + p h' + q h| / max(|h''|, |p h'|, |q h|) of the
/// governing equation at z. The coefficient functions are implemented here
/// independently of the production ones.
double ode_residual(const EquationParams& eq, Complex z, Complex h, Complex hp,
                    Complex hpp);

}  // namespace heun::oracles

#endif  // HEUN_ORACLES_HPP
