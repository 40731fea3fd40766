#ifndef HEUN_FROBENIUS_HPP
#define HEUN_FROBENIUS_HPP

#include <vector>

#include "heun/params.hpp"
#include "heun/types.hpp"

namespace heun {

enum class Branch { first, second };

/// Local Frobenius solution w^sigma * sum c_k w^k in the shifted variable
/// w = (z - location)/scale. Expansions about z=1 and z=a reuse the point-0
/// recurrence of an affinely transformed equation ("local" below); the
/// stored radius is measured in the original z variable.
///
/// Immutable after construction; c_0 = 1 always.
struct FrobeniusSolution {
  EquationParams equation;  // the original equation
  EquationParams local;     // transformed equation whose point-0 series this is
  SingPoint point;
  Branch branch;
  Complex location;
  Complex scale;
  Complex exponent;
  std::vector<Complex> coeffs;
  double radius;
};

struct EvalResult {
  Complex value;
  Complex derivative;  // d/dz
  double est_error;
  int n_terms_used;
};

/// Frobenius series of the general Heun equation about one of {0, 1, a}.
/// branch=first carries the exponent 0, branch=second the exponent 1-gamma'
/// of the locally transformed equation. Throws LogarithmicCase when the
/// requested branch does not exist as a pure power series (integer exponent
/// difference).
///
/// The second solution at z=a has no in-scope consumer yet and should be
/// treated as experimental.
FrobeniusSolution general_series(const HeunParams& params, SingPoint point,
                                 Branch branch, int n);

/// Frobenius series of the confluent Heun equation about 0 or 1.
FrobeniusSolution confluent_series(const ConfluentParams& params, SingPoint point,
                                   Branch branch, int n);

/// Sum the series (and its z-derivative) at z with a geometric tail bound.
/// Requires |z - location| <= 0.9 * radius; beyond that callers must use
/// path continuation.
EvalResult eval_series(const FrobeniusSolution& sol, Complex z, double tol,
                       const Precision& prec = Precision{});

/// Convenience: evaluation packaged as a continuation start state.
StatePair state_at(const FrobeniusSolution& sol, Complex z, double tol,
                   const Precision& prec = Precision{});

namespace detail {

/// Affine changes of variable mapping an expansion point to the origin of a
/// transformed equation of the same class. Returns the transformed
/// parameters and the scale of w = (z - location)/scale.
struct HeunShift {
  HeunParams params;
  Complex scale;
};
struct ConfluentShift {
  ConfluentParams params;
  Complex scale;
};

HeunShift heun_shift_to(const HeunParams& p, SingPoint point);
ConfluentShift confluent_shift_to(const ConfluentParams& p, SingPoint point);

}  // namespace detail

}  // namespace heun

#endif  // HEUN_FROBENIUS_HPP
