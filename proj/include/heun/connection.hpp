#ifndef HEUN_CONNECTION_HPP
#define HEUN_CONNECTION_HPP

#include <optional>

#include "heun/continuation.hpp"
#include "heun/frobenius.hpp"
#include "heun/params.hpp"

namespace heun {

/// Wronskian s1.h * s2.hp - s2.h * s1.hp of two states at the same point.
Complex wronskian(const EquationParams& eq, const StatePair& s1,
                  const StatePair& s2);

/// Numerical two-point connection matrix: basis_from = basis_to * C at the
/// matching point, where each basis consists of the two Frobenius branches
/// (c_0 = 1) at its singular point. The matrix is meaningless without its
/// path — branch dependence is explicit by design — so the path is embedded.
struct ConnectionMatrix {
  SingPoint from;
  SingPoint to;
  Matrix2 matrix;
  ContinuationPath path;
  double est_error;
  // Diagnostics: where the bases were matched, and both basis matrices
  // (columns are (value, derivative) of each branch) at that point.
  Complex matching_point;
  Matrix2 basis_from_at_match;
  Matrix2 basis_to_at_match;
};

/// Connect the Frobenius bases at two singular points along `path`, which
/// must run from 0.5*radius(from) to 0.5*radius(to). The matching point is
/// the midpoint of the two convergence discs' overlap along the path (never
/// closer than 0.3*radius to either point); if the discs do not overlap
/// along the path, the matching happens at the path end.
ConnectionMatrix connection_matrix(const EquationParams& eq, SingPoint from,
                                   SingPoint to, const ContinuationPath& path,
                                   double tol,
                                   const ContinuationOptions& opts = {});

/// Same, along the default (detoured straight) path between the seeds.
ConnectionMatrix connection_matrix(const EquationParams& eq, SingPoint from,
                                   SingPoint to, double tol,
                                   const ContinuationOptions& opts = {});

/// Building block used by connection_matrix and by linearity tests: continue
/// two seed states along the path and express them in the `to` basis at the
/// matching point.
ConnectionMatrix connection_from_seeds(const EquationParams& eq, SingPoint from,
                                       SingPoint to, const StatePair& seed1,
                                       const StatePair& seed2,
                                       const ContinuationPath& path, double tol,
                                       const ContinuationOptions& opts = {});

}  // namespace heun

#endif  // HEUN_CONNECTION_HPP
