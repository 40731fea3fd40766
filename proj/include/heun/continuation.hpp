#ifndef HEUN_CONTINUATION_HPP
#define HEUN_CONTINUATION_HPP

#include <vector>

#include "heun/frobenius.hpp"
#include "heun/params.hpp"
#include "heun/types.hpp"

namespace heun {

/// Options for the path integrator.
struct ContinuationOptions {
  long max_steps = 1'000'000;  // hard cap per path (CLI: HEUN_MAX_STEPS)
};

/// A polyline in the cut complex plane. The path *is* the branch
/// specification: two homotopy-inequivalent paths between the same endpoints
/// may legitimately yield different values. Construction validates that no
/// segment passes within `clearance` of a finite singularity of the
/// governing equation. Zero-length segments are permitted (and skipped) so
/// that the degenerate closed loop {p, p} is expressible.
class ContinuationPath {
 public:
  ContinuationPath(const EquationParams& eq, std::vector<Complex> waypoints,
                   double clearance);

  const std::vector<Complex>& waypoints() const { return waypoints_; }
  double clearance() const { return clearance_; }
  Complex front() const { return waypoints_.front(); }
  Complex back() const { return waypoints_.back(); }
  bool closed() const;
  double length() const;

  ContinuationPath reversed(const EquationParams& eq) const;
  /// Path truncated at the given waypoint index (inclusive).
  ContinuationPath truncated(const EquationParams& eq, std::size_t last) const;

 private:
  std::vector<Complex> waypoints_;
  double clearance_;
};

/// Straight segment from `from` to `to` with automatic circular detours of
/// radius max(clearance, 0.05 * min singularity gap) around any finite
/// singularity that comes within that radius of the segment. Detours go
/// through the upper half-plane by convention, so the branch choice is
/// deterministic and documented.
ContinuationPath default_path(const EquationParams& eq, Complex from, Complex to,
                              double clearance = 0.0);

/// Circular loop of the given radius around `center`, entered at
/// center + radius (or at the given phase), as a closed 24-gon.
ContinuationPath circular_loop(const EquationParams& eq, Complex center,
                               double radius, double start_phase = 0.0);

struct ContinuationResult {
  StatePair state;
  double est_error;  // accumulated local-error estimate (diagnostics)
  long steps;
};

/// Integrate the first-order system (h, h') of the governing equation along
/// the path with an embedded Runge-Kutta 7(8) pair, local error per step
/// controlled so the whole-path error tracks `tol`.
ContinuationResult continue_along_path(const EquationParams& eq,
                                       const StatePair& start,
                                       const ContinuationPath& path, double tol,
                                       const ContinuationOptions& opts = {},
                                       const Precision& prec = Precision{});

/// Path integral of the first-derivative coefficient p(z) along the
/// polyline (adaptive Simpson). Used for Abel-identity transport checks.
Complex path_integral_p(const EquationParams& eq, const ContinuationPath& path,
                        double tol = 1e-12);

struct MonodromyResult {
  Matrix2 matrix;
  double est_error;
  /// |det M - exp(-loop integral of p)| relative defect (Abel's identity).
  double abel_defect;
};

/// Monodromy matrix of a basis of two Frobenius solutions at the loop's base
/// point: continuing the basis row (y1, y2) around the loop yields
/// (y1, y2) * M. Internal consistency against Abel's identity is checked and
/// reported; a gross violation throws.
MonodromyResult monodromy_matrix(const EquationParams& eq,
                                 const FrobeniusSolution& basis1,
                                 const FrobeniusSolution& basis2,
                                 const ContinuationPath& loop, double tol,
                                 const ContinuationOptions& opts = {});

}  // namespace heun

#endif  // HEUN_CONTINUATION_HPP
