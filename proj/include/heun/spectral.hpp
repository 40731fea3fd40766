#ifndef HEUN_SPECTRAL_HPP
#define HEUN_SPECTRAL_HPP

#include <optional>
#include <vector>

#include "heun/continuation.hpp"
#include "heun/params.hpp"
#include "heun/types.hpp"

namespace heun {

/// Regge-Wheeler spectral problem for a Schwarzschild-exterior compact
/// object (geometric units G = c = 1). rho is the surface reflection
/// coefficient: 0 reproduces the black-hole horizon condition; otherwise the
/// inner boundary mixes in rho times the outgoing branch at r_surface.
struct RWProblem {
  double M;
  int ell;
  int s;
  Complex rho;
  /// Surface radius (> 2M) for rho != 0; empty means horizon condition.
  std::optional<double> r_surface;

  RWProblem(double M_, int ell_, int s_, Complex rho_ = 0.0,
            std::optional<double> r_surface_ = std::nullopt);
};

/// A located eigenfrequency, in units 1/M.
struct Mode {
  Complex omega;
  int overtone_hint;
  double residual;
  int newton_steps;
};

/// Formal (Thome) solution of the confluent Heun equation at the irregular
/// point: prefactor z^power (kind=power_series) or e^{-alpha z} z^power
/// (kind=exponential); the coefficient series is asymptotic and divergent,
/// truncated at its smallest term when evaluated.
struct ThomeExpansion {
  enum class Kind { power_series, exponential };
  Kind kind;
  Complex power;      // exponent of z in the prefactor
  Complex exp_coeff;  // coefficient of z in the exponential (0 or -alpha)
  std::vector<Complex> coeffs;  // c_0 = 1
};

ThomeExpansion thome_expansion(const ConfluentParams& params,
                               ThomeExpansion::Kind kind, int k_cap = 60);

/// Truncated-at-smallest-term evaluation. est_rel_error is the magnitude of
/// the smallest retained term relative to the sum.
struct ThomeEval {
  StatePair state;
  double est_rel_error;
  int k_used;
};

ThomeEval eval_thome(const ThomeExpansion& exp, Complex z);

/// Record of the transformation Psi = z^sigma0 (z-1)^sigma1 e^{kappa z} H(z),
/// z = r/(2M), taking the Regge-Wheeler equation into the confluent Heun
/// form for H. Omega = 2 M omega is the dimensionless frequency; everything
/// downstream depends on omega and M only through it.
struct RWTransform {
  ConfluentParams params;
  Complex Omega;
  Complex sigma0;
  Complex sigma1;  // horizon exponent (-i Omega: ingoing)
  Complex kappa;   // +i Omega: outgoing carried by the prefactor
};

/// Parameter map RW -> confluent Heun. The horizon branch H analytic at z=1
/// corresponds to the ingoing wave; the branch (z-1)^{-gamma} to the
/// outgoing one. Throws DerivationInconsistent if the residual self-check
/// fails (test builds check 20 random points per call).
RWTransform rw_to_confluent(const RWProblem& prob, Complex omega);

/// Residual of the Regge-Wheeler equation (in z = r/(2M)) for a putative
/// confluent-Heun solution triple (H, H', H'') pushed through the
/// transformation. Used to gate the derived parameter map.
double rw_transform_residual(const RWProblem& prob, Complex omega, Complex z,
                             Complex H, Complex Hp, Complex Hpp);

enum class BoundaryKind {
  ingoing_horizon,     // Frobenius branch analytic at z=1 (rho = 0)
  mixed_rho,           // ingoing + rho * outgoing at the surface point
  outgoing_infinity,   // power-series Thome branch (pure outgoing Psi)
  recessive_infinity,  // whichever Thome branch decays along Re(alpha z) > 0
  dominant_infinity,
};

struct SpectralOptions {
  double z_match = 5.0;       // matching point (r = 10M by default)
  double r_seed_min = 10.0;   // initial Thome seeding distance |z - z_match|
  double r_seed_max = 50.0;   // geometric R ladder cap
  int k_cap = 60;             // Thome truncation hard cap
  double tol_asym = 1e-12;    // smallest-term target for Thome seeding
  double continuation_tol = 1e-12;
  /// Frozen Thome seeding distance; set by find_modes/winding scans so the
  /// determinant stays smooth in omega.
  std::optional<double> frozen_ray = std::nullopt;
  ContinuationOptions continuation = {};
};

struct BoundaryState {
  StatePair state;  // at z_match
  double est_error;
  double ray_length;  // Thome seeding distance used (0 for inner boundary)
  int k_used;
};

/// Solution state at the matching point implementing one boundary
/// condition. The infinity conditions seed a truncated Thome series on the
/// anti-Stokes ray from z_match (where the two exponential behaviors are
/// neutral) and integrate in; the inner conditions seed Frobenius branches
/// at the horizon (or mix them at the surface point) and integrate out.
BoundaryState boundary_solution(const RWTransform& t, BoundaryKind kind,
                                Complex rho, std::optional<double> z_surface,
                                const SpectralOptions& opts = {});

struct DetValue {
  Complex value;
  double est_error;
};

/// Scale-free matching determinant: the Wronskian at z_match of the
/// inner-boundary and infinity-boundary solutions, normalized by the product
/// of the state magnitudes. Zero exactly when the two boundary conditions
/// admit a common solution.
DetValue matching_determinant(const RWProblem& prob, Complex omega, double tol,
                              const SpectralOptions& opts = {});

struct Region {
  double re_min, re_max, im_min, im_max;
};

struct GridSample {
  Complex omega;
  double abs_det;
};

struct FindModesResult {
  std::vector<Mode> modes;
  std::vector<GridSample> grid;  // scan samples (heatmap data)
  int n_seeds = 0;
  int n_dropped = 0;
  int winding = -1;  // filled when audit requested
};

/// Scan |D| on a grid over the region, refine each grid-local minimum by
/// Newton (derivative by central difference, step 1e-7 |omega|) with an
/// automatic secant fallback when the numerical gradient is noisy, dedupe
/// at 1e-6, and return modes sorted by |Im omega|.
FindModesResult find_modes(const RWProblem& prob, const Region& region,
                           int grid_nx, int grid_ny, double tol,
                           const SpectralOptions& opts = {},
                           bool argument_audit = false);

/// Winding number of the matching determinant around the region boundary
/// (argument-principle audit of mode counts).
int winding_number(const RWProblem& prob, const Region& region,
                   const SpectralOptions& opts = {});

}  // namespace heun

#endif  // HEUN_SPECTRAL_HPP
