#ifndef HEUN_PARAMS_HPP
#define HEUN_PARAMS_HPP

#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "heun/types.hpp"

namespace heun {

/// Fuchs relation for the general Heun equation: the exponent pair at
/// infinity is {alpha, beta} exactly when delta = alpha + beta - gamma -
/// epsilon + 1.
Complex fuchs_delta(Complex alpha, Complex beta, Complex gamma, Complex epsilon);

/// Parameters of the general Heun equation
///
///   y'' + (gamma/z + delta/(z-1) + epsilon/(z-a)) y'
///       + (alpha*beta*z - q) / (z (z-1) (z-a)) y = 0
///
/// with regular singular points at 0, 1, a and infinity. The six free
/// parameters are (a, q, alpha, beta, gamma, epsilon); delta is fixed by the
/// Fuchs relation and stored so downstream code never re-derives it.
struct HeunParams {
  Complex a;
  Complex q;
  Complex alpha;
  Complex beta;
  Complex gamma;
  Complex epsilon;
  Complex delta;  // derived at construction

  HeunParams(Complex a_, Complex q_, Complex alpha_, Complex beta_,
             Complex gamma_, Complex epsilon_);
};

/// Parameters of the confluent Heun equation
///
///   H'' + (alpha + (beta+1)/z + (gamma+1)/(z-1)) H'
///       + (mu/z + nu/(z-1)) H = 0
///
/// with regular singular points at 0 and 1 and an irregular point at
/// infinity. All five parameters are free.
struct ConfluentParams {
  Complex alpha;
  Complex beta;
  Complex gamma;
  Complex mu;
  Complex nu;

  ConfluentParams(Complex alpha_, Complex beta_, Complex gamma_, Complex mu_,
                  Complex nu_);
};

using EquationParams = std::variant<HeunParams, ConfluentParams>;

enum class PointKind { regular, irregular };

/// Labels for the finite singular points an expansion can be anchored at.
enum class SingPoint { zero, one, a_point };

struct SingularityInfo {
  Complex location{};          // meaningless when at_infinity
  bool at_infinity = false;
  PointKind kind = PointKind::regular;
  std::optional<std::pair<Complex, Complex>> exponents;
  /// Exponent pair differs by an integer (logarithmic solutions possible).
  bool degenerate_pair = false;
};

/// Singularity list in the fixed order {0, 1, a, inf} (general) or
/// {0, 1, inf} (confluent), with characteristic exponents at regular points.
std::vector<SingularityInfo> classify_singularities(const HeunParams& p);
std::vector<SingularityInfo> classify_singularities(const ConfluentParams& p);
std::vector<SingularityInfo> classify_singularities(const EquationParams& eq);

/// Coefficient of y' in the normalized equation y'' + p y' + q y = 0.
Complex ode_p(const EquationParams& eq, Complex z);
/// Coefficient of y in the normalized equation y'' + p y' + q y = 0.
Complex ode_q(const EquationParams& eq, Complex z);

std::vector<Complex> finite_singularities(const EquationParams& eq);

/// Minimum pairwise distance between finite singular points.
double min_singularity_gap(const EquationParams& eq);

Complex location_of(const EquationParams& eq, SingPoint point);

/// Distance from a singular point to the nearest other finite singularity
/// (the convergence radius of Frobenius expansions there).
double local_radius(const EquationParams& eq, SingPoint point);

const char* to_string(SingPoint point);

}  // namespace heun

#endif  // HEUN_PARAMS_HPP
