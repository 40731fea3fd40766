#ifndef HEUN_TYPES_HPP
#define HEUN_TYPES_HPP

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace heun {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr Complex kImag{0.0, 1.0};

/// Typed failure modes surfaced by the library. The CLI maps `input` errors
/// to exit code 2 and `numerical` errors to exit code 3.
enum class ErrorKind {
  degenerate_params,
  logarithmic_case,
  outside_disc,
  not_converged,
  singularity_too_close,
  step_limit_exceeded,
  degenerate_basis,
  mismatched_points,
  ill_conditioned_match,
  pole_in_c,
  outside_series_domain,
  at_singularity,
  derivation_inconsistent,
  asymptotic_not_converged,
  numerical_inconsistency,
  invalid_argument,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what_arg)
      : std::runtime_error(what_arg), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  /// True for errors caused by bad inputs rather than numerical failure.
  bool input_error() const {
    switch (kind_) {
      case ErrorKind::degenerate_params:
      case ErrorKind::mismatched_points:
      case ErrorKind::pole_in_c:
      case ErrorKind::outside_series_domain:
      case ErrorKind::outside_disc:
      case ErrorKind::at_singularity:
      case ErrorKind::invalid_argument:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorKind kind_;
};

/// Working-precision knobs threaded through the numeric kernels so that an
/// extended-precision backend can be slotted in without interface changes.
struct Precision {
  double epsilon = std::numeric_limits<double>::epsilon();
  /// Smallest meaningful relative tolerance for adaptive controls.
  double tol_floor = 32.0 * std::numeric_limits<double>::epsilon();

  static Precision binary64() { return Precision{}; }
};

/// Value/derivative pair of a second-order ODE solution at a point.
struct StatePair {
  Complex z;
  Complex h;
  Complex hp;
};

inline double state_norm(const StatePair& s) {
  return std::hypot(std::abs(s.h), std::abs(s.hp));
}

/// Dense 2x2 complex matrix, row major: [a b; c d].
struct Matrix2 {
  Complex a{}, b{}, c{}, d{};

  static Matrix2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

  Complex det() const { return a * d - b * c; }
  Complex trace() const { return a + d; }

  Matrix2 operator*(const Matrix2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d,
            c * o.a + d * o.c, c * o.b + d * o.d};
  }

  Matrix2 operator-(const Matrix2& o) const {
    return {a - o.a, b - o.b, c - o.c, d - o.d};
  }

  Matrix2 inverse() const {
    const Complex dt = det();
    if (std::abs(dt) == 0.0)
      throw Error(ErrorKind::degenerate_basis, "Matrix2::inverse: singular matrix");
    return {d / dt, -b / dt, -c / dt, a / dt};
  }

  /// Eigenvalues from the characteristic polynomial.
  std::array<Complex, 2> eigenvalues() const {
    const Complex half_tr = 0.5 * trace();
    const Complex disc = std::sqrt(half_tr * half_tr - det());
    return {half_tr + disc, half_tr - disc};
  }

  double frobenius_norm() const {
    return std::sqrt(std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d));
  }

  /// Spectral condition number via the closed-form 2x2 singular values.
  double cond2() const {
    const double f2 = std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d);
    const double dt = std::abs(det());
    const double inner = f2 * f2 - 4.0 * dt * dt;
    const double root = std::sqrt(std::max(0.0, inner));
    const double smax2 = 0.5 * (f2 + root);
    const double smin2 = 0.5 * (f2 - root);
    if (smin2 <= 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(smax2 / smin2);
  }
};

inline double matrix_dist(const Matrix2& x, const Matrix2& y) {
  return (x - y).frobenius_norm();
}

/// Kahan-compensated accumulation of complex terms.
class CompensatedSum {
 public:
  void add(Complex term) {
    const Complex y = term - comp_;
    const Complex t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  Complex value() const { return sum_; }

 private:
  Complex sum_{};
  Complex comp_{};
};

}  // namespace heun

#endif  // HEUN_TYPES_HPP
