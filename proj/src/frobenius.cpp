#include "heun/frobenius.hpp"

#include <algorithm>
#include <cmath>

namespace heun {

namespace detail {

HeunShift heun_shift_to(const HeunParams& p, SingPoint point) {
  switch (point) {
    case SingPoint::zero:
      return {p, Complex(1.0)};
    case SingPoint::one:
      // w = 1 - z swaps 0 <-> 1 and sends a to 1 - a.
      return {HeunParams(1.0 - p.a, p.alpha * p.beta - p.q, p.alpha, p.beta,
                         p.delta, p.epsilon),
              Complex(-1.0)};
    case SingPoint::a_point: {
      // w = (z - a)/(1 - a) sends a -> 0, 1 -> 1, 0 -> a/(a-1).
      const Complex am1 = p.a - 1.0;
      return {HeunParams(p.a / am1, (p.a * p.alpha * p.beta - p.q) / am1,
                         p.alpha, p.beta, p.epsilon, p.gamma),
              1.0 - p.a};
    }
  }
  throw Error(ErrorKind::invalid_argument, "heun_shift_to: bad point");
}

ConfluentShift confluent_shift_to(const ConfluentParams& p, SingPoint point) {
  switch (point) {
    case SingPoint::zero:
      return {p, Complex(1.0)};
    case SingPoint::one:
      // w = 1 - z swaps the regular points and flips the exponential slope.
      return {ConfluentParams(-p.alpha, p.gamma, p.beta, -p.nu, -p.mu),
              Complex(-1.0)};
    case SingPoint::a_point:
      throw Error(ErrorKind::invalid_argument,
                  "confluent_shift_to: confluent equation has no point a");
  }
  throw Error(ErrorKind::invalid_argument, "confluent_shift_to: bad point");
}

namespace {

bool near_integer(Complex v, double tol = 1e-12) {
  return std::abs(v.imag()) <= tol &&
         std::abs(v.real() - std::round(v.real())) <= tol;
}

// Coefficients of the point-0 Frobenius series of the general Heun equation,
// from the three-term recurrence A_m c_m + B_m c_{m-1} + C_m c_{m-2} = 0 with
//   A_m = a (m+s)(m+s-1+gamma)
//   B_m = -[(a+1)(m-1+s)(m-2+s) + (gamma(a+1) + delta a + epsilon)(m-1+s) + q]
//   C_m = (m-2+s)(m-3+s) + (gamma+delta+epsilon)(m-2+s) + alpha beta
// obtained by inserting z^s sum c_k z^k into
// z(z-1)(z-a) y'' + [gamma(z-1)(z-a) + delta z(z-a) + epsilon z(z-1)] y'
//                + (alpha beta z - q) y = 0.
std::vector<Complex> heun_coeffs(const HeunParams& p, Complex sigma, int n) {
  std::vector<Complex> c(static_cast<std::size_t>(n) + 1);
  c[0] = 1.0;
  const Complex qsum = p.gamma * (p.a + 1.0) + p.delta * p.a + p.epsilon;
  const Complex psum = p.gamma + p.delta + p.epsilon;
  for (int m = 1; m <= n; ++m) {
    const Complex ms = Complex(m) + sigma;
    const Complex A = p.a * ms * (ms - 1.0 + p.gamma);
    if (std::abs(A) < 1e-14 * (1.0 + std::abs(p.a) * m * m))
      throw Error(ErrorKind::logarithmic_case,
                  "general_series: recurrence pivot vanished (integer exponent "
                  "difference); logarithmic solutions are out of scope");
    const Complex B = -((p.a + 1.0) * (ms - 1.0) * (ms - 2.0) +
                        qsum * (ms - 1.0) + p.q);
    const Complex C =
        (ms - 2.0) * (ms - 3.0) + psum * (ms - 2.0) + p.alpha * p.beta;
    Complex acc = -B * c[m - 1];
    if (m >= 2) acc -= C * c[m - 2];
    c[m] = acc / A;
  }
  return c;
}

// Point-0 Frobenius coefficients of the confluent Heun equation, from
//   (m+s)(m+s+beta) c_m = [(m-1+s)(m-2+s) + (beta+gamma+2-alpha)(m-1+s) - mu] c_{m-1}
//                         + [alpha(m-2+s) + mu + nu] c_{m-2}
// obtained by inserting z^s sum c_k z^k into
// z(z-1) H'' + [alpha z(z-1) + (beta+1)(z-1) + (gamma+1) z] H' + [(mu+nu) z - mu] H = 0.
std::vector<Complex> confluent_coeffs(const ConfluentParams& p, Complex sigma,
                                      int n) {
  std::vector<Complex> c(static_cast<std::size_t>(n) + 1);
  c[0] = 1.0;
  const Complex bg = p.beta + p.gamma + 2.0 - p.alpha;
  for (int m = 1; m <= n; ++m) {
    const Complex ms = Complex(m) + sigma;
    const Complex A = ms * (ms + p.beta);
    if (std::abs(A) < 1e-14 * (1.0 + double(m) * m))
      throw Error(ErrorKind::logarithmic_case,
                  "confluent_series: recurrence pivot vanished (integer "
                  "exponent difference); logarithmic solutions are out of scope");
    Complex acc = ((ms - 1.0) * (ms - 2.0) + bg * (ms - 1.0) - p.mu) * c[m - 1];
    if (m >= 2) acc += (p.alpha * (ms - 2.0) + p.mu + p.nu) * c[m - 2];
    c[m] = acc / A;
  }
  return c;
}

}  // namespace

}  // namespace detail

FrobeniusSolution general_series(const HeunParams& params, SingPoint point,
                                 Branch branch, int n) {
  if (n < 2)
    throw Error(ErrorKind::invalid_argument, "general_series: n must be >= 2");
  const auto shift = detail::heun_shift_to(params, point);
  const Complex second_exp = 1.0 - shift.params.gamma;
  if (branch == Branch::second && detail::near_integer(second_exp))
    throw Error(ErrorKind::logarithmic_case,
                "general_series: integer exponent difference at " +
                    std::string(to_string(point)) +
                    "; the second solution is logarithmic");
  const Complex sigma = branch == Branch::first ? Complex(0.0) : second_exp;

  FrobeniusSolution sol{params,
                        shift.params,
                        point,
                        branch,
                        location_of(EquationParams(params), point),
                        shift.scale,
                        sigma,
                        detail::heun_coeffs(shift.params, sigma, n),
                        local_radius(EquationParams(params), point)};
  return sol;
}

FrobeniusSolution confluent_series(const ConfluentParams& params, SingPoint point,
                                   Branch branch, int n) {
  if (n < 2)
    throw Error(ErrorKind::invalid_argument, "confluent_series: n must be >= 2");
  if (point == SingPoint::a_point)
    throw Error(ErrorKind::invalid_argument,
                "confluent_series: valid points are 0 and 1");
  const auto shift = detail::confluent_shift_to(params, point);
  const Complex second_exp = -shift.params.beta;
  if (branch == Branch::second && detail::near_integer(second_exp))
    throw Error(ErrorKind::logarithmic_case,
                "confluent_series: integer exponent difference at " +
                    std::string(to_string(point)) +
                    "; the second solution is logarithmic");
  const Complex sigma = branch == Branch::first ? Complex(0.0) : second_exp;

  FrobeniusSolution sol{EquationParams(params),
                        EquationParams(shift.params),
                        point,
                        branch,
                        location_of(EquationParams(params), point),
                        shift.scale,
                        sigma,
                        detail::confluent_coeffs(shift.params, sigma, n),
                        local_radius(EquationParams(params), point)};
  return sol;
}

EvalResult eval_series(const FrobeniusSolution& sol, Complex z, double tol,
                       const Precision& prec) {
  const double dist = std::abs(z - sol.location);
  if (dist > 0.9 * sol.radius + 1e-15)
    throw Error(ErrorKind::outside_disc,
                "eval_series: point outside 0.9*radius of the expansion disc; "
                "use continuation");
  tol = std::max(tol, prec.tol_floor);

  const Complex w = (z - sol.location) / sol.scale;
  const double aw = std::abs(w);

  // Series center: the sum collapses to c_0 (and c_1 for the derivative).
  if (aw == 0.0) {
    if (sol.exponent == Complex(0.0)) {
      return {sol.coeffs[0], sol.coeffs[1] / sol.scale, 0.0, 2};
    }
    if (sol.exponent == Complex(1.0))
      return {0.0, sol.coeffs[0] / sol.scale, 0.0, 1};
    if (sol.exponent.real() > 1.0) return {0.0, 0.0, 0.0, 1};
    throw Error(ErrorKind::at_singularity,
                "eval_series: branch value or derivative diverges at the "
                "expansion point");
  }

  // Partial sums of S(w) and S'(w) with a geometric tail bound: once the term
  // ratio stabilizes below 1, the remainder is bounded by a geometric series
  // with the observed ratio inflated by 1.25.
  CompensatedSum s, sp;
  const int n = static_cast<int>(sol.coeffs.size()) - 1;
  Complex wk = 1.0;  // w^k
  double tail_s = std::numeric_limits<double>::infinity();
  double tail_sp = std::numeric_limits<double>::infinity();
  double prev_terms[3] = {0.0, 0.0, 0.0};
  int used = n;
  bool converged = false;

  for (int k = 0; k <= n; ++k) {
    const Complex term = sol.coeffs[static_cast<std::size_t>(k)] * wk;
    s.add(term);
    if (k >= 1) sp.add(Complex(k) * term / w);
    wk *= w;

    const double at = std::abs(term);
    prev_terms[k % 3] = at;
    if (k >= 8) {
      const double t0 = prev_terms[k % 3], t1 = prev_terms[(k - 1) % 3],
                   t2 = prev_terms[(k - 2) % 3];
      // A vanished tail (terminating series) converges with zero bound.
      const double floor_mag =
          prec.epsilon * (std::abs(s.value()) + 1e-300);
      if (t0 <= floor_mag && t1 <= floor_mag && t2 <= floor_mag) {
        tail_s = tail_sp = 0.0;
        used = k + 1;
        converged = true;
        break;
      }
      if (t1 > 0.0 && t2 > 0.0) {
        const double ratio = std::max(t0 / t1, t1 / t2);
        // 0.9*radius cap keeps the observed ratio near (and below) 0.9, so
        // the geometric remainder, inflated 1.25x, is an honest bound.
        if (ratio < 0.97) {
          tail_s = 1.25 * at * ratio / (1.0 - ratio);
          tail_sp = tail_s * (k + 1.0 / (1.0 - ratio)) / aw;
          const double mag = std::abs(s.value()) + 1e-300;
          const double mag_p = std::abs(sp.value()) + mag / aw;
          if (tail_s <= tol * mag && tail_sp <= tol * mag_p) {
            used = k + 1;
            converged = true;
            break;
          }
        }
      }
    }
  }
  if (!converged)
    throw Error(ErrorKind::not_converged,
                "eval_series: tail bound not reached within available "
                "coefficients; request a longer series");

  const Complex wsig =
      sol.exponent == Complex(0.0) ? Complex(1.0) : std::pow(w, sol.exponent);
  const Complex value = wsig * s.value();
  const Complex dvalue =
      (sol.exponent * wsig / w * s.value() + wsig * sp.value()) / sol.scale;

  const double est = std::abs(wsig) * tail_s;
  return {value, dvalue, est, used};
}

StatePair state_at(const FrobeniusSolution& sol, Complex z, double tol,
                   const Precision& prec) {
  const EvalResult r = eval_series(sol, z, tol, prec);
  return {z, r.value, r.derivative};
}

}  // namespace heun
