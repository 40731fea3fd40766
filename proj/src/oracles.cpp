#include "heun/oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace heun::oracles {

namespace {

bool nonpositive_integer(Complex c) {
  return std::abs(c.imag()) <= 1e-12 &&
         std::abs(c.real() - std::round(c.real())) <= 1e-12 &&
         std::round(c.real()) <= 0.0;
}

}  // namespace

Complex gauss_2f1(Complex a, Complex b, Complex c, Complex z) {
  if (nonpositive_integer(c))
    throw Error(ErrorKind::pole_in_c,
                "gauss_2f1: c is a non-positive integer (Gamma pole)");
  if (std::abs(z) > 0.75)
    throw Error(ErrorKind::outside_series_domain,
                "gauss_2f1: series mode requires |z| <= 0.75");

  Complex term = 1.0;
  Complex sum = 1.0;
  for (int k = 0; k < 4000; ++k) {
    term *= (a + Complex(k)) * (b + Complex(k)) /
            ((c + Complex(k)) * Complex(k + 1)) * z;
    sum += term;
    // |z| <= 0.75 makes the eventual term ratio <= 0.75 + o(1); bound the
    // tail by a geometric series with ratio 0.85 once k dominates a, b, c.
    const double kdom = 8.0 + std::abs(a) + std::abs(b) + std::abs(c);
    if (k > kdom) {
      const double tail = std::abs(term) * 0.85 / 0.15;
      if (tail <= 1e-13 * (std::abs(sum) + 1e-300)) return sum;
    }
  }
  throw Error(ErrorKind::not_converged, "gauss_2f1: series did not converge");
}

Complex gauss_2f1_deriv(Complex a, Complex b, Complex c, Complex z) {
  return a * b / c * gauss_2f1(a + 1.0, b + 1.0, c + 1.0, z);
}

namespace {

// Dormand-Prince 5(4) on the first-order system for the hypergeometric ODE.
// Deliberately a different method (and code path) from the production
// integrator so that agreement between the two is meaningful.
struct Vec2 {
  Complex y, yp;
};

Vec2 hyp_rhs(Complex a, Complex b, Complex c, Complex z, const Vec2& u) {
  const Complex ypp =
      (((a + b + 1.0) * z - c) * u.yp + a * b * u.y) / (z * (1.0 - z));
  return {u.yp, ypp};
}

OdeState dp45_segment(Complex a, Complex b, Complex c, OdeState s, Complex z1,
                      double rtol) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                          e3 = 500.0 / 1113 - 7571.0 / 16695,
                          e4 = 125.0 / 192 - 393.0 / 640,
                          e5 = -2187.0 / 6784 + 92097.0 / 339200,
                          e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  const Complex dz = z1 - s.z;
  const double len = std::abs(dz);
  if (len == 0.0) return s;
  const Complex dir = dz / len;

  double t = 0.0;
  double h = len / 16.0;
  Vec2 u{s.y, s.yp};
  Complex z = s.z;
  long steps = 0;

  while (t < len) {
    h = std::min(h, len - t);
    const auto f = [&](double dt, const Vec2& v) {
      const Vec2 g = hyp_rhs(a, b, c, z + dir * dt, v);
      return Vec2{g.y * dir, g.yp * dir};
    };
    const Vec2 k1 = f(0.0, u);
    const Vec2 k2 = f(c2 * h, {u.y + h * a21 * k1.y, u.yp + h * a21 * k1.yp});
    const Vec2 k3 = f(c3 * h, {u.y + h * (a31 * k1.y + a32 * k2.y),
                               u.yp + h * (a31 * k1.yp + a32 * k2.yp)});
    const Vec2 k4 =
        f(c4 * h, {u.y + h * (a41 * k1.y + a42 * k2.y + a43 * k3.y),
                   u.yp + h * (a41 * k1.yp + a42 * k2.yp + a43 * k3.yp)});
    const Vec2 k5 = f(
        c5 * h,
        {u.y + h * (a51 * k1.y + a52 * k2.y + a53 * k3.y + a54 * k4.y),
         u.yp + h * (a51 * k1.yp + a52 * k2.yp + a53 * k3.yp + a54 * k4.yp)});
    const Vec2 k6 =
        f(h, {u.y + h * (a61 * k1.y + a62 * k2.y + a63 * k3.y + a64 * k4.y +
                         a65 * k5.y),
              u.yp + h * (a61 * k1.yp + a62 * k2.yp + a63 * k3.yp +
                          a64 * k4.yp + a65 * k5.yp)});
    const Vec2 u5{
        u.y + h * (b1 * k1.y + b3 * k3.y + b4 * k4.y + b5 * k5.y + b6 * k6.y),
        u.yp +
            h * (b1 * k1.yp + b3 * k3.yp + b4 * k4.yp + b5 * k5.yp + b6 * k6.yp)};
    const Vec2 k7 = f(h, u5);
    const Complex err_y = h * (e1 * k1.y + e3 * k3.y + e4 * k4.y + e5 * k5.y +
                               e6 * k6.y + e7 * k7.y);
    const Complex err_yp = h * (e1 * k1.yp + e3 * k3.yp + e4 * k4.yp +
                                e5 * k5.yp + e6 * k6.yp + e7 * k7.yp);
    const double sc_y = 1e-300 + rtol * std::max(std::abs(u.y), std::abs(u5.y));
    const double sc_yp =
        1e-300 + rtol * std::max(std::abs(u.yp), std::abs(u5.yp));
    const double err =
        std::max(std::abs(err_y) / sc_y, std::abs(err_yp) / sc_yp);

    if (err <= 1.0) {
      t += h;
      z += dir * h;
      u = u5;
    }
    const double fac =
        std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
    h *= fac;
    if (++steps > 2000000)
      throw Error(ErrorKind::step_limit_exceeded,
                  "hyp2f1_ode_run: step limit exceeded");
  }
  return {z, u.y, u.yp};
}

}  // namespace

OdeState hyp2f1_ode_run(Complex a, Complex b, Complex c, OdeState start,
                        const std::vector<Complex>& waypoints, double rtol) {
  if (waypoints.empty() || std::abs(waypoints.front() - start.z) > 1e-12)
    throw Error(ErrorKind::invalid_argument,
                "hyp2f1_ode_run: path must start at the initial state");
  OdeState s = start;
  for (std::size_t i = 1; i < waypoints.size(); ++i)
    s = dp45_segment(a, b, c, s, waypoints[i], rtol);
  return s;
}

namespace {

// Leaver's continued fraction for Schwarzschild quasinormal modes, in the
// dimensionless frequency W = 2 M omega. Derived from the series
//   psi = e^{iW(z-1)} (z-1)^{-iW} z^{2iW} sum_k a_k ((z-1)/z)^k,  z = r/(2M),
// whose coefficients obey alpha_k a_{k+1} + beta_k a_k + gamma_k a_{k-1} = 0.
struct LeaverCoeffs {
  Complex alpha, beta, gamma;
};

LeaverCoeffs leaver_coeffs(int k, Complex W, int ell, int s) {
  const double L = double(ell) * (ell + 1);
  const Complex iW = kImag * W;
  const Complex kk{double(k), 0.0};
  return {
      (kk + 1.0) * (kk + 1.0 - 2.0 * iW),
      -2.0 * kk * kk + (8.0 * iW - 2.0) * kk + 8.0 * W * W + 4.0 * iW - L -
          1.0 + double(s) * s,
      (kk - 2.0 * iW) * (kk - 2.0 * iW) - double(s) * s,
  };
}

// Value of the continued fraction inverted n times:
//   F_n = beta_n - alpha_{n-1} gamma_n / (beta_{n-1} - ...)   (finite part)
//             - alpha_n gamma_{n+1} / (beta_{n+1} - ...)      (infinite part)
Complex leaver_cf(Complex W, int ell, int s, int n, int depth) {
  // tail = T_n with T_k = alpha_k gamma_{k+1} / (beta_{k+1} - T_{k+1}).
  Complex tail = 0.0;
  for (int k = n + depth; k >= n; --k) {
    const auto ck = leaver_coeffs(k, W, ell, s);
    const auto ck1 = leaver_coeffs(k + 1, W, ell, s);
    tail = ck.alpha * ck1.gamma / (ck1.beta - tail);
  }
  Complex head = 0.0;
  if (n > 0) {
    Complex t = leaver_coeffs(0, W, ell, s).beta;
    for (int k = 1; k < n; ++k) {
      const auto ck = leaver_coeffs(k, W, ell, s);
      const auto ckm = leaver_coeffs(k - 1, W, ell, s);
      t = ck.beta - ckm.alpha * ck.gamma / t;
    }
    head = leaver_coeffs(n - 1, W, ell, s).alpha *
           leaver_coeffs(n, W, ell, s).gamma / t;
  }
  return leaver_coeffs(n, W, ell, s).beta - head - tail;
}

Complex leaver_polish(Complex W0, int ell, int s, int n, int depth,
                      bool* converged) {
  Complex W = W0;
  *converged = false;
  for (int it = 0; it < 80; ++it) {
    const double h = 1e-7 * std::max(1.0, std::abs(W));
    const Complex f = leaver_cf(W, ell, s, n, depth);
    const Complex fp = (leaver_cf(W + h, ell, s, n, depth) -
                        leaver_cf(W - h, ell, s, n, depth)) /
                       (2.0 * h);
    if (std::abs(fp) == 0.0) break;
    const Complex step = f / fp;
    W -= step;
    if (std::abs(step) <= 1e-13 * std::max(1.0, std::abs(W))) {
      *converged = true;
      break;
    }
    if (!std::isfinite(W.real()) || !std::isfinite(W.imag())) break;
  }
  return W;
}

std::vector<Complex> leaver_roots_in_box(int ell, int s, int n, int depth) {
  // Coarse |CF| scan over the region holding the first few overtones,
  // followed by Newton polish of the local minima. No literature values are
  // consumed here; the spectrum emerges from the continued fraction alone.
  const int nx = 36, ny = 36;
  const double re0 = 0.15, re1 = 2.6, im0 = -2.4, im1 = -0.02;
  std::vector<double> mag(static_cast<std::size_t>(nx) * ny);
  auto at = [&](int i, int j) -> double& {
    return mag[static_cast<std::size_t>(j) * nx + i];
  };
  const int scan_depth = std::min(depth, 4000);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Complex W(re0 + (re1 - re0) * i / (nx - 1.0),
                      im0 + (im1 - im0) * j / (ny - 1.0));
      at(i, j) = std::abs(leaver_cf(W, ell, s, n, scan_depth));
    }

  std::vector<Complex> roots;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      bool is_min = true;
      for (int dj = -1; dj <= 1 && is_min; ++dj)
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0) continue;
          const int ii = i + di, jj = j + dj;
          if (ii < 0 || jj < 0 || ii >= nx || jj >= ny) continue;
          if (at(ii, jj) < at(i, j)) {
            is_min = false;
            break;
          }
        }
      if (!is_min) continue;
      const Complex seed(re0 + (re1 - re0) * i / (nx - 1.0),
                         im0 + (im1 - im0) * j / (ny - 1.0));
      bool ok = false;
      const Complex W = leaver_polish(seed, ell, s, n, depth, &ok);
      if (!ok) continue;
      if (W.real() < 0.05 || W.imag() > -0.005 || W.real() > 3.5 ||
          W.imag() < -3.0)
        continue;
      if (std::abs(leaver_cf(W, ell, s, n, depth)) > 1e-5) continue;
      bool dup = false;
      for (Complex r : roots)
        if (std::abs(r - W) < 1e-5) dup = true;
      if (!dup) roots.push_back(W);
    }
  std::sort(roots.begin(), roots.end(), [](Complex x, Complex y) {
    return std::abs(x.imag()) < std::abs(y.imag());
  });
  return roots;
}

}  // namespace

Complex leaver_qnm(double M, int ell, int s, int n, int depth) {
  if (M <= 0.0 || ell < std::abs(s) || n < 0)
    throw Error(ErrorKind::invalid_argument, "leaver_qnm: bad problem");
  if (depth < 100)
    throw Error(ErrorKind::invalid_argument, "leaver_qnm: depth must be >= 100");

  const auto roots = leaver_roots_in_box(ell, s, n, depth);
  if (static_cast<int>(roots.size()) <= n)
    throw Error(ErrorKind::not_converged,
                "leaver_qnm: requested overtone not found in scan region");
  const Complex W = roots[static_cast<std::size_t>(n)];

  // Depth-doubling stability: the truncated tail must no longer matter.
  bool ok = false;
  const Complex W2 = leaver_polish(W, ell, s, n, 2 * depth, &ok);
  if (!ok || std::abs(W2 - W) > 1e-8)
    throw Error(ErrorKind::not_converged,
                "leaver_qnm: root not stable under depth doubling");
  return W2 / (2.0 * M);
}

double ode_residual(const EquationParams& eq, Complex z, Complex h, Complex hp,
                    Complex hpp) {
  // Coefficient functions restated from the displayed equations on purpose;
  // do not replace with the production ode_p/ode_q.
  Complex p, q;
  if (const auto* g = std::get_if<HeunParams>(&eq)) {
    const double dmin = std::min({std::abs(z), std::abs(z - 1.0),
                                  std::abs(z - g->a)});
    if (dmin < 1e-12 * (1.0 + std::abs(z)))
      throw Error(ErrorKind::at_singularity, "ode_residual: z at a singular point");
    p = g->gamma / z + g->delta / (z - 1.0) + g->epsilon / (z - g->a);
    q = (g->alpha * g->beta * z - g->q) / (z * (z - 1.0) * (z - g->a));
  } else {
    const auto& c = std::get<ConfluentParams>(eq);
    const double dmin = std::min(std::abs(z), std::abs(z - 1.0));
    if (dmin < 1e-12 * (1.0 + std::abs(z)))
      throw Error(ErrorKind::at_singularity, "ode_residual: z at a singular point");
    p = c.alpha + (c.beta + 1.0) / z + (c.gamma + 1.0) / (z - 1.0);
    q = c.mu / z + c.nu / (z - 1.0);
  }
  const double scale =
      std::max({std::abs(hpp), std::abs(p * hp), std::abs(q * h), 1e-300});
  return std::abs(hpp + p * hp + q * h) / scale;
}

}  // namespace heun::oracles
