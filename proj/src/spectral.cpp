#include "heun/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "heun/frobenius.hpp"

namespace heun {

RWProblem::RWProblem(double M_, int ell_, int s_, Complex rho_,
                     std::optional<double> r_surface_)
    : M(M_), ell(ell_), s(s_), rho(rho_), r_surface(r_surface_) {
  if (!(M > 0.0))
    throw Error(ErrorKind::invalid_argument, "RWProblem: M must be positive");
  if (s < 0 || ell < s)
    throw Error(ErrorKind::invalid_argument, "RWProblem: need ell >= s >= 0");
  if (std::abs(rho) > 1.0 + 1e-12)
    throw Error(ErrorKind::invalid_argument, "RWProblem: need |rho| <= 1");
  if (r_surface && !(*r_surface > 2.0 * M))
    throw Error(ErrorKind::invalid_argument,
                "RWProblem: surface must lie outside the horizon (r > 2M)");
}

RWTransform rw_to_confluent(const RWProblem& prob, Complex omega) {
  if (std::abs(omega) == 0.0)
    throw Error(ErrorKind::invalid_argument, "rw_to_confluent: omega must be nonzero");
  const Complex W = 2.0 * prob.M * omega;  // dimensionless frequency
  const double L = double(prob.ell) * (prob.ell + 1);
  const double s2 = double(prob.s) * prob.s;

  // Peeling Psi = z^{sigma0} (z-1)^{sigma1} e^{kappa z} H with
  // sigma0 = 1 + s (kills the 1/z^2 pole), sigma1 = -iW (ingoing horizon
  // exponent), kappa = +iW (outgoing exponential) leaves H obeying the
  // confluent Heun form with the parameters below.
  const Complex sigma0 = 1.0 + double(prob.s);
  const Complex sigma1 = -kImag * W;
  const Complex kappa = kImag * W;

  const Complex alpha = 2.0 * kappa;
  const Complex beta = 2.0 * (sigma0 - 1.0);
  const Complex gamma = 2.0 * sigma1;
  const Complex mu = 2.0 * kappa * sigma0 - kappa - 2.0 * sigma0 * sigma1 -
                     sigma0 + sigma1 + L + 1.0 - s2;
  const Complex nu = 2.0 * kappa * sigma1 + kappa + 2.0 * sigma0 * sigma1 +
                     sigma0 - sigma1 + 2.0 * W * W - L - 1.0 + s2;

  RWTransform t{ConfluentParams(alpha, beta, gamma, mu, nu), W, sigma0, sigma1,
                kappa};

#ifndef NDEBUG
  // Gate against transcription errors in the derived map: a random CHE
  // solution triple pushed through the peel must satisfy the RW equation.
  std::mt19937_64 rng(0x5eedu);
  std::uniform_real_distribution<double> ur(1.4, 9.0), ui(-0.4, 0.4);
  for (int i = 0; i < 20; ++i) {
    const Complex z(ur(rng), ui(rng));
    const Complex H(ur(rng), ui(rng));
    const Complex Hp(ui(rng), ur(rng));
    const Complex p = ode_p(EquationParams(t.params), z);
    const Complex q = ode_q(EquationParams(t.params), z);
    const Complex Hpp = -(p * Hp + q * H);
    if (rw_transform_residual(prob, omega, z, H, Hp, Hpp) > 1e-9)
      throw Error(ErrorKind::derivation_inconsistent,
                  "rw_to_confluent: transformed solution fails the "
                  "Regge-Wheeler residual check");
  }
#endif
  return t;
}

double rw_transform_residual(const RWProblem& prob, Complex omega, Complex z,
                             Complex H, Complex Hp, Complex Hpp) {
  const Complex W = 2.0 * prob.M * omega;
  const double L = double(prob.ell) * (prob.ell + 1);
  const double s2 = double(prob.s) * prob.s;
  const Complex sigma0 = 1.0 + double(prob.s);
  const Complex sigma1 = -kImag * W;
  const Complex kappa = kImag * W;

  // Psi = F H with F = z^{sigma0} (z-1)^{sigma1} e^{kappa z}; the residual is
  // evaluated on the Regge-Wheeler equation in z = r/(2M):
  //   Psi'' + Psi'/(z(z-1)) + [W^2 z^2/(z-1)^2 - (L z + 1 - s^2)/(z^2 (z-1))] Psi = 0.
  const Complex g = sigma0 / z + sigma1 / (z - 1.0) + kappa;
  const Complex gp = -sigma0 / (z * z) - sigma1 / ((z - 1.0) * (z - 1.0));
  // Psi'/F = Hp + g H ; Psi''/F = Hpp + 2 g Hp + (g^2 + g') H.
  const Complex psi = H;
  const Complex psip = Hp + g * H;
  const Complex psipp = Hpp + 2.0 * g * Hp + (g * g + gp) * H;

  const Complex p_rw = 1.0 / (z * (z - 1.0));
  const Complex q_rw = W * W * z * z / ((z - 1.0) * (z - 1.0)) -
                       (L * z + 1.0 - s2) / (z * z * (z - 1.0));
  const Complex lhs = psipp + p_rw * psip + q_rw * psi;
  const double scale = std::max(
      {std::abs(psipp), std::abs(p_rw * psip), std::abs(q_rw * psi), 1e-300});
  return std::abs(lhs) / scale;
}

ThomeExpansion thome_expansion(const ConfluentParams& params,
                               ThomeExpansion::Kind kind, int k_cap) {
  // Power-series branch: H ~ z^{-r} sum a_k z^{-k}, r = (mu+nu)/alpha. The
  // exponential branch is the power branch of the transformed equation
  // (alpha -> -alpha, mu -> mu - alpha(beta+1), nu -> nu - alpha(gamma+1))
  // times e^{-alpha z}.
  if (std::abs(params.alpha) < 1e-14)
    throw Error(ErrorKind::invalid_argument,
                "thome_expansion: alpha = 0 has no rank-1 irregular point");
  ConfluentParams p = params;
  Complex exp_coeff = 0.0;
  if (kind == ThomeExpansion::Kind::exponential) {
    p = ConfluentParams(-params.alpha, params.beta, params.gamma,
                        params.mu - params.alpha * (params.beta + 1.0),
                        params.nu - params.alpha * (params.gamma + 1.0));
    exp_coeff = -params.alpha;
  }
  const Complex r = (p.mu + p.nu) / p.alpha;

  std::vector<Complex> a(static_cast<std::size_t>(k_cap) + 1);
  a[0] = 1.0;
  const Complex bg = p.beta + p.gamma + 2.0 - p.alpha;
  for (int m = 1; m <= k_cap; ++m) {
    const Complex e1 = -r - Complex(m) + 1.0;
    const Complex e2 = -r - Complex(m) + 2.0;
    Complex acc = (e1 * (e1 - 1.0) + bg * e1 - p.mu) * a[m - 1];
    if (m >= 2) acc -= (e2 * (e2 - 1.0) + (p.beta + 1.0) * e2) * a[m - 2];
    a[m] = acc / (p.alpha * Complex(m));
  }
  return {kind, -r, exp_coeff, std::move(a)};
}

ThomeEval eval_thome(const ThomeExpansion& exp, Complex z) {
  // Sum to the smallest term; the asymptotic series is divergent, so the
  // smallest retained term is the honest error scale.
  const std::size_t n = exp.coeffs.size();
  std::size_t k_best = 0;
  double t_best = std::numeric_limits<double>::infinity();
  const double az = std::abs(z);
  double tk = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = std::abs(exp.coeffs[k]) * tk;
    if (t < t_best) {
      t_best = t;
      k_best = k;
    }
    tk /= az;
  }

  CompensatedSum s, sp;  // sum a_k z^{-k} and its derivative sum
  for (std::size_t k = 0; k <= k_best; ++k) {
    const Complex zk = std::pow(z, -double(k));
    s.add(exp.coeffs[k] * zk);
    if (k > 0) sp.add(exp.coeffs[k] * Complex(-double(k)) * zk / z);
  }
  const Complex zp = std::pow(z, exp.power);
  const Complex ez =
      exp.exp_coeff == Complex(0.0) ? Complex(1.0) : std::exp(exp.exp_coeff * z);
  const Complex pref = zp * ez;
  const Complex dlog_pref = exp.power / z + exp.exp_coeff;

  const Complex value = pref * s.value();
  const Complex deriv = pref * (dlog_pref * s.value() + sp.value());
  const double rel =
      t_best / std::max(std::abs(s.value()), 1e-300);
  return {StatePair{z, value, deriv}, rel, static_cast<int>(k_best)};
}

namespace {

// Rightward anti-Stokes direction: Omega * e^{i theta} real, |theta| < pi/2.
// Along this ray the two exponential behaviors e^{+-i Omega z} have constant
// magnitude ratio, so inward integration injects no relative growth and the
// mirror symmetry omega -> -conj(omega) maps rays to conjugate rays.
Complex anti_stokes_dir(Complex Omega) {
  double th = -std::arg(Omega);
  if (th > 0.5 * kPi) th -= kPi;
  if (th < -0.5 * kPi) th += kPi;
  return Complex(std::cos(th), std::sin(th));
}

BoundaryState infinity_boundary(const RWTransform& t, ThomeExpansion::Kind kind,
                                const SpectralOptions& opts) {
  const Complex dir = anti_stokes_dir(t.Omega);
  const ThomeExpansion th = thome_expansion(t.params, kind, opts.k_cap);

  double ray = opts.frozen_ray.value_or(opts.r_seed_min);
  ThomeEval ev{};
  bool seeded = false;
  while (true) {
    ev = eval_thome(th, opts.z_match + ray * dir);
    if (ev.est_rel_error <= opts.tol_asym) {
      seeded = true;
      break;
    }
    if (opts.frozen_ray) break;  // frozen plans do not re-ladder
    if (ray >= opts.r_seed_max) break;
    ray = std::min(1.5 * ray, opts.r_seed_max);
  }
  if (!seeded && !opts.frozen_ray)
    throw Error(ErrorKind::asymptotic_not_converged,
                "boundary_solution: Thome smallest term does not reach the "
                "target at any admissible seeding distance");

  const EquationParams eq(t.params);
  const ContinuationPath path(
      eq, {opts.z_match + ray * dir, Complex(opts.z_match)},
      0.5 * std::min(1.0, opts.z_match - 1.0));
  const ContinuationResult r = continue_along_path(
      eq, ev.state, path, opts.continuation_tol, opts.continuation);
  return {r.state, r.est_error + ev.est_rel_error, ray, ev.k_used};
}

BoundaryState inner_boundary(const RWTransform& t, Complex rho,
                             std::optional<double> z_surface,
                             const SpectralOptions& opts) {
  const EquationParams eq(t.params);
  const int n_terms = 420;
  const double seed_tol = std::min(1e-13, opts.continuation_tol);

  const double z_seed = z_surface.value_or(1.5);
  if (!(z_seed > 1.0) || z_seed > 1.9)
    throw Error(ErrorKind::invalid_argument,
                "boundary_solution: surface point must lie in (1, 1.9] in "
                "z = r/(2M) units (inside the horizon series disc)");

  const FrobeniusSolution ingoing =
      confluent_series(t.params, SingPoint::one, Branch::first, n_terms);
  StatePair seed = state_at(ingoing, z_seed, seed_tol);
  if (rho != Complex(0.0)) {
    const FrobeniusSolution outgoing =
        confluent_series(t.params, SingPoint::one, Branch::second, n_terms);
    const StatePair so = state_at(outgoing, z_seed, seed_tol);
    seed.h += rho * so.h;
    seed.hp += rho * so.hp;
  }

  const ContinuationPath path(eq, {Complex(z_seed), Complex(opts.z_match)},
                              0.45 * std::min(z_seed - 1.0, 1.0));
  const ContinuationResult r = continue_along_path(
      eq, seed, path, opts.continuation_tol, opts.continuation);
  return {r.state, r.est_error + seed_tol, 0.0, 0};
}

}  // namespace

BoundaryState boundary_solution(const RWTransform& t, BoundaryKind kind,
                                Complex rho, std::optional<double> z_surface,
                                const SpectralOptions& opts) {
  switch (kind) {
    case BoundaryKind::ingoing_horizon:
      return inner_boundary(t, 0.0, std::nullopt, opts);
    case BoundaryKind::mixed_rho:
      return inner_boundary(t, rho, z_surface, opts);
    case BoundaryKind::outgoing_infinity:
      // With kappa = +i Omega peeled off, the outgoing Psi corresponds to
      // the pure power-series Thome branch of H.
      return infinity_boundary(t, ThomeExpansion::Kind::power_series, opts);
    case BoundaryKind::recessive_infinity:
      return infinity_boundary(t, t.params.alpha.real() > 0.0
                                      ? ThomeExpansion::Kind::exponential
                                      : ThomeExpansion::Kind::power_series,
                               opts);
    case BoundaryKind::dominant_infinity:
      return infinity_boundary(t, t.params.alpha.real() > 0.0
                                      ? ThomeExpansion::Kind::power_series
                                      : ThomeExpansion::Kind::exponential,
                               opts);
  }
  throw Error(ErrorKind::invalid_argument, "boundary_solution: bad kind");
}

DetValue matching_determinant(const RWProblem& prob, Complex omega, double tol,
                              const SpectralOptions& opts) {
  SpectralOptions o = opts;
  o.continuation_tol = std::min(opts.continuation_tol, tol);
  const RWTransform t = rw_to_confluent(prob, omega);

  const std::optional<double> z_surface =
      prob.r_surface ? std::optional<double>(*prob.r_surface / (2.0 * prob.M))
                     : std::nullopt;
  const BoundaryState inner =
      boundary_solution(t, prob.rho == Complex(0.0) ? BoundaryKind::ingoing_horizon
                                                    : BoundaryKind::mixed_rho,
                        prob.rho, z_surface, o);
  const BoundaryState outer =
      boundary_solution(t, BoundaryKind::outgoing_infinity, 0.0, std::nullopt, o);

  const Complex w = inner.state.h * outer.state.hp - outer.state.h * inner.state.hp;
  const double n1 = state_norm(inner.state);
  const double n2 = state_norm(outer.state);
  if (n1 == 0.0 || n2 == 0.0)
    throw Error(ErrorKind::numerical_inconsistency,
                "matching_determinant: boundary state collapsed to zero");
  return {w / (n1 * n2), inner.est_error + outer.est_error};
}

namespace {

struct Refined {
  Complex omega;
  double residual;
  int steps;
  bool ok;
};

Refined refine_root(const RWProblem& prob, Complex seed, double tol,
                    const SpectralOptions& opts) {
  auto D = [&](Complex w) {
    return matching_determinant(prob, w, opts.continuation_tol, opts);
  };
  Complex w = seed;
  Complex w_prev = seed * (1.0 + 1e-5) + Complex(0.0, 1e-7);
  Complex f_prev = D(w_prev).value;
  int steps = 0;
  for (; steps < 60; ++steps) {
    const DetValue dv = D(w);
    const Complex f = dv.value;
    if (!std::isfinite(f.real()) || !std::isfinite(f.imag()))
      return {w, std::abs(f), steps, false};
    const double h = 1e-7 * std::max(std::abs(w), 1e-3);
    const Complex fp_num = D(w + h).value - D(w - h).value;
    const Complex fp = fp_num / (2.0 * h);

    // Gradient signal-to-noise: the central difference must stand clear of
    // the determinant's own error estimate, otherwise fall back to secant.
    const double noise = std::max(dv.est_error, 1e-15);
    const bool newton_ok = std::abs(fp_num) > 10.0 * noise && std::abs(fp) > 0.0;

    Complex step;
    if (newton_ok) {
      step = f / fp;
    } else {
      const Complex denom = f - f_prev;
      if (std::abs(denom) == 0.0) return {w, std::abs(f), steps, false};
      step = f * (w - w_prev) / denom;
    }
    w_prev = w;
    f_prev = f;
    w -= step;
    if (std::abs(step) <= 1e-12 * std::max(1.0, std::abs(w))) {
      const double res = std::abs(D(w).value);
      return {w, res, steps + 1, res <= tol};
    }
  }
  const double res = std::abs(D(w).value);
  return {w, res, steps, res <= tol};
}

double freeze_ray(const RWProblem& prob, const Region& region,
                  const SpectralOptions& opts) {
  // Choose one Thome seeding distance that reaches tol_asym for the worst
  // corner of the region, so D(omega) has no ladder-switching jumps inside.
  double ray = opts.r_seed_min;
  const double corners[4][2] = {{region.re_min, region.im_min},
                                {region.re_min, region.im_max},
                                {region.re_max, region.im_min},
                                {region.re_max, region.im_max}};
  for (const auto& c : corners) {
    const Complex omega(c[0], c[1]);
    if (std::abs(omega) < 1e-6) continue;
    SpectralOptions o = opts;
    o.frozen_ray = std::nullopt;
    const RWTransform t = rw_to_confluent(prob, omega);
    const ThomeExpansion th =
        thome_expansion(t.params, ThomeExpansion::Kind::power_series, o.k_cap);
    const Complex dir = anti_stokes_dir(t.Omega);
    double r = opts.r_seed_min;
    while (true) {
      if (eval_thome(th, o.z_match + r * dir).est_rel_error <= o.tol_asym) break;
      if (r >= o.r_seed_max)
        throw Error(ErrorKind::asymptotic_not_converged,
                    "find_modes: no admissible Thome seeding distance for the "
                    "scan region");
      r = std::min(1.5 * r, o.r_seed_max);
    }
    ray = std::max(ray, r);
  }
  return ray;
}

}  // namespace

int winding_number(const RWProblem& prob, const Region& region,
                   const SpectralOptions& opts) {
  SpectralOptions o = opts;
  if (!o.frozen_ray) o.frozen_ray = freeze_ray(prob, region, opts);

  auto D = [&](Complex w) {
    return matching_determinant(prob, w, o.continuation_tol, o).value;
  };

  std::vector<Complex> corners = {
      {region.re_min, region.im_min},
      {region.re_max, region.im_min},
      {region.re_max, region.im_max},
      {region.re_min, region.im_max},
      {region.re_min, region.im_min},
  };

  double total = 0.0;
  for (std::size_t e = 0; e + 1 < corners.size(); ++e) {
    // Adaptive phase tracking: refine until consecutive increments are
    // unambiguous (< pi/2).
    struct Node {
      double t;
      Complex d;
    };
    std::vector<Node> nodes;
    const int n0 = 24;
    for (int i = 0; i <= n0; ++i) {
      const double t = double(i) / n0;
      const Complex w = corners[e] + t * (corners[e + 1] - corners[e]);
      nodes.push_back({t, D(w)});
    }
    for (std::size_t i = 0; i + 1 < nodes.size();) {
      const double dphi =
          std::abs(std::arg(nodes[i + 1].d / nodes[i].d));
      if (dphi > 0.5 * kPi && nodes[i + 1].t - nodes[i].t > 1e-6) {
        const double tm = 0.5 * (nodes[i].t + nodes[i + 1].t);
        const Complex w = corners[e] + tm * (corners[e + 1] - corners[e]);
        nodes.insert(nodes.begin() + static_cast<long>(i) + 1, {tm, D(w)});
      } else {
        ++i;
      }
    }
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
      total += std::arg(nodes[i + 1].d / nodes[i].d);
  }
  const double k = total / (2.0 * kPi);
  const long rounded = std::lround(k);
  if (std::abs(k - double(rounded)) > 0.05)
    throw Error(ErrorKind::numerical_inconsistency,
                "winding_number: phase sum is not close to an integer "
                "multiple of 2 pi");
  return static_cast<int>(rounded);
}

FindModesResult find_modes(const RWProblem& prob, const Region& region,
                           int grid_nx, int grid_ny, double tol,
                           const SpectralOptions& opts, bool argument_audit) {
  if (grid_nx < 8 || grid_ny < 8)
    throw Error(ErrorKind::invalid_argument, "find_modes: grid must be >= 8x8");
  if (region.re_min >= region.re_max || region.im_min >= region.im_max)
    throw Error(ErrorKind::invalid_argument, "find_modes: empty region");
  if (region.re_min <= 0.0 && region.re_max >= 0.0 && region.im_min <= 0.0 &&
      region.im_max >= 0.0)
    throw Error(ErrorKind::invalid_argument,
                "find_modes: region must avoid omega = 0");

  SpectralOptions o = opts;
  if (!o.frozen_ray) o.frozen_ray = freeze_ray(prob, region, opts);

  FindModesResult out;
  std::vector<double> mag(static_cast<std::size_t>(grid_nx) * grid_ny);
  std::vector<double> flat(mag.size());
  auto at = [&](std::vector<double>& v, int i, int j) -> double& {
    return v[static_cast<std::size_t>(j) * grid_nx + i];
  };
  // |D| decays like exp(2 Im(Omega) rstar(z_match)) toward strongly damped
  // frequencies (the ingoing/outgoing magnitude ratio at the matching
  // point); divide that known tilt out of the seeding metric so mode basins
  // show up as grid-local minima at every depth. Zeros are unaffected.
  const double rstar_m = o.z_match + std::log(o.z_match - 1.0);
  for (int j = 0; j < grid_ny; ++j)
    for (int i = 0; i < grid_nx; ++i) {
      const Complex w(
          region.re_min + (region.re_max - region.re_min) * i / (grid_nx - 1.0),
          region.im_min + (region.im_max - region.im_min) * j / (grid_ny - 1.0));
      const double d = std::abs(matching_determinant(prob, w, o.continuation_tol, o).value);
      at(mag, i, j) = d;
      at(flat, i, j) = d * std::exp(-4.0 * prob.M * w.imag() * rstar_m);
      out.grid.push_back({w, d});
    }

  std::vector<Complex> seeds;
  auto collect_minima = [&](const std::vector<double>& v) {
    for (int j = 0; j < grid_ny; ++j)
      for (int i = 0; i < grid_nx; ++i) {
        bool is_min = true;
        for (int dj = -1; dj <= 1 && is_min; ++dj)
          for (int di = -1; di <= 1; ++di) {
            if (di == 0 && dj == 0) continue;
            const int ii = i + di, jj = j + dj;
            if (ii < 0 || jj < 0 || ii >= grid_nx || jj >= grid_ny) continue;
            if (v[static_cast<std::size_t>(jj) * grid_nx + ii] <
                v[static_cast<std::size_t>(j) * grid_nx + i]) {
              is_min = false;
              break;
            }
          }
        if (!is_min) continue;
        const Complex seed(
            region.re_min + (region.re_max - region.re_min) * i / (grid_nx - 1.0),
            region.im_min + (region.im_max - region.im_min) * j / (grid_ny - 1.0));
        bool dup = false;
        for (Complex s : seeds)
          if (std::abs(s - seed) < 1e-12) dup = true;
        if (!dup) seeds.push_back(seed);
      }
  };
  collect_minima(flat);
  collect_minima(mag);
  out.n_seeds = static_cast<int>(seeds.size());

  std::vector<Mode> modes;
  for (Complex seed : seeds) {
    const Refined r = refine_root(prob, seed, tol, o);
    if (!r.ok) {
      ++out.n_dropped;
      continue;
    }
    if (r.omega.real() < region.re_min - 1e-9 ||
        r.omega.real() > region.re_max + 1e-9 ||
        r.omega.imag() < region.im_min - 1e-9 ||
        r.omega.imag() > region.im_max + 1e-9) {
      ++out.n_dropped;  // converged outside the requested region
      continue;
    }
    bool dup = false;
    for (const Mode& m : modes)
      if (std::abs(m.omega - r.omega) < 1e-6) dup = true;
    if (dup) continue;
    modes.push_back(Mode{r.omega, 0, r.residual, r.steps});
  }
  std::sort(modes.begin(), modes.end(), [](const Mode& x, const Mode& y) {
    return std::abs(x.omega.imag()) < std::abs(y.omega.imag());
  });
  for (std::size_t i = 0; i < modes.size(); ++i)
    modes[i].overtone_hint = static_cast<int>(i);
  out.modes = std::move(modes);

  if (argument_audit) out.winding = winding_number(prob, region, o);
  return out;
}

}  // namespace heun
