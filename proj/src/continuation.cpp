#include "heun/continuation.hpp"

#include <algorithm>
#include <cmath>

namespace heun {

namespace {

double point_segment_distance(Complex p, Complex s0, Complex s1) {
  const Complex d = s1 - s0;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - s0);
  double t = ((p - s0) * std::conj(d)).real() / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (s0 + t * d));
}

}  // namespace

ContinuationPath::ContinuationPath(const EquationParams& eq,
                                   std::vector<Complex> waypoints,
                                   double clearance)
    : waypoints_(std::move(waypoints)), clearance_(clearance) {
  if (waypoints_.size() < 2)
    throw Error(ErrorKind::invalid_argument,
                "ContinuationPath: need at least two waypoints");
  if (!(clearance_ > 0.0))
    throw Error(ErrorKind::invalid_argument,
                "ContinuationPath: clearance must be positive");
  const auto sing = finite_singularities(eq);
  for (std::size_t i = 0; i + 1 < waypoints_.size(); ++i) {
    for (Complex s : sing) {
      const double d =
          point_segment_distance(s, waypoints_[i], waypoints_[i + 1]);
      if (d < clearance_)
        throw Error(ErrorKind::singularity_too_close,
                    "ContinuationPath: segment passes within clearance of a "
                    "singular point");
    }
  }
}

bool ContinuationPath::closed() const {
  return std::abs(waypoints_.front() - waypoints_.back()) <=
         1e-13 * (1.0 + std::abs(waypoints_.front()));
}

double ContinuationPath::length() const {
  double L = 0.0;
  for (std::size_t i = 0; i + 1 < waypoints_.size(); ++i)
    L += std::abs(waypoints_[i + 1] - waypoints_[i]);
  return L;
}

ContinuationPath ContinuationPath::reversed(const EquationParams& eq) const {
  std::vector<Complex> w(waypoints_.rbegin(), waypoints_.rend());
  return ContinuationPath(eq, std::move(w), clearance_);
}

ContinuationPath ContinuationPath::truncated(const EquationParams& eq,
                                             std::size_t last) const {
  if (last < 1 || last >= waypoints_.size())
    throw Error(ErrorKind::invalid_argument, "ContinuationPath: bad truncation");
  std::vector<Complex> w(waypoints_.begin(),
                         waypoints_.begin() + static_cast<long>(last) + 1);
  return ContinuationPath(eq, std::move(w), clearance_);
}

ContinuationPath default_path(const EquationParams& eq, Complex from, Complex to,
                              double clearance) {
  const double gap = min_singularity_gap(eq);
  if (clearance <= 0.0) clearance = 0.05 * gap;
  const double detour_r = std::max(clearance, 0.05 * gap);

  struct Detour {
    double t;  // position along the segment
    Complex center;
  };
  std::vector<Detour> detours;
  const Complex d = to - from;
  const double len = std::abs(d);
  if (len == 0.0)
    return ContinuationPath(eq, {from, to}, clearance);
  for (Complex s : finite_singularities(eq)) {
    if (point_segment_distance(s, from, to) < detour_r) {
      const double t =
          std::clamp(((s - from) * std::conj(d)).real() / (len * len), 0.0, 1.0);
      detours.push_back({t, s});
    }
  }
  std::sort(detours.begin(), detours.end(),
            [](const Detour& x, const Detour& y) { return x.t < y.t; });

  // Replace each crossing by a polygonal arc over the upper half of the
  // circle |z - s| = R around the singularity. The stored clearance is
  // shrunk to the polygon's inradius factor so validation passes.
  const int arc_n = 16;
  const double inradius = std::cos(kPi / (2.0 * arc_n));
  std::vector<Complex> w{from};
  for (const auto& det : detours) {
    const Complex s = det.center;
    if (std::abs(from - s) < detour_r || std::abs(to - s) < detour_r)
      throw Error(ErrorKind::singularity_too_close,
                  "default_path: endpoint inside the detour radius of a "
                  "singular point");
    // Entry/exit where the segment crosses the circle of radius R.
    const Complex u = d / len;
    const double proj = ((s - from) * std::conj(u)).real();
    const double perp2 = std::norm(s - from) - proj * proj;
    const double half = std::sqrt(std::max(0.0, detour_r * detour_r - perp2));
    const double t_in = (proj - half) / len;
    const double t_out = (proj + half) / len;
    if (t_in <= 0.0 || t_out >= 1.0)
      throw Error(ErrorKind::singularity_too_close,
                  "default_path: detour does not fit inside the segment");
    const Complex z_in = from + t_in * d;
    const Complex z_out = from + t_out * d;
    // Arc from z_in to z_out around s, through the upper half-plane side.
    double ph_in = std::arg(z_in - s);
    double ph_out = std::arg(z_out - s);
    // Counterclockwise sweep candidate and its midpoint.
    double sweep = ph_out - ph_in;
    while (sweep <= 0.0) sweep += 2.0 * kPi;
    const double mid_ccw = ph_in + 0.5 * sweep;
    const double mid_cw = ph_in + 0.5 * (sweep - 2.0 * kPi);
    const bool ccw = std::sin(mid_ccw) >= std::sin(mid_cw);
    const double total = ccw ? sweep : sweep - 2.0 * kPi;
    for (int k = 0; k <= arc_n; ++k) {
      const double ph = ph_in + total * k / arc_n;
      w.push_back(s + detour_r * Complex(std::cos(ph), std::sin(ph)));
    }
  }
  w.push_back(to);
  const double eff_clearance =
      std::min(clearance, 0.98 * inradius * detour_r);
  return ContinuationPath(eq, std::move(w), eff_clearance);
}

ContinuationPath circular_loop(const EquationParams& eq, Complex center,
                               double radius, double start_phase) {
  const int n = 24;
  std::vector<Complex> w;
  w.reserve(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double ph = start_phase + 2.0 * kPi * k / n;
    w.push_back(center + radius * Complex(std::cos(ph), std::sin(ph)));
  }
  w.back() = w.front();  // exact closure
  double clearance = radius * std::cos(kPi / n);
  for (Complex s : finite_singularities(eq)) {
    const double ds = std::abs(s - center);
    if (ds > radius) clearance = std::min(clearance, 0.9 * (ds - radius));
  }
  return ContinuationPath(eq, std::move(w), 0.9 * clearance);
}

namespace {

// Fehlberg 7(8) embedded pair (13 stages). The 8th-order solution is
// propagated; the error estimate is y8 - y7 = 41/840 (k0 + k10 - k11 - k12) h.
constexpr int kStages = 13;

constexpr double kC[kStages] = {
    0.0,       2.0 / 27, 1.0 / 9, 1.0 / 6, 5.0 / 12, 1.0 / 2, 5.0 / 6,
    1.0 / 6,   2.0 / 3,  1.0 / 3, 1.0,     0.0,      1.0};

constexpr double kA[kStages][kStages] = {
    {},
    {2.0 / 27},
    {1.0 / 36, 1.0 / 12},
    {1.0 / 24, 0.0, 1.0 / 8},
    {5.0 / 12, 0.0, -25.0 / 16, 25.0 / 16},
    {1.0 / 20, 0.0, 0.0, 1.0 / 4, 1.0 / 5},
    {-25.0 / 108, 0.0, 0.0, 125.0 / 108, -65.0 / 27, 125.0 / 54},
    {31.0 / 300, 0.0, 0.0, 0.0, 61.0 / 225, -2.0 / 9, 13.0 / 900},
    {2.0, 0.0, 0.0, -53.0 / 6, 704.0 / 45, -107.0 / 9, 67.0 / 90, 3.0},
    {-91.0 / 108, 0.0, 0.0, 23.0 / 108, -976.0 / 135, 311.0 / 54, -19.0 / 60,
     17.0 / 6, -1.0 / 12},
    {2383.0 / 4100, 0.0, 0.0, -341.0 / 164, 4496.0 / 1025, -301.0 / 82,
     2133.0 / 4100, 45.0 / 82, 45.0 / 164, 18.0 / 41},
    {3.0 / 205, 0.0, 0.0, 0.0, 0.0, -6.0 / 41, -3.0 / 205, -3.0 / 41, 3.0 / 41,
     6.0 / 41, 0.0},
    {-1777.0 / 4100, 0.0, 0.0, -341.0 / 164, 4496.0 / 1025, -289.0 / 82,
     2193.0 / 4100, 51.0 / 82, 33.0 / 164, 12.0 / 41, 0.0, 1.0}};

constexpr double kB8[kStages] = {0.0,       0.0, 0.0, 0.0, 0.0,
                                 34.0 / 105, 9.0 / 35, 9.0 / 35, 9.0 / 280,
                                 9.0 / 280,  0.0, 41.0 / 840, 41.0 / 840};

struct Vec2c {
  Complex h, hp;
};

inline Vec2c axpy(const Vec2c& y, double a, const Vec2c& x) {
  return {y.h + a * x.h, y.hp + a * x.hp};
}

}  // namespace

ContinuationResult continue_along_path(const EquationParams& eq,
                                       const StatePair& start,
                                       const ContinuationPath& path, double tol,
                                       const ContinuationOptions& opts,
                                       const Precision& prec) {
  if (std::abs(start.z - path.front()) > 1e-10 * (1.0 + std::abs(start.z)))
    throw Error(ErrorKind::invalid_argument,
                "continue_along_path: start state not at the first waypoint");
  tol = std::max(tol, prec.tol_floor);
  const double total_len = path.length();

  Vec2c u{start.h, start.hp};
  double acc_err = 0.0;
  long steps = 0;

  // Identity continuation for the degenerate zero-length path.
  if (total_len == 0.0)
    return {StatePair{path.back(), u.h, u.hp}, 0.0, 0};

  const auto& wp = path.waypoints();
  double h_carry = -1.0;
  for (std::size_t seg = 0; seg + 1 < wp.size(); ++seg) {
    const Complex dz = wp[seg + 1] - wp[seg];
    const double len = std::abs(dz);
    if (len == 0.0) continue;
    const Complex dir = dz / len;

    auto rhs = [&](double t, const Vec2c& v) -> Vec2c {
      const Complex z = wp[seg] + dir * t;
      const Complex hpp = -(ode_p(eq, z) * v.hp + ode_q(eq, z) * v.h);
      return {dir * v.hp, dir * hpp};
    };

    double t = 0.0;
    double h = h_carry > 0.0 ? std::min(h_carry, len) : len / 8.0;
    const double h_min = len * 1e-13;

    while (t < len) {
      h = std::min(h, len - t);
      Vec2c k[kStages];
      k[0] = rhs(t, u);
      for (int i = 1; i < kStages; ++i) {
        Vec2c yi = u;
        for (int j = 0; j < i; ++j)
          if (kA[i][j] != 0.0) yi = axpy(yi, h * kA[i][j], k[j]);
        k[i] = rhs(t + kC[i] * h, yi);
      }
      Vec2c y8 = u;
      for (int i = 0; i < kStages; ++i)
        if (kB8[i] != 0.0) y8 = axpy(y8, h * kB8[i], k[i]);
      const Complex err_h =
          h * (41.0 / 840) * (k[0].h + k[10].h - k[11].h - k[12].h);
      const Complex err_hp =
          h * (41.0 / 840) * (k[0].hp + k[10].hp - k[11].hp - k[12].hp);

      // Error-per-unit-length control: the per-step budget is tol scaled by
      // the step's share of the whole path, so the accumulated error tracks
      // tol itself.
      const double rtol_step =
          std::max(tol * (h / total_len), 8.0 * prec.epsilon);
      const double sc_h =
          rtol_step * std::max({std::abs(u.h), std::abs(y8.h), 1e-30});
      const double sc_hp =
          rtol_step * std::max({std::abs(u.hp), std::abs(y8.hp), 1e-30});
      const double err =
          std::max(std::abs(err_h) / sc_h, std::abs(err_hp) / sc_hp);

      if (err <= 1.0) {
        t += h;
        u = y8;
        acc_err += std::max(std::abs(err_h) / std::max(std::abs(y8.h), 1e-30),
                            std::abs(err_hp) / std::max(std::abs(y8.hp), 1e-30));
      }
      const double fac =
          std::clamp(0.9 * std::pow(std::max(err, 1e-12), -1.0 / 8), 0.2, 4.0);
      h *= fac;
      if (h < h_min)
        throw Error(ErrorKind::singularity_too_close,
                    "continue_along_path: adaptive step collapsed (singular "
                    "point too close to the path)");
      if (++steps > opts.max_steps)
        throw Error(ErrorKind::step_limit_exceeded,
                    "continue_along_path: step limit exceeded");
    }
    h_carry = h;
  }
  return {StatePair{wp.back(), u.h, u.hp}, acc_err, steps};
}

namespace {

Complex simpson_p(const EquationParams& eq, Complex z0, Complex z1) {
  const Complex zm = 0.5 * (z0 + z1);
  return (z1 - z0) / 6.0 *
         (ode_p(eq, z0) + 4.0 * ode_p(eq, zm) + ode_p(eq, z1));
}

Complex adaptive_simpson_p(const EquationParams& eq, Complex z0, Complex z1,
                           Complex whole, double tol, int depth) {
  const Complex zm = 0.5 * (z0 + z1);
  const Complex left = simpson_p(eq, z0, zm);
  const Complex right = simpson_p(eq, zm, z1);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_p(eq, z0, zm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_p(eq, zm, z1, right, 0.5 * tol, depth - 1);
}

}  // namespace

Complex path_integral_p(const EquationParams& eq, const ContinuationPath& path,
                        double tol) {
  Complex total = 0.0;
  const auto& wp = path.waypoints();
  for (std::size_t i = 0; i + 1 < wp.size(); ++i) {
    if (wp[i] == wp[i + 1]) continue;
    total += adaptive_simpson_p(eq, wp[i], wp[i + 1],
                                simpson_p(eq, wp[i], wp[i + 1]), tol, 40);
  }
  return total;
}

MonodromyResult monodromy_matrix(const EquationParams& eq,
                                 const FrobeniusSolution& basis1,
                                 const FrobeniusSolution& basis2,
                                 const ContinuationPath& loop, double tol,
                                 const ContinuationOptions& opts) {
  if (!loop.closed())
    throw Error(ErrorKind::invalid_argument, "monodromy_matrix: loop not closed");
  const Complex zb = loop.front();
  const double seed_tol = std::min(tol * 1e-2, 1e-12);
  const StatePair s1 = state_at(basis1, zb, seed_tol);
  const StatePair s2 = state_at(basis2, zb, seed_tol);

  const Matrix2 B{s1.h, s2.h, s1.hp, s2.hp};
  const double bscale = B.frobenius_norm();
  if (std::abs(B.det()) < 1e-12 * bscale * bscale)
    throw Error(ErrorKind::degenerate_basis,
                "monodromy_matrix: basis Wronskian vanishes at the base point");

  const ContinuationResult r1 = continue_along_path(eq, s1, loop, tol, opts);
  const ContinuationResult r2 = continue_along_path(eq, s2, loop, tol, opts);
  const Matrix2 Bt{r1.state.h, r2.state.h, r1.state.hp, r2.state.hp};

  const Matrix2 M = B.inverse() * Bt;

  // Abel's identity: det M = exp(-loop integral of p).
  const Complex det_pred = std::exp(-path_integral_p(eq, loop));
  const double abel_defect =
      std::abs(M.det() - det_pred) / std::max(std::abs(det_pred), 1e-300);
  if (abel_defect > 1e-4)
    throw Error(ErrorKind::numerical_inconsistency,
                "monodromy_matrix: determinant violates Abel's identity beyond "
                "tolerance");
  return {M, r1.est_error + r2.est_error, abel_defect};
}

}  // namespace heun
