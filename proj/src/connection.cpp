#include "heun/connection.hpp"

#include <algorithm>
#include <cmath>

namespace heun {

Complex wronskian(const EquationParams&, const StatePair& s1,
                  const StatePair& s2) {
  if (std::abs(s1.z - s2.z) > 1e-10 * (1.0 + std::abs(s1.z)))
    throw Error(ErrorKind::mismatched_points,
                "wronskian: states live at different points");
  return s1.h * s2.hp - s2.h * s1.hp;
}

namespace {

// Matching point: midpoint (by arc length) of the path portion lying inside
// both convergence discs, clamped away from the singular points; path end
// when the discs do not overlap along the path.
Complex choose_matching_point(const EquationParams& eq, SingPoint from,
                              SingPoint to, const ContinuationPath& path) {
  const Complex cf = location_of(eq, from);
  const Complex ct = location_of(eq, to);
  const double rf = local_radius(eq, from);
  const double rt = local_radius(eq, to);

  const auto& wp = path.waypoints();
  const double L = path.length();
  const int samples = 512;
  double s_lo = -1.0, s_hi = -1.0;
  double walked = 0.0;
  std::size_t seg = 0;
  double seg_used = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double target = L * i / samples;
    while (seg + 1 < wp.size()) {
      const double seg_len = std::abs(wp[seg + 1] - wp[seg]);
      if (walked + (seg_len - seg_used) >= target || seg + 2 >= wp.size()) break;
      walked += seg_len - seg_used;
      seg_used = 0.0;
      ++seg;
    }
    const double seg_len = std::abs(wp[seg + 1] - wp[seg]);
    const double local = std::min(seg_len, seg_used + (target - walked));
    const Complex z =
        wp[seg] + (seg_len == 0.0 ? Complex(0.0)
                                  : (wp[seg + 1] - wp[seg]) * (local / seg_len));
    const bool inside = std::abs(z - cf) <= 0.9 * rf &&
                        std::abs(z - ct) <= 0.9 * rt &&
                        std::abs(z - cf) >= 0.3 * rf &&
                        std::abs(z - ct) >= 0.3 * rt;
    if (inside) {
      if (s_lo < 0.0) s_lo = target;
      s_hi = target;
    }
  }
  if (s_lo < 0.0) return wp.back();

  // Arc-length midpoint of the overlap window.
  const double mid = 0.5 * (s_lo + s_hi);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < wp.size(); ++i) {
    const double seg_len = std::abs(wp[i + 1] - wp[i]);
    if (acc + seg_len >= mid && seg_len > 0.0)
      return wp[i] + (wp[i + 1] - wp[i]) * ((mid - acc) / seg_len);
    acc += seg_len;
  }
  return wp.back();
}

// Truncate the path at the matching point (inserting it as a waypoint).
ContinuationPath path_up_to(const EquationParams& eq,
                            const ContinuationPath& path, Complex zm) {
  const auto& wp = path.waypoints();
  if (std::abs(zm - wp.back()) <= 1e-13 * (1.0 + std::abs(zm))) return path;
  std::vector<Complex> out;
  out.push_back(wp.front());
  for (std::size_t i = 0; i + 1 < wp.size(); ++i) {
    const Complex d = wp[i + 1] - wp[i];
    const double len = std::abs(d);
    if (len > 0.0) {
      const double t = ((zm - wp[i]) * std::conj(d)).real() / (len * len);
      if (t >= -1e-12 && t <= 1.0 + 1e-12 &&
          std::abs(wp[i] + t * d - zm) <= 1e-9 * (1.0 + std::abs(zm))) {
        out.push_back(zm);
        return ContinuationPath(eq, std::move(out), path.clearance());
      }
    }
    out.push_back(wp[i + 1]);
  }
  return path;  // matching point is the path end
}

}  // namespace

ConnectionMatrix connection_from_seeds(const EquationParams& eq, SingPoint from,
                                       SingPoint to, const StatePair& seed1,
                                       const StatePair& seed2,
                                       const ContinuationPath& path, double tol,
                                       const ContinuationOptions& opts) {
  const int n_terms = 400;
  const double seed_tol = std::min(tol * 1e-2, 1e-12);

  const Complex zm = choose_matching_point(eq, from, to, path);
  const ContinuationPath leg = path_up_to(eq, path, zm);

  ContinuationResult r1{seed1, 0.0, 0};
  ContinuationResult r2{seed2, 0.0, 0};
  if (leg.length() > 0.0) {
    r1 = continue_along_path(eq, seed1, leg, tol, opts);
    r2 = continue_along_path(eq, seed2, leg, tol, opts);
  }

  // Basis at `to`, evaluated by series at the matching point.
  const auto make_to_branch = [&](Branch br) {
    if (const auto* g = std::get_if<HeunParams>(&eq))
      return general_series(*g, to, br, n_terms);
    return confluent_series(std::get<ConfluentParams>(eq), to, br, n_terms);
  };
  const StatePair t1 = state_at(make_to_branch(Branch::first), zm, seed_tol);
  const StatePair t2 = state_at(make_to_branch(Branch::second), zm, seed_tol);

  const Matrix2 Bfrom{r1.state.h, r2.state.h, r1.state.hp, r2.state.hp};
  const Matrix2 Bto{t1.h, t2.h, t1.hp, t2.hp};
  if (Bto.cond2() > 1e8)
    throw Error(ErrorKind::ill_conditioned_match,
                "connection_matrix: matching system condition number exceeds "
                "1e8");
  const Matrix2 C = Bto.inverse() * Bfrom;

  ConnectionMatrix out{from,
                       to,
                       C,
                       path,
                       r1.est_error + r2.est_error + 2.0 * seed_tol,
                       zm,
                       Bfrom,
                       Bto};
  return out;
}

ConnectionMatrix connection_matrix(const EquationParams& eq, SingPoint from,
                                   SingPoint to, const ContinuationPath& path,
                                   double tol, const ContinuationOptions& opts) {
  const int n_terms = 400;
  const double seed_tol = std::min(tol * 1e-2, 1e-12);

  // Same-point connection with a degenerate path: the identity, by definition.
  if (from == to && path.length() == 0.0) {
    return ConnectionMatrix{from,          to,
                            Matrix2::identity(), path,
                            0.0,           path.front(),
                            Matrix2::identity(), Matrix2::identity()};
  }

  const auto make_from_branch = [&](Branch br) {
    if (const auto* g = std::get_if<HeunParams>(&eq))
      return general_series(*g, from, br, n_terms);
    return confluent_series(std::get<ConfluentParams>(eq), from, br, n_terms);
  };
  const Complex z0 = path.front();
  const StatePair seed1 = state_at(make_from_branch(Branch::first), z0, seed_tol);
  const StatePair seed2 =
      state_at(make_from_branch(Branch::second), z0, seed_tol);
  return connection_from_seeds(eq, from, to, seed1, seed2, path, tol, opts);
}

ConnectionMatrix connection_matrix(const EquationParams& eq, SingPoint from,
                                   SingPoint to, double tol,
                                   const ContinuationOptions& opts) {
  const Complex cf = location_of(eq, from);
  const Complex ct = location_of(eq, to);
  if (from == to) {
    const Complex seed = cf + 0.5 * local_radius(eq, from);
    return connection_matrix(
        eq, from, to,
        ContinuationPath(eq, {seed, seed}, 0.25 * local_radius(eq, from)), tol,
        opts);
  }
  const Complex dir = (ct - cf) / std::abs(ct - cf);
  const Complex z_from = cf + 0.5 * local_radius(eq, from) * dir;
  const Complex z_to = ct - 0.5 * local_radius(eq, to) * dir;
  return connection_matrix(eq, from, to, default_path(eq, z_from, z_to), tol,
                           opts);
}

}  // namespace heun
