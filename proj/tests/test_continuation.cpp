#include <random>

#include "doctest.h"

#include "heun/connection.hpp"
#include "heun/continuation.hpp"
#include "heun/frobenius.hpp"
#include "heun/oracles.hpp"

using namespace heun;

namespace {

std::mt19937_64 rng(991);

double ur(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Complex rc(double lo = -1.2, double hi = 1.2) { return {ur(lo, hi), ur(lo, hi)}; }

// a kept away from the working window around [0, 1].
HeunParams far_general() {
  return HeunParams({ur(-3.5, -2.0), ur(1.5, 2.5)}, rc(), rc(), rc(),
                    {ur(0.3, 1.7), ur(0.1, 0.5)}, rc());
}

}  // namespace

TEST_SUITE("continuation") {

TEST_CASE("path construction validates clearance and shape") {
  const HeunParams p = far_general();
  const EquationParams eq(p);
  CHECK_THROWS_AS(ContinuationPath(eq, {Complex(0.5)}, 0.1), Error);
  CHECK_THROWS_AS(ContinuationPath(eq, {Complex(0.5), Complex(0.7)}, 0.0), Error);
  // segment through z = 1
  CHECK_THROWS_AS(ContinuationPath(eq, {Complex(0.5), Complex(1.5)}, 0.1), Error);
  const ContinuationPath ok(eq, {Complex(0.4, 0.4), Complex(0.6, 0.4)}, 0.3);
  CHECK(ok.length() == doctest::Approx(0.2));
  CHECK_FALSE(ok.closed());
}

TEST_CASE("zero loop is the identity continuation") {
  const HeunParams p = far_general();
  const EquationParams eq(p);
  const StatePair start{Complex(0.3, 0.2), Complex(1.7, -0.4), Complex(0.1, 0.9)};
  const ContinuationPath loop(eq, {start.z, start.z}, 0.1);
  const auto r = continue_along_path(eq, start, loop, 1e-11);
  CHECK(r.state.h == start.h);
  CHECK(r.state.hp == start.hp);
  CHECK(r.steps == 0);
}

TEST_CASE("closed rectangle enclosing no singularity returns the start state") {
  for (int i = 0; i < 10; ++i) {
    const HeunParams p = far_general();
    const EquationParams eq(p);
    const auto sol = general_series(p, SingPoint::zero, Branch::first, 250);
    const Complex z0(0.35, 0.05);
    const StatePair st = state_at(sol, z0, 1e-13);
    const ContinuationPath loop(
        eq, {z0, {0.7, 0.05}, {0.7, 0.6}, {0.2, 0.6}, {0.2, 0.05}, z0}, 0.04);
    const auto r = continue_along_path(eq, st, loop, 1e-11);
    const double scale = state_norm(st);
    CHECK(std::abs(r.state.h - st.h) <= 1e-9 * scale);
    CHECK(std::abs(r.state.hp - st.hp) <= 1e-9 * scale);
  }
}

TEST_CASE("round trip: forward plus reverse returns the start") {
  const double tol = 1e-11;
  for (int i = 0; i < 10; ++i) {
    const HeunParams p = far_general();
    const EquationParams eq(p);
    const auto sol = general_series(p, SingPoint::zero, Branch::first, 250);
    const Complex z0(0.3, 0.1);
    const StatePair st = state_at(sol, z0, 1e-13);
    const ContinuationPath path(
        eq, {z0, {0.8, 0.5}, {1.6, 0.8}, {2.4, 0.3}}, 0.2);
    const auto fwd = continue_along_path(eq, st, path, tol);
    const auto back = continue_along_path(eq, fwd.state, path.reversed(eq), tol);
    const double scale = state_norm(st);
    CHECK(std::abs(back.state.h - st.h) <= 10.0 * tol * scale);
    CHECK(std::abs(back.state.hp - st.hp) <= 10.0 * tol * scale);
  }
}

TEST_CASE("inserting collinear waypoints does not change the result") {
  const double tol = 1e-11;
  const ConfluentParams c(0.8, {0.4, 0.2}, {0.6, -0.1}, rc(), rc());
  const EquationParams eq(c);
  const auto sol = confluent_series(c, SingPoint::zero, Branch::first, 250);
  const Complex z0(0.3, 0.15);
  const StatePair st = state_at(sol, z0, 1e-13);
  const Complex z1(2.5, 0.9);
  const ContinuationPath direct(eq, {z0, z1}, 0.12);
  std::vector<Complex> refined{z0};
  for (int k = 1; k <= 7; ++k) refined.push_back(z0 + (z1 - z0) * (k / 7.0));
  const ContinuationPath split(eq, refined, 0.12);
  const auto r1 = continue_along_path(eq, st, direct, tol);
  const auto r2 = continue_along_path(eq, st, split, tol);
  CHECK(std::abs(r1.state.h - r2.state.h) <= 10.0 * tol * state_norm(r1.state));
  CHECK(std::abs(r1.state.hp - r2.state.hp) <= 10.0 * tol * state_norm(r1.state));
}

TEST_CASE("homotopy invariance for deformable paths") {
  const double tol = 1e-11;
  const HeunParams p = far_general();
  const EquationParams eq(p);
  const auto sol = general_series(p, SingPoint::zero, Branch::first, 250);
  const Complex z0(0.4, 0.3);
  const StatePair st = state_at(sol, z0, 1e-13);
  const Complex z1(1.8, 0.4);
  // Both run above the singularities at 0 and 1; deformable into each other.
  const ContinuationPath upper1(eq, {z0, {0.9, 0.9}, z1}, 0.25);
  const ContinuationPath upper2(eq, {z0, {0.6, 1.6}, {1.5, 1.3}, z1}, 0.25);
  const auto r1 = continue_along_path(eq, st, upper1, tol);
  const auto r2 = continue_along_path(eq, st, upper2, tol);
  CHECK(std::abs(r1.state.h - r2.state.h) <= 10.0 * tol * state_norm(r1.state));
  CHECK(std::abs(r1.state.hp - r2.state.hp) <= 10.0 * tol * state_norm(r1.state));
}

TEST_CASE("loop around z=1 in the hypergeometric degeneration matches the "
          "2F1-ODE oracle") {
  for (int i = 0; i < 5; ++i) {
    Complex a{ur(-3.5, -2.0), ur(1.5, 2.5)};
    const Complex al = rc(), be = rc();
    const Complex ga{ur(0.4, 1.6), ur(0.1, 0.5)};
    const HeunParams p(a, a * al * be, al, be, ga, 0.0);
    const EquationParams eq(p);

    const Complex z0(0.4, 0.0);
    // Seed both sides from the oracle's series values (shared, exact data).
    const Complex y0 = oracles::gauss_2f1(al, be, ga, z0);
    const Complex y0p = oracles::gauss_2f1_deriv(al, be, ga, z0);
    const std::vector<Complex> loop{z0,          {1.6, -0.45}, {2.2, 0.5},
                                    {1.0, 0.75}, {0.35, 0.3},  z0};
    const ContinuationPath path(eq, loop, 0.15);
    const auto mine =
        continue_along_path(eq, StatePair{z0, y0, y0p}, path, 1e-11);
    const auto oracle = oracles::hyp2f1_ode_run(al, be, ga, {z0, y0, y0p},
                                                loop, 1e-12);
    const double scale = state_norm(mine.state);
    CHECK(std::abs(mine.state.h - oracle.y) <= 1e-8 * scale);
    CHECK(std::abs(mine.state.hp - oracle.yp) <= 1e-8 * scale);
  }
}

TEST_CASE("contractible-loop monodromy is the identity") {
  const HeunParams p = far_general();
  const EquationParams eq(p);
  const auto b1 = general_series(p, SingPoint::zero, Branch::first, 300);
  const auto b2 = general_series(p, SingPoint::zero, Branch::second, 300);
  const Complex zb(0.25, 0.0);
  const ContinuationPath loop(
      eq, {zb, {0.35, 0.1}, {0.3, 0.2}, {0.2, 0.1}, zb}, 0.05);
  const auto m = monodromy_matrix(eq, b1, b2, loop, 1e-11);
  CHECK(matrix_dist(m.matrix, Matrix2::identity()) <= 1e-9);
}

TEST_CASE("monodromy around 0: eigenvalues {1, exp(2 pi i (1-gamma))}") {
  // gamma = 0.5 gives eigenvalues {1, -1}.
  const HeunParams p({-2.5, 1.5}, 0.3, 0.25, 0.75, 0.5, 0.31);
  const EquationParams eq(p);
  const auto b1 = general_series(p, SingPoint::zero, Branch::first, 300);
  const auto b2 = general_series(p, SingPoint::zero, Branch::second, 300);
  const auto loop = circular_loop(eq, 0.0, 0.3);
  const auto m = monodromy_matrix(eq, b1, b2, loop, 1e-11);
  auto ev = m.matrix.eigenvalues();
  if (std::abs(ev[0] - 1.0) > std::abs(ev[1] - 1.0)) std::swap(ev[0], ev[1]);
  CHECK(std::abs(ev[0] - 1.0) <= 1e-8);
  CHECK(std::abs(ev[1] + 1.0) <= 1e-8);
  CHECK(m.abel_defect <= 1e-8);
}

TEST_CASE("composite loop equals the product of the factors") {
  const HeunParams p = far_general();
  const EquationParams eq(p);
  const auto b1 = general_series(p, SingPoint::zero, Branch::first, 400);
  const auto b2 = general_series(p, SingPoint::zero, Branch::second, 400);
  const Complex zb(0.45, 0.0);

  // Loops around 0 and around 1, both based at zb, plus their concatenation.
  const std::vector<Complex> loop0{zb,          {0.0, 0.45}, {-0.45, 0.0},
                                   {0.0, -0.45}, zb};
  const std::vector<Complex> loop1{zb,         {1.0, -0.55}, {1.55, 0.0},
                                   {1.0, 0.55}, zb};
  std::vector<Complex> both = loop0;
  both.insert(both.end(), loop1.begin() + 1, loop1.end());

  const double tol = 1e-11;
  const auto m0 = monodromy_matrix(eq, b1, b2, ContinuationPath(eq, loop0, 0.1),
                                   tol);
  const auto m1 = monodromy_matrix(eq, b1, b2, ContinuationPath(eq, loop1, 0.1),
                                   tol);
  const auto mc = monodromy_matrix(eq, b1, b2, ContinuationPath(eq, both, 0.1),
                                   tol);
  CHECK(matrix_dist(mc.matrix, m1.matrix * m0.matrix) <= 1e-8);
}

TEST_CASE("default path detours around an intervening singularity") {
  const HeunParams p(0.5, 0.2, 0.3, 0.4, {0.8, 0.2}, 0.1);  // a = 0.5 on [0,1]
  const EquationParams eq(p);
  const auto path = default_path(eq, Complex(0.15, 0.0), Complex(0.85, 0.0));
  CHECK(path.waypoints().size() > 2);  // arc inserted around a = 0.5
  double min_dist = 1e9;
  for (Complex w : path.waypoints()) min_dist = std::min(min_dist, std::abs(w - p.a));
  CHECK(min_dist >= path.clearance());
  // Upper half-plane convention.
  double max_im = -1e9;
  for (Complex w : path.waypoints()) max_im = std::max(max_im, w.imag());
  CHECK(max_im > 0.0);
}

TEST_CASE("step limit and degenerate basis errors") {
  const HeunParams p = far_general();
  const EquationParams eq(p);
  const auto sol = general_series(p, SingPoint::zero, Branch::first, 200);
  const Complex z0(0.3, 0.1);
  const StatePair st = state_at(sol, z0, 1e-13);
  const ContinuationPath path(eq, {z0, {2.0, 1.4}}, 0.2);
  ContinuationOptions opts;
  opts.max_steps = 3;
  CHECK_THROWS_AS(continue_along_path(eq, st, path, 1e-12, opts), Error);

  const auto loop = circular_loop(eq, 0.0, 0.3);
  const auto b1 = general_series(p, SingPoint::zero, Branch::first, 200);
  CHECK_THROWS_AS(monodromy_matrix(eq, b1, b1, loop, 1e-10), Error);
}

TEST_CASE("continuation results carry diagnostics") {
  const ConfluentParams c(0.5, {0.4, 0.1}, {0.7, 0.2}, 0.3, -0.2);
  const EquationParams eq(c);
  const auto sol = confluent_series(c, SingPoint::zero, Branch::first, 250);
  const Complex z0(0.4, 0.2);
  const StatePair st = state_at(sol, z0, 1e-13);
  const ContinuationPath path(eq, {z0, {3.0, 1.0}}, 0.2);
  const auto r = continue_along_path(eq, st, path, 1e-10);
  CHECK(r.steps > 0);
  CHECK(r.est_error >= 0.0);
  CHECK(r.est_error < 1e-6);
}

}  // TEST_SUITE
