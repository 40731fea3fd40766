#include <random>

#include "doctest.h"

#include "heun/connection.hpp"
#include "heun/oracles.hpp"

using namespace heun;

namespace {

std::mt19937_64 rng(5150);

double ur(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Complex rc(double lo = -1.2, double hi = 1.2) { return {ur(lo, hi), ur(lo, hi)}; }

// a in the lower half-plane: upper-half-plane test paths then keep every
// principal power factor on a continuous branch.
HeunParams lower_a_general() {
  return HeunParams({ur(0.8, 2.2), ur(-2.4, -1.4)}, rc(), rc(), rc(),
                    {ur(0.3, 1.7), ur(0.1, 0.5)}, rc());
}

}  // namespace

TEST_SUITE("connection") {

TEST_CASE("wronskian basics") {
  const HeunParams p = lower_a_general();
  const EquationParams eq(p);
  const StatePair s1{Complex(0.3, 0.2), Complex(1.0, 2.0), Complex(-0.5, 0.1)};
  CHECK(wronskian(eq, s1, s1) == Complex(0.0));
  const StatePair s2{Complex(0.3, 0.2), Complex(0.4, -1.0), Complex(2.0, 0.3)};
  CHECK(wronskian(eq, s1, s2) == s1.h * s2.hp - s2.h * s1.hp);
  const StatePair s3{Complex(0.9, 0.2), s2.h, s2.hp};
  CHECK_THROWS_AS(wronskian(eq, s1, s3), Error);
}

TEST_CASE("Abel-weighted Wronskian is constant along paths (general)") {
  for (int i = 0; i < 5; ++i) {
    const HeunParams p = lower_a_general();
    const EquationParams eq(p);
    const auto b1 = general_series(p, SingPoint::zero, Branch::first, 300);
    const auto b2 = general_series(p, SingPoint::zero, Branch::second, 300);
    const Complex z0(0.25, 0.3);
    StatePair s1 = state_at(b1, z0, 1e-13);
    StatePair s2 = state_at(b2, z0, 1e-13);
    const ContinuationPath path(
        eq, {z0, {0.6, ur(0.5, 0.9)}, {1.5, ur(0.6, 1.1)}, {2.4, ur(0.3, 0.8)}},
        0.2);
    const auto weight = [&](Complex z) {
      return std::pow(z, p.gamma) * std::pow(z - 1.0, p.delta) *
             std::pow(z - p.a, p.epsilon);
    };
    const Complex w0 = wronskian(eq, s1, s2) * weight(z0);
    for (std::size_t k = 1; k < path.waypoints().size(); ++k) {
      const auto leg = path.truncated(eq, k);
      const auto r1 = continue_along_path(eq, s1, leg, 1e-12);
      const auto r2 = continue_along_path(eq, s2, leg, 1e-12);
      const Complex wk = wronskian(eq, r1.state, r2.state) * weight(leg.back());
      CHECK(std::abs(wk - w0) <= 1e-9 * std::abs(w0));
    }
  }
}

TEST_CASE("Abel-weighted Wronskian is constant along paths (confluent)") {
  for (int i = 0; i < 5; ++i) {
    const ConfluentParams c(rc(), {ur(0.3, 1.4), ur(0.1, 0.6)},
                            {ur(0.3, 1.4), ur(0.1, 0.6)}, rc(), rc());
    const EquationParams eq(c);
    const auto b1 = confluent_series(c, SingPoint::zero, Branch::first, 300);
    const auto b2 = confluent_series(c, SingPoint::zero, Branch::second, 300);
    const Complex z0(0.3, 0.25);
    StatePair s1 = state_at(b1, z0, 1e-13);
    StatePair s2 = state_at(b2, z0, 1e-13);
    const ContinuationPath path(
        eq, {z0, {0.8, ur(0.5, 0.9)}, {1.8, ur(0.6, 1.0)}, {2.8, ur(0.4, 0.9)}},
        0.2);
    const auto weight = [&](Complex z) {
      return std::exp(c.alpha * z) * std::pow(z, c.beta + 1.0) *
             std::pow(z - 1.0, c.gamma + 1.0);
    };
    const Complex w0 = wronskian(eq, s1, s2) * weight(z0);
    for (std::size_t k = 1; k < path.waypoints().size(); ++k) {
      const auto leg = path.truncated(eq, k);
      const auto r1 = continue_along_path(eq, s1, leg, 1e-12);
      const auto r2 = continue_along_path(eq, s2, leg, 1e-12);
      const Complex wk = wronskian(eq, r1.state, r2.state) * weight(leg.back());
      CHECK(std::abs(wk - w0) <= 1e-9 * std::abs(w0));
    }
  }
}

TEST_CASE("same-point connection with a degenerate path is the identity") {
  const HeunParams p = lower_a_general();
  const EquationParams eq(p);
  const auto C = connection_matrix(eq, SingPoint::zero, SingPoint::zero, 1e-10);
  CHECK(matrix_dist(C.matrix, Matrix2::identity()) == 0.0);
}

TEST_CASE("composition: C(0->1) C(1->0 reversed) is the identity") {
  for (int i = 0; i < 5; ++i) {
    const HeunParams p = lower_a_general();
    const EquationParams eq(p);
    const auto C01 =
        connection_matrix(eq, SingPoint::zero, SingPoint::one, 1e-11);
    const auto C10 = connection_matrix(eq, SingPoint::one, SingPoint::zero,
                                       C01.path.reversed(eq), 1e-11);
    CHECK(matrix_dist(C01.matrix * C10.matrix, Matrix2::identity()) <= 1e-7);
    CHECK(matrix_dist(C10.matrix * C01.matrix, Matrix2::identity()) <= 1e-7);
  }
}

TEST_CASE("det C equals the Wronskian transport ratio of the two bases") {
  // Non-overlapping discs (0 -> a with a far away) put the matching point at
  // the path end, so the independent quadrature route
  //   det C = W_from(seed) exp(-int_path p) / W_to(z_m)
  // is computable from series Wronskians plus a path integral of p alone.
  const Complex a(6.0, -1.5);
  const HeunParams p(a, rc(), rc(), rc(), {ur(0.4, 1.5), ur(0.1, 0.5)}, rc());
  const EquationParams eq(p);
  const auto C = connection_matrix(eq, SingPoint::zero, SingPoint::a_point, 1e-11);
  CHECK(std::abs(C.matching_point - C.path.back()) <= 1e-12);

  const Complex z0 = C.path.front();
  const auto b1 = general_series(p, SingPoint::zero, Branch::first, 400);
  const auto b2 = general_series(p, SingPoint::zero, Branch::second, 400);
  const Complex w_seed =
      wronskian(eq, state_at(b1, z0, 1e-13), state_at(b2, z0, 1e-13));
  const Complex w_to = C.basis_to_at_match.det();
  const Complex transported = w_seed * std::exp(-path_integral_p(eq, C.path));
  const Complex det = C.matrix.det();
  CHECK(std::abs(det - transported / w_to) <= 1e-7 * std::abs(det));
}

TEST_CASE("hypergeometric-degenerate connection matches the 2F1-ODE oracle") {
  for (int i = 0; i < 4; ++i) {
    const Complex a{ur(1.6, 2.6), ur(1.2, 2.2)};
    const Complex al = rc(), be = rc();
    const Complex ga{ur(0.5, 1.4), ur(0.05, 0.4)};
    const HeunParams p(a, a * al * be, al, be, ga, 0.0);
    const EquationParams eq(p);
    const auto C = connection_matrix(eq, SingPoint::zero, SingPoint::one, 1e-11);
    const Complex zm = C.matching_point;

    // Oracle bases at 0 and 1 of the hypergeometric equation, evaluated at
    // the same matching point through independent series + ODE machinery.
    const Complex de = al + be - ga + 1.0;  // delta of the degenerate equation
    const auto y2f = [&](Complex aa, Complex bb, Complex cc, Complex z) {
      return oracles::gauss_2f1(aa, bb, cc, z);
    };
    const auto d2f = [&](Complex aa, Complex bb, Complex cc, Complex z) {
      return oracles::gauss_2f1_deriv(aa, bb, cc, z);
    };
    const Complex u = 1.0 - zm;
    const Matrix2 Bf{
        y2f(al, be, ga, zm),
        std::pow(zm, 1.0 - ga) * y2f(al - ga + 1.0, be - ga + 1.0, 2.0 - ga, zm),
        d2f(al, be, ga, zm),
        (1.0 - ga) * std::pow(zm, -ga) *
                y2f(al - ga + 1.0, be - ga + 1.0, 2.0 - ga, zm) +
            std::pow(zm, 1.0 - ga) *
                d2f(al - ga + 1.0, be - ga + 1.0, 2.0 - ga, zm)};
    const Matrix2 Bt{
        y2f(al, be, de, u),
        std::pow(u, 1.0 - de) * y2f(al - de + 1.0, be - de + 1.0, 2.0 - de, u),
        -d2f(al, be, de, u),
        -((1.0 - de) * std::pow(u, -de) *
              y2f(al - de + 1.0, be - de + 1.0, 2.0 - de, u) +
          std::pow(u, 1.0 - de) *
              d2f(al - de + 1.0, be - de + 1.0, 2.0 - de, u))};
    const Matrix2 C_oracle = Bt.inverse() * Bf;
    CHECK(matrix_dist(C.matrix, C_oracle) <= 1e-7);
  }
}

TEST_CASE("basis covariance: scaling a seed scales the matching column") {
  const HeunParams p = lower_a_general();
  const EquationParams eq(p);
  const auto b1 = general_series(p, SingPoint::zero, Branch::first, 400);
  const auto b2 = general_series(p, SingPoint::zero, Branch::second, 400);
  const auto base = connection_matrix(eq, SingPoint::zero, SingPoint::one, 1e-11);
  const Complex z0 = base.path.front();
  StatePair s1 = state_at(b1, z0, 1e-13);
  StatePair s2 = state_at(b2, z0, 1e-13);
  const Complex lambda(1.7, -2.3);
  s1.h *= lambda;
  s1.hp *= lambda;
  const auto scaled = connection_from_seeds(eq, SingPoint::zero, SingPoint::one,
                                            s1, s2, base.path, 1e-11);
  CHECK(std::abs(scaled.matrix.a - lambda * base.matrix.a) <=
        1e-9 * std::abs(lambda * base.matrix.a));
  CHECK(std::abs(scaled.matrix.c - lambda * base.matrix.c) <=
        1e-9 * std::abs(lambda * base.matrix.c));
  CHECK(std::abs(scaled.matrix.b - base.matrix.b) <= 1e-9 * std::abs(base.matrix.b));
  CHECK(std::abs(scaled.matrix.d - base.matrix.d) <= 1e-9 * std::abs(base.matrix.d));
}

TEST_CASE("monodromy conjugation: M_to = C M_from C^{-1}") {
  const HeunParams p = lower_a_general();
  const EquationParams eq(p);
  const auto C = connection_matrix(eq, SingPoint::zero, SingPoint::one, 1e-11);
  const Complex zm = C.matching_point;

  // Circular loop around z = 1 through the matching point.
  const Complex rel = zm - 1.0;
  std::vector<Complex> loop;
  for (int k = 0; k <= 20; ++k) {
    const double ph = 2.0 * kPi * k / 20;
    loop.push_back(1.0 + rel * Complex(std::cos(ph), std::sin(ph)));
  }
  loop.front() = zm;
  loop.back() = zm;
  const double clear = 0.4 * std::min(std::abs(rel), 1.0 - std::abs(rel));
  const ContinuationPath L(eq, loop, clear);

  const double tol = 1e-11;
  const auto go = [&](const Matrix2& B) {
    const StatePair c1{zm, B.a, B.c};
    const StatePair c2{zm, B.b, B.d};
    const auto r1 = continue_along_path(eq, c1, L, tol);
    const auto r2 = continue_along_path(eq, c2, L, tol);
    return Matrix2{r1.state.h, r2.state.h, r1.state.hp, r2.state.hp};
  };
  const Matrix2 Bf = C.basis_from_at_match;
  const Matrix2 Bt = C.basis_to_at_match;
  const Matrix2 Mf = Bf.inverse() * go(Bf);
  const Matrix2 Mt = Bt.inverse() * go(Bt);
  CHECK(matrix_dist(Mt, C.matrix * Mf * C.matrix.inverse()) <= 1e-6);
}

TEST_CASE("ill-conditioned matching is rejected") {
  // Nearly equal exponents at the target make the two branches almost
  // linearly dependent there.
  const HeunParams p({-2.5, 1.5}, 0.3, 0.25, 0.75, 1.0 + 1e-9, 0.31);
  const EquationParams eq(p);
  CHECK_THROWS_AS(connection_matrix(eq, SingPoint::one, SingPoint::zero, 1e-10),
                  Error);
}

}  // TEST_SUITE
