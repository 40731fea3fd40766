#include <random>

#include "doctest.h"

#include "heun/io_json.hpp"
#include "heun/params.hpp"

using namespace heun;

namespace {

std::mt19937_64 rng(2024);

double ur(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Complex rc(double lo = -2.0, double hi = 2.0) { return {ur(lo, hi), ur(lo, hi)}; }

HeunParams random_general() {
  Complex a;
  do {
    a = rc(-2.5, 2.5);
  } while (std::abs(a) < 0.3 || std::abs(a - 1.0) < 0.3);
  return HeunParams(a, rc(), rc(), rc(), rc(), rc());
}

}  // namespace

TEST_SUITE("params") {

TEST_CASE("fuchs_delta arithmetic") {
  CHECK(fuchs_delta(1.0, 1.0, 1.0, 1.0) == Complex(1.0));
  CHECK(fuchs_delta(0.0, 0.0, 1.0, 0.0) == Complex(0.0));
}

TEST_CASE("fuchs_delta makes alpha and beta the indicial roots at infinity") {
  // Substituting y = z^{-s}(1 + ...) into the equation, the leading order
  // gives I(s) = s^2 + s(1 - gamma - delta - epsilon) + alpha*beta. With
  // delta from the Fuchs relation, alpha and beta must be its roots.
  for (int i = 0; i < 200; ++i) {
    const Complex alpha = rc(), beta = rc(), gamma = rc(), epsilon = rc();
    const Complex delta = fuchs_delta(alpha, beta, gamma, epsilon);
    const auto indicial = [&](Complex s) {
      return s * s + s * (1.0 - gamma - delta - epsilon) + alpha * beta;
    };
    const double scale = 1.0 + std::norm(alpha) + std::norm(beta);
    CHECK(std::abs(indicial(alpha)) <= 1e-12 * scale);
    CHECK(std::abs(indicial(beta)) <= 1e-12 * scale);
  }
}

TEST_CASE("construction stores delta and rejects degenerate a") {
  const HeunParams p(2.0, 1.0, 0.5, 0.25, 0.75, 0.125);
  CHECK(p.delta == fuchs_delta(0.5, 0.25, 0.75, 0.125));
  CHECK_THROWS_AS(HeunParams(0.0, 1.0, 1.0, 1.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS(HeunParams(1.0, 1.0, 1.0, 1.0, 1.0, 1.0), Error);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(HeunParams(2.0, inf, 1.0, 1.0, 1.0, 1.0), Error);
}

TEST_CASE("general singularity list: order, kinds, exponents") {
  const HeunParams p = random_general();
  const auto s = classify_singularities(p);
  REQUIRE(s.size() == 4);
  CHECK(s[0].location == Complex(0.0));
  CHECK(s[1].location == Complex(1.0));
  CHECK(s[2].location == p.a);
  CHECK(s[3].at_infinity);
  for (const auto& si : s) CHECK(si.kind == PointKind::regular);
  CHECK(s[0].exponents->second == 1.0 - p.gamma);
  CHECK(s[1].exponents->second == 1.0 - p.delta);
  CHECK(s[2].exponents->second == 1.0 - p.epsilon);
  CHECK(s[3].exponents->first == p.alpha);
  CHECK(s[3].exponents->second == p.beta);
}

TEST_CASE("gamma = 1 gives the degenerate pair {0, 0} at the origin") {
  const HeunParams p(2.0, 1.0, 0.3, 0.4, 1.0, 0.6);
  const auto s = classify_singularities(p);
  CHECK(s[0].exponents->first == Complex(0.0));
  CHECK(s[0].exponents->second == Complex(0.0));
  CHECK(s[0].degenerate_pair);
  CHECK_FALSE(s[2].degenerate_pair);
}

TEST_CASE("confluent singularity list") {
  const ConfluentParams c(1.0, 0.5, 0.25, -0.5, 0.75);
  const auto s = classify_singularities(c);
  REQUIRE(s.size() == 3);
  CHECK(s[0].exponents->second == Complex(-0.5));
  CHECK(s[1].exponents->second == Complex(-0.25));
  CHECK(s[2].kind == PointKind::irregular);
  CHECK(s[2].at_infinity);
  CHECK_FALSE(s[2].exponents.has_value());
}

TEST_CASE("classified exponents solve the local indicial equations") {
  // sigma(sigma-1) + p_{-1} sigma + q_{-2} = 0 at each finite regular point,
  // with the pole coefficients extracted numerically by Richardson
  // extrapolation from the equation's own p and q.
  for (int rep = 0; rep < 20; ++rep) {
    const HeunParams p = random_general();
    const EquationParams eq(p);
    const auto sing = classify_singularities(p);
    for (int k = 0; k < 3; ++k) {
      const Complex z0 = sing[k].location;
      const auto p_res = [&](double h) {
        const Complex dz(h, 0.7 * h);
        return dz * ode_p(eq, z0 + dz);
      };
      const auto q_res = [&](double h) {
        const Complex dz(h, 0.7 * h);
        return dz * dz * ode_q(eq, z0 + dz);
      };
      const Complex pm1 = 2.0 * p_res(5e-6) - p_res(1e-5);
      const Complex qm2 = 2.0 * q_res(5e-6) - q_res(1e-5);
      const auto indicial = [&](Complex s) {
        return s * (s - 1.0) + pm1 * s + qm2;
      };
      CHECK(std::abs(indicial(sing[k].exponents->first)) <= 1e-4);
      CHECK(std::abs(indicial(sing[k].exponents->second)) <= 1e-4);
    }
  }
}

TEST_CASE("exponent sum over the four regular points equals 2") {
  for (int i = 0; i < 100; ++i) {
    const auto s = classify_singularities(random_general());
    Complex sum = 0.0;
    for (const auto& si : s) sum += si.exponents->first + si.exponents->second;
    CHECK(std::abs(sum - 2.0) <= 1e-12);
  }
}

TEST_CASE("local radii") {
  const HeunParams p(Complex(3.0, 4.0), 0, 1, 1, 1, 1);
  const EquationParams eq(p);
  CHECK(local_radius(eq, SingPoint::zero) == doctest::Approx(1.0));
  CHECK(local_radius(eq, SingPoint::one) == doctest::Approx(1.0));
  CHECK(local_radius(eq, SingPoint::a_point) == doctest::Approx(std::abs(Complex(2.0, 4.0))));
  CHECK(min_singularity_gap(eq) == doctest::Approx(1.0));
  const EquationParams ceq(ConfluentParams(1, 0.5, 0.5, 1, 1));
  CHECK(local_radius(ceq, SingPoint::zero) == doctest::Approx(1.0));
  CHECK_THROWS_AS(location_of(ceq, SingPoint::a_point), Error);
}

TEST_CASE("json round trip; delta ignored on input") {
  const HeunParams p = random_general();
  nlohmann::json j = io::to_json(p);
  CHECK(j.contains("delta"));
  j["delta"] = nlohmann::json::array({123.0, -42.0});  // must be ignored
  const HeunParams q = io::heun_params_from_json(j);
  CHECK(q.a == p.a);
  CHECK(q.q == p.q);
  CHECK(q.alpha == p.alpha);
  CHECK(q.beta == p.beta);
  CHECK(q.gamma == p.gamma);
  CHECK(q.epsilon == p.epsilon);
  CHECK(q.delta == p.delta);

  const ConfluentParams c(rc(), rc(), rc(), rc(), rc());
  const ConfluentParams c2 = io::confluent_params_from_json(io::to_json(c));
  CHECK(c2.alpha == c.alpha);
  CHECK(c2.nu == c.nu);

  CHECK_THROWS_AS(io::heun_params_from_json(nlohmann::json{{"a", {2.0, 0.0}}}),
                  Error);
}

}  // TEST_SUITE
