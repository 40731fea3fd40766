#include "heun/params.hpp"

#include <algorithm>
#include <cmath>

namespace heun {

namespace {

bool is_finite(Complex v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

bool near_integer(Complex v, double tol = 1e-12) {
  return std::abs(v.imag()) <= tol &&
         std::abs(v.real() - std::round(v.real())) <= tol;
}

}  // namespace

Complex fuchs_delta(Complex alpha, Complex beta, Complex gamma, Complex epsilon) {
  return alpha + beta - gamma - epsilon + 1.0;
}

HeunParams::HeunParams(Complex a_, Complex q_, Complex alpha_, Complex beta_,
                       Complex gamma_, Complex epsilon_)
    : a(a_), q(q_), alpha(alpha_), beta(beta_), gamma(gamma_), epsilon(epsilon_),
      delta(fuchs_delta(alpha_, beta_, gamma_, epsilon_)) {
  for (Complex v : {a, q, alpha, beta, gamma, epsilon}) {
    if (!is_finite(v))
      throw Error(ErrorKind::invalid_argument, "HeunParams: non-finite parameter");
  }
  if (std::abs(a) <= 1e-12 || std::abs(a - 1.0) <= 1e-12)
    throw Error(ErrorKind::degenerate_params,
                "HeunParams: a in {0, 1} coalesces singular points; use the "
                "confluent model instead");
}

ConfluentParams::ConfluentParams(Complex alpha_, Complex beta_, Complex gamma_,
                                 Complex mu_, Complex nu_)
    : alpha(alpha_), beta(beta_), gamma(gamma_), mu(mu_), nu(nu_) {
  for (Complex v : {alpha, beta, gamma, mu, nu}) {
    if (!is_finite(v))
      throw Error(ErrorKind::invalid_argument,
                  "ConfluentParams: non-finite parameter");
  }
}

std::vector<SingularityInfo> classify_singularities(const HeunParams& p) {
  std::vector<SingularityInfo> out(4);

  auto regular = [](Complex loc, Complex e1, Complex e2) {
    SingularityInfo s;
    s.location = loc;
    s.kind = PointKind::regular;
    s.exponents = std::make_pair(e1, e2);
    s.degenerate_pair = near_integer(e2 - e1);
    return s;
  };

  out[0] = regular(0.0, 0.0, 1.0 - p.gamma);
  out[1] = regular(1.0, 0.0, 1.0 - p.delta);
  out[2] = regular(p.a, 0.0, 1.0 - p.epsilon);
  out[3] = regular(0.0, p.alpha, p.beta);
  out[3].at_infinity = true;
  return out;
}

std::vector<SingularityInfo> classify_singularities(const ConfluentParams& p) {
  std::vector<SingularityInfo> out(3);

  out[0].location = 0.0;
  out[0].exponents = std::make_pair(Complex(0.0), -p.beta);
  out[0].degenerate_pair = near_integer(p.beta);

  out[1].location = 1.0;
  out[1].exponents = std::make_pair(Complex(0.0), -p.gamma);
  out[1].degenerate_pair = near_integer(p.gamma);

  out[2].at_infinity = true;
  out[2].kind = PointKind::irregular;
  return out;
}

std::vector<SingularityInfo> classify_singularities(const EquationParams& eq) {
  return std::visit([](const auto& p) { return classify_singularities(p); }, eq);
}

Complex ode_p(const EquationParams& eq, Complex z) {
  if (const auto* g = std::get_if<HeunParams>(&eq)) {
    return g->gamma / z + g->delta / (z - 1.0) + g->epsilon / (z - g->a);
  }
  const auto& c = std::get<ConfluentParams>(eq);
  return c.alpha + (c.beta + 1.0) / z + (c.gamma + 1.0) / (z - 1.0);
}

Complex ode_q(const EquationParams& eq, Complex z) {
  if (const auto* g = std::get_if<HeunParams>(&eq)) {
    return (g->alpha * g->beta * z - g->q) / (z * (z - 1.0) * (z - g->a));
  }
  const auto& c = std::get<ConfluentParams>(eq);
  return c.mu / z + c.nu / (z - 1.0);
}

std::vector<Complex> finite_singularities(const EquationParams& eq) {
  if (const auto* g = std::get_if<HeunParams>(&eq))
    return {Complex(0.0), Complex(1.0), g->a};
  return {Complex(0.0), Complex(1.0)};
}

double min_singularity_gap(const EquationParams& eq) {
  const auto pts = finite_singularities(eq);
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      gap = std::min(gap, std::abs(pts[i] - pts[j]));
  return gap;
}

Complex location_of(const EquationParams& eq, SingPoint point) {
  switch (point) {
    case SingPoint::zero:
      return 0.0;
    case SingPoint::one:
      return 1.0;
    case SingPoint::a_point:
      if (const auto* g = std::get_if<HeunParams>(&eq)) return g->a;
      throw Error(ErrorKind::invalid_argument,
                  "location_of: confluent equation has no point a");
  }
  throw Error(ErrorKind::invalid_argument, "location_of: bad point label");
}

double local_radius(const EquationParams& eq, SingPoint point) {
  const Complex loc = location_of(eq, point);
  double r = std::numeric_limits<double>::infinity();
  for (Complex s : finite_singularities(eq)) {
    const double d = std::abs(s - loc);
    if (d > 1e-14) r = std::min(r, d);
  }
  return r;
}

const char* to_string(SingPoint point) {
  switch (point) {
    case SingPoint::zero:
      return "0";
    case SingPoint::one:
      return "1";
    case SingPoint::a_point:
      return "a";
  }
  return "?";
}

}  // namespace heun
