// heun: evaluation tables, connection matrices, monodromy, and
// Regge-Wheeler quasinormal-mode spectra from the command line.
//
// Exit codes: 0 success, 2 input error, 3 numerical failure.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "heun/connection.hpp"
#include "heun/continuation.hpp"
#include "heun/frobenius.hpp"
#include "heun/io_json.hpp"
#include "heun/oracles.hpp"
#include "heun/params.hpp"
#include "heun/spectral.hpp"

namespace {

using heun::Complex;
using nlohmann::json;

Complex parse_complex(const std::string& s) {
  // "re,im" or plain "re"
  const auto comma = s.find(',');
  try {
    if (comma == std::string::npos) return Complex(std::stod(s), 0.0);
    return Complex(std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1)));
  } catch (const std::exception&) {
    throw heun::Error(heun::ErrorKind::invalid_argument,
                      "complex flags use re,im syntax (e.g. 1.5,-0.25): got '" +
                          s + "'");
  }
}

heun::SingPoint parse_point(const std::string& s) {
  if (s == "0") return heun::SingPoint::zero;
  if (s == "1") return heun::SingPoint::one;
  if (s == "a") return heun::SingPoint::a_point;
  throw heun::Error(heun::ErrorKind::invalid_argument,
                    "point must be one of 0, 1, a");
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw heun::Error(heun::ErrorKind::invalid_argument,
                      "cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw heun::Error(heun::ErrorKind::invalid_argument,
                      std::string("malformed JSON in ") + path + ": " + e.what());
  }
  return j;
}

heun::ContinuationOptions continuation_options() {
  heun::ContinuationOptions opts;
  if (const char* env = std::getenv("HEUN_MAX_STEPS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v > 0) opts.max_steps = v;
  }
  return opts;
}

struct EvalArgs {
  std::string a, q, alpha, beta, gamma, epsilon, mu, nu;
  std::string params_file;
  std::string z;
  std::string point = "0";
  int branch = 1;
  double tol = 1e-10;
  int n_terms = 400;
  std::string path_file;
};

// Evaluate a local solution at z: by series inside the disc, otherwise by
// seeding at 0.5*radius toward z and continuing along the default path.
json run_eval(const heun::EquationParams& eq, const heun::FrobeniusSolution& sol,
              Complex z, double tol, const std::string& path_file) {
  using namespace heun;
  const double dist = std::abs(z - sol.location);
  json out;
  if (dist <= 0.9 * sol.radius && path_file.empty()) {
    out["result"] = io::to_json(eval_series(sol, z, tol));
    out["method"] = "series";
    return out;
  }
  const Complex dirv = dist > 0.0 ? (z - sol.location) / dist : Complex(1.0);
  const Complex seed_z = sol.location + 0.5 * sol.radius * dirv;
  const StatePair seed = state_at(sol, seed_z, std::min(tol * 1e-2, 1e-12));
  const ContinuationPath path =
      path_file.empty() ? default_path(eq, seed_z, z)
                        : io::path_from_json(eq, load_json_file(path_file));
  if (path_file.empty())
    std::cerr << "note: z lies outside the series disc; continuing along the "
                 "default path (detours toward the upper half-plane)\n";
  const ContinuationResult r =
      continue_along_path(eq, seed, path, tol, continuation_options());
  out["result"] = json{{"value", io::to_json(r.state.h)},
                       {"derivative", io::to_json(r.state.hp)},
                       {"est_error", r.est_error},
                       {"steps", r.steps}};
  out["method"] = "series+continuation";
  out["path"] = io::to_json(path);
  return out;
}

int cmd_eval(const EvalArgs& a, bool confluent) {
  using namespace heun;
  EquationParams eq = [&]() -> EquationParams {
    if (!a.params_file.empty()) {
      const json j = load_json_file(a.params_file);
      if (confluent) return io::confluent_params_from_json(j);
      return io::heun_params_from_json(j);
    }
    if (confluent)
      return ConfluentParams(parse_complex(a.alpha), parse_complex(a.beta),
                             parse_complex(a.gamma), parse_complex(a.mu),
                             parse_complex(a.nu));
    return HeunParams(parse_complex(a.a), parse_complex(a.q),
                      parse_complex(a.alpha), parse_complex(a.beta),
                      parse_complex(a.gamma), parse_complex(a.epsilon));
  }();

  const SingPoint point = parse_point(a.point);
  const Branch branch = a.branch == 1 ? Branch::first : Branch::second;
  const FrobeniusSolution sol =
      confluent ? confluent_series(std::get<ConfluentParams>(eq), point, branch,
                                   a.n_terms)
                : general_series(std::get<HeunParams>(eq), point, branch,
                                 a.n_terms);

  json out = run_eval(eq, sol, parse_complex(a.z), a.tol, a.path_file);
  out["params"] = confluent ? io::to_json(std::get<ConfluentParams>(eq))
                            : io::to_json(std::get<HeunParams>(eq));
  out["point"] = to_string(point);
  out["branch"] = a.branch;
  out["z"] = io::to_json(parse_complex(a.z));
  out["tolerance"] = a.tol;
  std::cout << out.dump(2) << "\n";
  return 0;
}

struct ConnectArgs {
  bool confluent = false;
  std::string params_file;
  std::string from = "0", to = "1";
  std::string path_file;
  double tol = 1e-10;
};

int cmd_connect(const ConnectArgs& a) {
  using namespace heun;
  const json pj = load_json_file(a.params_file);
  const EquationParams eq = a.confluent
                                ? EquationParams(io::confluent_params_from_json(pj))
                                : EquationParams(io::heun_params_from_json(pj));
  const SingPoint from = parse_point(a.from);
  const SingPoint to = parse_point(a.to);
  const ConnectionMatrix C =
      a.path_file.empty()
          ? connection_matrix(eq, from, to, a.tol, continuation_options())
          : connection_matrix(eq, from, to,
                              io::path_from_json(eq, load_json_file(a.path_file)),
                              a.tol, continuation_options());
  json out = io::to_json(C);
  out["params"] = a.confluent ? io::to_json(std::get<ConfluentParams>(eq))
                              : io::to_json(std::get<HeunParams>(eq));
  std::cout << out.dump(2) << "\n";
  return 0;
}

struct MonodromyArgs {
  bool confluent = false;
  std::string params_file;
  std::string around = "0";
  double radius_frac = 0.5;
  double tol = 1e-10;
  int n_terms = 400;
};

int cmd_monodromy(const MonodromyArgs& a) {
  using namespace heun;
  const json pj = load_json_file(a.params_file);
  const EquationParams eq = a.confluent
                                ? EquationParams(io::confluent_params_from_json(pj))
                                : EquationParams(io::heun_params_from_json(pj));
  const SingPoint around = parse_point(a.around);
  const Complex center = location_of(eq, around);
  const double radius = a.radius_frac * local_radius(eq, around);

  const auto mk = [&](Branch br) {
    if (const auto* g = std::get_if<HeunParams>(&eq))
      return general_series(*g, around, br, a.n_terms);
    return confluent_series(std::get<ConfluentParams>(eq), around, br, a.n_terms);
  };
  const FrobeniusSolution b1 = mk(Branch::first);
  const FrobeniusSolution b2 = mk(Branch::second);
  const ContinuationPath loop = circular_loop(eq, center, radius);
  const MonodromyResult m =
      monodromy_matrix(eq, b1, b2, loop, a.tol, continuation_options());

  const auto ev = m.matrix.eigenvalues();
  json out{{"around", to_string(around)},
           {"matrix", io::to_json(m.matrix)},
           {"eigenvalues", json::array({io::to_json(ev[0]), io::to_json(ev[1])})},
           {"det", io::to_json(m.matrix.det())},
           {"abel_defect", m.abel_defect},
           {"est_error", m.est_error},
           {"loop", io::to_json(loop)}};
  out["params"] = a.confluent ? io::to_json(std::get<ConfluentParams>(eq))
                              : io::to_json(std::get<HeunParams>(eq));
  std::cout << out.dump(2) << "\n";
  return 0;
}

struct QnmArgs {
  double M = 1.0;
  int ell = 2;
  int s = 2;
  std::string rho = "0,0";
  double r_surface = 0.0;  // 0 = horizon condition
  std::vector<double> region = {0.2, 0.5, -0.35, -0.02};
  std::vector<int> grid = {12, 12};
  double tol = 1e-8;
  std::string format = "csv";
  std::string emit_grid;
  bool audit = false;
  double z_match = 5.0;
};

int cmd_qnm(const QnmArgs& a) {
  using namespace heun;
  const Complex rho = parse_complex(a.rho);
  const std::optional<double> r_surface =
      a.r_surface > 0.0 ? std::optional<double>(a.r_surface) : std::nullopt;
  if (rho != Complex(0.0) && !r_surface)
    throw Error(ErrorKind::invalid_argument,
                "qnm: --r-surface is required when rho != 0");
  const RWProblem prob(a.M, a.ell, a.s, rho, r_surface);
  if (a.region.size() != 4)
    throw Error(ErrorKind::invalid_argument,
                "qnm: --region needs re_min,re_max,im_min,im_max");
  const Region region{a.region[0], a.region[1], a.region[2], a.region[3]};
  const int nx = a.grid.at(0);
  const int ny = a.grid.size() > 1 ? a.grid.at(1) : nx;

  SpectralOptions opts;
  opts.z_match = a.z_match;
  opts.continuation = continuation_options();
  const FindModesResult res =
      find_modes(prob, region, nx, ny, a.tol, opts, a.audit);

  if (!a.emit_grid.empty()) {
    std::ofstream g(a.emit_grid);
    g << "omega_re,omega_im,abs_det\n";
    for (const auto& smp : res.grid)
      g << std::setprecision(17) << smp.omega.real() << ',' << smp.omega.imag()
        << ',' << smp.abs_det << "\n";
    std::cerr << "grid scan written to " << a.emit_grid << "\n";
  }

  if (res.modes.empty())
    std::cerr << "note: no roots found in the scan region (" << res.n_seeds
              << " seeds, " << res.n_dropped << " dropped)\n";

  if (a.format == "csv") {
    std::cout << "ell,s,rho_re,rho_im,n,omega_re,omega_im,residual\n";
    for (const auto& m : res.modes) {
      std::cout << a.ell << ',' << a.s << ',' << std::setprecision(17)
                << rho.real() << ',' << rho.imag() << ',' << m.overtone_hint
                << ',' << m.omega.real() << ',' << m.omega.imag() << ','
                << std::setprecision(3) << m.residual << "\n";
    }
  } else {
    json out{{"problem",
              {{"M", a.M},
               {"ell", a.ell},
               {"s", a.s},
               {"rho", io::to_json(rho)}}},
             {"modes", json::array()},
             {"diagnostics",
              {{"n_seeds", res.n_seeds},
               {"n_dropped", res.n_dropped},
               {"grid", json::array({nx, ny})},
               {"tolerance", a.tol}}}};
    if (r_surface) out["problem"]["r_surface"] = *r_surface;
    for (const auto& m : res.modes) out["modes"].push_back(io::to_json(m));
    if (a.audit) out["diagnostics"]["winding_number"] = res.winding;
    std::cout << out.dump(2) << "\n";
  }
  if (a.audit && res.winding != static_cast<int>(res.modes.size()))
    std::cerr << "warning: winding number " << res.winding << " != "
              << res.modes.size() << " returned modes (grid too coarse?)\n";
  return 0;
}

struct OracleArgs {
  std::string which;
  int ell = 2, s = 2, n = 0, depth = 24000;
  double M = 1.0;
  std::string a, b, c, z;
};

int cmd_oracle(const OracleArgs& o) {
  using namespace heun;
  if (o.which == "leaver") {
    const Complex w = oracles::leaver_qnm(o.M, o.ell, o.s, o.n, o.depth);
    json out{{"oracle", "leaver"}, {"M", o.M},       {"ell", o.ell},
             {"s", o.s},           {"n", o.n},       {"depth", o.depth},
             {"omega", io::to_json(w)}};
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  if (o.which == "2f1") {
    const Complex v = oracles::gauss_2f1(parse_complex(o.a), parse_complex(o.b),
                                         parse_complex(o.c), parse_complex(o.z));
    json out{{"oracle", "2f1"}, {"value", io::to_json(v)}};
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  throw Error(ErrorKind::invalid_argument, "--oracle must be 'leaver' or '2f1'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "heun - Heun-function evaluation, connection matrices, monodromy, and "
      "Regge-Wheeler quasinormal modes"};
  app.require_subcommand(0, 1);

  // Hidden diagnostics surface.
  OracleArgs oracle_args;
  app.add_option("--oracle", oracle_args.which)->group("");
  app.add_option("--oracle-ell", oracle_args.ell)->group("");
  app.add_option("--oracle-s", oracle_args.s)->group("");
  app.add_option("--oracle-n", oracle_args.n)->group("");
  app.add_option("--oracle-depth", oracle_args.depth)->group("");
  app.add_option("--oracle-M", oracle_args.M)->group("");
  app.add_option("--oracle-a", oracle_args.a)->group("");
  app.add_option("--oracle-b", oracle_args.b)->group("");
  app.add_option("--oracle-c", oracle_args.c)->group("");
  app.add_option("--oracle-z", oracle_args.z)->group("");

  EvalArgs ev;
  CLI::App* eval = app.add_subcommand("eval", "evaluate a general Heun solution");
  eval->add_option("--a", ev.a, "singular point a (re,im)");
  eval->add_option("--q", ev.q, "accessory parameter (re,im)");
  eval->add_option("--alpha", ev.alpha);
  eval->add_option("--beta", ev.beta);
  eval->add_option("--gamma", ev.gamma);
  eval->add_option("--epsilon", ev.epsilon);
  eval->add_option("--params-file", ev.params_file, "JSON parameter file");
  eval->add_option("--z", ev.z, "evaluation point (re,im)")->required();
  eval->add_option("--point", ev.point, "expansion point: 0, 1 or a");
  eval->add_option("--branch", ev.branch, "1 (exponent 0) or 2")
      ->check(CLI::Range(1, 2));
  eval->add_option("--tol", ev.tol)->check(CLI::Range(1e-14, 1e-3));
  eval->add_option("--n-terms", ev.n_terms)->check(CLI::Range(8, 100000));
  eval->add_option("--path", ev.path_file, "continuation path JSON file");

  EvalArgs cev;
  CLI::App* ceval =
      app.add_subcommand("ceval", "evaluate a confluent Heun solution");
  ceval->add_option("--alpha", cev.alpha);
  ceval->add_option("--beta", cev.beta);
  ceval->add_option("--gamma", cev.gamma);
  ceval->add_option("--mu", cev.mu);
  ceval->add_option("--nu", cev.nu);
  ceval->add_option("--params-file", cev.params_file);
  ceval->add_option("--z", cev.z)->required();
  ceval->add_option("--point", cev.point, "expansion point: 0 or 1");
  ceval->add_option("--branch", cev.branch)->check(CLI::Range(1, 2));
  ceval->add_option("--tol", cev.tol)->check(CLI::Range(1e-14, 1e-3));
  ceval->add_option("--n-terms", cev.n_terms)->check(CLI::Range(8, 100000));
  ceval->add_option("--path", cev.path_file);

  ConnectArgs co;
  CLI::App* connect =
      app.add_subcommand("connect", "two-point connection matrix");
  connect->add_flag("--confluent", co.confluent);
  connect->add_option("--params-file", co.params_file)->required();
  connect->add_option("--from", co.from)->required();
  connect->add_option("--to", co.to)->required();
  connect->add_option("--path", co.path_file);
  connect->add_option("--tol", co.tol)->check(CLI::Range(1e-14, 1e-3));

  MonodromyArgs mo;
  CLI::App* monodromy =
      app.add_subcommand("monodromy", "monodromy matrix of a basis loop");
  monodromy->add_flag("--confluent", mo.confluent);
  monodromy->add_option("--params-file", mo.params_file)->required();
  monodromy->add_option("--around", mo.around)->required();
  monodromy->add_option("--radius-frac", mo.radius_frac)
      ->check(CLI::Range(0.05, 0.8));
  monodromy->add_option("--tol", mo.tol)->check(CLI::Range(1e-14, 1e-3));

  QnmArgs qn;
  CLI::App* qnm =
      app.add_subcommand("qnm", "Regge-Wheeler quasinormal mode spectrum");
  qnm->add_option("--M", qn.M, "mass (geometric units)");
  qnm->add_option("--ell", qn.ell)->required();
  qnm->add_option("--s", qn.s, "spin weight (2 = gravitational)");
  qnm->add_option("--rho", qn.rho, "surface reflection coefficient (re,im)");
  qnm->add_option("--r-surface", qn.r_surface, "surface radius (> 2M)");
  qnm->add_option("--region", qn.region,
                  "omega-plane rectangle: re_min,re_max,im_min,im_max")
      ->delimiter(',')
      ->expected(4);
  qnm->add_option("--grid", qn.grid, "scan grid nx[,ny]")
      ->delimiter(',')
      ->expected(1, 2);
  qnm->add_option("--tol", qn.tol)->check(CLI::Range(1e-14, 1e-3));
  qnm->add_option("--format", qn.format)->check(CLI::IsMember({"csv", "json"}));
  qnm->add_option("--emit-grid", qn.emit_grid,
                  "write the |D| scan grid to this CSV file");
  qnm->add_flag("--audit", qn.audit, "argument-principle audit of mode count");
  qnm->add_option("--z-match", qn.z_match)->check(CLI::Range(1.2, 20.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (!oracle_args.which.empty()) return cmd_oracle(oracle_args);
    if (eval->parsed()) return cmd_eval(ev, false);
    if (ceval->parsed()) return cmd_eval(cev, true);
    if (connect->parsed()) return cmd_connect(co);
    if (monodromy->parsed()) return cmd_monodromy(mo);
    if (qnm->parsed()) return cmd_qnm(qn);
    std::cout << app.help();
    return 0;
  } catch (const heun::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.input_error() ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
