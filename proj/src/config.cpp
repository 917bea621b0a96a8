#include "kqp/config.hpp"

#include <fstream>
#include <sstream>

namespace kqp {

TorusFunction forcing_preset(const std::string& name, int nu, int d) {
  auto mk = [&](int Lphi, int Lx) { return TorusFunction(Box(nu, d, Lphi, Lx)); };
  auto unit = [&](std::initializer_list<int> ell, std::initializer_list<int> j,
                  TorusFunction& f, double amp) {
    MultiIndex k{std::vector<int>(ell), std::vector<int>(j)};
    if (static_cast<int>(k.ell.size()) != nu || static_cast<int>(k.j.size()) != d)
      throw ConfigError("forcing preset '" + name + "' needs nu/d matching its modes");
    f.set_mode_pair(k, amp);
  };
  if (name == "cos_phi_cos_x") {
    // cos(phi_1) cos(x_1): four exponential modes of amplitude 1/4
    TorusFunction f = mk(1, 1);
    std::vector<int> e(nu, 0), jp(d, 0), jm(d, 0);
    e[0] = 1;
    jp[0] = 1;
    jm[0] = -1;
    f.set_mode_pair(MultiIndex{e, jp}, 0.25);
    f.set_mode_pair(MultiIndex{e, jm}, 0.25);
    return f;
  }
  if (name == "two_mode") {
    TorusFunction f = mk(2, 2);
    std::vector<int> e1(nu, 0), j1(d, 0), e2(nu, 0), j2(d, 0);
    e1[0] = 1;
    j1[0] = 1;
    e2[0] = 2;
    j2[0] = -1;
    f.set_mode_pair(MultiIndex{e1, j1}, 0.25);
    f.set_mode_pair(MultiIndex{e2, j2}, cplx(0.1, 0.05));
    return f;
  }
  if (name == "phi_only_cos") {
    // pure x-average forcing; exercises the v0 branch
    TorusFunction f = mk(1, 0);
    std::vector<int> e(nu, 0), j0(d, 0);
    e[0] = 1;
    f.set_mode_pair(MultiIndex{e, j0}, 0.5);
    return f;
  }
  (void)unit;
  throw ConfigError("unknown forcing preset '" + name + "'");
}

TorusFunction RunConfig::make_forcing() const {
  if (!forcing_file.empty()) return load_torus_function(forcing_file);
  return forcing_preset(forcing_name, nu, d);
}

ProblemData RunConfig::make_problem_data() const {
  return make_problem(fd, epsilon, make_forcing());
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  std::string raw = ss.str();
  ordered_json j;
  try {
    j = ordered_json::parse(raw);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return from_json(j, raw);
}

namespace {

template <typename T>
T get_or(const ordered_json& j, const char* key, T def) {
  if (!j.contains(key)) return def;
  try {
    return j.at(key).get<T>();
  } catch (const std::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

}  // namespace

RunConfig RunConfig::from_json(const ordered_json& j, const std::string& raw_bytes) {
  RunConfig c;
  c.raw = raw_bytes;
  c.config_hash = fnv1a_hex(raw_bytes);

  if (j.contains("problem")) {
    const auto& p = j.at("problem");
    c.nu = get_or(p, "nu", 1);
    c.d = get_or(p, "d", 1);
    if (c.nu < 1 || c.d < 1) throw ConfigError("problem.nu and problem.d must be >= 1");
    c.epsilon = get_or(p, "epsilon", 1e-3);
    c.lambda = get_or(p, "lambda", 1.0);
    if (p.contains("omega_bar")) {
      if (p.at("omega_bar").is_string()) {
        c.fd = frequency_preset(p.at("omega_bar").get<std::string>());
      } else {
        c.fd.omega_bar = p.at("omega_bar").get<std::vector<double>>();
      }
    } else {
      c.fd = frequency_preset(c.nu == 1 ? "sqrt2" : "one_cbrt2");
    }
    if (static_cast<int>(c.fd.omega_bar.size()) != c.nu)
      throw ConfigError("problem.omega_bar length does not match problem.nu");
    c.fd.gamma0 = get_or(p, "gamma0", c.fd.gamma0);
    c.forcing_name = get_or<std::string>(p, "forcing", "cos_phi_cos_x");
    c.forcing_file = get_or<std::string>(p, "forcing_file", "");
  }

  if (j.contains("numerics")) {
    const auto& n = j.at("numerics");
    c.solve.box_phi = get_or(n, "box_phi", 16);
    c.solve.box_x = get_or(n, "box_x", 16);
    c.solve.N0 = get_or(n, "N0", 8.0);
    c.solve.max_steps = get_or(n, "max_steps", 8);
    c.solve.tol = get_or(n, "tol", 1e-9);
    c.solve.reduce.pad = get_or(n, "pad", -1);
    c.solve.reduce.oversample = get_or(n, "oversample", 2);
    if (c.solve.box_phi < 1 || c.solve.box_x < 1)
      throw ConfigError("numerics.box_phi and numerics.box_x must be >= 1");
    if (!(c.solve.N0 > 1)) throw ConfigError("numerics.N0 must exceed 1");
  }

  c.exponents = ExponentSet::suggest(c.nu, c.d);
  if (j.contains("exponents")) {
    const auto& e = j.at("exponents");
    c.exponents_explicit = true;
    c.exponents.tau = get_or(e, "tau", c.exponents.tau);
    c.exponents.delta = get_or(e, "delta", c.exponents.delta);
    c.exponents.kappa1 = get_or(e, "kappa1", c.exponents.kappa1);
    c.exponents.kappa2 = get_or(e, "kappa2", c.exponents.kappa2);
    c.exponents.kappa3 = get_or(e, "kappa3", c.exponents.kappa3);
    c.exponents.sigma = get_or(e, "sigma", c.exponents.sigma);
    c.exponents.s0 = get_or(e, "s0", c.exponents.s0);
    c.exponents.s1 = get_or(e, "s1", c.exponents.s1);
    c.exponents.S = get_or(e, "S", c.exponents.S);
  }

  c.scan.solve = c.solve;
  c.scan.solve.box_phi = std::min(c.solve.box_phi, 8);
  c.scan.solve.box_x = std::min(c.solve.box_x, 8);
  c.scan.solve.N0 = std::min(c.solve.N0, 4.0);
  if (j.contains("scan")) {
    const auto& s = j.at("scan");
    c.lambda_min = get_or(s, "lambda_min", 0.5);
    c.lambda_max = get_or(s, "lambda_max", 1.5);
    c.lambda_points = get_or(s, "lambda_points", 200);
    if (c.lambda_points < 1) throw ConfigError("scan.lambda_points must be >= 1");
    c.scan.N_list = get_or(s, "N_list", std::vector<int>{4, 8});
    c.scan.tau0 = get_or(s, "tau0", 2.0);
    c.scan.tau1 = get_or(s, "tau1", 2.0);
    c.scan.N0_dio = get_or(s, "N0_dio", 5);
    c.scan.max_coeff_tilde = get_or(s, "max_coeff_tilde", 3);
    c.scan.frak_e = get_or(s, "frak_e", -1.0);
    if (s.contains("j0_list"))
      c.scan.j0_list = s.at("j0_list").get<std::vector<std::vector<int>>>();
    if (s.contains("box_phi")) c.scan.solve.box_phi = s.at("box_phi").get<int>();
    if (s.contains("box_x")) c.scan.solve.box_x = s.at("box_x").get<int>();
    if (s.contains("N0")) c.scan.solve.N0 = s.at("N0").get<double>();
    if (s.contains("max_steps")) c.scan.solve.max_steps = s.at("max_steps").get<int>();
    if (s.contains("tol")) c.scan.solve.tol = s.at("tol").get<double>();
  }
  // scan boxes must cover the largest probed truncation
  for (int N : c.scan.N_list) {
    c.scan.solve.box_phi = std::max(c.scan.solve.box_phi, N);
    c.scan.solve.box_x = std::max(c.scan.solve.box_x, N);
  }
  c.scan.exponents = c.exponents;

  if (j.contains("diagnose")) {
    const auto& dgn = j.at("diagnose");
    c.diag_theta = get_or(dgn, "theta", 0.0);
    c.diag_N = get_or(dgn, "N", 4);
    c.diag_ambient = get_or(dgn, "ambient", -1);
  }

  c.threads = get_or(j, "threads", 1);
  c.seed = get_or(j, "seed", 1ul);
  c.scan.threads = c.threads;
  return c;
}

}  // namespace kqp
