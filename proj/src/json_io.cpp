#include "kqp/json_io.hpp"

#include <cstdio>
#include <fstream>

namespace kqp {

namespace {

// lexicographic positivity over the concatenated (ell, j)
bool lex_positive(const MultiIndex& k) {
  for (int c : k.ell) {
    if (c > 0) return true;
    if (c < 0) return false;
  }
  for (int c : k.j) {
    if (c > 0) return true;
    if (c < 0) return false;
  }
  return false;  // the zero index is handled separately
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ordered_json torus_function_to_json(const TorusFunction& u) {
  ordered_json out;
  out["nu"] = u.nu();
  out["d"] = u.d();
  out["box"] = {u.box().Lphi(), u.box().Lx()};
  ordered_json modes = ordered_json::array();
  for (long f = 0; f < u.size(); ++f) {
    cplx v = u.coeffs()[f];
    if (v == cplx(0, 0)) continue;
    MultiIndex k = u.box().unflat(f);
    if (!lex_positive(k) && sup_norm(k) != 0) continue;
    ordered_json m;
    m["ell"] = k.ell;
    m["j"] = k.j;
    m["re"] = v.real();
    m["im"] = v.imag();
    modes.push_back(std::move(m));
  }
  out["modes"] = std::move(modes);
  return out;
}

TorusFunction torus_function_from_json(const ordered_json& j) {
  int nu = j.at("nu").get<int>();
  int d = j.at("d").get<int>();
  auto box = j.at("box");
  TorusFunction u(Box(nu, d, box.at(0).get<int>(), box.at(1).get<int>()));
  for (const auto& m : j.at("modes")) {
    MultiIndex k{m.at("ell").get<std::vector<int>>(), m.at("j").get<std::vector<int>>()};
    cplx v(m.at("re").get<double>(), m.at("im").get<double>());
    if (sup_norm(k) == 0) {
      u.set_coeff(k, v.real());
    } else {
      u.set_mode_pair(k, v);
    }
  }
  return u;
}

void save_torus_function(const TorusFunction& u, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << torus_function_to_json(u).dump(2) << "\n";
}

TorusFunction load_torus_function(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  ordered_json j;
  is >> j;
  return torus_function_from_json(j);
}

void dump_decay_matrix_csv(const DecayMatrix& m, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << "ell_row,j_row,ell_col,j_col,re,im\n";
  auto write_vec = [&os](const std::vector<int>& v) {
    for (size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  };
  for (long i = 0; i < m.nrows(); ++i)
    for (long j = 0; j < m.ncols(); ++j) {
      cplx v = m.mat()(i, j);
      if (v == cplx(0, 0)) continue;
      write_vec(m.rows()[i].ell);
      os << ",";
      write_vec(m.rows()[i].j);
      os << ",";
      write_vec(m.cols()[j].ell);
      os << ",";
      write_vec(m.cols()[j].j);
      os << "," << fmt_double(v.real()) << "," << fmt_double(v.imag()) << "\n";
    }
}

ordered_json reduction_report(const ReductionResult& red, double conj_residual) {
  const double s0 = s0_of(static_cast<int>(red.omega.size()), red.u.d());
  ordered_json out;
  out["mu"] = red.mu;
  out["norm_a"] = red.a.sobolev_norm(s0);
  out["norm_alpha"] = red.alpha.sobolev_norm(s0);
  out["norm_a1"] = red.a1.sobolev_norm(s0);
  TorusFunction bm1 = red.b;
  MultiIndex origin{std::vector<int>(red.b.nu(), 0), std::vector<int>(red.b.d(), 0)};
  bm1.set_coeff(origin, bm1.coeff(origin) - 1.0);
  out["norm_b_minus_1"] = bm1.sobolev_norm(s0);
  out["decay_norm_R2_s0"] = red.materialized ? red.R2.decay_norm(s0) : -1.0;
  out["conjugation_residual"] = conj_residual;
  out["a1_mean_rel"] = red.a1_mean_rel;
  return out;
}

ordered_json scan_summary(const ScanReport& rep) {
  ordered_json out;
  out["epsilon"] = rep.epsilon;
  out["lambda_points"] = rep.rows.size();
  out["bad_fraction"] = rep.bad_fraction;
  long nbar = 0, ntilde = 0, nconv = 0;
  for (auto& r : rep.rows) {
    nbar += r.in_bar;
    ntilde += r.in_tilde;
    nconv += r.solver_converged;
  }
  out["frac_in_bar"] = rep.rows.empty() ? 0.0 : double(nbar) / rep.rows.size();
  out["frac_in_tilde"] = rep.rows.empty() ? 0.0 : double(ntilde) / rep.rows.size();
  out["frac_converged"] = rep.rows.empty() ? 0.0 : double(nconv) / rep.rows.size();
  return out;
}

void write_scan_csv(const ScanReport& rep, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << "lambda,in_I_bar,in_I_tilde,solver_converged,solver_residual,bad";
  for (int N : rep.N_list) os << ",J" << N << "_ok,G0_" << N << "_ok,G0_" << N << "_count";
  for (int N : rep.N_list)
    for (const auto& j0 : rep.j0_list) {
      os << ",meas_N" << N << "_j0_";
      for (size_t i = 0; i < j0.size(); ++i) os << (i ? "_" : "") << j0[i];
    }
  os << "\n";
  for (const auto& r : rep.rows) {
    os << fmt_double(r.lambda) << "," << r.in_bar << "," << r.in_tilde << ","
       << r.solver_converged << "," << fmt_double(r.solver_residual) << "," << r.bad;
    for (int N : rep.N_list) {
      os << "," << (r.JN_ok.count(N) ? r.JN_ok.at(N) : false) << ","
         << (r.G0_ok.count(N) ? r.G0_ok.at(N) : false) << ","
         << (r.G0_intervals.count(N) ? r.G0_intervals.at(N) : -1);
    }
    for (int N : rep.N_list)
      for (const auto& j0 : rep.j0_list) {
        double meas = -1;
        MultiIndex mk{{}, j0};
        auto it = r.theta_meas.find({N, static_cast<long>(pack_key(mk) & 0x7fffffff)});
        if (it != r.theta_meas.end()) meas = it->second;
        os << "," << fmt_double(meas);
      }
    os << "\n";
  }
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace kqp
