#ifndef KQP_CONFIG_HPP
#define KQP_CONFIG_HPP

#include <string>

#include "kqp/json_io.hpp"

namespace kqp {

// Parsed run configuration (JSON file with problem / numerics / exponents /
// scan sections); see the repository README for the schema.
struct RunConfig {
  // problem
  int nu = 1, d = 1;
  double epsilon = 1e-3;
  double lambda = 1.0;
  FrequencyData fd;
  std::string forcing_name = "cos_phi_cos_x";
  std::string forcing_file;  // overrides the preset when set

  // numerics
  SolveOptions solve;

  // exponents
  ExponentSet exponents;
  bool exponents_explicit = false;

  // scan
  ScanParams scan;
  double lambda_min = 0.5, lambda_max = 1.5;
  int lambda_points = 200;

  // diagnose
  double diag_theta = 0.0;
  int diag_N = 4;
  int diag_ambient = -1;  // < 0: max(2 N^2, 16)

  int threads = 1;
  unsigned long seed = 1;
  std::string config_hash;  // FNV-1a of the raw file bytes
  std::string raw;

  TorusFunction make_forcing() const;
  ProblemData make_problem_data() const;

  static RunConfig load(const std::string& path);
  static RunConfig from_json(const ordered_json& j, const std::string& raw_bytes);
};

// Named forcings with zero total average.
TorusFunction forcing_preset(const std::string& name, int nu, int d);

}  // namespace kqp

#endif
