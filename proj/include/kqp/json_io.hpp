#ifndef KQP_JSON_IO_HPP
#define KQP_JSON_IO_HPP

#include <string>

#include <json.hpp>

#include "kqp/measure_scan.hpp"
#include "kqp/reduction.hpp"

namespace kqp {

using ordered_json = nlohmann::ordered_json;

// {nu, d, box:[Lphi,Lx], modes:[{ell, j, re, im}...]}; one mode per conjugate
// pair, the representative being the lexicographically positive index.
ordered_json torus_function_to_json(const TorusFunction& u);
TorusFunction torus_function_from_json(const ordered_json& j);

void save_torus_function(const TorusFunction& u, const std::string& path);
TorusFunction load_torus_function(const std::string& path);

// CSV rows (ell_row, j_row, ell_col, j_col, re, im), zero entries skipped.
void dump_decay_matrix_csv(const DecayMatrix& m, const std::string& path);

// {mu, norm_a, norm_alpha, norm_a1, norm_b_minus_1, decay_norm_R2_s0,
//  conjugation_residual}
ordered_json reduction_report(const ReductionResult& red, double conj_residual);

ordered_json scan_summary(const ScanReport& rep);
void write_scan_csv(const ScanReport& rep, const std::string& path);

// FNV-1a hash of a byte string, hex-encoded; stamps every output file.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace kqp

#endif
