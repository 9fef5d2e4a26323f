#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qct/qsim.hpp"

namespace qct {

/// Total function f : X x Y -> Z stored as a row-major table of values in
/// [0, size_z). Indices are 0-based; families with 1-indexed conventions
/// convert at this interface.
struct FunctionTable {
  std::string name;
  std::size_t size_x = 0;
  std::size_t size_y = 0;
  std::size_t size_z = 0;
  std::vector<int> table;

  int value(std::size_t x, std::size_t y) const;
};

FunctionTable make_function_table(std::string name, std::size_t size_x, std::size_t size_y,
                                  std::size_t size_z, std::vector<int> table);

/// Identity transmission target: f(x, 0) = x with a single dummy column.
FunctionTable identity_table(std::size_t size_x);

/// Strict greater-than on [N] x [N] (inputs 1-indexed in the interface,
/// stored 0-indexed): value(i, j) = 1 iff i > j on the stored indices.
FunctionTable make_gt(std::size_t n);

bool is_odd_prime(std::size_t q);

/// Quadratic character of F_q as an encoded table chi[x]:
/// 1 for a nonzero square, 0 for x = 0, 2 for a nonsquare (encoding -1).
std::vector<int> make_chi(std::size_t q);
int chi_signed(int encoded);  // {0,1,2} -> {0,1,-1}

/// PS(x,y) = 1 iff x + y is a square in F_q (0 counts as a square).
FunctionTable make_ps(std::size_t q);
/// PS'(x,y) = chi(x+y), encoded into Z = {0,1,2}.
FunctionTable make_ps_prime(std::size_t q);

/// Composed index/inner-product family. X = {0,1}^{nq} split into n blocks
/// of q bits (block i, bit j stored MSB-first); Y = [q] x {0,1}^n with
/// column index (j-1)*2^n + y; f(x,(j,y)) = sum_i y_i * x_{ij} mod 2.
FunctionTable make_composed(std::size_t n, std::size_t q);

std::size_t composed_bit(std::size_t x, std::size_t i, std::size_t j, std::size_t n,
                         std::size_t q);  // x_{ij}, i,j 1-indexed
std::size_t composed_col(std::size_t j, std::size_t y, std::size_t n, std::size_t q);

/// Smallest row subset of the given size that keeps every row whose blocks
/// 2..n are all zero (ascending completion).
std::vector<std::size_t> default_restriction(std::size_t n, std::size_t q, std::size_t size);

/// Restricts a composed table to the given rows (must be sorted, unique, and
/// contain every row with blocks 2..n zero).
FunctionTable restrict_composed(const FunctionTable& f, std::size_t n, std::size_t q,
                                const std::vector<std::size_t>& rows);

/// Standard oracle for a hidden row: |y>|a> -> |y>|a + f(x,y) mod |Z|> on
/// target names ("y", "answer").
struct OracleUnitary {
  FunctionTable base;
  std::size_t hidden_x = 0;
  LocalUnitary unitary;
};

OracleUnitary make_oracle(const FunctionTable& f, std::size_t x);

/// Oracle body retargeted onto arbitrary registers; the y register may be
/// wider than |Y| (extra digits are fixed points).
LocalUnitary oracle_on(const FunctionTable& f, std::size_t x, const std::string& y_reg,
                       std::size_t y_dim, const std::string& z_reg);

/// Layout (y, anc, c, ans) for the controlled-oracle circuit.
RegisterLayout controlled_oracle_layout(std::size_t size_y);

/// Controlled oracle for |Z| = 2 built from two plain oracle calls and a
/// Toffoli: |y>|0>|c>|a> -> |y>|0>|c>|a xor c*f(x,y)>.
Circuit controlled_oracle(const OracleUnitary& oracle);

/// Row of the composed family whose first block equals h and whose other
/// blocks are zero. h has q entries in {0,1}.
std::size_t embed_or_instance(const std::vector<int>& h, std::size_t n, std::size_t q);

/// Direct controlled oracle |j,y>|a> -> |j,y>|a xor y_1*h(j)> on ("y","answer"),
/// for comparison against the embedded row's oracle.
LocalUnitary controlled_or_oracle(const std::vector<int>& h, std::size_t n, std::size_t q);

FunctionTable load_function_table(const std::string& json_text);
std::string save_function_table(const FunctionTable& f);

}  // namespace qct
