#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qct/entropy.hpp"

namespace qct {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

/// Hard ceiling on state-vector length. Defaults to 2^20 amplitudes; the
/// QT_DIM_CAP environment variable or set_dimension_cap override it.
std::size_t dimension_cap();
void set_dimension_cap(std::size_t cap);

enum class Owner { Alice, Bob, Shared };

std::string owner_name(Owner o);
Owner owner_from_name(const std::string& s);

struct Register {
  std::string name;
  std::size_t dim = 0;
  Owner owner = Owner::Shared;
};

/// Ordered list of named qudit registers. The first register is the most
/// significant digit of the global index; register dims are >= 2 and the
/// product of dims stays within the dimension cap.
class RegisterLayout {
 public:
  RegisterLayout() = default;
  static RegisterLayout create(std::vector<Register> regs);
  static RegisterLayout create(std::vector<Register> regs, std::size_t cap);

  std::size_t total_dim() const { return total_dim_; }
  std::size_t size() const { return regs_.size(); }
  const std::vector<Register>& registers() const { return regs_; }
  const Register& reg(std::size_t i) const { return regs_.at(i); }

  bool has(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;  // throws std::out_of_range
  std::size_t dim_of(const std::string& name) const;
  std::size_t stride(std::size_t reg_index) const { return strides_.at(reg_index); }

  std::size_t digit(std::size_t global_index, std::size_t reg_index) const;
  std::vector<std::size_t> digits(std::size_t global_index) const;

  /// Same register names and dims, in the same order (owners ignored).
  bool same_shape(const RegisterLayout& other) const;

 private:
  std::vector<Register> regs_;
  std::vector<std::size_t> strides_;
  std::map<std::string, std::size_t> index_;
  std::size_t total_dim_ = 1;
};

/// Dense state vector over a layout. Normalized within 1e-9 unless the state
/// is explicitly flagged (difference vectors are the only unnormalized use).
struct QState {
  RegisterLayout layout;
  cvec amps;
  bool normalized = true;
};

QState make_state(RegisterLayout layout, cvec amps, bool normalized = true);
QState basis_state(const RegisterLayout& layout, const std::map<std::string, std::size_t>& assign);

/// Product-state builder: every register gets either a basis assignment or a
/// slot in exactly one amplitude block. A block spans the named registers in
/// the given order (first name most significant within the block).
QState make_product_state(
    const RegisterLayout& layout, const std::map<std::string, std::size_t>& basis,
    const std::vector<std::pair<std::vector<std::string>, cvec>>& blocks);

/// Unnormalized difference a - b; layouts must match in shape.
QState state_difference(const QState& a, const QState& b);

double state_norm(const QState& s);
cplx state_inner(const QState& a, const QState& b);  // <a|b>

/// Unitary acting on an ordered subset of registers. Two backends:
///  - Dense: row-major dim x dim matrix (dim = product of target dims),
///  - PermPhase: |i> -> phase[i] |perm[i]> on the target subspace.
/// Factories validate unitarity at construction (1e-9 for dense matrices,
/// exact bijection plus unit-modulus phases for PermPhase).
class LocalUnitary {
 public:
  enum class Kind { Dense, PermPhase };

  static LocalUnitary dense(std::vector<std::string> targets, std::vector<std::size_t> dims,
                            cvec matrix);
  static LocalUnitary perm_phase(std::vector<std::string> targets, std::vector<std::size_t> dims,
                                 std::vector<std::size_t> perm, cvec phases);
  /// Permutation with all phases +1, given as a function on target-space indices.
  template <typename F>
  static LocalUnitary permutation(std::vector<std::string> targets, std::vector<std::size_t> dims,
                                  F&& f) {
    std::size_t d = 1;
    for (auto x : dims) d *= x;
    std::vector<std::size_t> perm(d);
    for (std::size_t i = 0; i < d; ++i) perm[i] = f(i);
    return perm_phase(std::move(targets), std::move(dims), std::move(perm), cvec(d, cplx(1.0, 0.0)));
  }

  Kind kind() const { return kind_; }
  const std::vector<std::string>& targets() const { return targets_; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t dim() const { return dim_; }
  const cvec& matrix() const { return matrix_; }
  const std::vector<std::size_t>& perm() const { return perm_; }
  const cvec& phases() const { return phases_; }

  LocalUnitary inverse() const;
  LocalUnitary retarget(std::vector<std::string> new_targets) const;
  cvec to_matrix() const;  // row-major dim x dim, either backend

  /// True when the permutation never changes the digit of target position t
  /// (the register is only read). Dense backends report false.
  bool preserves_digit(std::size_t target_pos) const;

  /// Digit of target-space index i at target position t.
  std::size_t target_digit(std::size_t i, std::size_t target_pos) const;

 private:
  Kind kind_ = Kind::Dense;
  std::vector<std::string> targets_;
  std::vector<std::size_t> dims_;
  std::size_t dim_ = 0;
  cvec matrix_;
  std::vector<std::size_t> perm_;
  cvec phases_;
};

/// Applies u to the named registers of s. Cost O(total_dim * target_dim) for
/// dense bodies, O(total_dim) for permutations; no global matrix is formed.
QState apply(const QState& s, const LocalUnitary& u);

/// Born distribution of the named registers, in the given order.
Distribution measure_distribution(const QState& s, const std::vector<std::string>& regs);
Distribution measure_all(const QState& s);

double l2_distance(const QState& a, const QState& b);
double tv_distance(const Distribution& p, const Distribution& q);

// --- common gates -----------------------------------------------------------

LocalUnitary gate_x(const std::string& reg);
LocalUnitary gate_h(const std::string& reg);
LocalUnitary gate_cnot(const std::string& control, const std::string& target);
LocalUnitary gate_toffoli(const std::string& c1, const std::string& c2, const std::string& target);
/// |z>|a> -> |z>|a + z mod ddim> (z read mod ddim).
LocalUnitary gate_add_value(const std::string& src, std::size_t sdim, const std::string& dst,
                            std::size_t ddim);
LocalUnitary gate_add_const(const std::string& reg, std::size_t dim, std::size_t c);
/// Cyclic shift restricted to digits < mod (digits >= mod are fixed points).
LocalUnitary gate_shift_mod(const std::string& reg, std::size_t dim, long shift, std::size_t mod);

// --- circuits ----------------------------------------------------------------

struct CircuitGate {
  LocalUnitary u;
  bool is_oracle_call = false;
};

struct Circuit {
  std::vector<CircuitGate> gates;
  std::size_t oracle_calls() const;
};

QState apply_circuit(const QState& s, const Circuit& c, std::size_t* call_counter = nullptr);

// --- small dense-matrix helpers ----------------------------------------------

cvec mat_identity(std::size_t n);
cvec mat_mul(const cvec& a, const cvec& b, std::size_t n);
cvec mat_dagger(const cvec& a, std::size_t n);
cvec mat_kron(const cvec& a, std::size_t na, const cvec& b, std::size_t nb);
double mat_max_abs_diff(const cvec& a, const cvec& b);

}  // namespace qct
