#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qct/ftab.hpp"
#include "qct/qsim.hpp"

namespace qct {

/// One protocol round: the actor applies a local unitary to registers it
/// owns, then hands the listed qubit registers (dim 2) to the other player.
/// Either part may be absent.
struct Round {
  Owner actor = Owner::Alice;
  std::optional<LocalUnitary> unitary;
  std::vector<std::string> moves;
};

struct QubitLedger {
  std::size_t a_to_b = 0;
  std::size_t b_to_a = 0;
  std::size_t total() const { return a_to_b + b_to_a; }
};

/// Entangled (or otherwise non-basis) slice of the initial state, spanning
/// the named registers; everything not covered by a block starts as |0>.
/// Blocks are fixed before inputs are loaded, so the shared state cannot
/// depend on them.
struct SharedBlock {
  std::vector<std::string> registers;
  cvec amplitudes;
};

SharedBlock bell_block(const std::string& sender_half, const std::string& receiver_half);

enum class CompileKind { None, Clean, ApproxClean };

/// Two-party protocol over one global state. Communication is ownership
/// relabeling of qubit registers; the ledger counts relabelings per
/// direction. No intermediate measurements.
struct CommProtocol {
  std::string name;
  RegisterLayout layout;  // owners give the initial ownership
  std::string alice_input;
  std::string bob_input;
  std::string output;  // Bob-held
  std::vector<SharedBlock> shared_blocks;
  std::vector<Round> rounds;
  double declared_error = 0.0;
  CompileKind compiled = CompileKind::None;
};

/// Structural checks: inputs/output exist with the right owners, blocks are
/// normalized and disjoint from the inputs, every round's unitary touches
/// only registers its actor owns at that time, and moves are actor-owned
/// qubit registers. Throws std::invalid_argument on violation.
void validate_protocol(const CommProtocol& p);

QubitLedger ledger(const CommProtocol& p);

/// Ownership of a register after all rounds' moves have been applied.
Owner owner_after(const CommProtocol& p, const std::string& reg);

/// |x>|y>|blocks>|a> with every other register at |0>.
QState initial_state(const CommProtocol& p, std::size_t x, std::size_t y, std::size_t a = 0);

QState run(const CommProtocol& p, std::size_t x, std::size_t y, std::size_t a = 0);

/// Applies rounds [first, last) to an existing state (moves carry no
/// amplitude action).
QState run_rounds(QState s, const CommProtocol& p, std::size_t first, std::size_t last);

/// True when every round's unitary either avoids the input registers or is a
/// permutation that provably never changes their digits (inputs are only
/// read). Such protocols act block-diagonally over basis inputs, so joint
/// failure probabilities can be read off one run on superposed inputs.
bool preserves_inputs(const CommProtocol& p);

/// Exact failure probability per input pair, row-major x*|Y|+y: probability
/// that measuring the output register of run(p,x,y,0) does not give f(x,y).
/// Uses the single-run superposed-input path when preserves_inputs(p) holds,
/// otherwise one run per basis pair.
std::vector<double> failure_table(const CommProtocol& p, const FunctionTable& f);

double max_failure(const std::vector<double>& table);
/// Sum of mu(x) * per_x[x].
double mu_average(const std::vector<double>& per_x, const Distribution& mu);

/// Copy-and-uncompute compiler for an exact protocol: run p0 with its output
/// renamed to a scratch register, add the scratch value into a fresh output
/// initialized |a>, then run p0 in reverse (moves mirrored, unitaries
/// inverted). The result maps |x>|y>|phi>|a> to |x>|y>|phi>|a+f(x,y) mod |Z|>
/// on every basis input and sends a_to_b' = a_to_b + b_to_a qubits.
/// Throws if p0 declares or measures a nonzero failure.
CommProtocol compile_clean(const CommProtocol& p0, const FunctionTable& f);

/// Certificate data for an approximately-clean compilation. Error vectors
/// themselves are streamed, not stored; norms and the worst cross-y overlap
/// survive. norms is indexed (x*|Y| + y)*|Z| + a.
struct ErrorAnalysis {
  double declared_eps = 0.0;
  double measured_eps = 0.0;
  std::size_t size_x = 0, size_y = 0, size_z = 0;
  std::vector<double> norms;
  double max_norm = 0.0;
  double norm_bound = 0.0;  // 2|Z|sqrt(declared_eps)
  double max_cross_y = 0.0;  // max |<error_{x,y,a}|error_{x,y',a}>|, y != y'

  bool norms_ok(double tol = 1e-8) const { return max_norm <= norm_bound + tol; }
  bool orthogonal(double tol = 1e-9) const { return max_cross_y <= tol; }
};

/// Same three-phase construction as compile_clean, but the protocol body is
/// first retargeted onto ancilla copies of both inputs (the originals are
/// only ever read by the copy/uncopy adders), so an eps-error p0 yields
/// final = ideal + error with ||error_{x,y,a}|| <= 2|Z|sqrt(eps) and errors
/// for distinct y exactly orthogonal. Throws if the measured worst-case
/// failure of p0 exceeds its declared error.
std::pair<CommProtocol, ErrorAnalysis> compile_approx_clean(const CommProtocol& p0,
                                                            const FunctionTable& f);

/// Test fixture: appends a rotation on (output, fresh ancilla qubit) acting
/// in the disjoint planes |z,0> <-> |z+1 mod |Z|,1> at angle asin(sqrt(eps)),
/// so a protocol that was exact now fails with probability exactly eps on
/// every input. eps = 0 returns p unchanged.
CommProtocol inject_noise(const CommProtocol& p, double eps);

/// No-communication protocol writing the constant c into the output.
CommProtocol constant_protocol(std::size_t size_x, std::size_t size_y, std::size_t size_z,
                               std::size_t c);

/// One-way protocol: Alice superdense-codes her input x over ceil(ceil(log2
/// |X|)/2) pre-shared Bell pairs, Bob decodes and writes f(x,y) into the
/// output. Exact for every f.
CommProtocol superdense_function_protocol(const FunctionTable& f);

/// Exact transmission of an n-bit string with ceil(n/2) qubit moves and
/// ceil(n/2) Bell pairs.
CommProtocol superdense_send(std::size_t bits);

/// Two-way protocol for the composed index/inner-product family: Bob
/// superdense-codes the block index j to Alice (ceil(log2 q)/2 pairs, rounded
/// up), Alice superdense-codes the j-th column of her bit matrix back
/// (ceil(n/2) pairs), Bob writes the inner product with y into the output.
CommProtocol composed_protocol(std::size_t n, std::size_t q);

/// Runs p on k disjoint register blocks over the same inputs (p must only
/// read them) and plurality-decodes the k outputs into a fresh output
/// register, ties broken by smallest value. k must be odd. declared_error
/// becomes the exact binomial tail P[#correct runs <= k/2].
CommProtocol amplify(const CommProtocol& p, std::size_t k);

std::string save_protocol(const CommProtocol& p);
CommProtocol load_protocol(const std::string& json_text);

/// Smallest b with 2^b >= n (n >= 1).
std::size_t ceil_log2(std::size_t n);

}  // namespace qct
