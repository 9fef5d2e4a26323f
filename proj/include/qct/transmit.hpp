#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "qct/comm.hpp"
#include "qct/oip.hpp"

namespace qct {

/// One-way transmission lower bound: sending X drawn from mu with failure at
/// most eps needs at least h_max(mu, eps)/2 qubits from Alice to Bob.
struct NsVerdict {
  double qubits_a_to_b = 0.0;
  double eps = 0.0;
  double h_max_bits = 0.0;
  double bound = 0.0;  // h_max_bits / 2
  double slack = 0.0;  // qubits_a_to_b - bound
  bool ok = false;
};

NsVerdict check_ns_bound(double qubits_a_to_b, const Distribution& mu, double eps);

/// Outcome of simulating a query algorithm with every oracle call replaced
/// by one pass of a compiled communication protocol. drift is row-major
/// (x, i): l2 distance from the ideal joint state right after insertion i.
struct TransmissionReport {
  std::size_t T = 0;       // protocol insertions per run
  std::size_t size_x = 0;
  double declared_eps = 0.0;  // compiled protocol's declared per-call error

  std::vector<double> per_x_oracle_failure;  // pure-oracle baseline gamma_x
  std::vector<double> per_x_failure;         // with protocol insertions
  double worst_failure = 0.0;
  double mu_failure = 0.0;
  double oip_mu_failure = 0.0;

  std::vector<double> drift;
  double max_drift = 0.0;
  double drift_coeff = 0.0;    // 2 |Z|^2 sqrt(eps); bound after i calls is i * coeff
  double failure_bound = 0.0;  // oip_mu_failure + 8 |Z|^2 sqrt(eps) T
  bool drift_ok = false;
  bool failure_ok = false;

  QubitLedger per_query_ledger;
  std::size_t qubits_a_to_b = 0;  // per_query_ledger.a_to_b * T
  std::size_t qubits_total = 0;
};

/// Applies the one-way bound to a composed transmission, taking the measured
/// mu-failure as the protocol's failure. eps_achieved must be at least that
/// measured failure, or the bound would not apply; throws otherwise.
NsVerdict check_ns_bound(const TransmissionReport& r, const Distribution& mu,
                         double eps_achieved);

/// Runs alg once per row x with each query slot expanded into a full pass of
/// the compiled protocol (whose clean structure restores the shared pairs,
/// so one set serves all T calls). Requires a protocol produced by
/// compile_clean or compile_approx_clean whose Bob-input/output dims equal
/// alg's query/answer dims, and rows labeled by their own index.
TransmissionReport compose_transmission(const QueryAlgorithm& alg, const CommProtocol& compiled,
                                        const FunctionTable& f, const Distribution& mu);

struct CompressedSendReport {
  std::vector<std::size_t> support;   // the encoded set S, ascending
  double h_max_bits = 0.0;            // log2 |S|
  std::size_t qubit_moves = 0;        // ceil(h_max_bits / 2)
  std::vector<double> per_x_failure;  // 1 for x outside S, 0 inside
  double mu_failure = 0.0;            // exactly the mass outside S
  double eps_requested = 0.0;
  NsVerdict ns;                       // bound at the measured failure
};

/// Entropy-compressed transmission: superdense-codes only the rank within
/// min_support_set(mu, eps), spending ceil(h_max(mu, eps)/2) qubit moves and
/// failing exactly on the mass left outside the set.
std::pair<CommProtocol, CompressedSendReport> superdense_compressed_send(const Distribution& mu,
                                                                         double eps);

}  // namespace qct
