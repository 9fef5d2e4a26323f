#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qct/ftab.hpp"
#include "qct/qsim.hpp"

namespace qct {

/// One step of a query algorithm: either a fixed local unitary or a slot
/// where the (unknown) oracle is applied.
struct QueryStep {
  std::optional<LocalUnitary> unitary;
  bool is_query = false;
};

QueryStep query_step();
QueryStep unitary_step(LocalUnitary u);

/// Oracle-identification algorithm: prepares, queries T times, and ends with
/// the guessed row identity in the output register. query_reg/answer_reg are
/// where the oracle gets wired in; output_reg may alias answer_reg.
struct QueryAlgorithm {
  std::string name;
  RegisterLayout layout;
  std::string query_reg;
  std::string answer_reg;
  std::string output_reg;
  std::vector<QueryStep> steps;

  std::size_t query_count() const;
};

struct QueryRun {
  QState final;
  Distribution output;            // measured over output_reg
  std::vector<QState> after_query;  // one snapshot per query slot when recorded
};

/// Wires the oracle's unitary onto (query_reg, answer_reg) and plays the
/// steps. Register dims must match the oracle's exactly.
QueryRun run_query_algorithm(const QueryAlgorithm& alg, const OracleUnitary& oracle,
                             bool record = false);

/// Identifies the hidden bit matrix of the composed index/inner-product
/// family with q queries and success probability 1: iteration j puts the
/// query register on block j in uniform superposition, phase-kicks the j-th
/// column through the oracle, Hadamards it back out, and swaps it into the
/// output register's column-j slots.
QueryAlgorithm bv_oip(std::size_t n, std::size_t q);

struct OipReport {
  std::size_t T = 0;
  std::vector<double> per_x_failure;
  double worst_failure = 0.0;
  double dist_failure = 0.0;  // mu-weighted failure
  // Pairs x < x' whose oracle rows agree everywhere yet whose expected
  // outputs differ; no algorithm can tell such rows apart.
  std::vector<std::pair<std::size_t, std::size_t>> degenerate_pairs;
};

/// Runs alg against every row of f and scores identification. labels[x]
/// gives the expected output value for row x; empty means the row index
/// itself (the right choice when f's rows are indexed by their identity).
OipReport evaluate_oip(const QueryAlgorithm& alg, const FunctionTable& f, const Distribution& mu,
                       const std::vector<std::size_t>& labels = {});

std::string save_oip_report(const OipReport& r);

}  // namespace qct
