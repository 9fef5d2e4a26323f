#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"
#include "qct/transmit.hpp"

namespace qct {

/// One named inequality with the numbers that went into it.
struct CheckLine {
  std::string inequality;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // lhs - rhs
  bool pass = false;
};

/// Everything a verify command measured, plus its verdicts. Serialization is
/// deterministic: insertion-ordered keys, numbers cut to 12 significant
/// digits.
struct VerificationReport {
  std::string construction;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  nlohmann::ordered_json quantities = nlohmann::ordered_json::object();
  std::vector<CheckLine> checks;

  void check(std::string inequality, double lhs, double rhs, bool pass);
  bool all_pass() const;
  std::string to_json() const;
  std::string to_csv() const;  // the checks table
};

/// Round-trips v through a 12-significant-digit decimal representation.
double round_sig(double v);

VerificationReport cmd_verify_composed(std::size_t n, std::size_t q);
VerificationReport cmd_verify_clean(const std::string& fixture);
VerificationReport cmd_verify_approx(const std::string& fixture, double eps);
VerificationReport cmd_verify_transmit(std::size_t n, std::size_t q, double eps);
VerificationReport cmd_entropy(const Distribution& mu, double eps);
VerificationReport cmd_gt_bound(std::size_t domain, double c);

/// One row of the qubits-vs-queries tradeoff: the lower-bound curve value,
/// the block-construction point that sits on or above it, and the smallest
/// integer qubit count the bound allows.
struct TradeoffRow {
  std::size_t q = 0;
  double curve = 0.0;        // logX / (2q)
  std::size_t achieved = 0;  // ceil(ceil(logX/q)/2) + ceil(log2(q)/2)
  std::size_t min_qcc = 0;   // ceil(logX / (2q))
};

std::vector<TradeoffRow> tradeoff_curve(std::size_t log_x, std::size_t q_min, std::size_t q_max);
std::string tradeoff_csv(const std::vector<TradeoffRow>& rows);
std::string tradeoff_json(const std::vector<TradeoffRow>& rows);

struct ReduceDump {
  std::string csv;
  bool ok = false;
};

/// Exhaustive truth table of the restricted-search query circuit over every
/// (j, y, a), checking the answer bit and that all work registers come back
/// clean.
ReduceDump reduce_dump(std::size_t domain, const std::vector<std::size_t>& set);

/// 3x3 fixture with a three-valued output: f(x, y) = (x + y) mod 3.
FunctionTable mod3_sum_table();

}  // namespace qct
