#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "qct/transmit.hpp"

using namespace qct;

TEST_SUITE("transmit") {

TEST_CASE("entropy lower-bound verdicts") {
  const Distribution mu = uniform_distribution(4);
  const NsVerdict ok = check_ns_bound(1.0, mu, 0.5);
  CHECK(ok.h_max_bits == doctest::Approx(1.0));
  CHECK(ok.bound == doctest::Approx(0.5));
  CHECK(ok.ok);
  const NsVerdict bad = check_ns_bound(0.4, mu, 0.5);
  CHECK(!bad.ok);
  CHECK(bad.slack == doctest::Approx(-0.1));
}

TEST_CASE("compressed send keeps the heaviest rows and fails on the rest") {
  const Distribution mu = make_distribution({0.5, 0.3, 0.1, 0.1});
  const auto [p, report] = superdense_compressed_send(mu, 0.4);
  CHECK(report.support == std::vector<std::size_t>{0, 1});
  CHECK(report.h_max_bits == doctest::Approx(1.0));
  CHECK(report.qubit_moves == 1);
  CHECK(report.mu_failure == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(report.ns.ok);
  REQUIRE(report.per_x_failure.size() == 4);
  CHECK(report.per_x_failure[0] <= 1e-9);
  CHECK(report.per_x_failure[1] <= 1e-9);
  CHECK(report.per_x_failure[2] == doctest::Approx(1.0));
  CHECK(report.per_x_failure[3] == doctest::Approx(1.0));
  CHECK(ledger(p).a_to_b == 1);
}

TEST_CASE("compressed uniform send meets the bound with equality") {
  const auto [p, report] = superdense_compressed_send(uniform_distribution(8), 0.5);
  (void)p;
  CHECK(report.qubit_moves == 1);
  CHECK(report.mu_failure == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(report.ns.bound == doctest::Approx(1.0));  // h_max(mu, 1/2) = 2
  CHECK(report.ns.slack == doctest::Approx(0.0));
  CHECK(report.ns.ok);
}

TEST_CASE("single-row support sends nothing and still succeeds on it") {
  const Distribution mu = make_distribution({0.9, 0.1});
  const auto [p, report] = superdense_compressed_send(mu, 0.2);
  CHECK(report.qubit_moves == 0);
  CHECK(report.support == std::vector<std::size_t>{0});
  CHECK(report.per_x_failure[0] <= 1e-9);
  CHECK(report.mu_failure == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(ledger(p).total() == 0);
}

TEST_CASE("exact transmission composition restores pairs and counts qubits") {
  const FunctionTable f = make_composed(1, 1);
  const CommProtocol clean = compile_clean(composed_protocol(1, 1), f);
  const QueryAlgorithm alg = bv_oip(1, 1);
  const Distribution mu = uniform_distribution(2);
  const TransmissionReport rep = compose_transmission(alg, clean, f, mu);
  CHECK(rep.T == 1);
  CHECK(rep.worst_failure <= 1e-9);
  CHECK(rep.max_drift <= 1e-8);
  CHECK(rep.drift_ok);
  CHECK(rep.failure_ok);
  CHECK(rep.qubits_a_to_b == 1);
  const NsVerdict ns = check_ns_bound(rep, mu, rep.mu_failure);
  CHECK(ns.ok);
  CHECK(ns.bound == doctest::Approx(0.5));
}

TEST_CASE("noisy composition drifts by exactly 2 sqrt(eps) per call") {
  const double eps = 0.25;
  const FunctionTable f = make_composed(1, 1);
  const CommProtocol noisy = inject_noise(composed_protocol(1, 1), eps);
  const auto [compiled, analysis] = compile_approx_clean(noisy, f);
  CHECK(analysis.norms_ok());
  const TransmissionReport rep =
      compose_transmission(bv_oip(1, 1), compiled, f, uniform_distribution(2));
  // One noise rotation per call: the deviation is a single branch of
  // amplitude sin(2 asin(sqrt(eps))) plus the cos shortfall, giving 2 sqrt(eps).
  CHECK(rep.max_drift == doctest::Approx(2.0 * std::sqrt(eps)).epsilon(1e-9));
  CHECK(rep.drift_coeff == doctest::Approx(2.0 * 4.0 * std::sqrt(eps)));
  CHECK(rep.drift_ok);
  CHECK(rep.failure_ok);
  CHECK(rep.mu_failure <= rep.failure_bound + 1e-8);
}

TEST_CASE("composition rejects mismatched pieces") {
  const FunctionTable f = make_composed(1, 1);
  const CommProtocol raw = composed_protocol(1, 1);
  const QueryAlgorithm alg = bv_oip(1, 1);
  const Distribution mu = uniform_distribution(2);
  // Uncompiled protocols have no clean interface to insert.
  CHECK_THROWS_AS(compose_transmission(alg, raw, f, mu), std::invalid_argument);

  const CommProtocol clean = compile_clean(raw, f);
  CHECK_THROWS_AS(compose_transmission(alg, clean, f, uniform_distribution(3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(compose_transmission(bv_oip(2, 1), clean, make_composed(2, 1), mu),
                  std::invalid_argument);
}

}  // TEST_SUITE
