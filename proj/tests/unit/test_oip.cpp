#include <stdexcept>

#include "doctest.h"
#include "qct/oip.hpp"

using namespace qct;

TEST_SUITE("oip") {

TEST_CASE("block algorithm recovers every hidden row exactly") {
  for (auto [n, q] : {std::pair<std::size_t, std::size_t>{1, 1}, {2, 1}, {1, 2}, {2, 2}}) {
    const QueryAlgorithm alg = bv_oip(n, q);
    CHECK(alg.query_count() == q);
    const FunctionTable f = make_composed(n, q);
    const OipReport report = evaluate_oip(alg, f, uniform_distribution(f.size_x));
    CHECK(report.T == q);
    REQUIRE(report.per_x_failure.size() == f.size_x);
    CHECK(report.worst_failure <= 1e-9);
    CHECK(report.dist_failure <= 1e-9);
    CHECK(report.degenerate_pairs.empty());
  }
}

TEST_CASE("restricted rows evaluate against their original labels") {
  const FunctionTable f = make_composed(2, 2);
  const auto rows = default_restriction(2, 2, 8);
  const FunctionTable g = restrict_composed(f, 2, 2, rows);
  const QueryAlgorithm alg = bv_oip(2, 2);
  const OipReport report = evaluate_oip(alg, g, uniform_distribution(g.size_x), rows);
  CHECK(report.worst_failure <= 1e-9);
  CHECK(report.degenerate_pairs.empty());
}

TEST_CASE("rows with identical oracles but distinct labels are degenerate") {
  // Two identical all-zero rows: no algorithm can tell them apart.
  const FunctionTable f = make_function_table("flat", 2, 2, 2, {0, 0, 0, 0});
  const QueryAlgorithm alg = bv_oip(1, 1);
  const OipReport report = evaluate_oip(alg, f, uniform_distribution(2));
  REQUIRE(report.degenerate_pairs.size() == 1);
  CHECK(report.degenerate_pairs[0].first == 0);
  CHECK(report.degenerate_pairs[0].second == 1);
  // At most one of two indistinguishable rows can be answered correctly.
  CHECK(report.worst_failure >= 0.5 - 1e-9);
}

TEST_CASE("query runs record one snapshot per slot and check oracle shape") {
  const QueryAlgorithm alg = bv_oip(1, 2);
  const FunctionTable f = make_composed(1, 2);
  const QueryRun r = run_query_algorithm(alg, make_oracle(f, 2), true);
  CHECK(r.after_query.size() == 2);
  CHECK(r.output[2] == doctest::Approx(1.0).epsilon(1e-10));

  const FunctionTable wrong = make_gt(3);  // |Y| = 3 != 4: dims cannot match
  CHECK_THROWS_AS(run_query_algorithm(alg, make_oracle(wrong, 0), false),
                  std::invalid_argument);
}

TEST_CASE("mu weighting shows up in the distributional failure") {
  // One broken label: point the label of row 0 at a wrong output.
  const FunctionTable f = make_composed(1, 1);
  const QueryAlgorithm alg = bv_oip(1, 1);
  const Distribution mu = make_distribution({0.3, 0.7});
  const OipReport report = evaluate_oip(alg, f, mu, {1, 1});
  // Row 0 is judged against label 1 and always fails; row 1 succeeds.
  CHECK(report.per_x_failure[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(report.per_x_failure[1] <= 1e-9);
  CHECK(report.dist_failure == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("report serialization carries the pinned keys") {
  const FunctionTable f = make_composed(1, 1);
  const OipReport report = evaluate_oip(bv_oip(1, 1), f, uniform_distribution(2));
  const std::string json = save_oip_report(report);
  for (const char* key : {"\"T\"", "\"worst_failure\"", "\"dist_failure\"", "\"per_x\"",
                           "\"degenerate_pairs\""}) {
    CHECK(json.find(key) != std::string::npos);
  }
}

}  // TEST_SUITE
