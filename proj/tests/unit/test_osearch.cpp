#include <stdexcept>

#include "doctest.h"
#include "qct/osearch.hpp"

using namespace qct;

TEST_SUITE("osearch") {

TEST_CASE("restrictions must be sorted nonempty subsets of [1, N]") {
  CHECK_NOTHROW(make_restriction(8, {2, 5, 7}));
  CHECK_THROWS_AS(make_restriction(8, {}), std::invalid_argument);
  CHECK_THROWS_AS(make_restriction(8, {5, 2}), std::invalid_argument);
  CHECK_THROWS_AS(make_restriction(8, {2, 2, 5}), std::invalid_argument);
  CHECK_THROWS_AS(make_restriction(8, {0, 2}), std::invalid_argument);
  CHECK_THROWS_AS(make_restriction(8, {2, 9}), std::invalid_argument);
}

TEST_CASE("pinned index maps for S = {2,5,7} in [8]") {
  const SearchRestriction r = make_restriction(8, {2, 5, 7});
  CHECK(a_map(r, 1) == 0);
  CHECK(b_map(r, 1) == 1);
  CHECK(a_map(r, 6) == 1);
  CHECK(b_map(r, 6) == 2);
  CHECK(a_map(r, 8) == 1);
  CHECK(b_map(r, 8) == 3);
  CHECK_THROWS_AS(a_map(r, 0), std::out_of_range);
  CHECK_THROWS_AS(b_map(r, 9), std::out_of_range);
}

TEST_CASE("the full restriction reduces to the identity relabeling") {
  const SearchRestriction r = make_restriction(5, {1, 2, 3, 4, 5});
  for (std::size_t y = 1; y <= 5; ++y) {
    CHECK(a_map(r, y) == 1);
    CHECK(b_map(r, y) == y);
  }
}

TEST_CASE("the relabeling unitary computes (A, B) in place") {
  for (const auto& s : std::vector<std::vector<std::size_t>>{{2, 5, 7}, {1}, {3, 4}}) {
    const SearchRestriction r = make_restriction(7, s);
    const RegisterLayout layout = reduce_layout(r);
    const LocalUnitary v = v_unitary(r);
    const std::size_t bdim = layout.dim_of("b");
    const std::size_t np = s.size();
    for (std::size_t y = 1; y <= r.n; ++y) {
      for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t b = 0; b < bdim; ++b) {
          QState state =
              basis_state(layout, {{"y", y - 1}, {"abit", a}, {"b", b}, {"anc", 0}, {"ans", 0}});
          state = apply(state, v);
          const std::size_t want_a = a ^ a_map(r, y);
          const std::size_t want_b = b < np ? (b + b_map(r, y)) % np : b;
          const Distribution d = measure_distribution(state, {"y", "abit", "b"});
          CHECK(d[(((y - 1) * 2) + want_a) * bdim + want_b] == doctest::Approx(1.0));
        }
      }
    }
  }
}

TEST_CASE("one reduced query flips the answer by GT(s_j, y) and cleans up") {
  const SearchRestriction r = make_restriction(6, {2, 4, 5});
  const RegisterLayout layout = reduce_layout(r);
  const std::size_t bdim = layout.dim_of("b");
  for (std::size_t j = 1; j <= 3; ++j) {
    const Circuit c = reduce_query(r, j);
    CHECK(c.oracle_calls() == 2);
    for (std::size_t y = 1; y <= 6; ++y) {
      for (std::size_t a = 0; a < 2; ++a) {
        QState state =
            basis_state(layout, {{"y", y - 1}, {"abit", 0}, {"b", 0}, {"anc", 0}, {"ans", a}});
        std::size_t calls = 0;
        state = apply_circuit(state, c, &calls);
        CHECK(calls == 2);
        const std::size_t want_ans = a ^ (r.s[j - 1] > y ? 1u : 0u);
        const std::size_t want =
            ((((y - 1) * 2 + 0) * bdim + 0) * 2 + 0) * 2 + want_ans;
        CHECK(measure_distribution(state, {"y", "abit", "b", "anc", "ans"})[want] ==
              doctest::Approx(1.0));
      }
    }
  }
  CHECK_THROWS_AS(reduce_query(r, 0), std::invalid_argument);
  CHECK_THROWS_AS(reduce_query(r, 4), std::invalid_argument);
}

TEST_CASE("query lower-bound crossover") {
  const GtBound b = gt_bound(65536, 1.0);
  CHECK(b.T == 3);
  CHECK(b.threshold == doctest::Approx(2.0));

  // Monotone in c and in N.
  std::size_t prev = 0;
  for (double c : {0.25, 0.5, 1.0, 1.5, 1.9}) {
    const std::size_t t = gt_bound(1u << 20, c).T;
    CHECK(t >= prev);
    prev = t;
  }
  prev = 0;
  for (std::size_t n : {std::size_t{16}, std::size_t{4096}, std::size_t{1} << 16,
                        std::size_t{1} << 24}) {
    const std::size_t t = gt_bound(n, 1.5).T;
    CHECK(t >= prev);
    prev = t;
  }

  CHECK_THROWS_AS(gt_bound(3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(gt_bound(16, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(gt_bound(16, 2.0), std::invalid_argument);
}

}  // TEST_SUITE
