#include <random>
#include <stdexcept>

#include "doctest.h"
#include "qct/ftab.hpp"

using namespace qct;

TEST_SUITE("ftab") {

TEST_CASE("quadratic character of F_7") {
  const auto chi = make_chi(7);
  // Nonzero squares mod 7: 1, 2, 4.
  for (std::size_t x : {1, 2, 4}) CHECK(chi_signed(chi[x]) == 1);
  for (std::size_t x : {3, 5, 6}) CHECK(chi_signed(chi[x]) == -1);
  CHECK(chi_signed(chi[0]) == 0);
  CHECK_THROWS_AS(make_chi(9), std::invalid_argument);
  CHECK(is_odd_prime(13));
  CHECK(!is_odd_prime(2));
  CHECK(!is_odd_prime(15));
}

TEST_CASE("shifted-square families over F_7") {
  const FunctionTable ps = make_ps(7);
  CHECK(ps.value(3, 1) == 1);  // 3 + 1 = 4, a square
  CHECK(ps.value(3, 4) == 1);  // 3 + 4 = 0 counts as a square
  CHECK(ps.value(1, 2) == 0);  // 3 is a nonsquare

  const FunctionTable psp = make_ps_prime(7);
  CHECK(psp.value(1, 1) == 1);                // chi(2) = +1
  CHECK(psp.value(3, 4) == 0);                // chi(0) = 0
  CHECK(chi_signed(psp.value(1, 2)) == -1);   // chi(3) = -1
}

TEST_CASE("composed family indexing") {
  const FunctionTable f = make_composed(2, 2);
  CHECK(f.size_x == 16);
  CHECK(f.size_y == 8);
  CHECK(f.size_z == 2);

  // x = (block1, block2) = (10, 01) packs MSB-first to 1001b = 9.
  CHECK(composed_bit(9, 1, 1, 2, 2) == 1);
  CHECK(composed_bit(9, 1, 2, 2, 2) == 0);
  CHECK(composed_bit(9, 2, 1, 2, 2) == 0);
  CHECK(composed_bit(9, 2, 2, 2, 2) == 1);

  // Column (j=2, y=11b): index (j-1)*2^n + y = 7.
  CHECK(composed_col(2, 3, 2, 2) == 7);
  // f(x, (j=2, y)) = y_1 x_{12} + y_2 x_{22} = 1*0 + 1*1 = 1.
  CHECK(f.value(9, 7) == 1);

  // Exhaustive cross-check against the bit-level definition.
  for (std::size_t x = 0; x < 16; ++x) {
    for (std::size_t j = 1; j <= 2; ++j) {
      for (std::size_t y = 0; y < 4; ++y) {
        std::size_t want = 0;
        for (std::size_t i = 1; i <= 2; ++i) {
          want ^= ((y >> (2 - i)) & 1) & composed_bit(x, i, j, 2, 2);
        }
        CHECK(static_cast<std::size_t>(f.value(x, composed_col(j, y, 2, 2))) == want);
      }
    }
  }
}

TEST_CASE("restriction keeps the mandatory rows and rejects bad sets") {
  const auto rows = default_restriction(2, 2, 8);
  CHECK(rows == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 8, 12});

  const FunctionTable f = make_composed(2, 2);
  const FunctionTable g = restrict_composed(f, 2, 2, rows);
  CHECK(g.size_x == 8);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < f.size_y; ++c) CHECK(g.value(r, c) == f.value(rows[r], c));
  }
  // Dropping a row whose blocks 2..n are zero is rejected (x = 0 has that form).
  CHECK_THROWS_AS(restrict_composed(f, 2, 2, {1, 2, 3, 4, 5, 8, 12}), std::invalid_argument);
}

TEST_CASE("oracle adds f(x,y) into the answer register") {
  const FunctionTable f = make_ps_prime(5);  // |Z| = 3 exercises qutrit answers
  for (std::size_t x = 0; x < f.size_x; ++x) {
    const OracleUnitary oracle = make_oracle(f, x);
    const auto layout = RegisterLayout::create({{"y", f.size_y}, {"answer", f.size_z}});
    for (std::size_t y = 0; y < f.size_y; ++y) {
      for (std::size_t a = 0; a < f.size_z; ++a) {
        const QState out = apply(basis_state(layout, {{"y", y}, {"answer", a}}), oracle.unitary);
        const std::size_t want =
            y * f.size_z + (a + static_cast<std::size_t>(f.value(x, y))) % f.size_z;
        CHECK(measure_distribution(out, {"y", "answer"})[want] == doctest::Approx(1.0));
      }
    }
  }
}

TEST_CASE("oracle on a wider register fixes the padding digits") {
  const FunctionTable f = make_gt(3);
  const LocalUnitary u = oracle_on(f, 2, "w", 5, "ans");
  const auto layout = RegisterLayout::create({{"w", 5}, {"ans", 2}});
  for (std::size_t w = 3; w < 5; ++w) {
    for (std::size_t a = 0; a < 2; ++a) {
      const QState out = apply(basis_state(layout, {{"w", w}, {"ans", a}}), u);
      CHECK(measure_distribution(out, {"w", "ans"})[w * 2 + a] == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("controlled oracle computes a xor c*f(y) and restores its ancilla") {
  std::mt19937 rng(555);
  const FunctionTable f = make_gt(4);
  for (std::size_t x = 0; x < 4; ++x) {
    const Circuit circuit = controlled_oracle(make_oracle(f, x));
    CHECK(circuit.oracle_calls() == 2);
    const auto layout = controlled_oracle_layout(f.size_y);
    for (std::size_t y = 0; y < f.size_y; ++y) {
      for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t a = 0; a < 2; ++a) {
          QState s = basis_state(layout, {{"y", y}, {"anc", 0}, {"c", c}, {"ans", a}});
          std::size_t calls = 0;
          s = apply_circuit(s, circuit, &calls);
          CHECK(calls == 2);
          const std::size_t fz = static_cast<std::size_t>(f.value(x, y));
          const std::size_t want = ((y * 2 + 0) * 2 + c) * 2 + (a ^ (c & fz));
          CHECK(measure_distribution(s, {"y", "anc", "c", "ans"})[want] == doctest::Approx(1.0));
        }
      }
    }
  }
  (void)rng;
}

TEST_CASE("embedded OR rows match the direct controlled oracle") {
  CHECK(embed_or_instance({1, 0}, 2, 2) == 8);
  for (std::size_t q = 1; q <= 3; ++q) {
    const FunctionTable f = make_composed(2, q);
    for (std::size_t hbits = 0; hbits < (std::size_t{1} << q); ++hbits) {
      std::vector<int> h(q);
      for (std::size_t j = 0; j < q; ++j) h[j] = static_cast<int>((hbits >> (q - 1 - j)) & 1);
      const std::size_t x = embed_or_instance(h, 2, q);
      const cvec direct = controlled_or_oracle(h, 2, q).to_matrix();
      const cvec embedded = make_oracle(f, x).unitary.to_matrix();
      REQUIRE(direct.size() == embedded.size());
      CHECK(mat_max_abs_diff(direct, embedded) <= 1e-12);
    }
  }
}

TEST_CASE("function table json rejects malformed input") {
  const FunctionTable f = make_gt(3);
  const FunctionTable back = load_function_table(save_function_table(f));
  CHECK(back.size_x == 3);
  CHECK(back.value(2, 1) == 1);
  CHECK_THROWS_AS(load_function_table("{}"), std::invalid_argument);
  CHECK_THROWS_AS(load_function_table("{\"name\":\"t\",\"sizes\":[2,2,2],\"table\":[0,1,2,0]}"),
                  std::invalid_argument);
}

}  // TEST_SUITE
