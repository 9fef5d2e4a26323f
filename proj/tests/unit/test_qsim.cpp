#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "qct/qsim.hpp"

using namespace qct;

namespace {

QState random_state(const RegisterLayout& layout, std::mt19937& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  cvec amps(layout.total_dim());
  double norm2 = 0.0;
  for (auto& a : amps) {
    a = cplx(g(rng), g(rng));
    norm2 += std::norm(a);
  }
  const double scale = 1.0 / std::sqrt(norm2);
  for (auto& a : amps) a *= scale;
  return make_state(layout, std::move(amps));
}

LocalUnitary random_perm_phase(std::vector<std::string> targets, std::vector<std::size_t> dims,
                               std::mt19937& rng) {
  std::size_t d = 1;
  for (auto x : dims) d *= x;
  std::vector<std::size_t> perm(d);
  for (std::size_t i = 0; i < d; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  cvec phases(d);
  for (auto& p : phases) p = std::polar(1.0, angle(rng));
  return LocalUnitary::perm_phase(std::move(targets), std::move(dims), std::move(perm),
                                  std::move(phases));
}

}  // namespace

TEST_SUITE("qsim") {

TEST_CASE("layout validation and the dimension cap") {
  CHECK_THROWS_AS(RegisterLayout::create({{"a", 2}, {"a", 3}}), std::invalid_argument);
  CHECK_THROWS_AS(RegisterLayout::create({{"a", 1}}), std::invalid_argument);
  CHECK_THROWS_AS(RegisterLayout::create({{"", 2}}), std::invalid_argument);

  const std::size_t old_cap = dimension_cap();
  set_dimension_cap(8);
  CHECK_THROWS_AS(RegisterLayout::create({{"a", 4}, {"b", 4}}), std::length_error);
  CHECK_NOTHROW(RegisterLayout::create({{"a", 4}, {"b", 2}}));
  set_dimension_cap(old_cap);
}

TEST_CASE("basis distances: |0> vs |+>") {
  const auto layout = RegisterLayout::create({{"r", 2}});
  const QState zero = basis_state(layout, {{"r", 0}});
  const double s = 1.0 / std::sqrt(2.0);
  const QState plus = make_state(layout, {cplx(s, 0), cplx(s, 0)});
  CHECK(l2_distance(zero, plus) == doctest::Approx(std::sqrt(2.0 - std::sqrt(2.0))).epsilon(1e-12));
}

TEST_CASE("Bell pair measures half mass on 00 and half on 11") {
  const auto layout = RegisterLayout::create({{"a", 2}, {"b", 2}});
  const double s = 1.0 / std::sqrt(2.0);
  const QState bell = make_state(layout, {cplx(s, 0), 0, 0, cplx(s, 0)});
  const Distribution d = measure_distribution(bell, {"a", "b"});
  CHECK(d[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d[1] == doctest::Approx(0.0));
  CHECK(d[2] == doctest::Approx(0.0));
  CHECK(d[3] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("total variation of any marginal is at most 4x the l2 distance") {
  std::mt19937 rng(7101);
  const auto layout = RegisterLayout::create({{"a", 3}, {"b", 2}, {"c", 2}});
  const std::vector<std::vector<std::string>> marginals = {
      {"a"}, {"b"}, {"a", "c"}, {"a", "b", "c"}, {"c", "a"}};
  for (int trial = 0; trial < 50; ++trial) {
    const QState u = random_state(layout, rng);
    const QState v = random_state(layout, rng);
    const double l2 = l2_distance(u, v);
    for (const auto& regs : marginals) {
      const double tv = tv_distance(measure_distribution(u, regs), measure_distribution(v, regs));
      CHECK(tv <= 4.0 * l2 + 1e-12);
    }
  }
}

TEST_CASE("perm-phase and its dense expansion act identically; inverse cancels") {
  std::mt19937 rng(4242);
  const auto layout = RegisterLayout::create({{"x", 3}, {"y", 2}, {"z", 2}});
  for (int trial = 0; trial < 20; ++trial) {
    const LocalUnitary u = random_perm_phase({"y", "x"}, {2, 3}, rng);
    const LocalUnitary d = LocalUnitary::dense({"y", "x"}, {2, 3}, u.to_matrix());
    const QState s = random_state(layout, rng);
    CHECK(l2_distance(apply(s, u), apply(s, d)) <= 1e-12);
    CHECK(l2_distance(apply(apply(s, u), u.inverse()), s) <= 1e-12);
    CHECK(l2_distance(apply(apply(s, d), d.inverse()), s) <= 1e-12);
  }
}

TEST_CASE("arithmetic gates on basis states") {
  const auto layout = RegisterLayout::create({{"z", 3}, {"a", 4}});
  QState s = basis_state(layout, {{"z", 2}, {"a", 3}});
  s = apply(s, gate_add_value("z", 3, "a", 4));  // a -> (3 + 2) % 4 = 1
  Distribution d = measure_distribution(s, {"z", "a"});
  CHECK(d[2 * 4 + 1] == doctest::Approx(1.0));

  s = apply(s, gate_add_const("a", 4, 3));  // 1 + 3 = 0
  d = measure_distribution(s, {"a"});
  CHECK(d[0] == doctest::Approx(1.0));

  // shift restricted to digits < mod: 2 -> 0 under +1 mod 3, digit 3 fixed.
  const auto wide = RegisterLayout::create({{"b", 4}});
  QState t = basis_state(wide, {{"b", 2}});
  t = apply(t, gate_shift_mod("b", 4, 1, 3));
  CHECK(measure_distribution(t, {"b"})[0] == doctest::Approx(1.0));
  QState fixed = basis_state(wide, {{"b", 3}});
  fixed = apply(fixed, gate_shift_mod("b", 4, 1, 3));
  CHECK(measure_distribution(fixed, {"b"})[3] == doctest::Approx(1.0));
  CHECK_THROWS_AS(gate_shift_mod("b", 4, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(gate_shift_mod("b", 4, 1, 5), std::invalid_argument);
}

TEST_CASE("toffoli truth table") {
  const auto layout = RegisterLayout::create({{"c1", 2}, {"c2", 2}, {"t", 2}});
  const LocalUnitary tof = gate_toffoli("c1", "c2", "t");
  for (std::size_t c1 = 0; c1 < 2; ++c1) {
    for (std::size_t c2 = 0; c2 < 2; ++c2) {
      for (std::size_t t = 0; t < 2; ++t) {
        const QState out =
            apply(basis_state(layout, {{"c1", c1}, {"c2", c2}, {"t", t}}), tof);
        const std::size_t want = (c1 * 2 + c2) * 2 + (t ^ (c1 & c2));
        CHECK(measure_distribution(out, {"c1", "c2", "t"})[want] == doctest::Approx(1.0));
      }
    }
  }
}

TEST_CASE("apply validates targets against the layout") {
  const auto layout = RegisterLayout::create({{"x", 2}, {"y", 3}});
  const QState s = basis_state(layout, {{"x", 0}, {"y", 0}});
  CHECK_THROWS_AS(apply(s, gate_h("missing")), std::out_of_range);
  CHECK_THROWS_AS(apply(s, gate_cnot("x", "x")), std::invalid_argument);
  CHECK_THROWS_AS(apply(s, gate_h("y")), std::invalid_argument);  // dim mismatch
}

TEST_CASE("product-state builder requires full coverage and unit blocks") {
  const auto layout = RegisterLayout::create({{"x", 2}, {"y", 2}});
  const double s = 1.0 / std::sqrt(2.0);
  CHECK_THROWS_AS(make_product_state(layout, {}, {{{"x"}, {cplx(s, 0), cplx(s, 0)}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      make_product_state(layout, {{"y", 0}}, {{{"x"}, {cplx(1.0, 0), cplx(1.0, 0)}}}),
      std::invalid_argument);
  const QState ok = make_product_state(layout, {{"y", 1}}, {{{"x"}, {cplx(s, 0), cplx(s, 0)}}});
  CHECK(measure_distribution(ok, {"x", "y"})[0 * 2 + 1] == doctest::Approx(0.5));
}

TEST_CASE("difference states cannot be measured") {
  const auto layout = RegisterLayout::create({{"x", 2}});
  const QState a = basis_state(layout, {{"x", 0}});
  const QState b = basis_state(layout, {{"x", 1}});
  const QState diff = state_difference(a, b);
  CHECK(diff.normalized == false);
  CHECK_THROWS_AS(measure_all(diff), std::invalid_argument);
  CHECK(state_norm(diff) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("digit preservation is detected for read-only targets") {
  const LocalUnitary cnot = gate_cnot("c", "t");
  CHECK(cnot.preserves_digit(0));
  CHECK(!cnot.preserves_digit(1));
  CHECK(!gate_h("h").preserves_digit(0));  // dense: conservatively false
}

}  // TEST_SUITE
