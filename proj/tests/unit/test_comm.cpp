#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "qct/comm.hpp"

using namespace qct;

TEST_SUITE("comm") {

TEST_CASE("protocol validation catches structural mistakes") {
  const FunctionTable f = make_gt(4);
  CommProtocol p = superdense_function_protocol(f);
  CHECK_NOTHROW(validate_protocol(p));

  SUBCASE("output must exist") {
    p.output = "nope";
    CHECK_THROWS_AS(validate_protocol(p), std::invalid_argument);
  }
  SUBCASE("blocks may not cover an input register") {
    p.shared_blocks.push_back(bell_block("alice_in", "bob_in"));
    CHECK_THROWS_AS(validate_protocol(p), std::invalid_argument);
  }
  SUBCASE("blocks must be normalized") {
    p.shared_blocks[0].amplitudes = {cplx(1.0, 0), 0, 0, cplx(1.0, 0)};
    CHECK_THROWS_AS(validate_protocol(p), std::invalid_argument);
  }
  SUBCASE("a player cannot act on a register it no longer owns") {
    // s0 moves from Alice to Bob in the encode round; a later Alice round
    // touching it is rejected by the ownership walk.
    p.rounds.push_back(Round{Owner::Alice, gate_x("s0"), {}});
    CHECK_THROWS_AS(validate_protocol(p), std::invalid_argument);
  }
  SUBCASE("only qubit registers can move") {
    p.rounds.push_back(Round{Owner::Bob, std::nullopt, {"bob_in"}});
    CHECK_THROWS_AS(validate_protocol(p), std::invalid_argument);
  }
}

TEST_CASE("superdense send moves ceil(bits/2) qubits and is exact") {
  for (std::size_t bits = 1; bits <= 4; ++bits) {
    const CommProtocol p = superdense_send(bits);
    const FunctionTable f = identity_table(std::size_t{1} << bits);
    const QubitLedger led = ledger(p);
    CHECK(led.a_to_b == (bits + 1) / 2);
    CHECK(led.b_to_a == 0);
    CHECK(max_failure(failure_table(p, f)) <= 1e-9);
  }
}

TEST_CASE("fast failure path agrees with explicit per-pair runs") {
  const FunctionTable f = make_gt(4);
  const CommProtocol p = superdense_function_protocol(f);
  REQUIRE(preserves_inputs(p));
  const std::vector<double> fast = failure_table(p, f);
  REQUIRE(fast.size() == f.size_x * f.size_y);
  for (std::size_t x = 0; x < f.size_x; ++x) {
    for (std::size_t y = 0; y < f.size_y; ++y) {
      const QState out = run(p, x, y);
      const Distribution d = measure_distribution(out, {p.output});
      const double slow = 1.0 - d[static_cast<std::size_t>(f.value(x, y))];
      CHECK(fast[x * f.size_y + y] == doctest::Approx(slow).epsilon(1e-10));
    }
  }
}

TEST_CASE("clean compilation adds into the answer and restores everything") {
  const FunctionTable f = make_gt(4);
  const CommProtocol p = superdense_function_protocol(f);
  const CommProtocol clean = compile_clean(p, f);
  CHECK(clean.compiled == CompileKind::Clean);

  const std::size_t dz = clean.layout.dim_of(clean.output);
  REQUIRE(dz == f.size_z);
  for (std::size_t x = 0; x < f.size_x; ++x) {
    for (std::size_t y = 0; y < f.size_y; ++y) {
      for (std::size_t a = 0; a < dz; ++a) {
        const QState actual = run(clean, x, y, a);
        const QState ideal = initial_state(
            clean, x, y, (a + static_cast<std::size_t>(f.value(x, y))) % dz);
        CHECK(l2_distance(actual, ideal) <= 1e-8);
      }
    }
  }

  const QubitLedger base = ledger(p);
  const QubitLedger led = ledger(clean);
  CHECK(led.a_to_b == base.a_to_b + base.b_to_a);
  CHECK(led.b_to_a == base.a_to_b + base.b_to_a);
}

TEST_CASE("clean compilation refuses inexact inputs") {
  const FunctionTable f = make_gt(4);
  const CommProtocol noisy = inject_noise(superdense_function_protocol(f), 0.01);
  CHECK_THROWS_AS(compile_clean(noisy, f), std::invalid_argument);
}

TEST_CASE("composed protocol ledger and pinned walkthrough") {
  const FunctionTable f = make_composed(2, 2);
  const CommProtocol p = composed_protocol(2, 2);
  const QubitLedger led = ledger(p);
  CHECK(led.a_to_b == 1);
  CHECK(led.b_to_a == 1);
  CHECK(max_failure(failure_table(p, f)) <= 1e-9);

  // x = 9 = (10, 01), column 7 = (j=2, y=11b): f = 1.
  const Distribution d = measure_distribution(run(p, 9, 7), {p.output});
  CHECK(d[1] == doctest::Approx(1.0).epsilon(1e-10));

  const QubitLedger bigger = ledger(composed_protocol(3, 2));
  CHECK(bigger.a_to_b == 2);
  CHECK(bigger.b_to_a == 1);
  const QubitLedger clean32 = ledger(compile_clean(composed_protocol(3, 2), make_composed(3, 2)));
  CHECK(clean32.a_to_b == 3);
  CHECK(clean32.b_to_a == 3);
}

TEST_CASE("injected noise fails with exactly the requested probability") {
  CHECK_THROWS_AS(inject_noise(constant_protocol(2, 2, 2, 0), -0.1), std::invalid_argument);
  CHECK_THROWS_AS(inject_noise(constant_protocol(2, 2, 2, 0), 1.1), std::invalid_argument);

  const CommProtocol base = constant_protocol(2, 2, 3, 1);
  const CommProtocol same = inject_noise(base, 0.0);
  CHECK(same.rounds.size() == base.rounds.size());

  const FunctionTable f = make_function_table("const1", 2, 2, 3, std::vector<int>(4, 1));
  const CommProtocol noisy = inject_noise(base, 0.25);
  CHECK(noisy.declared_error == doctest::Approx(0.25));
  const auto table = failure_table(noisy, f);
  for (double v : table) CHECK(v == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("approximate clean compilation certificates") {
  const FunctionTable f = make_gt(4);
  const double eps = 0.04;
  const CommProtocol noisy = inject_noise(superdense_function_protocol(f), eps);
  const auto [compiled, analysis] = compile_approx_clean(noisy, f);
  CHECK(compiled.compiled == CompileKind::ApproxClean);
  CHECK(analysis.declared_eps == doctest::Approx(eps));
  CHECK(analysis.measured_eps == doctest::Approx(eps).epsilon(1e-10));
  // The noise rotation leaves each branch at angle asin(sqrt(eps)), so the
  // worst error vector has norm exactly sqrt(2 eps).
  CHECK(analysis.max_norm == doctest::Approx(std::sqrt(2.0 * eps)).epsilon(1e-9));
  CHECK(analysis.norms_ok());
  CHECK(analysis.max_cross_y <= 1e-9);
  CHECK(analysis.norm_bound == doctest::Approx(2.0 * f.size_z * std::sqrt(eps)));

  // Declared error below the measured failure is refused.
  CommProtocol lying = noisy;
  lying.declared_error = 0.01;
  CHECK_THROWS_AS(compile_approx_clean(lying, f), std::invalid_argument);
}

TEST_CASE("majority amplification") {
  const FunctionTable f = make_gt(4);
  CHECK_THROWS_AS(amplify(superdense_function_protocol(f), 2), std::invalid_argument);

  const double third = 1.0 / 3.0;
  const CommProtocol noisy = inject_noise(superdense_function_protocol(f), third);
  const CommProtocol amp = amplify(noisy, 3);
  CHECK(amp.declared_error == doctest::Approx(7.0 / 27.0).epsilon(1e-12));
  const auto table = failure_table(amp, f);
  for (double v : table) CHECK(v == doctest::Approx(7.0 / 27.0).epsilon(1e-9));
  CHECK(ledger(amp).a_to_b == 3 * ledger(noisy).a_to_b);
}

TEST_CASE("protocol json round trip preserves behavior") {
  const FunctionTable f = make_gt(4);
  const CommProtocol p = inject_noise(superdense_function_protocol(f), 0.25);
  const CommProtocol back = load_protocol(save_protocol(p));
  CHECK(back.name == p.name);
  CHECK(back.declared_error == doctest::Approx(p.declared_error));
  const auto a = failure_table(p, f);
  const auto b = failure_table(back, f);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));

  CHECK_THROWS_AS(load_protocol("not json"), std::invalid_argument);
  CHECK_THROWS_AS(load_protocol("{\"name\":\"p\"}"), std::invalid_argument);
}

}  // TEST_SUITE
