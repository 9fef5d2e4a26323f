#include "qct/oip.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace qct {

namespace {

// H^{(x) n} as a dense matrix.
cvec hadamard_power(std::size_t n) {
  const double s = 1.0 / std::sqrt(2.0);
  cvec h{cplx(s, 0), cplx(s, 0), cplx(s, 0), cplx(-s, 0)};
  cvec out{cplx(1.0, 0.0)};
  std::size_t dim = 1;
  for (std::size_t i = 0; i < n; ++i) {
    out = mat_kron(out, dim, h, 2);
    dim *= 2;
  }
  return out;
}

cvec shift_matrix(std::size_t q) {
  cvec m(q * q, cplx(0.0, 0.0));
  for (std::size_t c = 0; c < q; ++c) m[((c + 1) % q) * q + c] = cplx(1.0, 0.0);
  return m;
}

}  // namespace

QueryStep query_step() { return QueryStep{std::nullopt, true}; }

QueryStep unitary_step(LocalUnitary u) { return QueryStep{std::move(u), false}; }

std::size_t QueryAlgorithm::query_count() const {
  std::size_t n = 0;
  for (const auto& s : steps) n += s.is_query ? 1 : 0;
  return n;
}

QueryRun run_query_algorithm(const QueryAlgorithm& alg, const OracleUnitary& oracle,
                             bool record) {
  const LocalUnitary wired = oracle.unitary.retarget({alg.query_reg, alg.answer_reg});
  if (alg.layout.dim_of(alg.query_reg) != wired.dims()[0] ||
      alg.layout.dim_of(alg.answer_reg) != wired.dims()[1])
    throw std::invalid_argument("run_query_algorithm: oracle does not fit the registers");

  std::map<std::string, std::size_t> basis;
  for (const auto& r : alg.layout.registers()) basis[r.name] = 0;
  QState s = make_product_state(alg.layout, basis, {});

  QueryRun out;
  for (const QueryStep& step : alg.steps) {
    if (step.is_query) {
      s = apply(s, wired);
      if (record) out.after_query.push_back(s);
    } else if (step.unitary) {
      s = apply(s, *step.unitary);
    } else {
      throw std::invalid_argument("run_query_algorithm: step with neither unitary nor query");
    }
  }
  out.output = measure_distribution(s, {alg.output_reg});
  out.final = std::move(s);
  return out;
}

QueryAlgorithm bv_oip(std::size_t n, std::size_t q) {
  if (n == 0 || q == 0) throw std::invalid_argument("bv_oip: n, q must be positive");
  const std::size_t ydim = std::size_t{1} << n;
  const std::size_t qdim = q * ydim;
  const std::size_t odim = std::size_t{1} << (n * q);

  QueryAlgorithm alg;
  alg.name = "bv_n" + std::to_string(n) + "_q" + std::to_string(q);
  alg.layout = RegisterLayout::create({Register{"query", qdim, Owner::Bob},
                                       Register{"answer", 2, Owner::Bob},
                                       Register{"output", odim, Owner::Bob}});
  alg.query_reg = "query";
  alg.answer_reg = "answer";
  alg.output_reg = "output";

  const double s = 1.0 / std::sqrt(2.0);
  const cvec h{cplx(s, 0), cplx(s, 0), cplx(s, 0), cplx(-s, 0)};
  const cvec x{cplx(0, 0), cplx(1, 0), cplx(1, 0), cplx(0, 0)};
  const cvec hn = hadamard_power(n);
  const cvec iq = mat_identity(q);
  const cvec block_h = mat_kron(iq, q, hn, ydim);  // I_q (x) H^n on the query register

  for (std::size_t j = 1; j <= q; ++j) {
    // Move the block pointer onto block j, spread its y-part uniformly, and
    // put the answer qubit on |->.
    const cvec sj = j == 1 ? iq : shift_matrix(q);
    const cvec prep_q = mat_kron(sj, q, hn, ydim);
    const cvec prep_a = j == 1 ? mat_mul(h, x, 2) : h;
    alg.steps.push_back(unitary_step(
        LocalUnitary::dense({"query", "answer"}, {qdim, 2}, mat_kron(prep_q, qdim, prep_a, 2))));
    alg.steps.push_back(query_step());
    // Hadamard out: the y-part collapses onto column j, the answer onto |1>.
    alg.steps.push_back(unitary_step(
        LocalUnitary::dense({"query", "answer"}, {qdim, 2}, mat_kron(block_h, qdim, h, 2))));
    // Swap the recovered column into the output's column-j bit slots, which
    // also resets the y-part to |0> for the next iteration.
    alg.steps.push_back(unitary_step(LocalUnitary::permutation(
        {"query", "output"}, {qdim, odim}, [n, q, j, ydim, odim](std::size_t i) {
          std::size_t w = i % odim;
          std::size_t col = i / odim;
          for (std::size_t row = 1; row <= n; ++row) {
            const std::size_t ypos = n - row;
            const std::size_t wpos = (n - row) * q + (q - j);
            const std::size_t yb = (col >> ypos) & 1;
            const std::size_t wb = (w >> wpos) & 1;
            if (yb != wb) {
              col ^= std::size_t{1} << ypos;
              w ^= std::size_t{1} << wpos;
            }
          }
          return col * odim + w;
        })));
  }
  return alg;
}

OipReport evaluate_oip(const QueryAlgorithm& alg, const FunctionTable& f, const Distribution& mu,
                       const std::vector<std::size_t>& labels) {
  if (mu.size() != f.size_x) throw std::invalid_argument("evaluate_oip: mu size mismatch");
  if (!labels.empty() && labels.size() != f.size_x)
    throw std::invalid_argument("evaluate_oip: labels size mismatch");
  const std::size_t odim = alg.layout.dim_of(alg.output_reg);

  OipReport rep;
  rep.T = alg.query_count();
  rep.per_x_failure.assign(f.size_x, 0.0);
  for (std::size_t x = 0; x < f.size_x; ++x) {
    const std::size_t label = labels.empty() ? x : labels[x];
    if (label >= odim) throw std::invalid_argument("evaluate_oip: label outside output register");
    const QueryRun r = run_query_algorithm(alg, make_oracle(f, x));
    rep.per_x_failure[x] = std::clamp(1.0 - r.output[label], 0.0, 1.0);
    rep.worst_failure = std::max(rep.worst_failure, rep.per_x_failure[x]);
    rep.dist_failure += mu[x] * rep.per_x_failure[x];
  }
  for (std::size_t x = 0; x < f.size_x; ++x) {
    for (std::size_t x2 = x + 1; x2 < f.size_x; ++x2) {
      const std::size_t lx = labels.empty() ? x : labels[x];
      const std::size_t lx2 = labels.empty() ? x2 : labels[x2];
      if (lx == lx2) continue;
      bool same = true;
      for (std::size_t y = 0; y < f.size_y && same; ++y)
        same = f.value(x, y) == f.value(x2, y);
      if (same) rep.degenerate_pairs.emplace_back(x, x2);
    }
  }
  return rep;
}

std::string save_oip_report(const OipReport& r) {
  nlohmann::ordered_json j;
  j["T"] = r.T;
  j["worst_failure"] = r.worst_failure;
  j["dist_failure"] = r.dist_failure;
  j["per_x"] = r.per_x_failure;
  nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
  for (const auto& [a, b] : r.degenerate_pairs) pairs.push_back({a, b});
  j["degenerate_pairs"] = std::move(pairs);
  return j.dump(2);
}

}  // namespace qct
