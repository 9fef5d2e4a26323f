#include "qct/transmit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

namespace qct {

namespace {

constexpr double kNsSlackTol = 1e-9;
constexpr double kDriftTol = 1e-8;

std::string unique_name(std::string base, const std::set<std::string>& taken) {
  if (!taken.count(base)) return base;
  for (std::size_t i = 1;; ++i) {
    std::string candidate = base + "_" + std::to_string(i);
    if (!taken.count(candidate)) return candidate;
  }
}

}  // namespace

NsVerdict check_ns_bound(double qubits_a_to_b, const Distribution& mu, double eps) {
  NsVerdict v;
  v.qubits_a_to_b = qubits_a_to_b;
  v.eps = eps;
  v.h_max_bits = h_max(mu, eps);
  v.bound = v.h_max_bits / 2.0;
  v.slack = qubits_a_to_b - v.bound;
  v.ok = v.slack >= -kNsSlackTol;
  return v;
}

NsVerdict check_ns_bound(const TransmissionReport& r, const Distribution& mu,
                         double eps_achieved) {
  if (r.mu_failure > eps_achieved + 1e-12)
    throw std::invalid_argument("check_ns_bound: measured failure exceeds eps_achieved");
  return check_ns_bound(double(r.qubits_a_to_b), mu, eps_achieved);
}

TransmissionReport compose_transmission(const QueryAlgorithm& alg, const CommProtocol& compiled,
                                        const FunctionTable& f, const Distribution& mu) {
  if (compiled.compiled == CompileKind::None)
    throw std::invalid_argument(
        "compose_transmission: protocol must come from compile_clean or compile_approx_clean");
  validate_protocol(compiled);
  if (mu.size() != f.size_x) throw std::invalid_argument("compose_transmission: mu size mismatch");
  const std::size_t db = compiled.layout.dim_of(compiled.bob_input);
  const std::size_t dz = compiled.layout.dim_of(compiled.output);
  if (alg.layout.dim_of(alg.query_reg) != db || alg.layout.dim_of(alg.answer_reg) != dz)
    throw std::invalid_argument(
        "compose_transmission: query/answer dims do not match the protocol registers");
  if (f.size_x > alg.layout.dim_of(alg.output_reg))
    throw std::invalid_argument("compose_transmission: rows do not fit the output register");

  // Joint layout: the compiled protocol's registers keep their names; the
  // algorithm's query/answer registers land on Bob's input/output, and the
  // rest of its registers come along under fresh Bob-owned names.
  std::set<std::string> taken;
  for (const auto& r : compiled.layout.registers()) taken.insert(r.name);
  std::map<std::string, std::string> ren{{alg.query_reg, compiled.bob_input},
                                         {alg.answer_reg, compiled.output}};
  std::vector<Register> regs(compiled.layout.registers());
  for (const auto& r : alg.layout.registers()) {
    if (ren.count(r.name)) continue;
    const std::string name =
        unique_name(r.name == alg.output_reg ? "alg_out" : "alg_" + r.name, taken);
    ren[r.name] = name;
    taken.insert(name);
    regs.push_back(Register{name, r.dim, Owner::Bob});
  }
  const RegisterLayout joint = RegisterLayout::create(std::move(regs));
  const std::string out_name = ren.at(alg.output_reg);

  std::vector<LocalUnitary> alg_unitaries;  // one per non-query step, in order
  for (const auto& step : alg.steps) {
    if (step.is_query) continue;
    if (!step.unitary)
      throw std::invalid_argument("compose_transmission: step with neither unitary nor query");
    std::vector<std::string> tgts;
    for (const auto& t : step.unitary->targets()) tgts.push_back(ren.at(t));
    alg_unitaries.push_back(step.unitary->retarget(tgts));
  }

  // Block and basis scaffolding shared by the actual run and the ideals.
  std::set<std::string> blocked;
  for (const auto& b : compiled.shared_blocks)
    for (const auto& n : b.registers) blocked.insert(n);
  std::vector<std::string> alg_regs_renamed;
  for (const auto& r : alg.layout.registers()) alg_regs_renamed.push_back(ren.at(r.name));

  TransmissionReport rep;
  rep.T = alg.query_count();
  rep.size_x = f.size_x;
  rep.declared_eps = compiled.declared_error;
  rep.per_x_oracle_failure.assign(f.size_x, 0.0);
  rep.per_x_failure.assign(f.size_x, 0.0);
  rep.drift.assign(f.size_x * rep.T, 0.0);
  const double z = double(f.size_z);
  rep.drift_coeff = 2.0 * z * z * std::sqrt(compiled.declared_error);
  rep.per_query_ledger = ledger(compiled);
  rep.qubits_a_to_b = rep.per_query_ledger.a_to_b * rep.T;
  rep.qubits_total = rep.per_query_ledger.total() * rep.T;

  bool drift_ok = true;
  bool failure_ok = true;
  for (std::size_t x = 0; x < f.size_x; ++x) {
    const QueryRun pure = run_query_algorithm(alg, make_oracle(f, x), true);
    rep.per_x_oracle_failure[x] = std::clamp(1.0 - pure.output[x], 0.0, 1.0);

    std::map<std::string, std::size_t> basis;
    for (const auto& r : joint.registers())
      if (!blocked.count(r.name)) basis[r.name] = 0;
    basis[compiled.alice_input] = x;
    std::vector<std::pair<std::vector<std::string>, cvec>> blocks;
    for (const auto& b : compiled.shared_blocks) blocks.emplace_back(b.registers, b.amplitudes);
    QState s = make_product_state(joint, basis, blocks);

    std::size_t next_unitary = 0, calls = 0;
    for (const auto& step : alg.steps) {
      if (!step.is_query) {
        s = apply(s, alg_unitaries[next_unitary++]);
        continue;
      }
      for (const Round& r : compiled.rounds)
        if (r.unitary) s = apply(s, *r.unitary);
      // Ideal: protocol registers fully reset, algorithm registers carrying
      // the pure run's state after the same number of oracle calls.
      std::map<std::string, std::size_t> ideal_basis;
      for (const auto& r : joint.registers())
        if (!blocked.count(r.name) &&
            std::find(alg_regs_renamed.begin(), alg_regs_renamed.end(), r.name) ==
                alg_regs_renamed.end())
          ideal_basis[r.name] = 0;
      ideal_basis[compiled.alice_input] = x;
      auto ideal_blocks = blocks;
      ideal_blocks.emplace_back(alg_regs_renamed, pure.after_query[calls].amps);
      const QState ideal = make_product_state(joint, ideal_basis, ideal_blocks);
      const double d = l2_distance(s, ideal);
      rep.drift[x * rep.T + calls] = d;
      rep.max_drift = std::max(rep.max_drift, d);
      if (d > rep.drift_coeff * double(calls + 1) + kDriftTol) drift_ok = false;
      ++calls;
    }

    const Distribution dist = measure_distribution(s, {out_name});
    rep.per_x_failure[x] = std::clamp(1.0 - dist[x], 0.0, 1.0);
    rep.worst_failure = std::max(rep.worst_failure, rep.per_x_failure[x]);
    if (rep.per_x_failure[x] >
        rep.per_x_oracle_failure[x] + 4.0 * rep.drift_coeff * double(rep.T) + kDriftTol)
      failure_ok = false;
  }
  rep.oip_mu_failure = mu_average(rep.per_x_oracle_failure, mu);
  rep.mu_failure = mu_average(rep.per_x_failure, mu);
  rep.failure_bound = rep.oip_mu_failure + 8.0 * z * z * std::sqrt(compiled.declared_error) * double(rep.T);
  if (rep.mu_failure > rep.failure_bound + kDriftTol) failure_ok = false;
  rep.drift_ok = drift_ok;
  rep.failure_ok = failure_ok;
  return rep;
}

std::pair<CommProtocol, CompressedSendReport> superdense_compressed_send(const Distribution& mu,
                                                                         double eps) {
  const std::vector<std::size_t> support = min_support_set(mu, eps);
  const std::size_t m = support.size();
  const std::size_t n = mu.size();
  const std::size_t nb = ceil_log2(m);
  const std::size_t k = (nb + 1) / 2;
  const std::size_t da = std::max<std::size_t>(n, 2);

  std::vector<std::size_t> rank(n, 0);
  for (std::size_t i = 0; i < m; ++i) rank[support[i]] = i;
  std::vector<bool> in_support(n, false);
  for (std::size_t s : support) in_support[s] = true;

  std::vector<Register> regs{Register{"alice_in", da, Owner::Alice}};
  std::vector<std::string> sh, rh;
  for (std::size_t t = 0; t < k; ++t) {
    sh.push_back("s" + std::to_string(t));
    rh.push_back("r" + std::to_string(t));
  }
  for (const auto& nm : sh) regs.push_back(Register{nm, 2, Owner::Alice});
  for (const auto& nm : rh) regs.push_back(Register{nm, 2, Owner::Bob});
  regs.push_back(Register{"bob_in", 2, Owner::Bob});
  regs.push_back(Register{"out", da, Owner::Bob});

  CommProtocol p;
  p.name = "compressed_send";
  p.layout = RegisterLayout::create(std::move(regs));
  p.alice_input = "alice_in";
  p.bob_input = "bob_in";
  p.output = "out";
  for (std::size_t t = 0; t < k; ++t) p.shared_blocks.push_back(bell_block(sh[t], rh[t]));

  if (k > 0) {
    // Ranks within the kept set are what travels; dropped values borrow
    // rank 0 and simply decode wrong.
    std::vector<std::size_t> msg(da, 0);
    for (std::size_t v = 0; v < n; ++v) msg[v] = in_support[v] ? rank[v] : 0;
    std::vector<std::string> targets{"alice_in"};
    std::vector<std::size_t> dims{da};
    for (const auto& h : sh) {
      targets.push_back(h);
      dims.push_back(2);
    }
    const std::size_t dim = da << k;
    std::vector<std::size_t> perm(dim);
    cvec phases(dim, cplx(1.0, 0.0));
    for (std::size_t i = 0; i < dim; ++i) {
      const std::size_t v = i >> k;
      const std::size_t bits = i & ((std::size_t{1} << k) - 1);
      if (v >= n) {
        perm[i] = i;
        continue;
      }
      std::size_t out_bits = 0;
      double ph = 1.0;
      for (std::size_t t = 0; t < k; ++t) {
        const std::size_t alpha = 2 * t < nb ? (msg[v] >> (nb - 1 - 2 * t)) & 1 : 0;
        const std::size_t beta = 2 * t + 1 < nb ? (msg[v] >> (nb - 2 - 2 * t)) & 1 : 0;
        const std::size_t nbit = ((bits >> (k - 1 - t)) & 1) ^ beta;
        out_bits |= nbit << (k - 1 - t);
        if (alpha && nbit) ph = -ph;
      }
      perm[i] = (v << k) | out_bits;
      phases[i] = cplx(ph, 0.0);
    }
    p.rounds.push_back(Round{
        Owner::Alice,
        LocalUnitary::perm_phase(std::move(targets), std::move(dims), std::move(perm),
                                 std::move(phases)),
        sh});
    for (std::size_t t = 0; t < k; ++t) {
      p.rounds.push_back(Round{Owner::Bob, gate_cnot(sh[t], rh[t]), {}});
      p.rounds.push_back(Round{Owner::Bob, gate_h(sh[t]), {}});
    }
    std::vector<std::string> dec_targets = sh;
    dec_targets.insert(dec_targets.end(), rh.begin(), rh.end());
    dec_targets.push_back("out");
    std::vector<std::size_t> dec_dims(2 * k, 2);
    dec_dims.push_back(da);
    p.rounds.push_back(Round{
        Owner::Bob,
        LocalUnitary::permutation(std::move(dec_targets), std::move(dec_dims),
                                  [support, m, k, nb, da](std::size_t i) {
                                    std::size_t a = i % da;
                                    std::size_t rest = i / da;
                                    const std::size_t rbits = rest & ((std::size_t{1} << k) - 1);
                                    const std::size_t sbits = rest >> k;
                                    std::size_t val = 0;
                                    for (std::size_t t = 0; t < k; ++t) {
                                      const std::size_t alpha = (sbits >> (k - 1 - t)) & 1;
                                      const std::size_t beta = (rbits >> (k - 1 - t)) & 1;
                                      if (2 * t < nb) val |= alpha << (nb - 1 - 2 * t);
                                      if (2 * t + 1 < nb) val |= beta << (nb - 2 - 2 * t);
                                    }
                                    a = (a + support[val % m]) % da;
                                    return rest * da + a;
                                  }),
        {}});
  } else {
    p.rounds.push_back(Round{Owner::Bob, gate_add_const("out", da, support[0]), {}});
  }
  validate_protocol(p);

  CompressedSendReport rep;
  rep.support = support;
  rep.h_max_bits = std::log2(double(m));
  rep.qubit_moves = k;
  rep.eps_requested = eps;
  rep.per_x_failure = failure_table(p, identity_table(n));
  rep.mu_failure = mu_average(rep.per_x_failure, mu);
  rep.ns = check_ns_bound(double(k), mu, rep.mu_failure);
  return {std::move(p), std::move(rep)};
}

}  // namespace qct
