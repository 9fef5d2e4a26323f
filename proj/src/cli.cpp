#include "qct/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "qct/osearch.hpp"

namespace qct {
namespace {

constexpr const char* kVersion = "0.1.0";

}  // namespace

double round_sig(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

void VerificationReport::check(std::string inequality, double lhs, double rhs, bool pass) {
  checks.push_back(CheckLine{std::move(inequality), lhs, rhs, lhs - rhs, pass});
}

bool VerificationReport::all_pass() const {
  for (const CheckLine& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

std::string VerificationReport::to_json() const {
  nlohmann::ordered_json j;
  j["construction"] = construction;
  j["version"] = kVersion;
  j["config"] = config;
  j["quantities"] = quantities;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const CheckLine& c : checks) {
    nlohmann::ordered_json line;
    line["inequality"] = c.inequality;
    line["lhs"] = round_sig(c.lhs);
    line["rhs"] = round_sig(c.rhs);
    line["margin"] = round_sig(c.margin);
    line["pass"] = c.pass;
    arr.push_back(std::move(line));
  }
  j["checks"] = std::move(arr);
  j["all_pass"] = all_pass();
  return j.dump(2) + "\n";
}

std::string VerificationReport::to_csv() const {
  std::ostringstream out;
  out << "inequality,lhs,rhs,margin,pass\n";
  char buf[48];
  for (const CheckLine& c : checks) {
    out << '"' << c.inequality << '"';
    std::snprintf(buf, sizeof buf, "%.12g", c.lhs);
    out << ',' << buf;
    std::snprintf(buf, sizeof buf, "%.12g", c.rhs);
    out << ',' << buf;
    std::snprintf(buf, sizeof buf, "%.12g", c.margin);
    out << ',' << buf;
    out << ',' << (c.pass ? "true" : "false") << '\n';
  }
  return out.str();
}

FunctionTable mod3_sum_table() {
  std::vector<int> table(9);
  for (std::size_t x = 0; x < 3; ++x) {
    for (std::size_t y = 0; y < 3; ++y) {
      table[x * 3 + y] = static_cast<int>((x + y) % 3);
    }
  }
  return make_function_table("mod3_sum", 3, 3, 3, table);
}

VerificationReport cmd_verify_composed(std::size_t n, std::size_t q) {
  VerificationReport r;
  r.construction = "verify-composed";
  r.config["n"] = n;
  r.config["q"] = q;

  const FunctionTable f = make_composed(n, q);
  const Distribution mu = uniform_distribution(f.size_x);

  const QueryAlgorithm alg = bv_oip(n, q);
  const OipReport oip = evaluate_oip(alg, f, mu);
  r.quantities["oip_queries"] = oip.T;
  r.quantities["oip_worst_failure"] = round_sig(oip.worst_failure);
  r.check("oip_queries == q", static_cast<double>(oip.T), static_cast<double>(q), oip.T == q);
  r.check("oip_worst_failure <= 1e-9", oip.worst_failure, 1e-9, oip.worst_failure <= 1e-9);

  const CommProtocol p = composed_protocol(n, q);
  const double protocol_worst = max_failure(failure_table(p, f));
  const QubitLedger led = ledger(p);
  const std::size_t ka = (n + 1) / 2;
  const std::size_t kb = (ceil_log2(q) + 1) / 2;
  r.quantities["protocol_worst_failure"] = round_sig(protocol_worst);
  r.quantities["a_to_b"] = led.a_to_b;
  r.quantities["b_to_a"] = led.b_to_a;
  r.check("protocol_worst_failure <= 1e-9", protocol_worst, 1e-9, protocol_worst <= 1e-9);
  r.check("a_to_b == ceil(n/2)", static_cast<double>(led.a_to_b), static_cast<double>(ka),
          led.a_to_b == ka);
  r.check("b_to_a == ceil(log2(q)/2)", static_cast<double>(led.b_to_a), static_cast<double>(kb),
          led.b_to_a == kb);

  const CommProtocol clean = compile_clean(p, f);
  const QubitLedger cled = ledger(clean);
  r.quantities["clean_a_to_b"] = cled.a_to_b;
  r.check("clean_a_to_b == a_to_b + b_to_a", static_cast<double>(cled.a_to_b),
          static_cast<double>(led.a_to_b + led.b_to_a), cled.a_to_b == led.a_to_b + led.b_to_a);

  const TransmissionReport rep = compose_transmission(alg, clean, f, mu);
  r.quantities["transmission_queries"] = rep.T;
  r.quantities["transmission_worst_failure"] = round_sig(rep.worst_failure);
  r.quantities["transmission_max_drift"] = round_sig(rep.max_drift);
  r.quantities["qubits_a_to_b"] = rep.qubits_a_to_b;
  r.quantities["qubits_total"] = rep.qubits_total;
  r.check("transmission_worst_failure <= 1e-9", rep.worst_failure, 1e-9,
          rep.worst_failure <= 1e-9);
  r.check("transmission_max_drift <= 1e-8", rep.max_drift, 1e-8, rep.drift_ok);

  const NsVerdict ns = check_ns_bound(rep, mu, rep.mu_failure);
  r.quantities["h_max_bits"] = round_sig(ns.h_max_bits);
  r.check("qubits_a_to_b >= h_max(mu,eps)/2 - 1e-9", ns.qubits_a_to_b, ns.bound, ns.ok);

  const double product = static_cast<double>(cled.a_to_b) * static_cast<double>(rep.T);
  const double half_log_x = static_cast<double>(n * q) / 2.0;
  r.quantities["qcc_times_queries"] = round_sig(product);
  r.check("clean_a_to_b * queries >= log2|X|/2", product, half_log_x, product >= half_log_x);

  const std::size_t expected_total = (ka + kb) * q;
  r.check("qubits_a_to_b == (ceil(n/2) + ceil(log2(q)/2)) * q",
          static_cast<double>(rep.qubits_a_to_b), static_cast<double>(expected_total),
          rep.qubits_a_to_b == expected_total);
  return r;
}

VerificationReport cmd_verify_clean(const std::string& fixture) {
  VerificationReport r;
  r.construction = "verify-clean";
  r.config["fixture"] = fixture;

  FunctionTable f;
  CommProtocol p;
  if (fixture == "constant") {
    f = make_function_table("const2", 4, 4, 3, std::vector<int>(16, 2));
    p = constant_protocol(4, 4, 3, 2);
  } else if (fixture == "gt4") {
    f = make_gt(4);
    p = superdense_function_protocol(f);
  } else if (fixture == "composed22") {
    f = make_composed(2, 2);
    p = composed_protocol(2, 2);
  } else {
    throw std::invalid_argument("verify-clean: unknown fixture '" + fixture +
                                "' (want constant, gt4, or composed22)");
  }

  const double base_worst = max_failure(failure_table(p, f));
  r.quantities["base_worst_failure"] = round_sig(base_worst);
  r.check("base_worst_failure <= 1e-9", base_worst, 1e-9, base_worst <= 1e-9);

  const CommProtocol clean = compile_clean(p, f);
  const std::size_t dz = clean.layout.dim_of(clean.output);
  double max_l2 = 0.0;
  for (std::size_t x = 0; x < f.size_x; ++x) {
    for (std::size_t y = 0; y < f.size_y; ++y) {
      const std::size_t fz = static_cast<std::size_t>(f.value(x, y));
      for (std::size_t a = 0; a < dz; ++a) {
        const QState actual = run(clean, x, y, a);
        const QState ideal = initial_state(clean, x, y, (a + fz) % dz);
        max_l2 = std::max(max_l2, l2_distance(actual, ideal));
      }
    }
  }
  r.quantities["max_l2_deviation"] = round_sig(max_l2);
  r.check("max ||actual - ideal||_2 <= 1e-8", max_l2, 1e-8, max_l2 <= 1e-8);

  const QubitLedger led = ledger(p);
  const QubitLedger cled = ledger(clean);
  r.quantities["a_to_b"] = led.a_to_b;
  r.quantities["b_to_a"] = led.b_to_a;
  r.quantities["clean_a_to_b"] = cled.a_to_b;
  r.quantities["clean_b_to_a"] = cled.b_to_a;
  r.check("clean_a_to_b == a_to_b + b_to_a", static_cast<double>(cled.a_to_b),
          static_cast<double>(led.a_to_b + led.b_to_a), cled.a_to_b == led.a_to_b + led.b_to_a);
  r.check("clean_b_to_a == a_to_b + b_to_a", static_cast<double>(cled.b_to_a),
          static_cast<double>(led.a_to_b + led.b_to_a), cled.b_to_a == led.a_to_b + led.b_to_a);
  return r;
}

VerificationReport cmd_verify_approx(const std::string& fixture, double eps) {
  VerificationReport r;
  r.construction = "verify-approx";
  r.config["fixture"] = fixture;
  r.config["eps"] = round_sig(eps);

  FunctionTable f;
  if (fixture == "gt4") {
    f = make_gt(4);
  } else if (fixture == "mod3") {
    f = mod3_sum_table();
  } else {
    throw std::invalid_argument("verify-approx: unknown fixture '" + fixture +
                                "' (want gt4 or mod3)");
  }

  const CommProtocol noisy = inject_noise(superdense_function_protocol(f), eps);
  const auto [compiled, analysis] = compile_approx_clean(noisy, f);
  (void)compiled;

  r.quantities["size_z"] = analysis.size_z;
  r.quantities["declared_eps"] = round_sig(analysis.declared_eps);
  r.quantities["measured_eps"] = round_sig(analysis.measured_eps);
  r.quantities["max_error_norm"] = round_sig(analysis.max_norm);
  r.quantities["norm_bound"] = round_sig(analysis.norm_bound);
  r.quantities["max_cross_y_overlap"] = round_sig(analysis.max_cross_y);
  r.check("measured_eps <= declared_eps + 1e-9", analysis.measured_eps,
          analysis.declared_eps + 1e-9, analysis.measured_eps <= analysis.declared_eps + 1e-9);
  r.check("max_error_norm <= 2|Z| sqrt(eps) + 1e-8", analysis.max_norm,
          analysis.norm_bound + 1e-8, analysis.norms_ok());
  r.check("max_cross_y_overlap <= 1e-9", analysis.max_cross_y, 1e-9, analysis.orthogonal());
  return r;
}

VerificationReport cmd_verify_transmit(std::size_t n, std::size_t q, double eps) {
  VerificationReport r;
  r.construction = "verify-transmit";
  r.config["n"] = n;
  r.config["q"] = q;
  r.config["eps"] = round_sig(eps);

  const FunctionTable f = make_composed(n, q);
  const Distribution mu = uniform_distribution(f.size_x);

  const CommProtocol noisy = inject_noise(composed_protocol(n, q), eps);
  const auto [compiled, analysis] = compile_approx_clean(noisy, f);
  r.quantities["declared_eps"] = round_sig(analysis.declared_eps);
  r.quantities["measured_eps"] = round_sig(analysis.measured_eps);
  r.quantities["max_error_norm"] = round_sig(analysis.max_norm);
  r.quantities["max_cross_y_overlap"] = round_sig(analysis.max_cross_y);
  r.check("max_error_norm <= 2|Z| sqrt(eps) + 1e-8", analysis.max_norm,
          analysis.norm_bound + 1e-8, analysis.norms_ok());
  r.check("max_cross_y_overlap <= 1e-9", analysis.max_cross_y, 1e-9, analysis.orthogonal());

  const QueryAlgorithm alg = bv_oip(n, q);
  const TransmissionReport rep = compose_transmission(alg, compiled, f, mu);
  r.quantities["queries"] = rep.T;
  r.quantities["oip_mu_failure"] = round_sig(rep.oip_mu_failure);
  r.quantities["mu_failure"] = round_sig(rep.mu_failure);
  r.quantities["worst_failure"] = round_sig(rep.worst_failure);
  r.quantities["failure_bound"] = round_sig(rep.failure_bound);
  r.quantities["max_drift"] = round_sig(rep.max_drift);
  r.quantities["drift_coeff"] = round_sig(rep.drift_coeff);
  r.quantities["qubits_a_to_b"] = rep.qubits_a_to_b;
  r.quantities["qubits_total"] = rep.qubits_total;
  r.check("drift(x,i) <= 2|Z|^2 sqrt(eps) * i + 1e-8", rep.max_drift,
          rep.drift_coeff * static_cast<double>(rep.T) + 1e-8, rep.drift_ok);
  r.check("mu_failure <= oip_mu_failure + 8|Z|^2 sqrt(eps) * T + 1e-8", rep.mu_failure,
          rep.failure_bound + 1e-8, rep.failure_ok);

  const NsVerdict ns = check_ns_bound(rep, mu, rep.mu_failure);
  r.quantities["eps_achieved"] = round_sig(rep.mu_failure);
  r.quantities["h_max_bits"] = round_sig(ns.h_max_bits);
  r.check("qubits_a_to_b >= h_max(mu,eps)/2 - 1e-9", ns.qubits_a_to_b, ns.bound, ns.ok);
  return r;
}

VerificationReport cmd_entropy(const Distribution& mu, double eps) {
  VerificationReport r;
  r.construction = "entropy";
  r.config["eps"] = round_sig(eps);
  nlohmann::ordered_json masses = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < mu.size(); ++i) masses.push_back(round_sig(mu[i]));
  r.config["masses"] = std::move(masses);

  const double h = h_max(mu, eps);
  const std::vector<std::size_t> support = min_support_set(mu, eps);
  double inside = 0.0;
  for (std::size_t i : support) inside += mu[i];

  r.quantities["h_max_bits"] = round_sig(h);
  r.quantities["support_size"] = support.size();
  r.quantities["support"] = support;
  r.quantities["support_mass"] = round_sig(inside);
  const double log_support = std::log2(static_cast<double>(support.size()));
  r.check("h_max == log2(|support|)", h, log_support, h == log_support);
  r.check("support_mass >= 1 - eps - 1e-12", inside, 1.0 - eps - 1e-12,
          inside >= 1.0 - eps - 1e-12);
  return r;
}

VerificationReport cmd_gt_bound(std::size_t domain, double c) {
  VerificationReport r;
  r.construction = "gt-bound";
  r.config["N"] = domain;
  r.config["c"] = round_sig(c);

  const GtBound b = gt_bound(domain, c);
  const double logn = std::log2(static_cast<double>(domain));
  const double loglogn = std::log2(logn);
  const double lhs = (loglogn + std::log2(static_cast<double>(b.T))) * static_cast<double>(b.T);
  r.quantities["T"] = b.T;
  r.quantities["threshold"] = round_sig(b.threshold);
  r.quantities["log2_N"] = round_sig(logn);
  r.quantities["log2_log2_N"] = round_sig(loglogn);
  r.check("(log2 log2 N + log2 T) * T >= c * log2 N", lhs, c * logn, lhs >= c * logn);
  bool minimal = true;
  double prev_lhs = 0.0;
  if (b.T > 1) {
    const double t = static_cast<double>(b.T - 1);
    prev_lhs = (loglogn + std::log2(t)) * t;
    minimal = prev_lhs < c * logn;
  }
  r.check("T is the smallest count meeting the threshold", prev_lhs, c * logn, minimal);
  return r;
}

std::vector<TradeoffRow> tradeoff_curve(std::size_t log_x, std::size_t q_min, std::size_t q_max) {
  if (log_x == 0) throw std::invalid_argument("tradeoff: logX must be at least 1");
  if (q_min == 0) throw std::invalid_argument("tradeoff: q range must start at 1 or above");
  if (q_max < q_min) throw std::invalid_argument("tradeoff: empty q range");
  std::vector<TradeoffRow> rows;
  rows.reserve(q_max - q_min + 1);
  for (std::size_t q = q_min; q <= q_max; ++q) {
    TradeoffRow row;
    row.q = q;
    row.curve = static_cast<double>(log_x) / (2.0 * static_cast<double>(q));
    const std::size_t block = (log_x + q - 1) / q;  // ceil(logX / q)
    row.achieved = (block + 1) / 2 + (ceil_log2(q) + 1) / 2;
    row.min_qcc = (log_x + 2 * q - 1) / (2 * q);  // ceil(logX / (2q))
    rows.push_back(row);
  }
  return rows;
}

std::string tradeoff_csv(const std::vector<TradeoffRow>& rows) {
  std::ostringstream out;
  out << "q,curve,achieved,min_qcc\n";
  char buf[48];
  for (const TradeoffRow& row : rows) {
    std::snprintf(buf, sizeof buf, "%.12g", row.curve);
    out << row.q << ',' << buf << ',' << row.achieved << ',' << row.min_qcc << '\n';
  }
  return out.str();
}

std::string tradeoff_json(const std::vector<TradeoffRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const TradeoffRow& row : rows) {
    nlohmann::ordered_json j;
    j["q"] = row.q;
    j["curve"] = round_sig(row.curve);
    j["achieved"] = row.achieved;
    j["min_qcc"] = row.min_qcc;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

ReduceDump reduce_dump(std::size_t domain, const std::vector<std::size_t>& set) {
  const SearchRestriction restriction = make_restriction(domain, set);
  const RegisterLayout layout = reduce_layout(restriction);
  const std::size_t bdim = layout.dim_of("b");

  ReduceDump dump;
  dump.ok = true;
  std::ostringstream out;
  out << "j,y,a,expected,measured,restored,calls\n";
  for (std::size_t j = 1; j <= restriction.s.size(); ++j) {
    const Circuit circuit = reduce_query(restriction, j);
    const std::size_t sj = restriction.s[j - 1];
    for (std::size_t y = 1; y <= restriction.n; ++y) {
      for (std::size_t a = 0; a < 2; ++a) {
        QState state = basis_state(
            layout, {{"y", y - 1}, {"abit", 0}, {"b", 0}, {"anc", 0}, {"ans", a}});
        std::size_t calls = 0;
        state = apply_circuit(state, circuit, &calls);

        // Permutation circuit: exactly one basis amplitude survives.
        std::size_t idx = 0;
        for (std::size_t i = 0; i < state.amps.size(); ++i) {
          if (std::abs(state.amps[i]) > 0.5) {
            idx = i;
            break;
          }
        }
        const std::size_t measured = idx % 2;          // ans
        const std::size_t anc = (idx / 2) % 2;         // anc
        const std::size_t b = (idx / 4) % bdim;        // b
        const std::size_t abit = (idx / (4 * bdim)) % 2;
        const std::size_t ydigit = idx / (8 * bdim);
        const std::size_t expected = a ^ (sj > y ? 1u : 0u);
        const bool restored = anc == 0 && b == 0 && abit == 0 && ydigit == y - 1;
        const bool pass = measured == expected && restored && calls == 2;
        if (!pass) dump.ok = false;
        out << j << ',' << y << ',' << a << ',' << expected << ',' << measured << ','
            << (restored ? 1 : 0) << ',' << calls << '\n';
      }
    }
  }
  dump.csv = out.str();
  return dump;
}

}  // namespace qct
