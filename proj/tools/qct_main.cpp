#include <cctype>
#include <cstddef>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qct/cli.hpp"
#include "qct/osearch.hpp"
#include "qct/qsim.hpp"

namespace {

// Exit codes: 0 all checks pass, 1 a named check failed, 2 bad input or an
// infeasible construction (cap exceeded, malformed arguments).
constexpr int kExitChecksFailed = 1;
constexpr int kExitError = 2;

std::vector<double> parse_masses(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = std::stod(item, &used);
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size()) throw std::invalid_argument("bad mass entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("no masses given");
  return out;
}

std::vector<std::size_t> parse_index_list(const std::string& csv) {
  std::vector<std::size_t> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(static_cast<std::size_t>(std::stoull(item)));
  }
  if (out.empty()) throw std::invalid_argument("no indices given");
  return out;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file '" + out_path + "'");
  f << text;
}

int emit_report(const qct::VerificationReport& report, const std::string& format,
                const std::string& out_path) {
  emit(format == "csv" ? report.to_csv() : report.to_json(), out_path);
  return report.all_pass() ? 0 : kExitChecksFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verification tool for entanglement-assisted protocol constructions"};
  app.require_subcommand(1);

  std::size_t cap = 0;
  std::string out_path;
  std::string format = "json";
  app.add_option("--cap", cap, "state-vector dimension cap (amplitudes); overrides QT_DIM_CAP");
  app.add_option("--out", out_path, "write output to this file instead of stdout");
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));

  std::size_t n = 1, q = 1;
  double eps = 0.0;
  std::string fixture;
  std::size_t log_x = 1, q_min = 1, q_max = 1;
  std::string masses_csv;
  std::size_t uniform_n = 0;
  std::size_t domain = 4;
  double c = 1.0;
  std::string set_csv;

  CLI::App* vc = app.add_subcommand(
      "verify-composed", "exact pipeline on the composed function: algorithm, protocol, "
                         "clean compile, transmission, counting bounds");
  vc->add_option("-n,--n", n, "bits per block")->required();
  vc->add_option("-q,--q", q, "number of blocks / queries")->required();

  CLI::App* tc = app.add_subcommand(
      "tradeoff-curve", "qubits-vs-queries lower-bound curve with achieved points");
  tc->add_option("--logx", log_x, "log2 of the input-set size")->required();
  tc->add_option("--qmin", q_min, "first query count");
  tc->add_option("--qmax", q_max, "last query count")->required();

  CLI::App* vcl = app.add_subcommand("verify-clean",
                                     "clean compilation on a fixture protocol");
  vcl->add_option("--fixture", fixture, "constant | gt4 | composed22")->required();

  CLI::App* va = app.add_subcommand(
      "verify-approx", "approximately-clean compilation with error-vector certificates");
  va->add_option("--fixture", fixture, "gt4 | mod3")->required();
  va->add_option("--eps", eps, "injected failure probability")->required();

  CLI::App* vt = app.add_subcommand(
      "verify-transmit", "noisy compiled protocol composed with the block algorithm; "
                         "drift, failure, and entropy bounds");
  vt->add_option("-n,--n", n, "bits per block")->required();
  vt->add_option("-q,--q", q, "number of blocks / queries")->required();
  vt->add_option("--eps", eps, "injected failure probability")->required();

  CLI::App* en = app.add_subcommand("entropy", "smooth max-entropy of a distribution");
  en->add_option("--masses", masses_csv, "comma-separated probability masses");
  en->add_option("--uniform", uniform_n, "uniform distribution on this many outcomes");
  en->add_option("--eps", eps, "smoothing parameter")->required();

  CLI::App* gb = app.add_subcommand("gt-bound",
                                    "query lower bound for ordered search on [N]");
  gb->add_option("-N,--domain", domain, "search domain size")->required();
  gb->add_option("--c", c, "constant in the bound (0 < c < 2)")->required();

  CLI::App* rd = app.add_subcommand(
      "reduce-dump", "truth table of the restricted-search query circuit (CSV)");
  rd->add_option("-N,--domain", domain, "search domain size")->required();
  rd->add_option("--set", set_csv, "comma-separated restriction set, 1-based")->required();

  for (CLI::App* sub : {vc, tc, vcl, va, vt, en, gb, rd}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cap != 0) qct::set_dimension_cap(cap);

    if (vc->parsed()) return emit_report(qct::cmd_verify_composed(n, q), format, out_path);
    if (vcl->parsed()) return emit_report(qct::cmd_verify_clean(fixture), format, out_path);
    if (va->parsed()) return emit_report(qct::cmd_verify_approx(fixture, eps), format, out_path);
    if (vt->parsed())
      return emit_report(qct::cmd_verify_transmit(n, q, eps), format, out_path);

    if (tc->parsed()) {
      const auto rows = qct::tradeoff_curve(log_x, q_min, q_max);
      emit(format == "csv" ? qct::tradeoff_csv(rows) : qct::tradeoff_json(rows), out_path);
      return 0;
    }

    if (en->parsed()) {
      if (masses_csv.empty() == (uniform_n == 0)) {
        throw std::invalid_argument("entropy: give exactly one of --masses or --uniform");
      }
      const qct::Distribution mu = masses_csv.empty()
                                       ? qct::uniform_distribution(uniform_n)
                                       : qct::make_distribution(parse_masses(masses_csv));
      return emit_report(qct::cmd_entropy(mu, eps), format, out_path);
    }

    if (gb->parsed()) return emit_report(qct::cmd_gt_bound(domain, c), format, out_path);

    if (rd->parsed()) {
      const qct::ReduceDump dump = qct::reduce_dump(domain, parse_index_list(set_csv));
      emit(dump.csv, out_path);
      return dump.ok ? 0 : kExitChecksFailed;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
