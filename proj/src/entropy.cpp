#include "qct/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace qct {

namespace {
constexpr double kMassTol = 1e-12;
}

Distribution make_distribution(std::vector<double> masses) {
  if (masses.empty()) throw std::invalid_argument("distribution: no outcomes");
  double sum = 0.0;
  for (double m : masses) {
    if (!(m >= 0.0)) throw std::invalid_argument("distribution: negative or NaN mass");
    sum += m;
  }
  if (std::abs(sum - 1.0) > kMassTol)
    throw std::invalid_argument("distribution: masses sum to " + std::to_string(sum));
  return Distribution{std::move(masses)};
}

Distribution uniform_distribution(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_distribution: empty");
  return Distribution{std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

Distribution point_mass(std::size_t n, std::size_t at) {
  if (at >= n) throw std::out_of_range("point_mass: index out of range");
  std::vector<double> m(n, 0.0);
  m[at] = 1.0;
  return Distribution{std::move(m)};
}

std::vector<std::size_t> min_support_set(const Distribution& mu, double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("min_support_set: eps outside [0,1)");
  if (mu.masses.empty()) throw std::invalid_argument("min_support_set: empty distribution");
  std::vector<std::size_t> order(mu.masses.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (mu.masses[a] != mu.masses[b]) return mu.masses[a] > mu.masses[b];
    return a < b;
  });
  const double need = 1.0 - eps - kMassTol;
  std::vector<std::size_t> chosen;
  double cum = 0.0;
  for (std::size_t idx : order) {
    if (cum >= need) break;
    chosen.push_back(idx);
    cum += mu.masses[idx];
  }
  if (cum < need) throw std::logic_error("min_support_set: masses do not reach 1 - eps");
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

double h_max(const Distribution& mu, double eps) {
  return std::log2(static_cast<double>(min_support_set(mu, eps).size()));
}

Distribution load_distribution(const std::string& json_text) {
  try {
    nlohmann::json j = nlohmann::json::parse(json_text);
    if (!j.contains("masses") || !j["masses"].is_array())
      throw std::invalid_argument("distribution json: missing \"masses\" array");
    return make_distribution(j["masses"].get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("distribution json: ") + e.what());
  }
}

std::string save_distribution(const Distribution& mu) {
  nlohmann::json j;
  j["masses"] = mu.masses;
  return j.dump();
}

}  // namespace qct
