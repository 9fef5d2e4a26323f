#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace qct {

/// Probability mass function over a finite outcome set, indexed 0..n-1.
/// Invariant: masses are nonnegative and sum to 1 within 1e-12.
struct Distribution {
  std::vector<double> masses;

  std::size_t size() const { return masses.size(); }
  double operator[](std::size_t i) const { return masses.at(i); }
};

/// Validating constructor; throws std::invalid_argument on bad mass vectors.
Distribution make_distribution(std::vector<double> masses);

Distribution uniform_distribution(std::size_t n);
Distribution point_mass(std::size_t n, std::size_t at);

/// Smooth max-entropy, base 2: log2 of the size of the smallest outcome set
/// capturing probability at least 1 - eps (mass comparisons at 1e-12 slack).
/// eps must lie in [0, 1).
double h_max(const Distribution& mu, double eps);

/// The witnessing set for h_max: greedily chosen by descending mass, ties by
/// ascending index. Returned sorted ascending.
std::vector<std::size_t> min_support_set(const Distribution& mu, double eps);

Distribution load_distribution(const std::string& json_text);
std::string save_distribution(const Distribution& mu);

}  // namespace qct
