#pragma once

#include <cstddef>
#include <vector>

#include "qct/ftab.hpp"
#include "qct/qsim.hpp"

namespace qct {

/// Sorted nonempty subset S of [1..N]; the ordered-search oracle answers
/// threshold questions about its elements.
struct SearchRestriction {
  std::size_t n = 0;           // domain size N
  std::vector<std::size_t> s;  // strictly increasing, values in [1, n]
};

SearchRestriction make_restriction(std::size_t n, std::vector<std::size_t> s);

/// A(y) = 1 iff some element of S is <= y.
std::size_t a_map(const SearchRestriction& r, std::size_t y);

/// B(y) = largest i (1-indexed) with s_i <= y, or 1 when nothing fits.
std::size_t b_map(const SearchRestriction& r, std::size_t y);

/// |y>|a>|b> -> |y>|a ^ A(y)>|b + B(y) mod |S|> on registers
/// ("y", "abit", "b"); digits past the domain are fixed points. The y digit
/// is 0-indexed, its value 1-indexed: digit g stands for y = g + 1.
LocalUnitary v_unitary(const SearchRestriction& r);

/// Registers ("y", "abit", "b", "anc", "ans"), all jointly held.
RegisterLayout reduce_layout(const SearchRestriction& r);

/// One threshold question against the restricted instance: after the
/// circuit, ans ^= [s_j > y] and every other register is restored. Costs two
/// calls to the order oracle over [|S|] (they compare j against B(y); the
/// second call just clears the ancilla), with V conjugated around them.
Circuit reduce_query(const SearchRestriction& r, std::size_t j);

struct GtBound {
  std::size_t T = 0;
  double threshold = 0.0;
};

/// Smallest T with (log2 log2 N + log2 T) * T >= c * log2 N, together with
/// the crossover point (c/2) * log2 N / log2 log2 N. Needs N >= 4 and
/// 0 < c < 2.
GtBound gt_bound(std::size_t N, double c);

}  // namespace qct
