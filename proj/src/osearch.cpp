#include "qct/osearch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qct {

SearchRestriction make_restriction(std::size_t n, std::vector<std::size_t> s) {
  if (n == 0) throw std::invalid_argument("restriction: empty domain");
  if (s.empty()) throw std::invalid_argument("restriction: empty set");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 1 || s[i] > n) throw std::invalid_argument("restriction: element outside [1, N]");
    if (i > 0 && s[i] <= s[i - 1])
      throw std::invalid_argument("restriction: elements must strictly increase");
  }
  return SearchRestriction{n, std::move(s)};
}

std::size_t a_map(const SearchRestriction& r, std::size_t y) {
  if (y < 1 || y > r.n) throw std::out_of_range("a_map: y outside [1, N]");
  return r.s.front() <= y ? 1 : 0;
}

std::size_t b_map(const SearchRestriction& r, std::size_t y) {
  if (y < 1 || y > r.n) throw std::out_of_range("b_map: y outside [1, N]");
  if (r.s.front() > y) return 1;
  std::size_t best = 1;
  for (std::size_t i = 0; i < r.s.size(); ++i)
    if (r.s[i] <= y) best = i + 1;
  return best;
}

LocalUnitary v_unitary(const SearchRestriction& r) {
  const std::size_t np = r.s.size();
  const std::size_t ydim = std::max<std::size_t>(r.n, 2);
  const std::size_t bdim = std::max<std::size_t>(np, 2);
  const SearchRestriction rest = r;
  return LocalUnitary::permutation(
      {"y", "abit", "b"}, {ydim, 2, bdim}, [rest, np, bdim](std::size_t i) {
        std::size_t b = i % bdim;
        std::size_t head = i / bdim;
        std::size_t a = head % 2;
        const std::size_t yd = head / 2;
        if (yd >= rest.n) return i;  // padding digit, out of domain
        const std::size_t y = yd + 1;
        a ^= a_map(rest, y);
        if (b < np) b = (b + b_map(rest, y)) % np;
        return (yd * 2 + a) * bdim + b;
      });
}

RegisterLayout reduce_layout(const SearchRestriction& r) {
  const std::size_t ydim = std::max<std::size_t>(r.n, 2);
  const std::size_t bdim = std::max<std::size_t>(r.s.size(), 2);
  return RegisterLayout::create({Register{"y", ydim, Owner::Shared},
                                 Register{"abit", 2, Owner::Shared},
                                 Register{"b", bdim, Owner::Shared},
                                 Register{"anc", 2, Owner::Shared},
                                 Register{"ans", 2, Owner::Shared}});
}

Circuit reduce_query(const SearchRestriction& r, std::size_t j) {
  const std::size_t np = r.s.size();
  if (j < 1 || j > np) throw std::invalid_argument("reduce_query: j outside [1, |S|]");
  const std::size_t bdim = std::max<std::size_t>(np, 2);
  const FunctionTable gt = make_gt(np);
  const LocalUnitary v = v_unitary(r);

  Circuit c;
  c.gates.push_back(CircuitGate{v, false});
  // Shift b from B(y) mod |S| down to B(y)-1 so the order oracle's column
  // convention (digit c stands for value c+1) lines up.
  c.gates.push_back(CircuitGate{gate_shift_mod("b", bdim, -1, np), false});
  const LocalUnitary probe = oracle_on(gt, j - 1, "b", bdim, "anc");
  c.gates.push_back(CircuitGate{probe, true});
  c.gates.push_back(CircuitGate{gate_toffoli("anc", "abit", "ans"), false});
  c.gates.push_back(CircuitGate{probe, true});  // clears the ancilla
  c.gates.push_back(CircuitGate{gate_shift_mod("b", bdim, 1, np), false});
  // ans ^= 1 - A(y): below the least element every threshold answer is 1.
  c.gates.push_back(CircuitGate{gate_x("abit"), false});
  c.gates.push_back(CircuitGate{gate_cnot("abit", "ans"), false});
  c.gates.push_back(CircuitGate{gate_x("abit"), false});
  c.gates.push_back(CircuitGate{v.inverse(), false});
  return c;
}

GtBound gt_bound(std::size_t N, double c) {
  if (N < 4) throw std::invalid_argument("gt_bound: N must be at least 4");
  if (!(c > 0.0) || !(c < 2.0)) throw std::invalid_argument("gt_bound: c outside (0, 2)");
  const double logn = std::log2(double(N));
  const double loglogn = std::log2(logn);
  GtBound out;
  out.threshold = (c / 2.0) * logn / loglogn;
  for (std::size_t t = 1;; ++t) {
    if ((loglogn + std::log2(double(t))) * double(t) >= c * logn) {
      out.T = t;
      return out;
    }
  }
}

}  // namespace qct
