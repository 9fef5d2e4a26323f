#include "qct/qsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace qct {

namespace {

constexpr double kUnitaryTol = 1e-9;
constexpr double kMassTol = 1e-12;

std::size_t initial_cap() {
  if (const char* env = std::getenv("QT_DIM_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v >= 2) return static_cast<std::size_t>(v);
  }
  return std::size_t{1} << 20;
}

std::atomic<std::size_t>& cap_slot() {
  static std::atomic<std::size_t> cap{initial_cap()};
  return cap;
}

}  // namespace

std::size_t dimension_cap() { return cap_slot().load(); }

void set_dimension_cap(std::size_t cap) {
  if (cap < 2) throw std::invalid_argument("set_dimension_cap: cap below 2");
  cap_slot().store(cap);
}

std::string owner_name(Owner o) {
  switch (o) {
    case Owner::Alice: return "alice";
    case Owner::Bob: return "bob";
    case Owner::Shared: return "shared";
  }
  throw std::logic_error("owner_name: bad enum");
}

Owner owner_from_name(const std::string& s) {
  if (s == "alice") return Owner::Alice;
  if (s == "bob") return Owner::Bob;
  if (s == "shared") return Owner::Shared;
  throw std::invalid_argument("owner_from_name: " + s);
}

RegisterLayout RegisterLayout::create(std::vector<Register> regs) {
  return create(std::move(regs), dimension_cap());
}

RegisterLayout RegisterLayout::create(std::vector<Register> regs, std::size_t cap) {
  RegisterLayout out;
  out.regs_ = std::move(regs);
  out.total_dim_ = 1;
  for (std::size_t i = 0; i < out.regs_.size(); ++i) {
    const Register& r = out.regs_[i];
    if (r.name.empty()) throw std::invalid_argument("layout: empty register name");
    if (r.dim < 2) throw std::invalid_argument("layout: register '" + r.name + "' has dim < 2");
    if (!out.index_.emplace(r.name, i).second)
      throw std::invalid_argument("layout: duplicate register '" + r.name + "'");
    if (out.total_dim_ > cap / r.dim)
      throw std::length_error("layout: dimension cap exceeded (cap " + std::to_string(cap) + ")");
    out.total_dim_ *= r.dim;
  }
  out.strides_.assign(out.regs_.size(), 1);
  for (std::size_t i = out.regs_.size(); i-- > 0;) {
    if (i + 1 < out.regs_.size()) out.strides_[i] = out.strides_[i + 1] * out.regs_[i + 1].dim;
  }
  return out;
}

bool RegisterLayout::has(const std::string& name) const { return index_.count(name) != 0; }

std::size_t RegisterLayout::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("layout: unknown register '" + name + "'");
  return it->second;
}

std::size_t RegisterLayout::dim_of(const std::string& name) const {
  return regs_[index_of(name)].dim;
}

std::size_t RegisterLayout::digit(std::size_t global_index, std::size_t reg_index) const {
  return (global_index / strides_.at(reg_index)) % regs_.at(reg_index).dim;
}

std::vector<std::size_t> RegisterLayout::digits(std::size_t global_index) const {
  std::vector<std::size_t> out(regs_.size());
  for (std::size_t i = 0; i < regs_.size(); ++i) out[i] = digit(global_index, i);
  return out;
}

bool RegisterLayout::same_shape(const RegisterLayout& other) const {
  if (regs_.size() != other.regs_.size()) return false;
  for (std::size_t i = 0; i < regs_.size(); ++i) {
    if (regs_[i].name != other.regs_[i].name || regs_[i].dim != other.regs_[i].dim) return false;
  }
  return true;
}

QState make_state(RegisterLayout layout, cvec amps, bool normalized) {
  if (amps.size() != layout.total_dim())
    throw std::invalid_argument("make_state: amplitude count mismatch");
  QState s{std::move(layout), std::move(amps), normalized};
  if (normalized) {
    double n = state_norm(s);
    if (std::abs(n - 1.0) > kUnitaryTol)
      throw std::invalid_argument("make_state: norm " + std::to_string(n));
  }
  return s;
}

QState basis_state(const RegisterLayout& layout, const std::map<std::string, std::size_t>& assign) {
  return make_product_state(layout, assign, {});
}

QState make_product_state(
    const RegisterLayout& layout, const std::map<std::string, std::size_t>& basis,
    const std::vector<std::pair<std::vector<std::string>, cvec>>& blocks) {
  std::vector<int> covered(layout.size(), 0);
  std::size_t base = 0;
  for (const auto& [name, value] : basis) {
    std::size_t idx = layout.index_of(name);
    if (value >= layout.reg(idx).dim)
      throw std::out_of_range("product state: value out of range for '" + name + "'");
    covered[idx] += 1;
    base += value * layout.stride(idx);
  }

  struct BlockInfo {
    std::vector<std::size_t> strides;  // per block digit, in layout units
    std::vector<std::size_t> dims;
    const cvec* amps;
  };
  std::vector<BlockInfo> infos;
  for (const auto& [names, amps] : blocks) {
    BlockInfo bi;
    std::size_t block_dim = 1;
    for (const auto& n : names) {
      std::size_t idx = layout.index_of(n);
      covered[idx] += 1;
      bi.strides.push_back(layout.stride(idx));
      bi.dims.push_back(layout.reg(idx).dim);
      block_dim *= layout.reg(idx).dim;
    }
    if (amps.size() != block_dim)
      throw std::invalid_argument("product state: block amplitude count mismatch");
    bi.amps = &amps;
    infos.push_back(std::move(bi));
  }
  for (std::size_t i = 0; i < covered.size(); ++i) {
    if (covered[i] != 1)
      throw std::invalid_argument("product state: register '" + layout.reg(i).name +
                                  "' covered " + std::to_string(covered[i]) + " times");
  }

  cvec amps(layout.total_dim(), cplx(0.0, 0.0));
  // Walk the cartesian product of all block indices.
  std::vector<std::size_t> cursor(infos.size(), 0);
  while (true) {
    std::size_t index = base;
    cplx a(1.0, 0.0);
    for (std::size_t b = 0; b < infos.size(); ++b) {
      const BlockInfo& bi = infos[b];
      std::size_t rem = cursor[b];
      a *= (*bi.amps)[cursor[b]];
      for (std::size_t d = bi.dims.size(); d-- > 0;) {
        std::size_t digit = rem % bi.dims[d];
        rem /= bi.dims[d];
        index += digit * bi.strides[d];
      }
    }
    amps[index] += a;
    // increment cursor
    std::size_t b = infos.size();
    while (b > 0) {
      --b;
      if (++cursor[b] < infos[b].amps->size()) break;
      cursor[b] = 0;
      if (b == 0) {
        b = SIZE_MAX;
        break;
      }
    }
    if (infos.empty() || b == SIZE_MAX) break;
  }
  return make_state(layout, std::move(amps), true);
}

QState state_difference(const QState& a, const QState& b) {
  if (!a.layout.same_shape(b.layout))
    throw std::invalid_argument("state_difference: layout mismatch");
  cvec d(a.amps.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.amps[i] - b.amps[i];
  return QState{a.layout, std::move(d), false};
}

double state_norm(const QState& s) {
  double acc = 0.0;
  for (const cplx& a : s.amps) acc += std::norm(a);
  return std::sqrt(acc);
}

cplx state_inner(const QState& a, const QState& b) {
  if (!a.layout.same_shape(b.layout)) throw std::invalid_argument("state_inner: layout mismatch");
  cplx acc(0.0, 0.0);
  for (std::size_t i = 0; i < a.amps.size(); ++i) acc += std::conj(a.amps[i]) * b.amps[i];
  return acc;
}

LocalUnitary LocalUnitary::dense(std::vector<std::string> targets, std::vector<std::size_t> dims,
                                 cvec matrix) {
  if (targets.size() != dims.size())
    throw std::invalid_argument("unitary: target/dim count mismatch");
  LocalUnitary u;
  u.kind_ = Kind::Dense;
  u.targets_ = std::move(targets);
  u.dims_ = std::move(dims);
  u.dim_ = 1;
  for (std::size_t d : u.dims_) u.dim_ *= d;
  if (matrix.size() != u.dim_ * u.dim_) throw std::invalid_argument("unitary: matrix size mismatch");
  u.matrix_ = std::move(matrix);
  // U^dagger U must be the identity.
  const cvec& m = u.matrix_;
  for (std::size_t i = 0; i < u.dim_; ++i) {
    for (std::size_t j = 0; j < u.dim_; ++j) {
      cplx acc(0.0, 0.0);
      for (std::size_t k = 0; k < u.dim_; ++k) acc += std::conj(m[k * u.dim_ + i]) * m[k * u.dim_ + j];
      cplx want = (i == j) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
      if (std::abs(acc - want) > kUnitaryTol)
        throw std::invalid_argument("unitary: matrix is not unitary");
    }
  }
  return u;
}

LocalUnitary LocalUnitary::perm_phase(std::vector<std::string> targets,
                                      std::vector<std::size_t> dims,
                                      std::vector<std::size_t> perm, cvec phases) {
  if (targets.size() != dims.size())
    throw std::invalid_argument("unitary: target/dim count mismatch");
  LocalUnitary u;
  u.kind_ = Kind::PermPhase;
  u.targets_ = std::move(targets);
  u.dims_ = std::move(dims);
  u.dim_ = 1;
  for (std::size_t d : u.dims_) u.dim_ *= d;
  if (perm.size() != u.dim_ || phases.size() != u.dim_)
    throw std::invalid_argument("unitary: perm/phase size mismatch");
  std::vector<char> seen(u.dim_, 0);
  for (std::size_t i = 0; i < u.dim_; ++i) {
    if (perm[i] >= u.dim_ || seen[perm[i]])
      throw std::invalid_argument("unitary: not a permutation");
    seen[perm[i]] = 1;
    if (std::abs(std::abs(phases[i]) - 1.0) > kUnitaryTol)
      throw std::invalid_argument("unitary: phase off the unit circle");
  }
  u.perm_ = std::move(perm);
  u.phases_ = std::move(phases);
  return u;
}

LocalUnitary LocalUnitary::inverse() const {
  if (kind_ == Kind::Dense) {
    return dense(targets_, dims_, mat_dagger(matrix_, dim_));
  }
  std::vector<std::size_t> inv_perm(dim_);
  cvec inv_phase(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    inv_perm[perm_[i]] = i;
    inv_phase[perm_[i]] = std::conj(phases_[i]);
  }
  return perm_phase(targets_, dims_, std::move(inv_perm), std::move(inv_phase));
}

LocalUnitary LocalUnitary::retarget(std::vector<std::string> new_targets) const {
  if (new_targets.size() != targets_.size())
    throw std::invalid_argument("retarget: target count mismatch");
  LocalUnitary u = *this;
  u.targets_ = std::move(new_targets);
  return u;
}

cvec LocalUnitary::to_matrix() const {
  if (kind_ == Kind::Dense) return matrix_;
  cvec m(dim_ * dim_, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < dim_; ++i) m[perm_[i] * dim_ + i] = phases_[i];
  return m;
}

std::size_t LocalUnitary::target_digit(std::size_t i, std::size_t target_pos) const {
  std::size_t stride = 1;
  for (std::size_t k = dims_.size(); k-- > target_pos + 1;) stride *= dims_[k];
  return (i / stride) % dims_[target_pos];
}

bool LocalUnitary::preserves_digit(std::size_t target_pos) const {
  if (kind_ != Kind::PermPhase) return false;
  for (std::size_t i = 0; i < dim_; ++i) {
    if (target_digit(i, target_pos) != target_digit(perm_[i], target_pos)) return false;
  }
  return true;
}

namespace {

struct ApplyPlan {
  std::vector<std::size_t> target_offsets;  // target-space index -> offset in layout units
  std::vector<std::size_t> outer_bases;     // base offsets of the non-target assignments
};

ApplyPlan plan_apply(const RegisterLayout& layout, const LocalUnitary& u) {
  std::vector<std::size_t> positions;
  std::vector<char> is_target(layout.size(), 0);
  for (std::size_t t = 0; t < u.targets().size(); ++t) {
    std::size_t idx = layout.index_of(u.targets()[t]);
    if (layout.reg(idx).dim != u.dims()[t])
      throw std::invalid_argument("apply: dim mismatch on register '" + u.targets()[t] + "'");
    if (is_target[idx]) throw std::invalid_argument("apply: repeated target register");
    is_target[idx] = 1;
    positions.push_back(idx);
  }

  ApplyPlan plan;
  plan.target_offsets.assign(u.dim(), 0);
  for (std::size_t i = 0; i < u.dim(); ++i) {
    std::size_t rem = i, off = 0;
    for (std::size_t t = u.dims().size(); t-- > 0;) {
      std::size_t digit = rem % u.dims()[t];
      rem /= u.dims()[t];
      off += digit * layout.stride(positions[t]);
    }
    plan.target_offsets[i] = off;
  }

  std::size_t outer_count = layout.total_dim() / u.dim();
  plan.outer_bases.reserve(outer_count);
  std::vector<std::size_t> cursor(layout.size(), 0);
  // Enumerate assignments of non-target registers in mixed radix.
  std::size_t base = 0;
  while (true) {
    plan.outer_bases.push_back(base);
    std::size_t i = layout.size();
    bool done = true;
    while (i-- > 0) {
      if (is_target[i]) continue;
      if (cursor[i] + 1 < layout.reg(i).dim) {
        ++cursor[i];
        base += layout.stride(i);
        done = false;
        break;
      }
      base -= cursor[i] * layout.stride(i);
      cursor[i] = 0;
    }
    if (done) break;
  }
  return plan;
}

}  // namespace

QState apply(const QState& s, const LocalUnitary& u) {
  ApplyPlan plan = plan_apply(s.layout, u);
  const std::size_t d = u.dim();
  cvec out(s.amps.size());
  if (u.kind() == LocalUnitary::Kind::PermPhase) {
    const auto& perm = u.perm();
    const auto& ph = u.phases();
    for (std::size_t base : plan.outer_bases) {
      for (std::size_t i = 0; i < d; ++i) {
        out[base + plan.target_offsets[perm[i]]] = ph[i] * s.amps[base + plan.target_offsets[i]];
      }
    }
  } else {
    const cvec& m = u.matrix();
    cvec in(d);
    for (std::size_t base : plan.outer_bases) {
      for (std::size_t i = 0; i < d; ++i) in[i] = s.amps[base + plan.target_offsets[i]];
      for (std::size_t r = 0; r < d; ++r) {
        cplx acc(0.0, 0.0);
        const cplx* row = &m[r * d];
        for (std::size_t i = 0; i < d; ++i) acc += row[i] * in[i];
        out[base + plan.target_offsets[r]] = acc;
      }
    }
  }
  return QState{s.layout, std::move(out), s.normalized};
}

Distribution measure_distribution(const QState& s, const std::vector<std::string>& regs) {
  if (!s.normalized) throw std::invalid_argument("measure: state not normalized");
  if (regs.empty()) throw std::invalid_argument("measure: no registers named");
  std::vector<std::size_t> positions;
  std::size_t out_dim = 1;
  for (const auto& r : regs) {
    positions.push_back(s.layout.index_of(r));
    out_dim *= s.layout.reg(positions.back()).dim;
  }
  std::vector<double> masses(out_dim, 0.0);
  for (std::size_t g = 0; g < s.amps.size(); ++g) {
    double p = std::norm(s.amps[g]);
    if (p == 0.0) continue;
    std::size_t outcome = 0;
    for (std::size_t k = 0; k < positions.size(); ++k) {
      outcome = outcome * s.layout.reg(positions[k]).dim + s.layout.digit(g, positions[k]);
    }
    masses[outcome] += p;
  }
  double sum = 0.0;
  for (double m : masses) sum += m;
  if (std::abs(sum - 1.0) > kMassTol)
    throw std::logic_error("measure: masses sum to " + std::to_string(sum));
  return Distribution{std::move(masses)};
}

Distribution measure_all(const QState& s) {
  std::vector<std::string> regs;
  for (const auto& r : s.layout.registers()) regs.push_back(r.name);
  return measure_distribution(s, regs);
}

double l2_distance(const QState& a, const QState& b) {
  if (!a.layout.same_shape(b.layout)) throw std::invalid_argument("l2_distance: layout mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.amps.size(); ++i) acc += std::norm(a.amps[i] - b.amps[i]);
  return std::sqrt(acc);
}

double tv_distance(const Distribution& p, const Distribution& q) {
  if (p.size() != q.size()) throw std::invalid_argument("tv_distance: outcome spaces differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p.masses[i] - q.masses[i]);
  return 0.5 * acc;
}

// --- gates -------------------------------------------------------------------

LocalUnitary gate_x(const std::string& reg) {
  return LocalUnitary::permutation({reg}, {2}, [](std::size_t i) { return i ^ 1; });
}

LocalUnitary gate_h(const std::string& reg) {
  const double s = 1.0 / std::sqrt(2.0);
  return LocalUnitary::dense({reg}, {2}, {cplx(s, 0), cplx(s, 0), cplx(s, 0), cplx(-s, 0)});
}

LocalUnitary gate_cnot(const std::string& control, const std::string& target) {
  return LocalUnitary::permutation({control, target}, {2, 2}, [](std::size_t i) {
    std::size_t c = i >> 1, t = i & 1;
    return (c << 1) | (t ^ c);
  });
}

LocalUnitary gate_toffoli(const std::string& c1, const std::string& c2,
                          const std::string& target) {
  return LocalUnitary::permutation({c1, c2, target}, {2, 2, 2}, [](std::size_t i) {
    std::size_t a = (i >> 2) & 1, b = (i >> 1) & 1, t = i & 1;
    return (a << 2) | (b << 1) | (t ^ (a & b));
  });
}

LocalUnitary gate_add_value(const std::string& src, std::size_t sdim, const std::string& dst,
                            std::size_t ddim) {
  return LocalUnitary::permutation({src, dst}, {sdim, ddim}, [sdim, ddim](std::size_t i) {
    std::size_t z = i / ddim, a = i % ddim;
    return z * ddim + (a + z) % ddim;
  });
}

LocalUnitary gate_add_const(const std::string& reg, std::size_t dim, std::size_t c) {
  return LocalUnitary::permutation({reg}, {dim}, [dim, c](std::size_t i) { return (i + c) % dim; });
}

LocalUnitary gate_shift_mod(const std::string& reg, std::size_t dim, long shift, std::size_t mod) {
  if (mod == 0 || mod > dim) throw std::invalid_argument("gate_shift_mod: bad modulus");
  long s = ((shift % static_cast<long>(mod)) + static_cast<long>(mod)) % static_cast<long>(mod);
  return LocalUnitary::permutation({reg}, {dim}, [mod, s](std::size_t i) {
    if (i >= mod) return i;
    return (i + static_cast<std::size_t>(s)) % mod;
  });
}

std::size_t Circuit::oracle_calls() const {
  std::size_t n = 0;
  for (const auto& g : gates) n += g.is_oracle_call ? 1 : 0;
  return n;
}

QState apply_circuit(const QState& s, const Circuit& c, std::size_t* call_counter) {
  QState cur = s;
  for (const auto& g : c.gates) {
    cur = apply(cur, g.u);
    if (g.is_oracle_call && call_counter) ++*call_counter;
  }
  return cur;
}

// --- dense helpers -----------------------------------------------------------

cvec mat_identity(std::size_t n) {
  cvec m(n * n, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < n; ++i) m[i * n + i] = cplx(1.0, 0.0);
  return m;
}

cvec mat_mul(const cvec& a, const cvec& b, std::size_t n) {
  cvec out(n * n, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      cplx aik = a[i * n + k];
      if (aik == cplx(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += aik * b[k * n + j];
    }
  }
  return out;
}

cvec mat_dagger(const cvec& a, std::size_t n) {
  cvec out(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * n + i] = std::conj(a[i * n + j]);
  return out;
}

cvec mat_kron(const cvec& a, std::size_t na, const cvec& b, std::size_t nb) {
  std::size_t n = na * nb;
  cvec out(n * n);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j)
      for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t l = 0; l < nb; ++l)
          out[(i * nb + k) * n + (j * nb + l)] = a[i * na + j] * b[k * nb + l];
  return out;
}

double mat_max_abs_diff(const cvec& a, const cvec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("mat_max_abs_diff: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace qct
