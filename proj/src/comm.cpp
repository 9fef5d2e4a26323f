#include "qct/comm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace qct {

namespace {

constexpr double kExactTol = 1e-9;

Owner other(Owner o) {
  if (o == Owner::Alice) return Owner::Bob;
  if (o == Owner::Bob) return Owner::Alice;
  throw std::logic_error("protocol: shared-owner register in a two-party walk");
}

std::vector<std::string> rename_all(const std::vector<std::string>& names,
                                    const std::map<std::string, std::string>& map) {
  std::vector<std::string> out;
  out.reserve(names.size());
  for (const auto& n : names) {
    auto it = map.find(n);
    out.push_back(it == map.end() ? n : it->second);
  }
  return out;
}

Round rename_round(const Round& r, const std::map<std::string, std::string>& map) {
  Round out;
  out.actor = r.actor;
  if (r.unitary) out.unitary = r.unitary->retarget(rename_all(r.unitary->targets(), map));
  out.moves = rename_all(r.moves, map);
  return out;
}

// Reverse of "apply unitary, then move the listed registers": the moves come
// back first (their current owner is the other player), then the inverse
// unitary runs under the original actor, who owns its targets again.
void append_reversed(std::vector<Round>& dst, const std::vector<Round>& rounds,
                     const std::map<std::string, std::string>& map) {
  for (std::size_t i = rounds.size(); i-- > 0;) {
    const Round& r = rounds[i];
    if (!r.moves.empty()) dst.push_back(Round{other(r.actor), std::nullopt, rename_all(r.moves, map)});
    if (r.unitary)
      dst.push_back(Round{r.actor, r.unitary->retarget(rename_all(r.unitary->targets(), map)).inverse(), {}});
  }
}

// Bit `pos_from_msb` of `msg` written as a `width`-bit string, MSB first;
// positions past the width read as zero (odd widths leave the last pair
// half-empty).
std::size_t msg_bit(std::size_t msg, std::size_t width, std::size_t pos_from_msb) {
  if (pos_from_msb >= width) return 0;
  return (msg >> (width - 1 - pos_from_msb)) & std::size_t{1};
}

// Superdense encoder: reads the joint basis value v of `reads`, and when
// `message(v)` yields m, applies X^beta Z^alpha to half t with
// alpha = bit 2t, beta = bit 2t+1 of m (width-bit, MSB first). The phase
// (-1)^(alpha * new_bit) together with CNOT+H on the receiving side leaves
// the halves in |alpha>|beta> with no residual sign.
LocalUnitary superdense_encode(const std::vector<std::string>& reads,
                               const std::vector<std::size_t>& read_dims,
                               const std::vector<std::string>& halves, std::size_t width,
                               const std::function<std::optional<std::size_t>(std::size_t)>& message) {
  const std::size_t k = halves.size();
  std::vector<std::string> targets = reads;
  std::vector<std::size_t> dims = read_dims;
  for (const auto& h : halves) {
    targets.push_back(h);
    dims.push_back(2);
  }
  std::size_t dim = std::size_t{1} << k;
  for (std::size_t d : read_dims) dim *= d;
  std::vector<std::size_t> perm(dim);
  cvec phases(dim, cplx(1.0, 0.0));
  for (std::size_t i = 0; i < dim; ++i) {
    const std::size_t v = i >> k;
    const std::size_t bits = i & ((std::size_t{1} << k) - 1);
    const std::optional<std::size_t> m = message(v);
    if (!m) {
      perm[i] = i;
      continue;
    }
    std::size_t out_bits = 0;
    double ph = 1.0;
    for (std::size_t t = 0; t < k; ++t) {
      const std::size_t alpha = msg_bit(*m, width, 2 * t);
      const std::size_t beta = msg_bit(*m, width, 2 * t + 1);
      const std::size_t nb = ((bits >> (k - 1 - t)) & 1) ^ beta;
      out_bits |= nb << (k - 1 - t);
      if (alpha && nb) ph = -ph;
    }
    perm[i] = (v << k) | out_bits;
    phases[i] = cplx(ph, 0.0);
  }
  return LocalUnitary::perm_phase(std::move(targets), std::move(dims), std::move(perm),
                                  std::move(phases));
}

// CNOT + H on each pair, receiver side of the superdense code.
void append_decode_rounds(std::vector<Round>& rounds, Owner actor,
                          const std::vector<std::string>& sender_halves,
                          const std::vector<std::string>& receiver_halves) {
  for (std::size_t t = 0; t < sender_halves.size(); ++t) {
    rounds.push_back(Round{actor, gate_cnot(sender_halves[t], receiver_halves[t]), {}});
    rounds.push_back(Round{actor, gate_h(sender_halves[t]), {}});
  }
}

// Message value carried by decoded halves: sender half t holds bit 2t,
// receiver half t holds bit 2t+1 of a width-bit MSB-first string.
std::size_t decode_message(std::size_t sbits, std::size_t rbits, std::size_t k,
                           std::size_t width) {
  std::size_t m = 0;
  for (std::size_t t = 0; t < k; ++t) {
    const std::size_t alpha = (sbits >> (k - 1 - t)) & 1;
    const std::size_t beta = (rbits >> (k - 1 - t)) & 1;
    if (2 * t < width) m |= alpha << (width - 1 - 2 * t);
    if (2 * t + 1 < width) m |= beta << (width - 2 - 2 * t);
  }
  return m;
}

std::vector<std::string> half_names(const std::string& prefix, std::size_t k) {
  std::vector<std::string> out;
  out.reserve(k);
  for (std::size_t t = 0; t < k; ++t) out.push_back(prefix + std::to_string(t));
  return out;
}

void check_table_fits(const CommProtocol& p, const FunctionTable& f) {
  if (f.size_x > p.layout.dim_of(p.alice_input) || f.size_y > p.layout.dim_of(p.bob_input) ||
      f.size_z > p.layout.dim_of(p.output))
    throw std::invalid_argument("protocol: table '" + f.name + "' does not fit the registers");
}

}  // namespace

SharedBlock bell_block(const std::string& sender_half, const std::string& receiver_half) {
  const double a = 1.0 / std::sqrt(2.0);
  return SharedBlock{{sender_half, receiver_half},
                     {cplx(a, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(a, 0.0)}};
}

std::size_t ceil_log2(std::size_t n) {
  if (n == 0) throw std::invalid_argument("ceil_log2: argument must be positive");
  std::size_t b = 0;
  while ((std::size_t{1} << b) < n) ++b;
  return b;
}

void validate_protocol(const CommProtocol& p) {
  const RegisterLayout& L = p.layout;
  const auto need = [&](const std::string& name, Owner owner, const char* what) {
    if (!L.has(name)) throw std::invalid_argument(std::string("protocol: missing ") + what);
    if (L.reg(L.index_of(name)).owner != owner)
      throw std::invalid_argument(std::string("protocol: wrong initial owner for ") + what);
  };
  need(p.alice_input, Owner::Alice, "Alice input");
  need(p.bob_input, Owner::Bob, "Bob input");
  need(p.output, Owner::Bob, "output");
  if (p.alice_input == p.bob_input || p.alice_input == p.output || p.bob_input == p.output)
    throw std::invalid_argument("protocol: inputs and output must be distinct registers");
  for (const auto& r : L.registers()) {
    if (r.owner == Owner::Shared)
      throw std::invalid_argument("protocol: register '" + r.name + "' lacks a single owner");
  }

  std::set<std::string> in_block;
  for (const auto& b : p.shared_blocks) {
    if (b.registers.empty()) throw std::invalid_argument("protocol: empty shared block");
    std::size_t block_dim = 1;
    for (const auto& n : b.registers) {
      if (n == p.alice_input || n == p.bob_input || n == p.output)
        throw std::invalid_argument("protocol: shared block covers input/output '" + n + "'");
      block_dim *= L.dim_of(n);  // throws on unknown register
      if (!in_block.insert(n).second)
        throw std::invalid_argument("protocol: register '" + n + "' in two shared blocks");
    }
    if (b.amplitudes.size() != block_dim)
      throw std::invalid_argument("protocol: shared block amplitude count mismatch");
    double mass = 0.0;
    for (const cplx& a : b.amplitudes) mass += std::norm(a);
    if (std::abs(mass - 1.0) > kExactTol)
      throw std::invalid_argument("protocol: shared block not normalized");
  }

  std::map<std::string, Owner> own;
  for (const auto& r : L.registers()) own[r.name] = r.owner;
  for (const Round& r : p.rounds) {
    if (!r.unitary && r.moves.empty()) throw std::invalid_argument("protocol: empty round");
    if (r.unitary) {
      const LocalUnitary& u = *r.unitary;
      for (std::size_t t = 0; t < u.targets().size(); ++t) {
        const std::string& name = u.targets()[t];
        if (L.dim_of(name) != u.dims()[t])
          throw std::invalid_argument("protocol: unitary dim mismatch on '" + name + "'");
        if (own.at(name) != r.actor)
          throw std::invalid_argument("protocol: round touches register '" + name +
                                      "' its actor does not own");
      }
    }
    for (const auto& m : r.moves) {
      if (L.dim_of(m) != 2)
        throw std::invalid_argument("protocol: move of non-qubit register '" + m + "'");
      if (own.at(m) != r.actor)
        throw std::invalid_argument("protocol: moving register '" + m + "' the actor does not own");
      own[m] = other(own[m]);
    }
  }
}

QubitLedger ledger(const CommProtocol& p) {
  QubitLedger l;
  for (const Round& r : p.rounds) {
    if (r.actor == Owner::Alice)
      l.a_to_b += r.moves.size();
    else
      l.b_to_a += r.moves.size();
  }
  return l;
}

Owner owner_after(const CommProtocol& p, const std::string& reg) {
  Owner o = p.layout.reg(p.layout.index_of(reg)).owner;
  for (const Round& r : p.rounds)
    for (const auto& m : r.moves)
      if (m == reg) o = other(o);
  return o;
}

QState initial_state(const CommProtocol& p, std::size_t x, std::size_t y, std::size_t a) {
  std::set<std::string> blocked;
  std::vector<std::pair<std::vector<std::string>, cvec>> blocks;
  for (const auto& b : p.shared_blocks) {
    blocks.emplace_back(b.registers, b.amplitudes);
    for (const auto& n : b.registers) blocked.insert(n);
  }
  std::map<std::string, std::size_t> basis;
  for (const auto& r : p.layout.registers())
    if (!blocked.count(r.name)) basis[r.name] = 0;
  basis[p.alice_input] = x;
  basis[p.bob_input] = y;
  basis[p.output] = a;
  return make_product_state(p.layout, basis, blocks);
}

QState run_rounds(QState s, const CommProtocol& p, std::size_t first, std::size_t last) {
  if (first > last || last > p.rounds.size())
    throw std::out_of_range("run_rounds: bad round range");
  for (std::size_t i = first; i < last; ++i) {
    if (p.rounds[i].unitary) s = apply(s, *p.rounds[i].unitary);
  }
  return s;
}

QState run(const CommProtocol& p, std::size_t x, std::size_t y, std::size_t a) {
  return run_rounds(initial_state(p, x, y, a), p, 0, p.rounds.size());
}

bool preserves_inputs(const CommProtocol& p) {
  for (const Round& r : p.rounds) {
    if (!r.unitary) continue;
    const LocalUnitary& u = *r.unitary;
    for (std::size_t t = 0; t < u.targets().size(); ++t) {
      if (u.targets()[t] != p.alice_input && u.targets()[t] != p.bob_input) continue;
      if (!u.preserves_digit(t)) return false;
    }
  }
  return true;
}

std::vector<double> failure_table(const CommProtocol& p, const FunctionTable& f) {
  check_table_fits(p, f);
  const std::size_t X = f.size_x, Y = f.size_y;
  std::vector<double> table(X * Y, 0.0);
  if (preserves_inputs(p)) {
    // The protocol acts block-diagonally over basis inputs, so one run on
    // uniformly superposed inputs carries every (x, y) branch at once.
    std::set<std::string> blocked{p.alice_input, p.bob_input};
    std::vector<std::pair<std::vector<std::string>, cvec>> blocks;
    cvec ax(p.layout.dim_of(p.alice_input), cplx(0.0, 0.0));
    for (std::size_t x = 0; x < X; ++x) ax[x] = cplx(1.0 / std::sqrt(double(X)), 0.0);
    blocks.emplace_back(std::vector<std::string>{p.alice_input}, std::move(ax));
    cvec by(p.layout.dim_of(p.bob_input), cplx(0.0, 0.0));
    for (std::size_t y = 0; y < Y; ++y) by[y] = cplx(1.0 / std::sqrt(double(Y)), 0.0);
    blocks.emplace_back(std::vector<std::string>{p.bob_input}, std::move(by));
    for (const auto& b : p.shared_blocks) {
      blocks.emplace_back(b.registers, b.amplitudes);
      for (const auto& n : b.registers) blocked.insert(n);
    }
    std::map<std::string, std::size_t> basis;
    for (const auto& r : p.layout.registers())
      if (!blocked.count(r.name)) basis[r.name] = 0;
    QState s = make_product_state(p.layout, basis, blocks);
    s = run_rounds(std::move(s), p, 0, p.rounds.size());
    const Distribution d = measure_distribution(s, {p.alice_input, p.bob_input, p.output});
    const std::size_t db = p.layout.dim_of(p.bob_input);
    const std::size_t dz = p.layout.dim_of(p.output);
    for (std::size_t x = 0; x < X; ++x) {
      for (std::size_t y = 0; y < Y; ++y) {
        const double mass = d[(x * db + y) * dz + std::size_t(f.value(x, y))];
        table[x * Y + y] = std::clamp(1.0 - mass * double(X) * double(Y), 0.0, 1.0);
      }
    }
    return table;
  }
  for (std::size_t x = 0; x < X; ++x) {
    for (std::size_t y = 0; y < Y; ++y) {
      const QState s = run(p, x, y, 0);
      const Distribution d = measure_distribution(s, {p.output});
      table[x * Y + y] = std::clamp(1.0 - d[std::size_t(f.value(x, y))], 0.0, 1.0);
    }
  }
  return table;
}

double max_failure(const std::vector<double>& table) {
  double worst = 0.0;
  for (double v : table) worst = std::max(worst, v);
  return worst;
}

double mu_average(const std::vector<double>& per_x, const Distribution& mu) {
  if (mu.size() != per_x.size()) throw std::invalid_argument("mu_average: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < per_x.size(); ++i) acc += mu[i] * per_x[i];
  return acc;
}

CommProtocol compile_clean(const CommProtocol& p0, const FunctionTable& f) {
  validate_protocol(p0);
  if (p0.declared_error != 0.0)
    throw std::invalid_argument("compile_clean: protocol declares a nonzero error");
  const double worst = max_failure(failure_table(p0, f));
  if (worst > kExactTol)
    throw std::invalid_argument("compile_clean: protocol is not exact (worst failure " +
                                std::to_string(worst) + ")");

  const std::string scratch = p0.output + "_scratch";
  if (p0.layout.has(scratch))
    throw std::invalid_argument("compile_clean: register name '" + scratch + "' already taken");
  const std::size_t dz = p0.layout.dim_of(p0.output);
  const Owner copier = owner_after(p0, p0.output);
  const std::map<std::string, std::string> ren{{p0.output, scratch}};

  std::vector<Register> regs;
  for (const auto& r : p0.layout.registers())
    regs.push_back(Register{r.name == p0.output ? scratch : r.name, r.dim, r.owner});
  regs.push_back(Register{p0.output, dz, copier});

  CommProtocol c;
  c.name = p0.name + "_clean";
  c.layout = RegisterLayout::create(std::move(regs));
  c.alice_input = p0.alice_input;
  c.bob_input = p0.bob_input;
  c.output = p0.output;
  c.shared_blocks = p0.shared_blocks;
  for (const Round& r : p0.rounds) c.rounds.push_back(rename_round(r, ren));
  c.rounds.push_back(Round{copier, gate_add_value(scratch, dz, p0.output, dz), {}});
  append_reversed(c.rounds, p0.rounds, ren);
  c.declared_error = 0.0;
  c.compiled = CompileKind::Clean;
  validate_protocol(c);
  return c;
}

std::pair<CommProtocol, ErrorAnalysis> compile_approx_clean(const CommProtocol& p0,
                                                            const FunctionTable& f) {
  validate_protocol(p0);
  const double measured = max_failure(failure_table(p0, f));
  if (measured > p0.declared_error + kExactTol)
    throw std::invalid_argument("compile_approx_clean: measured failure " +
                                std::to_string(measured) + " exceeds declared " +
                                std::to_string(p0.declared_error));

  const std::string acopy = p0.alice_input + "_copy";
  const std::string bcopy = p0.bob_input + "_copy";
  const std::string scratch = p0.output + "_scratch";
  for (const auto& n : {acopy, bcopy, scratch}) {
    if (p0.layout.has(n))
      throw std::invalid_argument("compile_approx_clean: register name '" + n + "' already taken");
  }
  const std::size_t da = p0.layout.dim_of(p0.alice_input);
  const std::size_t db = p0.layout.dim_of(p0.bob_input);
  const std::size_t dz = p0.layout.dim_of(p0.output);
  const Owner copier = owner_after(p0, p0.output);
  const std::map<std::string, std::string> ren{
      {p0.alice_input, acopy}, {p0.bob_input, bcopy}, {p0.output, scratch}};

  std::vector<Register> regs;
  for (const auto& r : p0.layout.registers())
    regs.push_back(Register{r.name == p0.output ? scratch : r.name, r.dim, r.owner});
  regs.push_back(Register{acopy, da, Owner::Alice});
  regs.push_back(Register{bcopy, db, Owner::Bob});
  regs.push_back(Register{p0.output, dz, copier});

  CommProtocol c;
  c.name = p0.name + "_approx_clean";
  c.layout = RegisterLayout::create(std::move(regs));
  c.alice_input = p0.alice_input;
  c.bob_input = p0.bob_input;
  c.output = p0.output;
  c.shared_blocks = p0.shared_blocks;
  const LocalUnitary copy_a = gate_add_value(p0.alice_input, da, acopy, da);
  const LocalUnitary copy_b = gate_add_value(p0.bob_input, db, bcopy, db);
  // The body only ever sees the copies; the true inputs are read by the
  // copy/uncopy adders and nothing else, which is what makes the per-y error
  // vectors orthogonal.
  c.rounds.push_back(Round{Owner::Alice, copy_a, {}});
  c.rounds.push_back(Round{Owner::Bob, copy_b, {}});
  for (const Round& r : p0.rounds) c.rounds.push_back(rename_round(r, ren));
  c.rounds.push_back(Round{copier, gate_add_value(scratch, dz, p0.output, dz), {}});
  append_reversed(c.rounds, p0.rounds, ren);
  c.rounds.push_back(Round{Owner::Bob, copy_b.inverse(), {}});
  c.rounds.push_back(Round{Owner::Alice, copy_a.inverse(), {}});
  c.declared_error = p0.declared_error;
  c.compiled = CompileKind::ApproxClean;
  validate_protocol(c);

  ErrorAnalysis an;
  an.declared_eps = p0.declared_error;
  an.measured_eps = measured;
  an.size_x = f.size_x;
  an.size_y = f.size_y;
  an.size_z = f.size_z;
  an.norm_bound = 2.0 * double(f.size_z) * std::sqrt(p0.declared_error);
  an.norms.assign(f.size_x * f.size_y * f.size_z, 0.0);
  for (std::size_t x = 0; x < f.size_x; ++x) {
    for (std::size_t a = 0; a < f.size_z; ++a) {
      std::vector<QState> errs;
      errs.reserve(f.size_y);
      for (std::size_t y = 0; y < f.size_y; ++y) {
        const QState actual = run(c, x, y, a);
        const QState ideal =
            initial_state(c, x, y, (a + std::size_t(f.value(x, y))) % dz);
        QState err = state_difference(actual, ideal);
        const double norm = state_norm(err);
        an.norms[(x * f.size_y + y) * f.size_z + a] = norm;
        an.max_norm = std::max(an.max_norm, norm);
        errs.push_back(std::move(err));
      }
      for (std::size_t y = 0; y < f.size_y; ++y)
        for (std::size_t y2 = y + 1; y2 < f.size_y; ++y2)
          an.max_cross_y = std::max(an.max_cross_y, std::abs(state_inner(errs[y], errs[y2])));
    }
  }
  return {std::move(c), std::move(an)};
}

CommProtocol inject_noise(const CommProtocol& p, double eps) {
  if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("inject_noise: eps outside [0, 1]");
  if (eps == 0.0) return p;
  validate_protocol(p);
  std::string noise = "noise";
  for (std::size_t i = 1; p.layout.has(noise); ++i) noise = "noise_" + std::to_string(i);
  const std::size_t dz = p.layout.dim_of(p.output);
  const Owner actor = owner_after(p, p.output);

  std::vector<Register> regs(p.layout.registers());
  regs.push_back(Register{noise, 2, actor});

  CommProtocol out = p;
  out.name = p.name + "_noisy";
  out.layout = RegisterLayout::create(std::move(regs));
  out.declared_error = eps;
  out.compiled = CompileKind::None;

  // Rotation by asin(sqrt(eps)) in each plane |z,0> <-> |z+1 mod dz,1>; the
  // planes partition the basis, so this is unitary for every dz and leaves
  // the wrong output value with probability exactly eps.
  const std::size_t D = dz * 2;
  const double theta = std::asin(std::sqrt(eps));
  const double co = std::cos(theta), si = std::sin(theta);
  cvec m(D * D, cplx(0.0, 0.0));
  for (std::size_t z = 0; z < dz; ++z) {
    m[(z * 2) * D + (z * 2)] = cplx(co, 0.0);
    m[(((z + 1) % dz) * 2 + 1) * D + (z * 2)] = cplx(si, 0.0);
    m[(((z + dz - 1) % dz) * 2) * D + (z * 2 + 1)] = cplx(-si, 0.0);
    m[(z * 2 + 1) * D + (z * 2 + 1)] = cplx(co, 0.0);
  }
  out.rounds.push_back(
      Round{actor, LocalUnitary::dense({p.output, noise}, {dz, 2}, std::move(m)), {}});
  validate_protocol(out);
  return out;
}

CommProtocol constant_protocol(std::size_t size_x, std::size_t size_y, std::size_t size_z,
                               std::size_t c) {
  if (size_x == 0 || size_y == 0 || size_z == 0)
    throw std::invalid_argument("constant_protocol: empty domain");
  if (c >= size_z) throw std::invalid_argument("constant_protocol: constant out of range");
  const std::size_t dz = std::max<std::size_t>(size_z, 2);
  CommProtocol p;
  p.name = "const_" + std::to_string(c);
  p.layout = RegisterLayout::create({Register{"alice_in", std::max<std::size_t>(size_x, 2), Owner::Alice},
                                     Register{"bob_in", std::max<std::size_t>(size_y, 2), Owner::Bob},
                                     Register{"out", dz, Owner::Bob}});
  p.alice_input = "alice_in";
  p.bob_input = "bob_in";
  p.output = "out";
  p.rounds.push_back(Round{Owner::Bob, gate_add_const("out", dz, c), {}});
  return p;
}

CommProtocol superdense_function_protocol(const FunctionTable& f) {
  const std::size_t nb = ceil_log2(f.size_x);
  const std::size_t k = (nb + 1) / 2;
  const std::size_t da = std::max<std::size_t>(f.size_x, 2);
  const std::size_t db = std::max<std::size_t>(f.size_y, 2);
  const std::size_t dz = std::max<std::size_t>(f.size_z, 2);
  const std::vector<std::string> sh = half_names("s", k);
  const std::vector<std::string> rh = half_names("r", k);

  std::vector<Register> regs{Register{"alice_in", da, Owner::Alice}};
  for (const auto& n : sh) regs.push_back(Register{n, 2, Owner::Alice});
  for (const auto& n : rh) regs.push_back(Register{n, 2, Owner::Bob});
  regs.push_back(Register{"bob_in", db, Owner::Bob});
  regs.push_back(Register{"out", dz, Owner::Bob});

  CommProtocol p;
  p.name = "superdense_" + f.name;
  p.layout = RegisterLayout::create(std::move(regs));
  p.alice_input = "alice_in";
  p.bob_input = "bob_in";
  p.output = "out";
  for (std::size_t t = 0; t < k; ++t) p.shared_blocks.push_back(bell_block(sh[t], rh[t]));

  const std::size_t X = f.size_x;
  if (k > 0) {
    LocalUnitary enc = superdense_encode(
        {"alice_in"}, {da}, sh, nb,
        [X](std::size_t v) -> std::optional<std::size_t> {
          if (v >= X) return std::nullopt;
          return v;
        });
    p.rounds.push_back(Round{Owner::Alice, std::move(enc), sh});
    append_decode_rounds(p.rounds, Owner::Bob, sh, rh);
  }

  std::vector<std::string> targets = sh;
  targets.insert(targets.end(), rh.begin(), rh.end());
  targets.push_back("bob_in");
  targets.push_back("out");
  std::vector<std::size_t> dims(2 * k, 2);
  dims.push_back(db);
  dims.push_back(dz);
  const FunctionTable table = f;
  p.rounds.push_back(Round{
      Owner::Bob,
      LocalUnitary::permutation(std::move(targets), std::move(dims),
                                [table, k, nb, db, dz](std::size_t i) {
                                  std::size_t a = i % dz;
                                  std::size_t rest = i / dz;
                                  const std::size_t y = rest % db;
                                  rest /= db;
                                  const std::size_t rbits = rest & ((std::size_t{1} << k) - 1);
                                  const std::size_t sbits = rest >> k;
                                  const std::size_t xhat = decode_message(sbits, rbits, k, nb);
                                  if (xhat < table.size_x && y < table.size_y)
                                    a = (a + std::size_t(table.value(xhat, y))) % dz;
                                  return (rest * db + y) * dz + a;
                                }),
      {}});
  return p;
}

CommProtocol superdense_send(std::size_t bits) {
  CommProtocol p = superdense_function_protocol(identity_table(std::size_t{1} << bits));
  p.name = "superdense_send_" + std::to_string(bits);
  return p;
}

CommProtocol composed_protocol(std::size_t n, std::size_t q) {
  if (n == 0 || q == 0) throw std::invalid_argument("composed_protocol: n, q must be positive");
  const std::size_t X = std::size_t{1} << (n * q);
  const std::size_t Y = q << n;
  const std::size_t nbj = ceil_log2(q);
  const std::size_t kb = (nbj + 1) / 2;
  const std::size_t ka = (n + 1) / 2;
  const std::vector<std::string> bs = half_names("bs", kb);
  const std::vector<std::string> br = half_names("br", kb);
  const std::vector<std::string> as = half_names("as", ka);
  const std::vector<std::string> ar = half_names("ar", ka);

  std::vector<Register> regs{Register{"alice_in", X, Owner::Alice}};
  for (const auto& nme : bs) regs.push_back(Register{nme, 2, Owner::Bob});
  for (const auto& nme : br) regs.push_back(Register{nme, 2, Owner::Alice});
  for (const auto& nme : as) regs.push_back(Register{nme, 2, Owner::Alice});
  for (const auto& nme : ar) regs.push_back(Register{nme, 2, Owner::Bob});
  regs.push_back(Register{"bob_in", Y, Owner::Bob});
  regs.push_back(Register{"out", 2, Owner::Bob});

  CommProtocol p;
  p.name = "composed_n" + std::to_string(n) + "_q" + std::to_string(q) + "_protocol";
  p.layout = RegisterLayout::create(std::move(regs));
  p.alice_input = "alice_in";
  p.bob_input = "bob_in";
  p.output = "out";
  for (std::size_t t = 0; t < kb; ++t) p.shared_blocks.push_back(bell_block(bs[t], br[t]));
  for (std::size_t t = 0; t < ka; ++t) p.shared_blocks.push_back(bell_block(as[t], ar[t]));

  if (kb > 0) {
    // Bob tells Alice which column he needs.
    LocalUnitary enc = superdense_encode(
        {"bob_in"}, {Y}, bs, nbj,
        [n](std::size_t col) -> std::optional<std::size_t> { return col >> n; });
    p.rounds.push_back(Round{Owner::Bob, std::move(enc), bs});
    append_decode_rounds(p.rounds, Owner::Alice, bs, br);
  }

  // Alice answers with the requested column of her bit matrix.
  {
    std::vector<std::string> reads{"alice_in"};
    std::vector<std::size_t> read_dims{X};
    for (const auto& nme : bs) {
      reads.push_back(nme);
      read_dims.push_back(2);
    }
    for (const auto& nme : br) {
      reads.push_back(nme);
      read_dims.push_back(2);
    }
    LocalUnitary enc = superdense_encode(
        reads, read_dims, as, n,
        [n, q, kb, nbj](std::size_t v) -> std::optional<std::size_t> {
          const std::size_t rbits = v & ((std::size_t{1} << kb) - 1);
          const std::size_t sbits = (v >> kb) & ((std::size_t{1} << kb) - 1);
          const std::size_t x = v >> (2 * kb);
          const std::size_t jm1 = decode_message(sbits, rbits, kb, nbj);
          if (jm1 >= q) return std::nullopt;
          std::size_t m = 0;
          for (std::size_t i = 1; i <= n; ++i)
            m |= std::size_t(composed_bit(x, i, jm1 + 1, n, q)) << (n - i);
          return m;
        });
    p.rounds.push_back(Round{Owner::Alice, std::move(enc), as});
    append_decode_rounds(p.rounds, Owner::Bob, as, ar);
  }

  // Bob folds the column into the inner product with the y-part of his input.
  {
    std::vector<std::string> targets = as;
    targets.insert(targets.end(), ar.begin(), ar.end());
    targets.push_back("bob_in");
    targets.push_back("out");
    std::vector<std::size_t> dims(2 * ka, 2);
    dims.push_back(Y);
    dims.push_back(2);
    p.rounds.push_back(Round{
        Owner::Bob,
        LocalUnitary::permutation(std::move(targets), std::move(dims),
                                  [n, ka, Y](std::size_t i) {
                                    std::size_t a = i & 1;
                                    std::size_t rest = i >> 1;
                                    const std::size_t col = rest % Y;
                                    rest /= Y;
                                    const std::size_t rbits = rest & ((std::size_t{1} << ka) - 1);
                                    const std::size_t sbits = rest >> ka;
                                    const std::size_t mhat = decode_message(sbits, rbits, ka, n);
                                    const std::size_t y = col & ((std::size_t{1} << n) - 1);
                                    a ^= std::size_t(std::popcount(mhat & y)) & 1;
                                    return ((rest * Y + col) << 1) | a;
                                  }),
        {}});
  }
  return p;
}

CommProtocol amplify(const CommProtocol& p, std::size_t k) {
  if (k == 0 || k % 2 == 0) throw std::invalid_argument("amplify: k must be odd");
  validate_protocol(p);
  if (!preserves_inputs(p))
    throw std::invalid_argument("amplify: protocol writes to its input registers");
  const std::size_t dz = p.layout.dim_of(p.output);
  const Owner decode_actor = owner_after(p, p.output);

  const auto is_input = [&](const std::string& n) {
    return n == p.alice_input || n == p.bob_input;
  };

  CommProtocol a;
  a.name = p.name + "_x" + std::to_string(k);
  a.alice_input = p.alice_input;
  a.bob_input = p.bob_input;
  a.output = p.output;

  std::vector<Register> regs;
  for (const auto& r : p.layout.registers())
    if (is_input(r.name)) regs.push_back(r);
  std::vector<std::string> copy_outs;
  for (std::size_t c = 0; c < k; ++c) {
    const std::string suffix = "_a" + std::to_string(c);
    std::map<std::string, std::string> ren;
    for (const auto& r : p.layout.registers()) {
      if (is_input(r.name)) continue;
      ren[r.name] = r.name + suffix;
      regs.push_back(Register{r.name + suffix, r.dim, r.owner});
    }
    copy_outs.push_back(p.output + suffix);
    for (const auto& b : p.shared_blocks)
      a.shared_blocks.push_back(SharedBlock{rename_all(b.registers, ren), b.amplitudes});
    for (const Round& r : p.rounds) a.rounds.push_back(rename_round(r, ren));
  }
  regs.push_back(Register{p.output, dz, decode_actor});
  a.layout = RegisterLayout::create(std::move(regs));

  std::vector<std::string> targets = copy_outs;
  targets.push_back(p.output);
  std::vector<std::size_t> dims(k + 1, dz);
  a.rounds.push_back(Round{
      decode_actor,
      LocalUnitary::permutation(std::move(targets), std::move(dims),
                                [k, dz](std::size_t i) {
                                  std::size_t tgt = i % dz;
                                  std::size_t rest = i / dz;
                                  std::vector<std::size_t> counts(dz, 0);
                                  std::size_t idx = rest;
                                  for (std::size_t c = 0; c < k; ++c) {
                                    counts[idx % dz] += 1;
                                    idx /= dz;
                                  }
                                  std::size_t winner = 0;
                                  for (std::size_t v = 1; v < dz; ++v)
                                    if (counts[v] > counts[winner]) winner = v;
                                  tgt = (tgt + winner) % dz;
                                  return rest * dz + tgt;
                                }),
      {}});

  // Probability that at most floor(k/2) of the k runs hit the right value,
  // the only way a plurality vote over the runs can go wrong.
  const double perr = p.declared_error;
  double tail = 0.0;
  for (std::size_t i = 0; i <= k / 2; ++i) {
    double coeff = 1.0;
    for (std::size_t j = 0; j < i; ++j) coeff = coeff * double(k - j) / double(j + 1);
    tail += coeff * std::pow(1.0 - perr, double(i)) * std::pow(perr, double(k - i));
  }
  a.declared_error = tail;
  a.compiled = CompileKind::None;
  validate_protocol(a);
  return a;
}

namespace {

using ojson = nlohmann::ordered_json;

ojson cvec_to_json(const cvec& v) {
  ojson arr = ojson::array();
  for (const cplx& c : v) arr.push_back({c.real(), c.imag()});
  return arr;
}

cvec cvec_from_json(const ojson& arr) {
  cvec v;
  v.reserve(arr.size());
  for (const auto& e : arr) v.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
  return v;
}

ojson unitary_to_json(const LocalUnitary& u) {
  ojson j;
  j["kind"] = u.kind() == LocalUnitary::Kind::Dense ? "dense" : "perm_phase";
  j["targets"] = u.targets();
  j["dims"] = u.dims();
  if (u.kind() == LocalUnitary::Kind::Dense) {
    j["matrix"] = cvec_to_json(u.matrix());
  } else {
    j["perm"] = u.perm();
    j["phases"] = cvec_to_json(u.phases());
  }
  return j;
}

LocalUnitary unitary_from_json(const ojson& j) {
  const std::vector<std::string> targets = j.at("targets").get<std::vector<std::string>>();
  const std::vector<std::size_t> dims = j.at("dims").get<std::vector<std::size_t>>();
  if (j.at("kind").get<std::string>() == "dense")
    return LocalUnitary::dense(targets, dims, cvec_from_json(j.at("matrix")));
  return LocalUnitary::perm_phase(targets, dims, j.at("perm").get<std::vector<std::size_t>>(),
                                  cvec_from_json(j.at("phases")));
}

std::string kind_name(CompileKind k) {
  switch (k) {
    case CompileKind::None: return "none";
    case CompileKind::Clean: return "clean";
    case CompileKind::ApproxClean: return "approx_clean";
  }
  throw std::logic_error("kind_name: bad enum");
}

CompileKind kind_from_name(const std::string& s) {
  if (s == "none") return CompileKind::None;
  if (s == "clean") return CompileKind::Clean;
  if (s == "approx_clean") return CompileKind::ApproxClean;
  throw std::invalid_argument("protocol: unknown compile kind '" + s + "'");
}

}  // namespace

std::string save_protocol(const CommProtocol& p) {
  ojson j;
  j["name"] = p.name;
  ojson regs = ojson::array();
  for (const auto& r : p.layout.registers())
    regs.push_back({{"name", r.name}, {"dim", r.dim}, {"owner", owner_name(r.owner)}});
  j["registers"] = std::move(regs);
  j["alice_input"] = p.alice_input;
  j["bob_input"] = p.bob_input;
  j["output"] = p.output;
  ojson blocks = ojson::array();
  for (const auto& b : p.shared_blocks)
    blocks.push_back({{"registers", b.registers}, {"amplitudes", cvec_to_json(b.amplitudes)}});
  j["shared_blocks"] = std::move(blocks);
  ojson rounds = ojson::array();
  for (const Round& r : p.rounds) {
    ojson jr;
    jr["actor"] = owner_name(r.actor);
    if (r.unitary) jr["unitary"] = unitary_to_json(*r.unitary);
    jr["moves"] = r.moves;
    rounds.push_back(std::move(jr));
  }
  j["rounds"] = std::move(rounds);
  j["declared_error"] = p.declared_error;
  j["compiled"] = kind_name(p.compiled);
  return j.dump(2);
}

CommProtocol load_protocol(const std::string& json_text) {
  ojson j;
  try {
    j = ojson::parse(json_text);
  } catch (const ojson::exception& e) {
    throw std::invalid_argument(std::string("load_protocol: ") + e.what());
  }
  CommProtocol p;
  try {
    p.name = j.at("name").get<std::string>();
    std::vector<Register> regs;
    for (const auto& jr : j.at("registers"))
      regs.push_back(Register{jr.at("name").get<std::string>(), jr.at("dim").get<std::size_t>(),
                              owner_from_name(jr.at("owner").get<std::string>())});
    p.layout = RegisterLayout::create(std::move(regs));
    p.alice_input = j.at("alice_input").get<std::string>();
    p.bob_input = j.at("bob_input").get<std::string>();
    p.output = j.at("output").get<std::string>();
    for (const auto& jb : j.at("shared_blocks"))
      p.shared_blocks.push_back(SharedBlock{jb.at("registers").get<std::vector<std::string>>(),
                                            cvec_from_json(jb.at("amplitudes"))});
    for (const auto& jr : j.at("rounds")) {
      Round r;
      r.actor = owner_from_name(jr.at("actor").get<std::string>());
      if (jr.contains("unitary")) r.unitary = unitary_from_json(jr.at("unitary"));
      r.moves = jr.at("moves").get<std::vector<std::string>>();
      p.rounds.push_back(std::move(r));
    }
    p.declared_error = j.at("declared_error").get<double>();
    p.compiled = kind_from_name(j.at("compiled").get<std::string>());
  } catch (const ojson::exception& e) {
    throw std::invalid_argument(std::string("load_protocol: ") + e.what());
  }
  validate_protocol(p);
  return p;
}

}  // namespace qct
