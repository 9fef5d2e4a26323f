#include "qct/ftab.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

namespace qct {

int FunctionTable::value(std::size_t x, std::size_t y) const {
  if (x >= size_x) throw std::out_of_range("function table '" + name + "': x out of range");
  if (y >= size_y) throw std::out_of_range("function table '" + name + "': y out of range");
  return table[x * size_y + y];
}

FunctionTable make_function_table(std::string name, std::size_t size_x, std::size_t size_y,
                                  std::size_t size_z, std::vector<int> table) {
  if (size_x == 0 || size_y == 0 || size_z == 0)
    throw std::invalid_argument("function table: empty domain or range");
  if (size_x > dimension_cap() / size_y)
    throw std::length_error("function table: size exceeds dimension cap");
  if (table.size() != size_x * size_y)
    throw std::invalid_argument("function table: entry count mismatch");
  for (int v : table) {
    if (v < 0 || static_cast<std::size_t>(v) >= size_z)
      throw std::invalid_argument("function table: value outside [0, |Z|)");
  }
  return FunctionTable{std::move(name), size_x, size_y, size_z, std::move(table)};
}

FunctionTable identity_table(std::size_t size_x) {
  std::vector<int> t(size_x);
  for (std::size_t x = 0; x < size_x; ++x) t[x] = static_cast<int>(x);
  return make_function_table("identity", size_x, 1, size_x, std::move(t));
}

FunctionTable make_gt(std::size_t n) {
  if (n == 0) throw std::invalid_argument("make_gt: empty domain");
  std::vector<int> t(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) t[i * n + j] = i > j ? 1 : 0;
  return make_function_table("gt" + std::to_string(n), n, n, 2, std::move(t));
}

bool is_odd_prime(std::size_t q) {
  if (q < 3 || q % 2 == 0) return false;
  for (std::size_t d = 3; d * d <= q; d += 2) {
    if (q % d == 0) return false;
  }
  return true;
}

std::vector<int> make_chi(std::size_t q) {
  if (!is_odd_prime(q)) throw std::invalid_argument("make_chi: q must be an odd prime");
  std::vector<int> chi(q, 2);
  chi[0] = 0;
  for (std::size_t z = 1; z < q; ++z) chi[(z * z) % q] = 1;
  return chi;
}

int chi_signed(int encoded) {
  switch (encoded) {
    case 0: return 0;
    case 1: return 1;
    case 2: return -1;
  }
  throw std::invalid_argument("chi_signed: bad encoding");
}

FunctionTable make_ps(std::size_t q) {
  std::vector<int> chi = make_chi(q);
  std::vector<int> t(q * q);
  for (std::size_t x = 0; x < q; ++x)
    for (std::size_t y = 0; y < q; ++y) t[x * q + y] = chi[(x + y) % q] != 2 ? 1 : 0;
  return make_function_table("ps" + std::to_string(q), q, q, 2, std::move(t));
}

FunctionTable make_ps_prime(std::size_t q) {
  std::vector<int> chi = make_chi(q);
  std::vector<int> t(q * q);
  for (std::size_t x = 0; x < q; ++x)
    for (std::size_t y = 0; y < q; ++y) t[x * q + y] = chi[(x + y) % q];
  return make_function_table("ps_prime" + std::to_string(q), q, q, 3, std::move(t));
}

std::size_t composed_bit(std::size_t x, std::size_t i, std::size_t j, std::size_t n,
                         std::size_t q) {
  if (i < 1 || i > n || j < 1 || j > q) throw std::out_of_range("composed_bit: bad block index");
  return (x >> ((n - i) * q + (q - j))) & 1;
}

std::size_t composed_col(std::size_t j, std::size_t y, std::size_t n, std::size_t q) {
  if (j < 1 || j > q) throw std::out_of_range("composed_col: j out of range");
  if (y >> n) throw std::out_of_range("composed_col: y out of range");
  return (j - 1) * (std::size_t{1} << n) + y;
}

FunctionTable make_composed(std::size_t n, std::size_t q) {
  if (n == 0 || q == 0) throw std::invalid_argument("make_composed: empty shape");
  if (n * q >= 8 * sizeof(std::size_t))
    throw std::length_error("make_composed: nq too large");
  std::size_t size_x = std::size_t{1} << (n * q);
  std::size_t size_y = q << n;
  if (size_x > dimension_cap() / size_y)
    throw std::length_error("make_composed: table exceeds dimension cap");
  std::vector<int> t(size_x * size_y);
  for (std::size_t x = 0; x < size_x; ++x) {
    for (std::size_t j = 1; j <= q; ++j) {
      for (std::size_t y = 0; y < (std::size_t{1} << n); ++y) {
        std::size_t acc = 0;
        for (std::size_t i = 1; i <= n; ++i) {
          std::size_t y_i = (y >> (n - i)) & 1;
          acc ^= y_i & composed_bit(x, i, j, n, q);
        }
        t[x * size_y + composed_col(j, y, n, q)] = static_cast<int>(acc);
      }
    }
  }
  return make_function_table("composed_n" + std::to_string(n) + "_q" + std::to_string(q), size_x,
                             size_y, 2, std::move(t));
}

std::vector<std::size_t> default_restriction(std::size_t n, std::size_t q, std::size_t size) {
  std::size_t size_x = std::size_t{1} << (n * q);
  std::size_t required = std::size_t{1} << q;
  if (size < required || size > size_x)
    throw std::invalid_argument("default_restriction: size outside [2^q, |X0|]");
  std::vector<std::size_t> rows;
  std::vector<char> taken(size_x, 0);
  for (std::size_t b = 0; b < required; ++b) {
    std::size_t row = b << ((n - 1) * q);
    rows.push_back(row);
    taken[row] = 1;
  }
  for (std::size_t r = 0; rows.size() < size; ++r) {
    if (!taken[r]) rows.push_back(r);
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

FunctionTable restrict_composed(const FunctionTable& f, std::size_t n, std::size_t q,
                                const std::vector<std::size_t>& rows) {
  std::size_t size_x = std::size_t{1} << (n * q);
  if (f.size_x != size_x || f.size_y != (q << n))
    throw std::invalid_argument("restrict_composed: table shape mismatch");
  if (rows.empty()) throw std::invalid_argument("restrict_composed: empty row set");
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] >= size_x) throw std::out_of_range("restrict_composed: row out of range");
    if (k > 0 && rows[k] <= rows[k - 1])
      throw std::invalid_argument("restrict_composed: rows not strictly increasing");
  }
  for (std::size_t b = 0; b < (std::size_t{1} << q); ++b) {
    std::size_t row = b << ((n - 1) * q);
    if (!std::binary_search(rows.begin(), rows.end(), row))
      throw std::invalid_argument("restrict_composed: required row missing");
  }
  std::vector<int> t;
  t.reserve(rows.size() * f.size_y);
  for (std::size_t r : rows) {
    t.insert(t.end(), f.table.begin() + static_cast<long>(r * f.size_y),
             f.table.begin() + static_cast<long>((r + 1) * f.size_y));
  }
  return make_function_table(f.name + "_restricted", rows.size(), f.size_y, f.size_z,
                             std::move(t));
}

LocalUnitary oracle_on(const FunctionTable& f, std::size_t x, const std::string& y_reg,
                       std::size_t y_dim, const std::string& z_reg) {
  if (x >= f.size_x) throw std::out_of_range("oracle: hidden row out of range");
  if (y_dim < f.size_y) throw std::invalid_argument("oracle: y register too small");
  std::size_t z = f.size_z;
  return LocalUnitary::permutation({y_reg, z_reg}, {y_dim, z}, [&f, x, z](std::size_t i) {
    std::size_t y = i / z, a = i % z;
    if (y >= f.size_y) return i;
    return y * z + (a + static_cast<std::size_t>(f.value(x, y))) % z;
  });
}

OracleUnitary make_oracle(const FunctionTable& f, std::size_t x) {
  return OracleUnitary{f, x, oracle_on(f, x, "y", f.size_y, "answer")};
}

RegisterLayout controlled_oracle_layout(std::size_t size_y) {
  return RegisterLayout::create({{"y", size_y, Owner::Shared},
                                 {"anc", 2, Owner::Shared},
                                 {"c", 2, Owner::Shared},
                                 {"ans", 2, Owner::Shared}});
}

Circuit controlled_oracle(const OracleUnitary& oracle) {
  if (oracle.base.size_z != 2)
    throw std::invalid_argument("controlled_oracle: needs a binary answer");
  LocalUnitary call = oracle.unitary.retarget({"y", "anc"});
  Circuit c;
  c.gates.push_back({call, true});
  c.gates.push_back({gate_toffoli("anc", "c", "ans"), false});
  c.gates.push_back({call, true});
  return c;
}

std::size_t embed_or_instance(const std::vector<int>& h, std::size_t n, std::size_t q) {
  if (h.size() != q) throw std::invalid_argument("embed_or_instance: h must have q entries");
  std::size_t x = 0;
  for (std::size_t j = 1; j <= q; ++j) {
    int b = h[j - 1];
    if (b != 0 && b != 1) throw std::invalid_argument("embed_or_instance: h entries in {0,1}");
    if (b) x |= std::size_t{1} << ((n - 1) * q + (q - j));
  }
  return x;
}

LocalUnitary controlled_or_oracle(const std::vector<int>& h, std::size_t n, std::size_t q) {
  if (h.size() != q) throw std::invalid_argument("controlled_or_oracle: h must have q entries");
  std::size_t size_y = q << n;
  return LocalUnitary::permutation({"y", "answer"}, {size_y, 2}, [&h, n](std::size_t i) {
    std::size_t col = i >> 1, a = i & 1;
    std::size_t j0 = col >> n;
    std::size_t y1 = (col >> (n - 1)) & 1;
    return (col << 1) | (a ^ (y1 & static_cast<std::size_t>(h[j0])));
  });
}

FunctionTable load_function_table(const std::string& json_text) {
  try {
    nlohmann::json j = nlohmann::json::parse(json_text);
    if (!j.contains("name") || !j.contains("sizes") || !j.contains("table"))
      throw std::invalid_argument("function table json: missing field");
    auto sizes = j["sizes"].get<std::vector<std::size_t>>();
    if (sizes.size() != 3)
      throw std::invalid_argument("function table json: sizes must have 3 entries");
    return make_function_table(j["name"].get<std::string>(), sizes[0], sizes[1], sizes[2],
                               j["table"].get<std::vector<int>>());
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("function table json: ") + e.what());
  }
}

std::string save_function_table(const FunctionTable& f) {
  nlohmann::json j;
  j["name"] = f.name;
  j["sizes"] = {f.size_x, f.size_y, f.size_z};
  j["table"] = f.table;
  return j.dump();
}

}  // namespace qct
