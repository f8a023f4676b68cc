#include "logcrypt/encoder.hpp"

#include "logcrypt/error.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <stdexcept>
#include <string>

namespace logcrypt {

namespace {

template <class... Ts> struct overloaded : Ts... {
  using Ts::operator()...;
};

// Enumerates the k-subsets of {0..n-1} in lexicographic order.
template <class F> void for_each_subset(std::size_t n, std::size_t k, F f) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i)
    idx[i] = i;
  while (true) {
    f(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1)
      --i;
    if (i == 0)
      return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j)
      idx[j] = idx[j - 1] + 1;
  }
}

std::vector<InputVar> key_inputs(std::size_t n) {
  std::vector<InputVar> out;
  out.reserve(n);
  for (std::size_t i = 1; i <= n; ++i)
    out.push_back({std::to_string(i), static_cast<Var>(i)});
  return out;
}

// Key vars 1..n, keystream vars n+1..n+L.
struct Layout {
  std::vector<Var> key;
  std::vector<Var> stream;
};

Layout make_layout(std::size_t n, std::size_t length) {
  Layout l;
  for (std::size_t i = 1; i <= n; ++i)
    l.key.push_back(static_cast<Var>(i));
  for (std::size_t t = 1; t <= length; ++t)
    l.stream.push_back(static_cast<Var>(n + t));
  return l;
}

Encoding finish(GateBuilder &gb, const Layout &l) {
  Var nv = gb.num_vars();
  Encoding e;
  e.cnf = Cnf(nv, gb.take_clauses(), key_inputs(l.key.size()), l.stream);
  e.key_vars = l.key;
  e.keystream_vars = l.stream;
  e.aux_count = nv - l.key.size() - l.stream.size();
  return e;
}

std::vector<std::vector<Literal>> register_cells(const std::vector<LfsrSpec> &regs,
                                                 const std::vector<Var> &key,
                                                 std::size_t offset) {
  std::vector<std::vector<Literal>> out;
  for (const auto &r : regs) {
    std::vector<Literal> cells;
    for (int i = 0; i < r.length; ++i)
      cells.push_back(Literal::pos(key[offset + static_cast<std::size_t>(i)]));
    offset += static_cast<std::size_t>(r.length);
    out.push_back(std::move(cells));
  }
  return out;
}

Literal feedback(GateBuilder &gb, const std::vector<Literal> &cells,
                 const LfsrSpec &spec) {
  std::vector<Literal> in;
  for (int t : spec.taps)
    in.push_back(cells[static_cast<std::size_t>(t - 1)]);
  return gb.make_xor(in);
}

// Unconditional shift: cells move by renaming, only cell 1 is new.
void shift(GateBuilder &gb, std::vector<Literal> &cells, const LfsrSpec &spec) {
  Literal fb = feedback(gb, cells, spec);
  std::copy_backward(cells.begin(), cells.end() - 1, cells.end());
  cells[0] = fb;
}

} // namespace

std::vector<Clause> tseitin_and(Literal u, Literal a, Literal b) {
  return {Clause{~u, a}, Clause{~u, b}, Clause{u, ~a, ~b}};
}

std::vector<Clause> tseitin_xor(Literal u, std::span<const Literal> inputs) {
  // Forbid every assignment of (u, inputs) with the wrong parity.
  std::size_t k = inputs.size();
  if (k > 16)
    throw InputError("tseitin_xor: arity too large for a flat encoding");
  std::vector<Clause> out;
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    bool parity = false;
    std::vector<Literal> lits;
    for (std::size_t i = 0; i < k; ++i) {
      bool v = (mask >> i) & 1u;
      parity ^= v;
      lits.push_back(v ? ~inputs[i] : inputs[i]);
    }
    // inputs take values `mask`; then u must equal parity.
    lits.push_back(parity ? u : ~u);
    out.emplace_back(std::move(lits));
  }
  return out;
}

std::vector<Clause> tseitin_majority(Literal u, Literal a, Literal b,
                                     Literal c) {
  const Literal in[] = {a, b, c};
  return tseitin_at_least(u, in, 2);
}

std::vector<Clause> tseitin_mux(Literal u, Literal sel, Literal t, Literal f) {
  return {Clause{~sel, ~t, u}, Clause{~sel, t, ~u}, Clause{sel, ~f, u},
          Clause{sel, f, ~u},
          // implied by the four above; they let propagation settle u when
          // both data inputs agree and sel is still open
          Clause{~t, ~f, u}, Clause{t, f, ~u}};
}

std::vector<Clause> tseitin_at_least(Literal u, std::span<const Literal> inputs,
                                     std::size_t k) {
  std::size_t n = inputs.size();
  if (k < 1 || k > n)
    throw InputError("tseitin_at_least: threshold out of range");
  std::vector<Clause> out;
  // any k true inputs force u
  for_each_subset(n, k, [&](const std::vector<std::size_t> &s) {
    std::vector<Literal> lits;
    for (auto i : s)
      lits.push_back(~inputs[i]);
    lits.push_back(u);
    out.emplace_back(std::move(lits));
  });
  // any n-k+1 false inputs force ~u
  for_each_subset(n, n - k + 1, [&](const std::vector<std::size_t> &s) {
    std::vector<Literal> lits;
    for (auto i : s)
      lits.push_back(inputs[i]);
    lits.push_back(~u);
    out.emplace_back(std::move(lits));
  });
  return out;
}

void GateBuilder::define(Var u, std::vector<Clause> group) {
  if (u == 0 || u >= next_)
    throw std::logic_error("defining an unallocated variable");
  if (u >= defined_.size())
    defined_.resize(static_cast<std::size_t>(next_) + 1, false);
  if (defined_[u])
    throw std::logic_error("variable " + std::to_string(u) +
                           " defined twice");
  defined_[u] = true;
  for (auto &c : group)
    clauses_.push_back(std::move(c));
}

Literal GateBuilder::make_and(Literal a, Literal b) {
  Var u = fresh();
  define(u, tseitin_and(Literal::pos(u), a, b));
  return Literal::pos(u);
}

Literal GateBuilder::make_majority(Literal a, Literal b, Literal c) {
  Var u = fresh();
  define(u, tseitin_majority(Literal::pos(u), a, b, c));
  return Literal::pos(u);
}

Literal GateBuilder::make_mux(Literal sel, Literal t, Literal f) {
  Var u = fresh();
  define(u, tseitin_mux(Literal::pos(u), sel, t, f));
  return Literal::pos(u);
}

Literal GateBuilder::make_xor(std::span<const Literal> inputs) {
  if (inputs.empty())
    return constant_false();
  Literal acc = inputs[0];
  for (std::size_t i = 1; i < inputs.size(); ++i) {
    Var u = fresh();
    const Literal pair[] = {acc, inputs[i]};
    define(u, tseitin_xor(Literal::pos(u), pair));
    acc = Literal::pos(u);
  }
  return acc;
}

Literal GateBuilder::make_at_least(std::span<const Literal> inputs,
                                   std::size_t k) {
  Var u = fresh();
  define(u, tseitin_at_least(Literal::pos(u), inputs, k));
  return Literal::pos(u);
}

void GateBuilder::define_equal(Var target, Literal source) {
  const Literal in[] = {source};
  define(target, tseitin_xor(Literal::pos(target), in));
}

Literal GateBuilder::constant_false() {
  if (false_var_ == 0) {
    false_var_ = fresh();
    define(false_var_, {Clause{Literal::neg(false_var_)}});
  }
  return Literal::pos(false_var_);
}

AdderBits half_adder(GateBuilder &gb, Literal a, Literal b) {
  const Literal in[] = {a, b};
  return {gb.make_xor(in), gb.make_and(a, b)};
}

AdderBits full_adder(GateBuilder &gb, Literal a, Literal b, Literal c) {
  const Literal in[] = {a, b, c};
  return {gb.make_xor(in), gb.make_majority(a, b, c)};
}

Encoding encode_a51(const A51Spec &spec, std::size_t length) {
  spec.validate();
  if (length < 1)
    throw InputError("keystream length must be at least 1");
  Layout l = make_layout(spec.key_bits(), length);
  GateBuilder gb(static_cast<Var>(spec.key_bits() + length));
  std::vector<LfsrSpec> regs(spec.registers.begin(), spec.registers.end());
  auto cells = register_cells(regs, l.key, 0);

  for (std::size_t t = 0; t < length; ++t) {
    std::array<Literal, 3> clk = {
        cells[0][static_cast<std::size_t>(spec.clock_cells[0] - 1)],
        cells[1][static_cast<std::size_t>(spec.clock_cells[1] - 1)],
        cells[2][static_cast<std::size_t>(spec.clock_cells[2] - 1)]};
    Literal maj = gb.make_majority(clk[0], clk[1], clk[2]);
    for (std::size_t r = 0; r < 3; ++r) {
      // chi_r <-> (b_r == majority) <-> b_r xor ~maj
      const Literal in[] = {clk[r], ~maj};
      Literal chi = gb.make_xor(in);
      const auto &prev = cells[r];
      std::vector<Literal> next;
      next.reserve(prev.size());
      next.push_back(gb.make_mux(chi, feedback(gb, prev, regs[r]), prev[0]));
      for (std::size_t i = 1; i < prev.size(); ++i)
        next.push_back(gb.make_mux(chi, prev[i - 1], prev[i]));
      cells[r] = std::move(next);
    }
    const Literal out[] = {cells[0].back(), cells[1].back()};
    Literal partial = gb.make_xor(out);
    const Literal last[] = {partial, cells[2].back()};
    gb.define(l.stream[t],
              tseitin_xor(Literal::pos(l.stream[t]), std::span(last)));
  }
  return finish(gb, l);
}

Encoding encode_threshold(const ThresholdSpec &spec, std::size_t length) {
  spec.validate();
  if (length < 1)
    throw InputError("keystream length must be at least 1");
  Layout l = make_layout(spec.key_bits(), length);
  GateBuilder gb(static_cast<Var>(spec.key_bits() + length));
  auto cells = register_cells(spec.registers, l.key, 0);
  std::size_t need = spec.registers.size() / 2 + 1;
  for (std::size_t t = 0; t < length; ++t) {
    std::vector<Literal> outs;
    for (std::size_t r = 0; r < cells.size(); ++r) {
      shift(gb, cells[r], spec.registers[r]);
      outs.push_back(cells[r].back());
    }
    gb.define(l.stream[t],
              tseitin_at_least(Literal::pos(l.stream[t]), outs, need));
  }
  return finish(gb, l);
}

Encoding encode_summation(const SummationSpec &spec, std::size_t length) {
  spec.validate();
  if (length < 1)
    throw InputError("keystream length must be at least 1");
  Layout l = make_layout(spec.key_bits(), length);
  GateBuilder gb(static_cast<Var>(spec.key_bits() + length));
  auto cb = static_cast<std::size_t>(spec.carry_bits());
  // carry register, LSB first; the key stores it MSB first
  std::vector<Literal> carry;
  for (std::size_t i = 0; i < cb; ++i)
    carry.push_back(Literal::pos(l.key[cb - 1 - i]));
  auto cells = register_cells(spec.registers, l.key, cb);

  for (std::size_t t = 0; t < length; ++t) {
    // Columns of a carry-save sum: column i holds bits of weight 2^i.
    std::vector<std::vector<Literal>> cols(cb + 1);
    for (std::size_t i = 0; i < cb; ++i)
      cols[i].push_back(carry[i]);
    for (std::size_t r = 0; r < cells.size(); ++r) {
      shift(gb, cells[r], spec.registers[r]);
      cols[0].push_back(cells[r].back());
    }
    std::vector<Literal> sum;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      while (cols[i].size() >= 2) {
        if (i + 1 == cols.size())
          cols.emplace_back();
        auto &col = cols[i];
        std::size_t n = col.size();
        AdderBits a = n >= 3 ? full_adder(gb, col[n - 3], col[n - 2], col[n - 1])
                             : half_adder(gb, col[0], col[1]);
        col.erase(col.end() - static_cast<std::ptrdiff_t>(n >= 3 ? 3 : 2), col.end());
        col.push_back(a.sum);
        cols[i + 1].push_back(a.carry);
      }
      sum.push_back(cols[i].empty() ? gb.constant_false() : cols[i][0]);
    }
    gb.define_equal(l.stream[t], sum[0]);
    // S < 2^(cb+1) always, so the next carry is sum bits 1..cb.
    for (std::size_t i = 0; i < cb; ++i)
      carry[i] = i + 1 < sum.size() ? sum[i + 1] : gb.constant_false();
  }
  return finish(gb, l);
}

namespace {

// Low 16 bits of lhs * rhs, operands and result LSB first.
std::vector<Literal> multiply16(GateBuilder &gb, const std::vector<Literal> &a,
                                const std::vector<Literal> &b) {
  std::vector<Literal> acc;
  for (std::size_t i = 0; i < 16; ++i)
    acc.push_back(gb.make_and(a[i], b[0]));
  for (std::size_t j = 1; j < 16; ++j) {
    std::optional<Literal> carry;
    for (std::size_t i = j; i < 16; ++i) {
      Literal row = gb.make_and(a[i - j], b[j]);
      bool top = i == 15;
      if (!carry) {
        if (top) {
          const Literal in[] = {acc[i], row};
          acc[i] = gb.make_xor(in);
        } else {
          AdderBits s = half_adder(gb, acc[i], row);
          acc[i] = s.sum;
          carry = s.carry;
        }
      } else if (top) {
        const Literal in[] = {acc[i], row, *carry};
        acc[i] = gb.make_xor(in);
      } else {
        AdderBits s = full_adder(gb, acc[i], row, *carry);
        acc[i] = s.sum;
        carry = s.carry;
      }
    }
  }
  return acc;
}

// Byte literals are MSB first; returns the 16-bit LSB-first operand hi|lo.
std::vector<Literal> concat_lsb(const std::vector<Literal> &hi,
                                const std::vector<Literal> &lo) {
  std::vector<Literal> out;
  for (std::size_t i = 8; i-- > 0;)
    out.push_back(lo[i]);
  for (std::size_t i = 8; i-- > 0;)
    out.push_back(hi[i]);
  return out;
}

} // namespace

Encoding encode_gifford(std::size_t bytes) {
  if (bytes < 1)
    throw InputError("keystream length must be at least 1 byte");
  Layout l = make_layout(64, bytes * 8);
  GateBuilder gb(static_cast<Var>(64 + bytes * 8));
  // cell[c][i]: bit i (MSB first) of byte cell B_{c+1}
  std::vector<std::vector<Literal>> cell(8);
  for (std::size_t c = 0; c < 8; ++c)
    for (std::size_t i = 0; i < 8; ++i)
      cell[c].push_back(Literal::pos(l.key[c * 8 + i]));

  for (std::size_t t = 0; t < bytes; ++t) {
    auto product = multiply16(gb, concat_lsb(cell[0], cell[2]),
                              concat_lsb(cell[4], cell[7]));
    // third byte from the left of the 32-bit product = bits 15..8
    for (std::size_t i = 0; i < 8; ++i)
      gb.define_equal(l.stream[t * 8 + i], product[15 - i]);

    std::vector<Literal> fresh;
    for (std::size_t i = 0; i < 8; ++i) {
      std::vector<Literal> in{cell[0][i]};
      in.push_back(i == 0 ? cell[1][0] : cell[1][i - 1]); // sticky >> 1
      if (i < 7)
        in.push_back(cell[7][i + 1]); // << 1, zero fill
      fresh.push_back(gb.make_xor(in));
    }
    std::rotate(cell.rbegin(), cell.rbegin() + 1, cell.rend());
    cell[0] = std::move(fresh);
  }
  return finish(gb, l);
}

MultiplierEncoding encode_multiplier16() {
  GateBuilder gb(32);
  std::vector<Literal> a, b;
  MultiplierEncoding m;
  for (Var v = 1; v <= 16; ++v)
    m.lhs.push_back(v);
  for (Var v = 17; v <= 32; ++v)
    m.rhs.push_back(v);
  for (std::size_t i = 16; i-- > 0;) {
    a.push_back(Literal::pos(m.lhs[i]));
    b.push_back(Literal::pos(m.rhs[i]));
  }
  auto p = multiply16(gb, a, b);
  for (std::size_t i = 16; i-- > 0;) {
    Var out = gb.fresh();
    gb.define_equal(out, p[i]);
    m.product.push_back(out);
  }
  std::vector<InputVar> inputs;
  for (Var v = 1; v <= 32; ++v)
    inputs.push_back({std::to_string(v), v});
  m.cnf = Cnf(gb.num_vars(), gb.take_clauses(), std::move(inputs));
  return m;
}

Encoding encode(const GeneratorSpec &gen, std::size_t bits) {
  return std::visit(
      overloaded{
          [&](const A51Spec &g) { return encode_a51(g, bits); },
          [&](const ThresholdSpec &g) { return encode_threshold(g, bits); },
          [&](const SummationSpec &g) { return encode_summation(g, bits); },
          [&](const GiffordSpec &) {
            if (bits % 8 != 0)
              throw InputError("Gifford keystream length must be a multiple "
                               "of 8 bits");
            return encode_gifford(bits / 8);
          }},
      gen);
}

Cnf bind_keystream(const Encoding &enc, const Bits &bits) {
  if (bits.size() > enc.keystream_vars.size())
    throw InputError("keystream has " + std::to_string(bits.size()) +
                     " bits, encoding covers only " +
                     std::to_string(enc.keystream_vars.size()));
  std::vector<Clause> units;
  units.reserve(bits.size());
  for (std::size_t t = 0; t < bits.size(); ++t) {
    if (bits[t] > 1)
      throw InputError("keystream bits must be 0 or 1");
    units.push_back(Clause{Literal(enc.keystream_vars[t], bits[t] != 0)});
  }
  return enc.cnf.with_clauses(std::move(units));
}

} // namespace logcrypt
