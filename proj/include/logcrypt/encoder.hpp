#pragma once

#include "logcrypt/cnf.hpp"
#include "logcrypt/generators.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace logcrypt {

/// A generator encoded as CNF. Variable layout: key bits are 1..n (input
/// names "1".."n"), keystream bits n+1..n+L, Tseitin auxiliaries after that.
struct Encoding {
  Cnf cnf;
  std::vector<Var> key_vars;
  std::vector<Var> keystream_vars;
  std::size_t aux_count = 0;
};

// Defining clause groups for u <-> h(inputs). Each group is a CNF whose
// models, restricted to the inputs, are in bijection with the input
// valuations.

[[nodiscard]] std::vector<Clause> tseitin_and(Literal u, Literal a, Literal b);
/// Full parity over all inputs (2^k clauses); with one input this is the
/// equivalence u <-> a.
[[nodiscard]] std::vector<Clause> tseitin_xor(Literal u,
                                              std::span<const Literal> inputs);
[[nodiscard]] std::vector<Clause> tseitin_majority(Literal u, Literal a,
                                                   Literal b, Literal c);
/// u <-> (sel ? t : f)
[[nodiscard]] std::vector<Clause> tseitin_mux(Literal u, Literal sel, Literal t,
                                              Literal f);
/// u <-> (at least `k` of the inputs are true), 1 <= k <= |inputs|.
[[nodiscard]] std::vector<Clause>
tseitin_at_least(Literal u, std::span<const Literal> inputs, std::size_t k);

/// Fresh-variable allocator and clause sink used by the encoders. Every
/// defined variable receives exactly one defining group.
class GateBuilder {
public:
  explicit GateBuilder(Var reserved) : next_(reserved + 1) {}

  Var fresh() { return next_++; }
  [[nodiscard]] Var num_vars() const { return next_ - 1; }

  void add(Clause c) { clauses_.push_back(std::move(c)); }
  void define(Var u, std::vector<Clause> group);

  Literal make_and(Literal a, Literal b);
  Literal make_majority(Literal a, Literal b, Literal c);
  Literal make_mux(Literal sel, Literal t, Literal f);
  /// Parity of `inputs` as a chain of two-input XOR gates. One input is
  /// returned as is; an empty list yields the constant false.
  Literal make_xor(std::span<const Literal> inputs);
  Literal make_at_least(std::span<const Literal> inputs, std::size_t k);
  /// Defines the pre-allocated `target` as equivalent to `source`.
  void define_equal(Var target, Literal source);
  /// A variable fixed to false by a unit clause.
  Literal constant_false();

  [[nodiscard]] std::vector<Clause> take_clauses() { return std::move(clauses_); }

private:
  Var next_;
  std::vector<Clause> clauses_;
  std::vector<bool> defined_;
  Var false_var_ = 0;
};

/// LSB-first little adder helpers built on GateBuilder.
struct AdderBits {
  Literal sum;
  Literal carry;
};
AdderBits half_adder(GateBuilder &gb, Literal a, Literal b);
AdderBits full_adder(GateBuilder &gb, Literal a, Literal b, Literal c);

[[nodiscard]] Encoding encode_a51(const A51Spec &spec, std::size_t length);
[[nodiscard]] Encoding encode_threshold(const ThresholdSpec &spec,
                                        std::size_t length);
[[nodiscard]] Encoding encode_summation(const SummationSpec &spec,
                                        std::size_t length);
/// `bytes` output bytes; keystream_vars holds 8 * bytes bits, MSB first.
[[nodiscard]] Encoding encode_gifford(std::size_t bytes);
/// `bits` must be a multiple of keystream_unit(gen).
[[nodiscard]] Encoding encode(const GeneratorSpec &gen, std::size_t bits);

/// Adds unit clauses fixing the first |bits| keystream variables.
[[nodiscard]] Cnf bind_keystream(const Encoding &enc, const Bits &bits);

/// Cell variables of a Gifford 16x16 multiplier (low 16 product bits) for
/// testing the arithmetic in isolation.
struct MultiplierEncoding {
  Cnf cnf;
  std::vector<Var> lhs;     // 16 bits, MSB first
  std::vector<Var> rhs;     // 16 bits, MSB first
  std::vector<Var> product; // low 16 product bits, MSB first
};
[[nodiscard]] MultiplierEncoding encode_multiplier16();

} // namespace logcrypt
