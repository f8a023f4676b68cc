#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace logcrypt {

/// 1-based propositional variable index, as in DIMACS.
using Var = std::uint32_t;

class Literal {
public:
  constexpr Literal(Var var, bool positive) : var_(var), positive_(positive) {}

  static Literal pos(Var v) { return {v, true}; }
  static Literal neg(Var v) { return {v, false}; }
  /// Throws InputError on 0.
  static Literal from_dimacs(std::int64_t lit);

  [[nodiscard]] constexpr Var var() const { return var_; }
  [[nodiscard]] constexpr bool positive() const { return positive_; }
  [[nodiscard]] std::int64_t to_dimacs() const {
    return positive_ ? static_cast<std::int64_t>(var_)
                     : -static_cast<std::int64_t>(var_);
  }
  /// Value of the literal when its variable takes `value`.
  [[nodiscard]] constexpr bool holds(bool value) const {
    return value == positive_;
  }

  constexpr Literal operator~() const { return {var_, !positive_}; }
  friend constexpr bool operator==(Literal, Literal) = default;
  friend constexpr auto operator<=>(Literal a, Literal b) {
    if (auto c = a.var_ <=> b.var_; c != 0)
      return c;
    return a.positive_ <=> b.positive_;
  }

private:
  Var var_;
  bool positive_;
};

/// A disjunction without repeated or complementary literals. The empty
/// clause is allowed and is unsatisfiable.
class Clause {
public:
  Clause() = default;
  /// Throws InputError on a 0 variable, a repeated literal or a
  /// complementary pair.
  explicit Clause(std::vector<Literal> literals);
  Clause(std::initializer_list<Literal> literals)
      : Clause(std::vector<Literal>(literals)) {}

  [[nodiscard]] std::span<const Literal> literals() const { return lits_; }
  [[nodiscard]] std::size_t size() const { return lits_.size(); }
  [[nodiscard]] bool empty() const { return lits_.empty(); }
  [[nodiscard]] auto begin() const { return lits_.begin(); }
  [[nodiscard]] auto end() const { return lits_.end(); }

  friend bool operator==(const Clause &, const Clause &) = default;

private:
  std::vector<Literal> lits_;
};

/// A marked input variable: `c input <name> <var>` in DIMACS.
struct InputVar {
  std::string name;
  Var var = 0;
  friend bool operator==(const InputVar &, const InputVar &) = default;
};

/// Assignment of values to some of the variables. Each variable is bound at
/// most once; rebinding throws InputError.
class PartialAssignment {
public:
  PartialAssignment() = default;
  PartialAssignment(std::initializer_list<std::pair<Var, bool>> bindings);

  void bind(Var v, bool value);
  [[nodiscard]] std::optional<bool> value(Var v) const {
    if (v >= values_.size() || values_[v] < 0)
      return std::nullopt;
    return values_[v] != 0;
  }
  [[nodiscard]] bool bound(Var v) const {
    return v < values_.size() && values_[v] >= 0;
  }
  [[nodiscard]] std::size_t size() const { return count_; }
  [[nodiscard]] bool empty() const { return count_ == 0; }
  /// Largest bound variable, 0 when empty.
  [[nodiscard]] Var max_var() const;
  /// Bindings in increasing variable order.
  [[nodiscard]] std::vector<std::pair<Var, bool>> bindings() const;

  friend bool operator==(const PartialAssignment &a,
                         const PartialAssignment &b) {
    return a.bindings() == b.bindings();
  }

private:
  std::vector<std::int8_t> values_; // -1 unbound, 0 false, 1 true
  std::size_t count_ = 0;
};

/// Clause database over variables 1..num_vars with annotations for the
/// input variables of the encoded function and the keystream outputs.
class Cnf {
public:
  Cnf() = default;
  explicit Cnf(Var num_vars, std::vector<Clause> clauses = {},
               std::vector<InputVar> inputs = {},
               std::vector<Var> keystream = {});

  [[nodiscard]] Var num_vars() const { return num_vars_; }
  [[nodiscard]] const std::vector<Clause> &clauses() const { return clauses_; }
  [[nodiscard]] const std::vector<InputVar> &inputs() const { return inputs_; }
  /// Input variables in annotation order.
  [[nodiscard]] std::vector<Var> input_vars() const;
  /// Keystream output variables; element t-1 is output bit t.
  [[nodiscard]] const std::vector<Var> &keystream_vars() const {
    return keystream_;
  }
  [[nodiscard]] bool has_empty_clause() const;

  /// Copy with `extra` appended to the clause list.
  [[nodiscard]] Cnf with_clauses(std::vector<Clause> extra) const;

  friend bool operator==(const Cnf &, const Cnf &) = default;

private:
  Var num_vars_ = 0;
  std::vector<Clause> clauses_;
  std::vector<InputVar> inputs_;
  std::vector<Var> keystream_;
};

/// C|_Y: drops satisfied clauses and falsified literals. Variable numbering
/// and annotations are kept. If some clause becomes empty the result is the
/// canonical unsatisfiable CNF holding exactly one empty clause.
[[nodiscard]] Cnf substitute(const Cnf &cnf, const PartialAssignment &pa);

/// True iff `full` satisfies every clause. Every variable occurring in a
/// clause must be bound.
[[nodiscard]] bool evaluate(const Cnf &cnf, const PartialAssignment &full);

} // namespace logcrypt
