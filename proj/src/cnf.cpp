#include "logcrypt/cnf.hpp"

#include "logcrypt/error.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

namespace logcrypt {

Literal Literal::from_dimacs(std::int64_t lit) {
  if (lit == 0)
    throw InputError("literal 0 is the clause terminator, not a literal");
  if (lit > INT32_MAX || lit < -INT32_MAX)
    throw InputError("literal out of range: " + std::to_string(lit));
  return lit > 0 ? pos(static_cast<Var>(lit)) : neg(static_cast<Var>(-lit));
}

Clause::Clause(std::vector<Literal> literals) : lits_(std::move(literals)) {
  if (lits_.size() <= 8) {
    for (std::size_t i = 0; i < lits_.size(); ++i) {
      if (lits_[i].var() == 0)
        throw InputError("variable 0 in clause");
      for (std::size_t j = 0; j < i; ++j) {
        if (lits_[j].var() != lits_[i].var())
          continue;
        throw InputError(lits_[j] == lits_[i]
                             ? "repeated literal in clause"
                             : "complementary literals in clause");
      }
    }
    return;
  }
  std::unordered_set<Var> seen;
  seen.reserve(lits_.size() * 2);
  for (Literal l : lits_) {
    if (l.var() == 0)
      throw InputError("variable 0 in clause");
    if (!seen.insert(l.var()).second) {
      bool same = std::find(lits_.begin(), lits_.end(), ~l) == lits_.end();
      throw InputError(same ? "repeated literal in clause"
                            : "complementary literals in clause");
    }
  }
}

PartialAssignment::PartialAssignment(
    std::initializer_list<std::pair<Var, bool>> bindings) {
  for (auto [v, b] : bindings)
    bind(v, b);
}

void PartialAssignment::bind(Var v, bool value) {
  if (v == 0)
    throw InputError("variable 0 cannot be bound");
  if (v >= values_.size())
    values_.resize(static_cast<std::size_t>(v) + 1, -1);
  if (values_[v] >= 0)
    throw InputError("variable " + std::to_string(v) + " bound twice");
  values_[v] = value ? 1 : 0;
  ++count_;
}

Var PartialAssignment::max_var() const {
  for (std::size_t v = values_.size(); v-- > 1;)
    if (values_[v] >= 0)
      return static_cast<Var>(v);
  return 0;
}

std::vector<std::pair<Var, bool>> PartialAssignment::bindings() const {
  std::vector<std::pair<Var, bool>> out;
  out.reserve(count_);
  for (std::size_t v = 1; v < values_.size(); ++v)
    if (values_[v] >= 0)
      out.emplace_back(static_cast<Var>(v), values_[v] != 0);
  return out;
}

Cnf::Cnf(Var num_vars, std::vector<Clause> clauses, std::vector<InputVar> inputs,
         std::vector<Var> keystream)
    : num_vars_(num_vars), clauses_(std::move(clauses)),
      inputs_(std::move(inputs)), keystream_(std::move(keystream)) {
  for (const Clause &c : clauses_)
    for (Literal l : c)
      if (l.var() > num_vars_)
        throw InputError("clause literal " + std::to_string(l.to_dimacs()) +
                         " exceeds num_vars " + std::to_string(num_vars_));
  std::unordered_set<Var> seen;
  std::unordered_set<std::string> names;
  for (const InputVar &in : inputs_) {
    if (in.var == 0 || in.var > num_vars_)
      throw InputError("input variable " + std::to_string(in.var) +
                       " out of range");
    if (!seen.insert(in.var).second)
      throw InputError("input variable " + std::to_string(in.var) +
                       " listed twice");
    if (in.name.empty() ||
        in.name.find_first_of(" \t\r\n") != std::string::npos)
      throw InputError("input name must be a non-empty token");
    if (!names.insert(in.name).second)
      throw InputError("input name '" + in.name + "' listed twice");
  }
  for (Var v : keystream_)
    if (v == 0 || v > num_vars_)
      throw InputError("keystream variable " + std::to_string(v) +
                       " out of range");
}

std::vector<Var> Cnf::input_vars() const {
  std::vector<Var> out;
  out.reserve(inputs_.size());
  for (const InputVar &in : inputs_)
    out.push_back(in.var);
  return out;
}

bool Cnf::has_empty_clause() const {
  return std::any_of(clauses_.begin(), clauses_.end(),
                     [](const Clause &c) { return c.empty(); });
}

Cnf Cnf::with_clauses(std::vector<Clause> extra) const {
  std::vector<Clause> all = clauses_;
  all.insert(all.end(), std::make_move_iterator(extra.begin()),
             std::make_move_iterator(extra.end()));
  return Cnf(num_vars_, std::move(all), inputs_, keystream_);
}

Cnf substitute(const Cnf &cnf, const PartialAssignment &pa) {
  if (pa.max_var() > cnf.num_vars())
    throw InputError("binding for variable " + std::to_string(pa.max_var()) +
                     " exceeds num_vars " + std::to_string(cnf.num_vars()));
  std::vector<Clause> out;
  out.reserve(cnf.clauses().size());
  std::vector<Literal> kept;
  for (const Clause &c : cnf.clauses()) {
    kept.clear();
    bool satisfied = false;
    for (Literal l : c) {
      auto v = pa.value(l.var());
      if (!v) {
        kept.push_back(l);
      } else if (l.holds(*v)) {
        satisfied = true;
        break;
      }
    }
    if (satisfied)
      continue;
    if (kept.empty())
      return Cnf(cnf.num_vars(), {Clause{}}, cnf.inputs(),
                 cnf.keystream_vars());
    out.emplace_back(kept);
  }
  return Cnf(cnf.num_vars(), std::move(out), cnf.inputs(),
             cnf.keystream_vars());
}

bool evaluate(const Cnf &cnf, const PartialAssignment &full) {
  bool all = true;
  for (const Clause &c : cnf.clauses()) {
    bool sat = false;
    for (Literal l : c) {
      auto v = full.value(l.var());
      if (!v)
        throw InputError("variable " + std::to_string(l.var()) +
                         " is unbound");
      sat = sat || l.holds(*v);
    }
    all = all && sat;
  }
  return all;
}

} // namespace logcrypt
