#pragma once

// CDCL solver in the style of Minisat 1.14: two watched literals, first-UIP
// learning with clause minimization, activity-ordered branching, geometric
// restarts and activity-based learnt clause deletion.
//
// The configuration exposes the tuning used for inverting generators:
// input variables start with a non-zero activity, periodic activity decay
// is switched off and random decisions are disabled. These are the
// defaults; SolverConfig::baseline() restores the stock behaviour.

#include "logcrypt/cnf.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stop_token>
#include <string>
#include <variant>
#include <vector>

namespace logcrypt {

enum class SolveStatus { Sat, Unsat, BudgetExceeded };
enum class Phase { Negative, Positive, Saved };
enum class RestartPolicy { Geometric, Off };

[[nodiscard]] std::string to_string(SolveStatus s);

struct SolverConfig {
  bool input_priority = true;
  double input_activity = 1.0;
  bool decay_disabled = true;
  bool random_decisions_disabled = true;
  /// Only restrict branching when set. Completeness is kept: if the listed
  /// variables are exhausted while others remain open, the solver branches
  /// on those too (counted in SolveStats::fallback_decisions).
  std::optional<std::vector<Var>> restrict_decisions_to;
  RestartPolicy restarts = RestartPolicy::Geometric;
  Phase phase = Phase::Negative;

  double var_decay = 0.95;
  double clause_decay = 0.999;
  double random_var_freq = 0.02;
  std::uint64_t restart_first = 100;
  double restart_inc = 1.5;
  double learnt_size_factor = 1.0 / 3.0;
  double learnt_size_inc = 1.1;
  std::uint64_t seed = 91648253;

  std::optional<std::uint64_t> max_conflicts;
  std::optional<double> max_seconds;

  /// Stock Minisat behaviour: no input priority, decay and 2% random
  /// decisions.
  static SolverConfig baseline();
  /// Throws InputError on non-positive budgets or out-of-range constants.
  void validate() const;
};

struct SolveStats {
  double seconds = 0.0;
  std::uint64_t decisions = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
  std::uint64_t fallback_decisions = 0;
  /// Stopped by the caller's stop token rather than a budget.
  bool interrupted = false;
};

/// key=value lines.
void write_stats(std::ostream &out, const SolveStats &stats);

struct SolveResult {
  SolveStatus status = SolveStatus::BudgetExceeded;
  /// Total assignment over 1..num_vars, present iff status == Sat.
  std::optional<PartialAssignment> model;
  SolveStats stats;
};

/// Stateful single-threaded solver instance. Values fixed through
/// `solve(assumptions)` are asserted at decision level 0, so they persist
/// for the lifetime of the instance.
class Solver {
public:
  Solver(const Cnf &cnf, SolverConfig config = {});
  ~Solver();
  Solver(Solver &&) noexcept;
  Solver &operator=(Solver &&) noexcept;

  /// Adds a clause permanently. Returns false once the formula is known to
  /// be unsatisfiable.
  bool add_clause(const Clause &clause);

  /// Searches for a model of the clauses with `assumptions` fixed. Stops
  /// with BudgetExceeded when a budget runs out or `stop` is requested
  /// (checked at every conflict and every 256 decisions).
  SolveResult solve(const PartialAssignment &assumptions = {},
                    std::stop_token stop = {});

  /// Unit propagation from `pa` on the original clauses. Returns the
  /// fixpoint or nullopt on conflict.
  std::optional<PartialAssignment> propagate(const PartialAssignment &pa);

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Cnf cnf_;
};

/// One-shot solve. The returned model is checked against the CNF.
[[nodiscard]] SolveResult solve(const Cnf &cnf,
                                const PartialAssignment &assumptions = {},
                                const SolverConfig &config = {},
                                std::stop_token stop = {});

struct AllSatResult {
  /// Distinct models restricted to `project_to`, each in project_to order.
  std::vector<std::vector<std::uint8_t>> models;
  /// The limit was reached before the enumeration finished.
  bool truncated = false;
  /// The enumeration was cut short by a budget or stop request.
  bool budget_exceeded = false;
  SolveStats stats;
};

/// Enumerates all models projected onto `project_to` by adding a blocking
/// clause over the projection after each model. Complete unless truncated
/// or budget_exceeded is set.
[[nodiscard]] AllSatResult solve_all(const Cnf &cnf, const SolverConfig &config,
                                     const std::vector<Var> &project_to,
                                     std::size_t limit = SIZE_MAX,
                                     const PartialAssignment &assumptions = {},
                                     std::stop_token stop = {});

struct Conflict {};

/// Fixpoint of unit propagation from `pa`, or Conflict.
[[nodiscard]] std::variant<PartialAssignment, Conflict>
propagate_only(const Cnf &cnf, const PartialAssignment &pa);

} // namespace logcrypt
