#pragma once

// Decomposition sets, cell families and the predictive function T.
//
// A decomposition set X is an ordered list of input variables of a CNF.
// Each vector Y in {0,1}^|X| gives the cell C|_Y. Y is written MSB first:
// Y[0] is the value of X[0], and the cells of a family are numbered in
// lexicographic order of Y.
//
// T(X) estimates the sequential time needed to solve every cell. With
// 2^d <= R all cells are solved and T is their total time; otherwise Q
// vectors are drawn uniformly (with replacement) and T = 2^d / Q * tau,
// where tau is the summed solver time of the sampled cells. Evaluation
// stops as soon as tau reaches the time budget (T undefined) or, during a
// search, as soon as the running T already exceeds the best value known.

#include "logcrypt/cnf.hpp"
#include "logcrypt/generators.hpp"
#include "logcrypt/solver.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <iterator>
#include <optional>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

namespace logcrypt {

struct DecompositionSet {
  std::vector<Var> vars;

  [[nodiscard]] std::size_t power() const { return vars.size(); }
  friend bool operator==(const DecompositionSet &,
                         const DecompositionSet &) = default;
};

/// Parses a range list over input names, e.g. "1-9,20-30,42-52". Ranges
/// need numeric names; single entries may be any input name. Throws
/// InputError on unknown names, repeats or empty text.
[[nodiscard]] DecompositionSet parse_decomposition(const Cnf &cnf,
                                                   std::string_view text);
/// Inverse of parse_decomposition, folding consecutive numeric names into
/// ranges. The empty set is rendered as "".
[[nodiscard]] std::string format_decomposition(const Cnf &cnf,
                                               const DecompositionSet &set);
/// Throws InputError unless every variable is a distinct input variable.
void check_decomposition(const Cnf &cnf, const DecompositionSet &set);
/// All input variables in annotation order.
[[nodiscard]] DecompositionSet full_input_set(const Cnf &cnf);

/// Binds set.vars[i] to y[i].
[[nodiscard]] PartialAssignment cell_assignment(const DecompositionSet &set,
                                                const Bits &y);
/// The vector with lexicographic rank `index` (MSB first).
[[nodiscard]] Bits cell_vector(std::size_t power, std::uint64_t index);

/// The 2^d cells C|_Y in lexicographic order of Y, built on demand.
class CellFamily {
public:
  /// Throws InputError for an invalid set or d >= 64.
  CellFamily(const Cnf &cnf, DecompositionSet set);

  [[nodiscard]] std::uint64_t size() const;
  [[nodiscard]] Bits vector(std::uint64_t j) const;
  [[nodiscard]] Cnf operator[](std::uint64_t j) const;

  class iterator {
  public:
    using iterator_category = std::input_iterator_tag;
    using value_type = Cnf;
    using difference_type = std::ptrdiff_t;

    iterator(const CellFamily *family, std::uint64_t j) : family_(family), j_(j) {}
    Cnf operator*() const { return (*family_)[j_]; }
    iterator &operator++() {
      ++j_;
      return *this;
    }
    friend bool operator==(const iterator &a, const iterator &b) {
      return a.j_ == b.j_;
    }

  private:
    const CellFamily *family_;
    std::uint64_t j_;
  };
  [[nodiscard]] iterator begin() const { return {this, 0}; }
  [[nodiscard]] iterator end() const { return {this, size()}; }

private:
  const Cnf *cnf_;
  DecompositionSet set_;
};

[[nodiscard]] CellFamily cells(const Cnf &cnf, const DecompositionSet &set);

struct PredictionParams {
  std::size_t q = 1000;
  std::uint64_t r = 4096;
  /// Cumulative solver time after which T is undefined. Unset means the
  /// default derived from a pilot run (see default_g_budget).
  std::optional<double> g_budget;
  std::uint64_t seed = 1;
  /// Cells solved concurrently. tau is the sum of per-cell solver times
  /// either way.
  unsigned workers = 1;

  void validate() const;
};

struct CellSample {
  std::vector<Bits> vectors;
  /// The whole family (2^d <= R) rather than a random sample.
  bool exhaustive = false;
};

/// theta_C(X): all 2^d vectors when 2^d <= R, otherwise Q i.i.d. uniform
/// vectors from a generator seeded with params.seed.
[[nodiscard]] CellSample sample_cells(const Cnf &cnf, const DecompositionSet &set,
                                      const PredictionParams &params);

struct CellTiming {
  SolveStatus status = SolveStatus::BudgetExceeded;
  double seconds = 0.0;
};

/// Solves the CNF under the cell assignment within `time_limit` seconds.
/// Tests substitute a fake clock here.
using CellSolver = std::function<CellTiming(
    const Cnf &cnf, const PartialAssignment &cell, double time_limit,
    std::stop_token stop)>;

/// Runs the CDCL solver with the cell values as assumptions and reports
/// its own time measurement.
[[nodiscard]] CellSolver solver_cell_solver(SolverConfig config);

enum class PredictionStatus { Estimated, Exact, Undefined, Dominated };
[[nodiscard]] std::string to_string(PredictionStatus s);

struct PredictionOutcome {
  double tau = 0.0;
  /// Present for Estimated and Exact.
  std::optional<double> T;
  PredictionStatus status = PredictionStatus::Undefined;
  std::size_t cells_solved = 0;
  std::size_t cells_planned = 0;
  std::size_t sat_cells = 0;
};

/// Evaluates T(X). `incumbent`, when given, enables the dominance abort:
/// evaluation stops with status Dominated once the running estimate
/// exceeds it. Requires params.g_budget to be set.
[[nodiscard]] PredictionOutcome predict(const Cnf &cnf,
                                        const DecompositionSet &set,
                                        const PredictionParams &params,
                                        const CellSolver &solver,
                                        std::optional<double> incumbent = {},
                                        std::stop_token stop = {});

/// Same with the CDCL solver. An unset g_budget is replaced by
/// default_g_budget for `set`.
[[nodiscard]] PredictionOutcome predict(const Cnf &cnf,
                                        const DecompositionSet &set,
                                        const PredictionParams &params,
                                        const SolverConfig &config = {});

/// max(60 s, 10 * Q * median pilot cell time), the pilot being up to 20
/// sampled cells of `set`.
[[nodiscard]] double default_g_budget(const Cnf &cnf, const DecompositionSet &set,
                                      const PredictionParams &params,
                                      const CellSolver &solver);

enum class Strategy { RemoveLast, GreedyBest };
[[nodiscard]] Strategy parse_strategy(std::string_view text);
[[nodiscard]] std::string to_string(Strategy s);

struct TraceRecord {
  std::size_t iteration = 0;
  DecompositionSet set;
  PredictionOutcome outcome;
  /// T of the best set after this record.
  std::optional<double> best_T;
  bool improved = false;
};

struct MinimizeResult {
  DecompositionSet best;
  PredictionOutcome best_outcome;
  std::vector<TraceRecord> trace;
};

/// Searches the chain of sets obtained by removing one variable at a time,
/// starting from `initial`. remove-last walks the whole chain down to one
/// variable; greedy-best tries every removal at each step, keeps the best
/// and stops when no removal improves T. Throws InputError when T is
/// undefined at `initial`.
[[nodiscard]] MinimizeResult minimize(const Cnf &cnf,
                                      const DecompositionSet &initial,
                                      Strategy strategy,
                                      const PredictionParams &params,
                                      const CellSolver &solver);
[[nodiscard]] MinimizeResult minimize(const Cnf &cnf,
                                      const DecompositionSet &initial,
                                      Strategy strategy,
                                      const PredictionParams &params,
                                      const SolverConfig &config = {});

/// CSV with header iteration,power,tau,T,status (T empty when undefined).
void write_trace_csv(std::ostream &out, const std::vector<TraceRecord> &trace);

} // namespace logcrypt
