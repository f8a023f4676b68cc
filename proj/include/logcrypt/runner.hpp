#pragma once

// Parallel processing of a decomposition family.
//
// The first k variables of the decomposition set split the 2^d cells into
// 2^k batches. Batch p (1-based) holds the cells whose first k values are
// the binary form of p-1; inside a batch the remaining d-k values run in
// lexicographic order. Workers take whole batches from a shared queue and
// solve their cells one after another with a fresh solver per cell.

#include "logcrypt/decomposition.hpp"
#include "logcrypt/encoder.hpp"
#include "logcrypt/generators.hpp"
#include "logcrypt/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stop_token>
#include <string>
#include <vector>

namespace logcrypt {

struct Batch {
  std::size_t index = 0; // 1-based
  Bits prefix;
  std::size_t power = 0; // d

  [[nodiscard]] std::uint64_t cell_count() const;
  /// Full d-bit vector of the j-th cell of the batch.
  [[nodiscard]] Bits cell(std::uint64_t j) const;
};

/// 2^k batches over `set`. Throws InputError when k > d or d - k >= 64.
[[nodiscard]] std::vector<Batch> make_batches(const DecompositionSet &set,
                                              std::size_t k);
/// Smallest k with 2^k >= 4 * workers, capped at d.
[[nodiscard]] std::size_t default_batch_prefix(std::size_t power,
                                               unsigned workers);

enum class AttackMode { FirstSat, FindAll };
[[nodiscard]] AttackMode parse_attack_mode(std::string_view text);

struct AttackConfig {
  unsigned workers = 1;
  /// Batch prefix length; default_batch_prefix when unset.
  std::optional<std::size_t> k;
  AttackMode mode = AttackMode::FirstSat;
  SolverConfig solver;
  std::optional<double> deadline_seconds;
  /// Run only these batches (1-based indices), e.g. from a manifest.
  std::optional<std::vector<std::size_t>> only_batches;
};

enum class AttackStatus {
  Found,      // at least one key recovered (all of them in find-all mode)
  Exhausted,  // every cell is UNSAT
  Deadline,   // overall deadline reached
  Cancelled,  // stopped by the caller
  Incomplete  // some cells hit the per-cell solver budget
};
[[nodiscard]] std::string to_string(AttackStatus s);

struct BatchTiming {
  std::size_t index = 0;
  Bits prefix;
  std::uint64_t cells = 0;
  std::uint64_t solved = 0;
  double seconds = 0.0;
  unsigned worker = 0;
};

struct AttackResult {
  AttackStatus status = AttackStatus::Exhausted;
  /// Distinct keys, sorted. Every key reproduces the keystream.
  std::vector<Bits> keys;
  std::uint64_t cells_total = 0;
  std::uint64_t cells_solved = 0;
  std::uint64_t cells_skipped = 0;
  std::size_t k = 0;
  double seconds = 0.0;
  /// Batches that were started, in completion order.
  std::vector<BatchTiming> batches;
};

/// Binds `keystream` to `enc`, splits the family of `set` into batches and
/// solves them on config.workers threads. In first-SAT mode the first model
/// stops all workers; in find-all mode every cell is enumerated. Keys are
/// checked with verify_key; a key that does not reproduce the keystream
/// raises std::logic_error.
[[nodiscard]] AttackResult run_attack(const GeneratorSpec &gen,
                                      const Encoding &enc, const Bits &keystream,
                                      const DecompositionSet &set,
                                      const AttackConfig &config,
                                      std::stop_token stop = {});

/// CSV: batch,prefix,cells,solved,seconds,worker
void write_batch_csv(std::ostream &out, const AttackResult &result);

struct ManifestEntry {
  std::size_t index = 0;
  Bits prefix;
  std::uint64_t cells = 0;
  friend bool operator==(const ManifestEntry &, const ManifestEntry &) = default;
};

struct Manifest {
  std::string decomposition;
  std::size_t power = 0;
  std::size_t k = 0;
  std::vector<ManifestEntry> entries;
};

/// One line per batch, `<batch-index> <prefix-bits> <cell-count>`, after
/// `#` comment lines recording the decomposition set, d and k. An empty
/// prefix is written as `-`.
void export_manifest(std::ostream &out, const Cnf &cnf,
                     const DecompositionSet &set, std::size_t k);
/// Throws ParseError on malformed lines or inconsistent records.
[[nodiscard]] Manifest read_manifest(std::istream &in);

} // namespace logcrypt
