#include "logcrypt/runner.hpp"

#include "logcrypt/error.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <istream>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace logcrypt {

std::uint64_t Batch::cell_count() const {
  return std::uint64_t{1} << (power - prefix.size());
}

Bits Batch::cell(std::uint64_t j) const {
  Bits y = prefix;
  Bits tail = cell_vector(power - prefix.size(), j);
  y.insert(y.end(), tail.begin(), tail.end());
  return y;
}

std::vector<Batch> make_batches(const DecompositionSet &set, std::size_t k) {
  std::size_t d = set.power();
  if (k > d)
    throw InputError("batch prefix length k=" + std::to_string(k) +
                     " exceeds the decomposition power " + std::to_string(d));
  if (d - k >= 64 || k >= 40)
    throw InputError("decomposition family too large to split");
  std::vector<Batch> out;
  out.reserve(std::size_t{1} << k);
  for (std::uint64_t p = 0; p < (std::uint64_t{1} << k); ++p)
    out.push_back({static_cast<std::size_t>(p + 1), cell_vector(k, p), d});
  return out;
}

std::size_t default_batch_prefix(std::size_t power, unsigned workers) {
  std::size_t k = 0;
  while ((std::uint64_t{1} << k) < 4ull * std::max(1u, workers))
    ++k;
  return std::min(k, power);
}

AttackMode parse_attack_mode(std::string_view text) {
  if (text == "first")
    return AttackMode::FirstSat;
  if (text == "all")
    return AttackMode::FindAll;
  throw InputError("unknown mode '" + std::string(text) + "' (first, all)");
}

std::string to_string(AttackStatus s) {
  switch (s) {
  case AttackStatus::Found:
    return "found";
  case AttackStatus::Exhausted:
    return "exhausted";
  case AttackStatus::Deadline:
    return "deadline";
  case AttackStatus::Cancelled:
    return "cancelled";
  case AttackStatus::Incomplete:
    return "incomplete";
  }
  return "?";
}

AttackResult run_attack(const GeneratorSpec &gen, const Encoding &enc,
                        const Bits &keystream, const DecompositionSet &set,
                        const AttackConfig &config, std::stop_token stop) {
  if (config.workers == 0)
    throw InputError("workers must be at least 1");
  if (keystream.size() != enc.keystream_vars.size())
    throw InputError("keystream has " + std::to_string(keystream.size()) +
                     " bits, the encoding expects " +
                     std::to_string(enc.keystream_vars.size()));
  if (config.deadline_seconds && !(*config.deadline_seconds > 0.0))
    throw InputError("deadline must be positive");
  config.solver.validate();
  check_decomposition(enc.cnf, set);
  const Cnf bound = bind_keystream(enc, keystream);

  AttackResult res;
  res.k = config.k.value_or(default_batch_prefix(set.power(), config.workers));
  std::vector<Batch> all = make_batches(set, res.k);
  std::vector<Batch> todo;
  if (config.only_batches) {
    std::set<std::size_t> seen;
    for (std::size_t p : *config.only_batches) {
      if (p == 0 || p > all.size())
        throw InputError("batch index " + std::to_string(p) + " out of range");
      if (seen.insert(p).second)
        todo.push_back(all[p - 1]);
    }
  } else {
    todo = std::move(all);
  }
  for (const Batch &b : todo)
    res.cells_total += b.cell_count();

  auto started = std::chrono::steady_clock::now();
  std::stop_source halt;
  std::stop_callback forward(stop, [&] { halt.request_stop(); });
  std::mutex mu;
  std::condition_variable finished_cv;
  unsigned finished = 0;
  std::atomic<std::size_t> next{0};
  std::set<Bits> keys;
  bool budget_hit = false;
  std::uint64_t solved = 0;

  auto decode = [&](const PartialAssignment &model) {
    Bits key(enc.key_vars.size());
    for (std::size_t i = 0; i < key.size(); ++i)
      key[i] = *model.value(enc.key_vars[i]) ? 1 : 0;
    return key;
  };

  auto worker = [&](unsigned id) {
    std::stop_token token = halt.get_token();
    while (!token.stop_requested()) {
      std::size_t bi = next.fetch_add(1);
      if (bi >= todo.size())
        break;
      const Batch &batch = todo[bi];
      BatchTiming timing{batch.index, batch.prefix, batch.cell_count(), 0, 0.0, id};
      auto batch_start = std::chrono::steady_clock::now();
      for (std::uint64_t j = 0; j < batch.cell_count(); ++j) {
        if (token.stop_requested())
          break;
        PartialAssignment cell = cell_assignment(set, batch.cell(j));
        std::vector<Bits> found;
        bool complete = true;
        if (config.mode == AttackMode::FirstSat) {
          SolveResult r = solve(bound, cell, config.solver, token);
          if (r.status == SolveStatus::Sat)
            found.push_back(decode(*r.model));
          complete = r.status != SolveStatus::BudgetExceeded;
          if (!complete && !token.stop_requested()) {
            std::lock_guard lock(mu);
            budget_hit = true;
          }
        } else {
          AllSatResult r = solve_all(bound, config.solver, enc.key_vars,
                                     SIZE_MAX, cell, token);
          for (const auto &m : r.models)
            found.emplace_back(m.begin(), m.end());
          complete = !r.budget_exceeded;
          if (!complete && !token.stop_requested()) {
            std::lock_guard lock(mu);
            budget_hit = true;
          }
        }
        for (const Bits &key : found)
          if (!verify_key(gen, key, keystream))
            throw std::logic_error(
                "recovered key " + format_key_hex(gen, key) +
                " does not reproduce the keystream (encoder/solver mismatch)");
        std::lock_guard lock(mu);
        if (complete) {
          ++timing.solved;
          ++solved;
        }
        keys.insert(found.begin(), found.end());
        if (!found.empty() && config.mode == AttackMode::FirstSat)
          halt.request_stop();
      }
      timing.seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - batch_start)
                           .count();
      std::lock_guard lock(mu);
      res.batches.push_back(std::move(timing));
    }
  };

  bool deadline_hit = false;
  {
    std::vector<std::exception_ptr> errors(config.workers);
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < config.workers; ++w)
      pool.emplace_back([&, w] {
        try {
          worker(w);
        } catch (...) {
          errors[w] = std::current_exception();
          halt.request_stop();
        }
        std::lock_guard lock(mu);
        ++finished;
        finished_cv.notify_all();
      });
    std::unique_lock lock(mu);
    auto all_done = [&] { return finished == config.workers; };
    if (config.deadline_seconds) {
      auto until = started + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                 std::chrono::duration<double>(*config.deadline_seconds));
      if (!finished_cv.wait_until(lock, until, all_done)) {
        deadline_hit = !halt.stop_requested();
        halt.request_stop();
      }
    }
    finished_cv.wait(lock, all_done);
    lock.unlock();
    pool.clear();
    for (auto &e : errors)
      if (e)
        std::rethrow_exception(e);
  }

  res.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  res.keys.assign(keys.begin(), keys.end());
  res.cells_solved = solved;
  res.cells_skipped = res.cells_total - solved;
  bool cancelled = stop.stop_requested();
  if (config.mode == AttackMode::FirstSat && !res.keys.empty())
    res.status = AttackStatus::Found;
  else if (deadline_hit)
    res.status = AttackStatus::Deadline;
  else if (cancelled)
    res.status = AttackStatus::Cancelled;
  else if (budget_hit)
    res.status = AttackStatus::Incomplete;
  else
    res.status = res.keys.empty() ? AttackStatus::Exhausted : AttackStatus::Found;
  return res;
}

void write_batch_csv(std::ostream &out, const AttackResult &result) {
  out << "batch,prefix,cells,solved,seconds,worker\n";
  for (const BatchTiming &b : result.batches)
    out << b.index << ',' << (b.prefix.empty() ? "-" : format_bits(b.prefix))
        << ',' << b.cells << ',' << b.solved << ',' << b.seconds << ','
        << b.worker << '\n';
}

void export_manifest(std::ostream &out, const Cnf &cnf,
                     const DecompositionSet &set, std::size_t k) {
  auto batches = make_batches(set, k);
  out << "# decomposition " << format_decomposition(cnf, set) << '\n'
      << "# power " << set.power() << '\n'
      << "# prefix " << k << '\n';
  for (const Batch &b : batches)
    out << b.index << ' ' << (b.prefix.empty() ? "-" : format_bits(b.prefix))
        << ' ' << b.cell_count() << '\n';
  if (!out)
    throw IoError("failed to write manifest");
}

Manifest read_manifest(std::istream &in) {
  Manifest m;
  bool have_power = false, have_k = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first))
      continue;
    if (first == "#") {
      std::string key;
      ls >> key;
      if (key == "decomposition") {
        ls >> m.decomposition;
      } else if (key == "power") {
        if (!(ls >> m.power))
          throw ParseError(lineno, "bad power");
        have_power = true;
      } else if (key == "prefix") {
        if (!(ls >> m.k))
          throw ParseError(lineno, "bad prefix length");
        have_k = true;
      }
      continue;
    }
    if (first[0] == '#')
      continue;
    ManifestEntry e;
    std::string prefix, extra;
    std::istringstream entry(line);
    if (!(entry >> e.index >> prefix >> e.cells) || (entry >> extra))
      throw ParseError(lineno, "expected '<batch-index> <prefix-bits> <cell-count>'");
    if (prefix != "-") {
      for (char c : prefix) {
        if (c != '0' && c != '1')
          throw ParseError(lineno, "prefix must be a 0/1 string");
        e.prefix.push_back(static_cast<std::uint8_t>(c - '0'));
      }
    }
    if (have_k && e.prefix.size() != m.k)
      throw ParseError(lineno, "prefix length differs from the header");
    if (have_power && have_k && e.cells != (std::uint64_t{1} << (m.power - m.k)))
      throw ParseError(lineno, "cell count differs from 2^(d-k)");
    if (e.index == 0 || (have_k && bits_to_uint(e.prefix) + 1 != e.index))
      throw ParseError(lineno, "batch index does not match its prefix");
    m.entries.push_back(std::move(e));
  }
  if (!have_power || !have_k || m.decomposition.empty())
    throw ParseError(lineno, "manifest header lacks decomposition, power or prefix");
  return m;
}

} // namespace logcrypt
