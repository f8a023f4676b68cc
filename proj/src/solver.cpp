#include "logcrypt/solver.hpp"

#include "logcrypt/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

namespace logcrypt {

std::string to_string(SolveStatus s) {
  switch (s) {
  case SolveStatus::Sat:
    return "SAT";
  case SolveStatus::Unsat:
    return "UNSAT";
  case SolveStatus::BudgetExceeded:
    return "BUDGET";
  }
  return "?";
}

SolverConfig SolverConfig::baseline() {
  SolverConfig c;
  c.input_priority = false;
  c.decay_disabled = false;
  c.random_decisions_disabled = false;
  return c;
}

void SolverConfig::validate() const {
  if (max_conflicts && *max_conflicts == 0)
    throw InputError("max_conflicts must be positive");
  if (max_seconds && !(*max_seconds > 0.0))
    throw InputError("max_seconds must be positive");
  if (!(var_decay > 0.0 && var_decay <= 1.0) ||
      !(clause_decay > 0.0 && clause_decay <= 1.0))
    throw InputError("decay factors must lie in (0, 1]");
  if (!(random_var_freq >= 0.0 && random_var_freq <= 1.0))
    throw InputError("random_var_freq must lie in [0, 1]");
  if (restart_first == 0 || restart_inc < 1.0)
    throw InputError("restart_first must be positive and restart_inc >= 1");
  if (!(learnt_size_factor > 0.0) || learnt_size_inc < 1.0)
    throw InputError("bad learnt clause limits");
  if (input_priority && !(input_activity >= 0.0))
    throw InputError("input_activity must be non-negative");
}

void write_stats(std::ostream &out, const SolveStats &s) {
  out << "seconds=" << s.seconds << '\n'
      << "decisions=" << s.decisions << '\n'
      << "conflicts=" << s.conflicts << '\n'
      << "propagations=" << s.propagations << '\n'
      << "restarts=" << s.restarts << '\n'
      << "fallback_decisions=" << s.fallback_decisions << '\n'
      << "interrupted=" << (s.interrupted ? 1 : 0) << '\n';
}

namespace {

using Lit = std::uint32_t; // 2 * (var - 1) + negated
using CRef = std::uint32_t;
constexpr CRef kNoReason = std::numeric_limits<CRef>::max();
constexpr Lit kNoLit = std::numeric_limits<Lit>::max();

inline Lit make_lit(Literal l) {
  return 2 * (l.var() - 1) + (l.positive() ? 0u : 1u);
}
inline std::uint32_t var_of(Lit l) { return l >> 1; }
inline bool negated(Lit l) { return (l & 1u) != 0; }

class VarHeap {
public:
  explicit VarHeap(const std::vector<double> &act) : act_(&act) {}

  void grow(std::size_t n) { index_.assign(n, -1); }
  [[nodiscard]] bool empty() const { return heap_.empty(); }
  [[nodiscard]] std::size_t size() const { return heap_.size(); }
  [[nodiscard]] std::uint32_t at(std::size_t i) const { return heap_[i]; }
  [[nodiscard]] bool contains(std::uint32_t v) const { return index_[v] >= 0; }

  void insert(std::uint32_t v) {
    if (contains(v))
      return;
    index_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    up(heap_.size() - 1);
  }
  void increased(std::uint32_t v) {
    if (contains(v))
      up(static_cast<std::size_t>(index_[v]));
  }
  std::uint32_t pop() {
    std::uint32_t top = heap_[0];
    heap_[0] = heap_.back();
    index_[heap_[0]] = 0;
    index_[top] = -1;
    heap_.pop_back();
    if (heap_.size() > 1)
      down(0);
    return top;
  }

private:
  bool before(std::uint32_t a, std::uint32_t b) const {
    return (*act_)[a] > (*act_)[b];
  }
  void up(std::size_t i) {
    std::uint32_t v = heap_[i];
    while (i > 0) {
      std::size_t parent = (i - 1) / 2;
      if (!before(v, heap_[parent]))
        break;
      heap_[i] = heap_[parent];
      index_[heap_[i]] = static_cast<int>(i);
      i = parent;
    }
    heap_[i] = v;
    index_[v] = static_cast<int>(i);
  }
  void down(std::size_t i) {
    std::uint32_t v = heap_[i];
    while (2 * i + 1 < heap_.size()) {
      std::size_t child = 2 * i + 1;
      if (child + 1 < heap_.size() && before(heap_[child + 1], heap_[child]))
        ++child;
      if (!before(heap_[child], v))
        break;
      heap_[i] = heap_[child];
      index_[heap_[i]] = static_cast<int>(i);
      i = child;
    }
    heap_[i] = v;
    index_[v] = static_cast<int>(i);
  }

  const std::vector<double> *act_;
  std::vector<std::uint32_t> heap_;
  std::vector<int> index_;
};

} // namespace

struct Solver::Impl {
  struct Header {
    std::uint32_t start;
    std::uint32_t size;
    float activity;
    bool learnt;
  };
  struct Watcher {
    CRef cref;
    Lit blocker;
  };
  enum class Search { Sat, Unsat, Restart, Budget };

  SolverConfig cfg;
  std::uint32_t nvars = 0;
  std::vector<Lit> arena;
  std::vector<Header> headers;
  std::vector<CRef> learnts;
  std::vector<std::vector<Watcher>> watches; // by literal watched
  std::vector<std::int8_t> assigns;          // 1 true, -1 false, 0 open
  std::vector<int> level;
  std::vector<CRef> reason;
  std::vector<std::uint8_t> saved_phase; // 1 = last value was false
  std::vector<std::uint8_t> decision;
  std::vector<std::uint8_t> seen;
  std::vector<Lit> trail;
  std::vector<std::size_t> trail_lim;
  std::size_t qhead = 0;
  std::vector<double> activity;
  VarHeap order{activity};
  double var_inc = 1.0;
  double cla_inc = 1.0;
  std::size_t fallback_cursor = 0;
  bool ok = true;
  std::mt19937_64 rng;
  std::uniform_real_distribution<double> unit{0.0, 1.0};
  SolveStats stats;
  std::vector<Lit> analyze_stack, analyze_toclear;

  // budget state for the running solve() call
  std::chrono::steady_clock::time_point started;
  std::uint64_t conflict_base = 0;
  std::stop_token stop;

  Impl(const Cnf &cnf, SolverConfig config) : cfg(std::move(config)) {
    cfg.validate();
    rng.seed(cfg.seed);
    nvars = cnf.num_vars();
    watches.resize(2 * static_cast<std::size_t>(nvars));
    assigns.assign(nvars, 0);
    level.assign(nvars, 0);
    reason.assign(nvars, kNoReason);
    saved_phase.assign(nvars, 1);
    seen.assign(nvars, 0);
    activity.assign(nvars, 0.0);
    decision.assign(nvars, cfg.restrict_decisions_to ? 0 : 1);
    if (cfg.restrict_decisions_to)
      for (Var v : *cfg.restrict_decisions_to) {
        if (v == 0 || v > nvars)
          throw InputError("decision variable out of range");
        decision[v - 1] = 1;
      }
    if (cfg.input_priority)
      for (Var v : cnf.input_vars())
        activity[v - 1] = cfg.input_activity;
    order.grow(nvars);
    for (std::uint32_t v = 0; v < nvars; ++v)
      if (decision[v])
        order.insert(v);
    std::size_t lits = 0;
    for (const Clause &c : cnf.clauses())
      lits += c.size();
    arena.reserve(lits);
    headers.reserve(cnf.clauses().size());
    std::vector<Lit> buf;
    for (const Clause &c : cnf.clauses()) {
      buf.clear();
      for (Literal l : c)
        buf.push_back(make_lit(l));
      if (!add_root_clause(buf))
        break;
    }
  }

  [[nodiscard]] std::int8_t value(Lit l) const {
    std::int8_t a = assigns[var_of(l)];
    return negated(l) ? static_cast<std::int8_t>(-a) : a;
  }
  [[nodiscard]] int decision_level() const {
    return static_cast<int>(trail_lim.size());
  }

  void enqueue(Lit l, CRef from) {
    std::uint32_t v = var_of(l);
    assigns[v] = negated(l) ? -1 : 1;
    level[v] = decision_level();
    reason[v] = from;
    trail.push_back(l);
  }

  CRef store(const std::vector<Lit> &lits, bool learnt) {
    auto cref = static_cast<CRef>(headers.size());
    headers.push_back({static_cast<std::uint32_t>(arena.size()),
                       static_cast<std::uint32_t>(lits.size()), 0.0f, learnt});
    arena.insert(arena.end(), lits.begin(), lits.end());
    return cref;
  }
  void attach(CRef cr) {
    const Header &h = headers[cr];
    Lit a = arena[h.start], b = arena[h.start + 1];
    watches[a].push_back({cr, b});
    watches[b].push_back({cr, a});
  }

  // Adds a clause at level 0, simplifying against level-0 values.
  bool add_root_clause(std::vector<Lit> lits) {
    if (!ok)
      return false;
    std::size_t j = 0;
    for (Lit l : lits) {
      std::int8_t v = value(l);
      if (v > 0)
        return true;
      if (v == 0)
        lits[j++] = l;
    }
    lits.resize(j);
    if (lits.empty()) {
      ok = false;
      return false;
    }
    if (lits.size() == 1) {
      enqueue(lits[0], kNoReason);
      if (propagate() != kNoReason)
        ok = false;
      return ok;
    }
    attach(store(lits, false));
    return true;
  }

  CRef propagate() {
    CRef confl = kNoReason;
    while (qhead < trail.size()) {
      Lit p = trail[qhead++];
      Lit false_lit = p ^ 1u;
      auto &ws = watches[false_lit];
      ++stats.propagations;
      std::size_t i = 0, j = 0, n = ws.size();
      while (i < n) {
        Watcher w = ws[i];
        if (value(w.blocker) > 0) {
          ws[j++] = ws[i++];
          continue;
        }
        const Header &h = headers[w.cref];
        Lit *c = &arena[h.start];
        if (c[0] == false_lit)
          std::swap(c[0], c[1]);
        ++i;
        Lit first = c[0];
        Watcher kept{w.cref, first};
        if (first != w.blocker && value(first) > 0) {
          ws[j++] = kept;
          continue;
        }
        bool moved = false;
        for (std::uint32_t k = 2; k < h.size; ++k) {
          if (value(c[k]) >= 0) {
            c[1] = c[k];
            c[k] = false_lit;
            watches[c[1]].push_back(kept);
            moved = true;
            break;
          }
        }
        if (moved)
          continue;
        ws[j++] = kept;
        if (value(first) < 0) {
          confl = w.cref;
          qhead = trail.size();
          while (i < n)
            ws[j++] = ws[i++];
        } else {
          enqueue(first, w.cref);
        }
      }
      ws.resize(j);
    }
    return confl;
  }

  void bump_var(std::uint32_t v) {
    activity[v] += var_inc;
    if (activity[v] > 1e100) {
      for (double &a : activity)
        a *= 1e-100;
      var_inc *= 1e-100;
    }
    order.increased(v);
  }
  void bump_clause(CRef cr) {
    Header &h = headers[cr];
    h.activity += static_cast<float>(cla_inc);
    if (h.activity > 1e20f) {
      for (CRef l : learnts)
        headers[l].activity *= 1e-20f;
      cla_inc *= 1e-20;
    }
  }
  void decay_activities() {
    if (cfg.decay_disabled)
      return;
    var_inc /= cfg.var_decay;
    cla_inc /= cfg.clause_decay;
  }

  [[nodiscard]] std::uint32_t abstract_level(std::uint32_t v) const {
    return 1u << (static_cast<unsigned>(level[v]) & 31u);
  }

  bool redundant(Lit p, std::uint32_t levels) {
    analyze_stack.clear();
    analyze_stack.push_back(p);
    std::size_t top = analyze_toclear.size();
    while (!analyze_stack.empty()) {
      Lit q = analyze_stack.back();
      analyze_stack.pop_back();
      const Header &h = headers[reason[var_of(q)]];
      for (std::uint32_t k = 1; k < h.size; ++k) {
        Lit l = arena[h.start + k];
        std::uint32_t v = var_of(l);
        if (seen[v] || level[v] == 0)
          continue;
        if (reason[v] != kNoReason && (abstract_level(v) & levels) != 0) {
          seen[v] = 1;
          analyze_stack.push_back(l);
          analyze_toclear.push_back(l);
        } else {
          for (std::size_t t = top; t < analyze_toclear.size(); ++t)
            seen[var_of(analyze_toclear[t])] = 0;
          analyze_toclear.resize(top);
          return false;
        }
      }
    }
    return true;
  }

  void analyze(CRef confl, std::vector<Lit> &out, int &bt_level) {
    int path = 0;
    Lit p = kNoLit;
    out.clear();
    out.push_back(kNoLit);
    std::size_t index = trail.size();
    do {
      const Header &h = headers[confl];
      if (h.learnt)
        bump_clause(confl);
      for (std::uint32_t k = (p == kNoLit ? 0 : 1); k < headers[confl].size;
           ++k) {
        Lit q = arena[headers[confl].start + k];
        std::uint32_t v = var_of(q);
        if (seen[v] || level[v] == 0)
          continue;
        bump_var(v);
        seen[v] = 1;
        if (level[v] >= decision_level())
          ++path;
        else
          out.push_back(q);
      }
      while (!seen[var_of(trail[--index])]) {
      }
      p = trail[index];
      confl = reason[var_of(p)];
      seen[var_of(p)] = 0;
      --path;
    } while (path > 0);
    out[0] = p ^ 1u;

    analyze_toclear.assign(out.begin(), out.end());
    std::uint32_t levels = 0;
    for (std::size_t i = 1; i < out.size(); ++i)
      levels |= abstract_level(var_of(out[i]));
    std::size_t j = 1;
    for (std::size_t i = 1; i < out.size(); ++i) {
      std::uint32_t v = var_of(out[i]);
      if (reason[v] == kNoReason || !redundant(out[i], levels))
        out[j++] = out[i];
    }
    out.resize(j);
    for (Lit l : analyze_toclear)
      seen[var_of(l)] = 0;

    if (out.size() == 1) {
      bt_level = 0;
      return;
    }
    std::size_t max_i = 1;
    for (std::size_t i = 2; i < out.size(); ++i)
      if (level[var_of(out[i])] > level[var_of(out[max_i])])
        max_i = i;
    std::swap(out[1], out[max_i]);
    bt_level = level[var_of(out[1])];
  }

  void cancel_until(int lvl) {
    if (decision_level() <= lvl)
      return;
    for (std::size_t c = trail.size(); c-- > trail_lim[static_cast<std::size_t>(lvl)];) {
      std::uint32_t v = var_of(trail[c]);
      assigns[v] = 0;
      reason[v] = kNoReason;
      saved_phase[v] = negated(trail[c]) ? 1 : 0;
      if (decision[v])
        order.insert(v);
    }
    trail.resize(trail_lim[static_cast<std::size_t>(lvl)]);
    trail_lim.resize(static_cast<std::size_t>(lvl));
    qhead = trail.size();
  }

  Lit pick_branch() {
    std::uint32_t next = std::numeric_limits<std::uint32_t>::max();
    if (!cfg.random_decisions_disabled && !order.empty() &&
        unit(rng) < cfg.random_var_freq) {
      std::uint32_t cand = order.at(rng() % order.size());
      if (assigns[cand] == 0)
        next = cand;
    }
    while (next == std::numeric_limits<std::uint32_t>::max()) {
      if (order.empty())
        break;
      std::uint32_t v = order.pop();
      if (assigns[v] == 0)
        next = v;
    }
    if (next == std::numeric_limits<std::uint32_t>::max()) {
      while (fallback_cursor < nvars && assigns[fallback_cursor] != 0)
        ++fallback_cursor;
      if (fallback_cursor == nvars) {
        fallback_cursor = 0;
        while (fallback_cursor < nvars && assigns[fallback_cursor] != 0)
          ++fallback_cursor;
        if (fallback_cursor == nvars)
          return kNoLit;
      }
      next = static_cast<std::uint32_t>(fallback_cursor);
      ++stats.fallback_decisions;
    }
    bool neg = true;
    switch (cfg.phase) {
    case Phase::Negative:
      neg = true;
      break;
    case Phase::Positive:
      neg = false;
      break;
    case Phase::Saved:
      neg = saved_phase[next] != 0;
      break;
    }
    return 2 * next + (neg ? 1u : 0u);
  }

  static bool clause_less(const Header &a, const Header &b) {
    if ((a.size > 2) != (b.size > 2))
      return a.size > 2;
    return a.activity < b.activity;
  }

  bool locked(CRef cr) const {
    Lit first = arena[headers[cr].start];
    return reason[var_of(first)] == cr && value(first) > 0;
  }

  void reduce_db() {
    std::sort(learnts.begin(), learnts.end(), [&](CRef a, CRef b) {
      return clause_less(headers[a], headers[b]);
    });
    double extra = cla_inc / static_cast<double>(learnts.size());
    std::vector<std::uint8_t> dead(headers.size(), 0);
    std::size_t half = learnts.size() / 2;
    for (std::size_t i = 0; i < learnts.size(); ++i) {
      CRef cr = learnts[i];
      if (headers[cr].size > 2 && !locked(cr) &&
          (i < half || headers[cr].activity < extra))
        dead[cr] = 1;
    }
    compact(dead);
  }

  // Rebuilds the arena without dead clauses and re-creates all watches.
  void compact(const std::vector<std::uint8_t> &dead) {
    std::vector<CRef> remap(headers.size(), kNoReason);
    std::vector<Lit> new_arena;
    new_arena.reserve(arena.size());
    std::vector<Header> new_headers;
    new_headers.reserve(headers.size());
    for (CRef cr = 0; cr < headers.size(); ++cr) {
      if (dead[cr])
        continue;
      Header h = headers[cr];
      remap[cr] = static_cast<CRef>(new_headers.size());
      auto start = static_cast<std::uint32_t>(new_arena.size());
      new_arena.insert(new_arena.end(), arena.begin() + h.start,
                       arena.begin() + h.start + h.size);
      h.start = start;
      new_headers.push_back(h);
    }
    for (std::uint32_t v = 0; v < nvars; ++v)
      if (reason[v] != kNoReason)
        reason[v] = remap[reason[v]];
    std::vector<CRef> new_learnts;
    for (CRef cr : learnts)
      if (!dead[cr])
        new_learnts.push_back(remap[cr]);
    arena = std::move(new_arena);
    headers = std::move(new_headers);
    learnts = std::move(new_learnts);
    for (auto &ws : watches)
      ws.clear();
    for (CRef cr = 0; cr < headers.size(); ++cr)
      attach(cr);
  }

  bool out_of_budget() {
    if (stop.stop_requested()) {
      stats.interrupted = true;
      return true;
    }
    if (cfg.max_conflicts && stats.conflicts - conflict_base >= *cfg.max_conflicts)
      return true;
    if (cfg.max_seconds) {
      std::chrono::duration<double> el = std::chrono::steady_clock::now() - started;
      if (el.count() >= *cfg.max_seconds)
        return true;
    }
    return false;
  }

  Search search(std::int64_t nof_conflicts, double nof_learnts) {
    std::int64_t conflicts_here = 0;
    std::vector<Lit> learnt;
    while (true) {
      CRef confl = propagate();
      if (confl != kNoReason) {
        ++stats.conflicts;
        ++conflicts_here;
        if (decision_level() == 0)
          return Search::Unsat;
        int bt = 0;
        analyze(confl, learnt, bt);
        cancel_until(bt);
        if (learnt.size() == 1) {
          enqueue(learnt[0], kNoReason);
        } else {
          CRef cr = store(learnt, true);
          attach(cr);
          learnts.push_back(cr);
          bump_clause(cr);
          enqueue(learnt[0], cr);
        }
        decay_activities();
        if (out_of_budget())
          return Search::Budget;
        continue;
      }
      if (nof_conflicts >= 0 && conflicts_here >= nof_conflicts) {
        cancel_until(0);
        return Search::Restart;
      }
      if (static_cast<double>(learnts.size()) -
              static_cast<double>(trail.size()) >=
          nof_learnts)
        reduce_db();
      Lit next = pick_branch();
      if (next == kNoLit)
        return Search::Sat;
      ++stats.decisions;
      if ((stats.decisions & 255u) == 0 && out_of_budget())
        return Search::Budget;
      trail_lim.push_back(trail.size());
      enqueue(next, kNoReason);
    }
  }

  SolveStatus run(const PartialAssignment &assumptions) {
    cancel_until(0);
    if (!ok)
      return SolveStatus::Unsat;
    for (auto [v, b] : assumptions.bindings()) {
      if (v > nvars)
        throw InputError("assumption on variable " + std::to_string(v) +
                         " beyond num_vars");
      Lit l = 2 * (v - 1) + (b ? 0u : 1u);
      std::int8_t val = value(l);
      if (val < 0) {
        ok = false;
        return SolveStatus::Unsat;
      }
      if (val == 0)
        enqueue(l, kNoReason);
    }
    if (propagate() != kNoReason) {
      ok = false;
      return SolveStatus::Unsat;
    }
    double nof_learnts =
        std::max(static_cast<double>(headers.size() - learnts.size()) *
                     cfg.learnt_size_factor,
                 100.0);
    double nof_conflicts = static_cast<double>(cfg.restart_first);
    while (true) {
      std::int64_t limit = cfg.restarts == RestartPolicy::Off
                               ? -1
                               : static_cast<std::int64_t>(nof_conflicts);
      switch (search(limit, nof_learnts)) {
      case Search::Sat:
        return SolveStatus::Sat;
      case Search::Unsat:
        ok = false;
        return SolveStatus::Unsat;
      case Search::Budget:
        cancel_until(0);
        return SolveStatus::BudgetExceeded;
      case Search::Restart:
        ++stats.restarts;
        nof_conflicts *= cfg.restart_inc;
        nof_learnts *= cfg.learnt_size_inc;
        if (out_of_budget())
          return SolveStatus::BudgetExceeded;
        break;
      }
    }
  }

  PartialAssignment current_model() const {
    PartialAssignment m;
    for (std::uint32_t v = nvars; v-- > 0;) // high var first sizes storage once
      m.bind(v + 1, assigns[v] > 0);
    return m;
  }
};

Solver::Solver(const Cnf &cnf, SolverConfig config)
    : impl_(std::make_unique<Impl>(cnf, std::move(config))), cnf_(cnf) {}
Solver::~Solver() = default;
Solver::Solver(Solver &&) noexcept = default;
Solver &Solver::operator=(Solver &&) noexcept = default;

bool Solver::add_clause(const Clause &clause) {
  impl_->cancel_until(0);
  std::vector<Lit> lits;
  for (Literal l : clause) {
    if (l.var() > impl_->nvars)
      throw InputError("clause variable beyond num_vars");
    lits.push_back(make_lit(l));
  }
  return impl_->add_root_clause(std::move(lits));
}

SolveResult Solver::solve(const PartialAssignment &assumptions,
                          std::stop_token stop) {
  Impl &s = *impl_;
  SolveStats before = s.stats;
  s.stats.interrupted = false;
  s.started = std::chrono::steady_clock::now();
  s.conflict_base = s.stats.conflicts;
  s.stop = std::move(stop);

  SolveResult r;
  r.status = s.run(assumptions);
  if (r.status == SolveStatus::Sat) {
    r.model = s.current_model();
    s.cancel_until(0);
  }
  r.stats.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - s.started)
                        .count();
  r.stats.decisions = s.stats.decisions - before.decisions;
  r.stats.conflicts = s.stats.conflicts - before.conflicts;
  r.stats.propagations = s.stats.propagations - before.propagations;
  r.stats.restarts = s.stats.restarts - before.restarts;
  r.stats.fallback_decisions =
      s.stats.fallback_decisions - before.fallback_decisions;
  r.stats.interrupted = s.stats.interrupted;
  s.stop = {};
  return r;
}

std::optional<PartialAssignment> Solver::propagate(const PartialAssignment &pa) {
  Impl &s = *impl_;
  s.cancel_until(0);
  if (!s.ok)
    return std::nullopt;
  s.trail_lim.push_back(s.trail.size());
  for (auto [v, b] : pa.bindings()) {
    if (v > s.nvars)
      throw InputError("binding beyond num_vars");
    Lit l = 2 * (v - 1) + (b ? 0u : 1u);
    std::int8_t val = s.value(l);
    if (val < 0) {
      s.cancel_until(0);
      return std::nullopt;
    }
    if (val == 0)
      s.enqueue(l, kNoReason);
  }
  bool conflict = s.propagate() != kNoReason;
  std::optional<PartialAssignment> out;
  if (!conflict) {
    PartialAssignment fix;
    for (std::uint32_t v = s.nvars; v-- > 0;)
      if (s.assigns[v] != 0)
        fix.bind(v + 1, s.assigns[v] > 0);
    out = std::move(fix);
  }
  s.cancel_until(0);
  return out;
}

SolveResult solve(const Cnf &cnf, const PartialAssignment &assumptions,
                  const SolverConfig &config, std::stop_token stop) {
  Solver solver(cnf, config);
  SolveResult r = solver.solve(assumptions, std::move(stop));
  if (r.model) {
    if (!evaluate(cnf, *r.model))
      throw std::logic_error("solver returned a model that violates the CNF");
    for (auto [v, b] : assumptions.bindings())
      if (r.model->value(v) != b)
        throw std::logic_error("solver model contradicts the assumptions");
  }
  return r;
}

AllSatResult solve_all(const Cnf &cnf, const SolverConfig &config,
                       const std::vector<Var> &project_to, std::size_t limit,
                       const PartialAssignment &assumptions,
                       std::stop_token stop) {
  if (project_to.empty())
    throw InputError("solve_all needs a non-empty projection");
  for (Var v : project_to)
    if (v == 0 || v > cnf.num_vars())
      throw InputError("projection variable out of range");
  AllSatResult out;
  Solver solver(cnf, config);
  while (out.models.size() < limit) {
    SolveResult r = solver.solve(assumptions, stop);
    out.stats.seconds += r.stats.seconds;
    out.stats.decisions += r.stats.decisions;
    out.stats.conflicts += r.stats.conflicts;
    out.stats.propagations += r.stats.propagations;
    out.stats.restarts += r.stats.restarts;
    out.stats.fallback_decisions += r.stats.fallback_decisions;
    out.stats.interrupted = out.stats.interrupted || r.stats.interrupted;
    if (r.status == SolveStatus::Unsat)
      return out;
    if (r.status == SolveStatus::BudgetExceeded) {
      out.budget_exceeded = true;
      return out;
    }
    if (!evaluate(cnf, *r.model))
      throw std::logic_error("solver returned a model that violates the CNF");
    std::vector<std::uint8_t> proj;
    std::vector<Literal> block;
    proj.reserve(project_to.size());
    for (Var v : project_to) {
      bool b = *r.model->value(v);
      proj.push_back(b ? 1 : 0);
      block.emplace_back(v, !b);
    }
    out.models.push_back(std::move(proj));
    if (!solver.add_clause(Clause(std::move(block))))
      return out;
  }
  // One more call tells whether the limit cut the enumeration short.
  SolveResult r = solver.solve(assumptions, stop);
  out.truncated = r.status != SolveStatus::Unsat;
  return out;
}

std::variant<PartialAssignment, Conflict>
propagate_only(const Cnf &cnf, const PartialAssignment &pa) {
  if (pa.max_var() > cnf.num_vars())
    throw InputError("binding beyond num_vars");
  SolverConfig cfg;
  cfg.input_priority = false;
  Solver solver(cnf, cfg);
  auto fix = solver.propagate(pa);
  if (!fix)
    return Conflict{};
  return std::move(*fix);
}

} // namespace logcrypt
