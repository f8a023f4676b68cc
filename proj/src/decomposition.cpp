#include "logcrypt/decomposition.hpp"

#include "logcrypt/error.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <random>
#include <set>
#include <thread>

namespace logcrypt {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
    s.remove_suffix(1);
  return s;
}

std::optional<std::uint64_t> to_number(std::string_view s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    return std::nullopt;
  return v;
}

} // namespace

DecompositionSet parse_decomposition(const Cnf &cnf, std::string_view text) {
  std::map<std::string, Var, std::less<>> by_name;
  for (const InputVar &in : cnf.inputs())
    by_name.emplace(in.name, in.var);
  auto lookup = [&](std::string_view name) {
    auto it = by_name.find(name);
    if (it == by_name.end())
      throw InputError("'" + std::string(name) + "' is not an input variable");
    return it->second;
  };

  DecompositionSet out;
  if (trim(text).empty())
    throw InputError("empty decomposition set");
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos)
      comma = text.size();
    std::string_view item = trim(text.substr(pos, comma - pos));
    pos = comma + 1;
    if (item.empty())
      throw InputError("empty item in decomposition set");
    std::size_t dash = item.find('-');
    if (dash != std::string_view::npos && dash > 0) {
      auto lo = to_number(trim(item.substr(0, dash)));
      auto hi = to_number(trim(item.substr(dash + 1)));
      if (!lo || !hi || *lo > *hi)
        throw InputError("bad range '" + std::string(item) + "'");
      for (std::uint64_t n = *lo; n <= *hi; ++n)
        out.vars.push_back(lookup(std::to_string(n)));
    } else {
      out.vars.push_back(lookup(item));
    }
  }
  check_decomposition(cnf, out);
  return out;
}

std::string format_decomposition(const Cnf &cnf, const DecompositionSet &set) {
  std::map<Var, std::string> names;
  for (const InputVar &in : cnf.inputs())
    names.emplace(in.var, in.name);
  std::string out;
  std::size_t i = 0;
  while (i < set.vars.size()) {
    auto it = names.find(set.vars[i]);
    if (it == names.end())
      throw InputError("variable " + std::to_string(set.vars[i]) +
                       " is not an input variable");
    std::string first = it->second;
    std::size_t j = i;
    if (auto start = to_number(first)) {
      while (j + 1 < set.vars.size()) {
        auto next = names.find(set.vars[j + 1]);
        if (next == names.end())
          break;
        auto n = to_number(next->second);
        if (!n || *n != *start + (j + 1 - i))
          break;
        ++j;
      }
    }
    if (!out.empty())
      out.push_back(',');
    out += first;
    if (j > i)
      out += "-" + names[set.vars[j]];
    i = j + 1;
  }
  return out;
}

void check_decomposition(const Cnf &cnf, const DecompositionSet &set) {
  std::set<Var> inputs;
  for (Var v : cnf.input_vars())
    inputs.insert(v);
  std::set<Var> seen;
  for (Var v : set.vars) {
    if (!inputs.count(v))
      throw InputError("variable " + std::to_string(v) +
                       " is not an input variable");
    if (!seen.insert(v).second)
      throw InputError("variable " + std::to_string(v) +
                       " repeated in decomposition set");
  }
}

DecompositionSet full_input_set(const Cnf &cnf) {
  return DecompositionSet{cnf.input_vars()};
}

PartialAssignment cell_assignment(const DecompositionSet &set, const Bits &y) {
  if (y.size() != set.vars.size())
    throw InputError("cell vector length does not match the set's power");
  PartialAssignment pa;
  for (std::size_t i = 0; i < y.size(); ++i)
    pa.bind(set.vars[i], y[i] != 0);
  return pa;
}

Bits cell_vector(std::size_t power, std::uint64_t index) {
  Bits y(power, 0);
  for (std::size_t i = 0; i < power && i < 64; ++i)
    y[power - 1 - i] = static_cast<std::uint8_t>((index >> i) & 1u);
  return y;
}

CellFamily::CellFamily(const Cnf &cnf, DecompositionSet set)
    : cnf_(&cnf), set_(std::move(set)) {
  check_decomposition(cnf, set_);
  if (set_.power() >= 64)
    throw InputError("decomposition set too large to enumerate");
}

std::uint64_t CellFamily::size() const {
  return std::uint64_t{1} << set_.power();
}

Bits CellFamily::vector(std::uint64_t j) const {
  return cell_vector(set_.power(), j);
}

Cnf CellFamily::operator[](std::uint64_t j) const {
  return substitute(*cnf_, cell_assignment(set_, vector(j)));
}

CellFamily cells(const Cnf &cnf, const DecompositionSet &set) {
  return CellFamily(cnf, set);
}

void PredictionParams::validate() const {
  if (q == 0)
    throw InputError("Q must be at least 1");
  if (r == 0)
    throw InputError("R must be at least 1");
  if (g_budget && !(*g_budget > 0.0))
    throw InputError("g_budget must be positive");
  if (workers == 0)
    throw InputError("workers must be at least 1");
}

CellSample sample_cells(const Cnf &cnf, const DecompositionSet &set,
                        const PredictionParams &params) {
  params.validate();
  check_decomposition(cnf, set);
  CellSample out;
  std::size_t d = set.power();
  if (d < 64 && (std::uint64_t{1} << d) <= params.r) {
    out.exhaustive = true;
    for (std::uint64_t j = 0; j < (std::uint64_t{1} << d); ++j)
      out.vectors.push_back(cell_vector(d, j));
    return out;
  }
  std::mt19937_64 rng(params.seed);
  out.vectors.reserve(params.q);
  for (std::size_t i = 0; i < params.q; ++i) {
    Bits y(d);
    std::uint64_t word = 0;
    for (std::size_t b = 0; b < d; ++b) {
      if (b % 64 == 0)
        word = rng();
      y[b] = static_cast<std::uint8_t>((word >> (b % 64)) & 1u);
    }
    out.vectors.push_back(std::move(y));
  }
  return out;
}

CellSolver solver_cell_solver(SolverConfig config) {
  return [config](const Cnf &cnf, const PartialAssignment &cell,
                  double time_limit, std::stop_token stop) {
    SolverConfig cfg = config;
    if (std::isfinite(time_limit))
      cfg.max_seconds = std::max(
          1e-6, cfg.max_seconds ? std::min(*cfg.max_seconds, time_limit)
                                : time_limit);
    SolveResult r = solve(cnf, cell, cfg, std::move(stop));
    return CellTiming{r.status, r.stats.seconds};
  };
}

std::string to_string(PredictionStatus s) {
  switch (s) {
  case PredictionStatus::Estimated:
    return "estimated";
  case PredictionStatus::Exact:
    return "exact";
  case PredictionStatus::Undefined:
    return "undefined";
  case PredictionStatus::Dominated:
    return "dominated";
  }
  return "?";
}

namespace {

// Shared bookkeeping of one T evaluation.
struct Evaluation {
  double g;
  double tau_cap; // tau above which the running T exceeds the incumbent
  double tau = 0.0;
  std::size_t solved = 0;
  std::size_t sat = 0;
  std::optional<PredictionStatus> aborted;

  [[nodiscard]] double limit() const {
    return std::max(0.0, std::min(g - tau, tau_cap - tau));
  }

  // Returns true when the evaluation must stop.
  bool account(const CellTiming &t, double limit_used) {
    tau += t.seconds;
    if (t.status != SolveStatus::BudgetExceeded)
      ++solved;
    if (t.status == SolveStatus::Sat)
      ++sat;
    if (aborted)
      return true;
    if (tau >= g)
      aborted = PredictionStatus::Undefined;
    else if (tau > tau_cap)
      aborted = PredictionStatus::Dominated;
    else if (t.status == SolveStatus::BudgetExceeded)
      // the cell hit its own limit just short of a bound
      aborted = g - (tau - t.seconds) <= limit_used + 1e-12
                    ? PredictionStatus::Undefined
                    : PredictionStatus::Dominated;
    return aborted.has_value();
  }
};

} // namespace

PredictionOutcome predict(const Cnf &cnf, const DecompositionSet &set,
                          const PredictionParams &params,
                          const CellSolver &solver,
                          std::optional<double> incumbent,
                          std::stop_token stop) {
  params.validate();
  if (!params.g_budget)
    throw InputError("predict needs a g_budget");
  CellSample sample = sample_cells(cnf, set, params);
  double scale = sample.exhaustive
                     ? 1.0
                     : std::ldexp(1.0, static_cast<int>(set.power())) /
                           static_cast<double>(params.q);

  Evaluation ev;
  ev.g = *params.g_budget;
  ev.tau_cap = incumbent ? *incumbent / scale
                         : std::numeric_limits<double>::infinity();

  PredictionOutcome out;
  out.cells_planned = sample.vectors.size();
  std::size_t workers =
      std::min<std::size_t>(params.workers, sample.vectors.size());

  if (workers <= 1) {
    for (const Bits &y : sample.vectors) {
      if (stop.stop_requested()) {
        ev.aborted = PredictionStatus::Undefined;
        break;
      }
      double lim = ev.limit();
      CellTiming t = solver(cnf, cell_assignment(set, y), lim, stop);
      if (ev.account(t, lim))
        break;
    }
  } else {
    std::mutex mu;
    std::atomic<std::size_t> next{0};
    std::stop_source halt;
    std::stop_callback forward(stop, [&] { halt.request_stop(); });
    auto work = [&] {
      while (!halt.stop_requested()) {
        std::size_t i = next.fetch_add(1);
        if (i >= sample.vectors.size())
          return;
        double lim;
        {
          std::lock_guard lock(mu);
          lim = ev.limit();
        }
        CellTiming t = solver(cnf, cell_assignment(set, sample.vectors[i]), lim,
                              halt.get_token());
        std::lock_guard lock(mu);
        if (ev.account(t, lim))
          halt.request_stop();
      }
    };
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back(work);
    }
    if (!ev.aborted && stop.stop_requested())
      ev.aborted = PredictionStatus::Undefined;
  }

  out.tau = ev.tau;
  out.cells_solved = ev.solved;
  out.sat_cells = ev.sat;
  if (ev.aborted) {
    out.status = *ev.aborted;
  } else {
    out.status =
        sample.exhaustive ? PredictionStatus::Exact : PredictionStatus::Estimated;
    out.T = scale * ev.tau;
  }
  return out;
}

double default_g_budget(const Cnf &cnf, const DecompositionSet &set,
                        const PredictionParams &params,
                        const CellSolver &solver) {
  CellSample sample = sample_cells(cnf, set, params);
  std::size_t pilot = std::min<std::size_t>(20, sample.vectors.size());
  std::vector<double> times;
  for (std::size_t i = 0; i < pilot; ++i)
    times.push_back(
        solver(cnf, cell_assignment(set, sample.vectors[i]), 60.0, {}).seconds);
  double median = 0.0;
  if (!times.empty()) {
    std::nth_element(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(times.size() / 2),
                     times.end());
    median = times[times.size() / 2];
  }
  return std::max(60.0, 10.0 * static_cast<double>(params.q) * median);
}

PredictionOutcome predict(const Cnf &cnf, const DecompositionSet &set,
                          const PredictionParams &params,
                          const SolverConfig &config) {
  CellSolver solver = solver_cell_solver(config);
  PredictionParams p = params;
  if (!p.g_budget)
    p.g_budget = default_g_budget(cnf, set, params, solver);
  return predict(cnf, set, p, solver);
}

Strategy parse_strategy(std::string_view text) {
  if (text == "remove-last")
    return Strategy::RemoveLast;
  if (text == "greedy-best")
    return Strategy::GreedyBest;
  throw InputError("unknown strategy '" + std::string(text) +
                   "' (remove-last, greedy-best)");
}

std::string to_string(Strategy s) {
  return s == Strategy::RemoveLast ? "remove-last" : "greedy-best";
}

MinimizeResult minimize(const Cnf &cnf, const DecompositionSet &initial,
                        Strategy strategy, const PredictionParams &params,
                        const CellSolver &solver) {
  params.validate();
  check_decomposition(cnf, initial);
  if (initial.vars.empty())
    throw InputError("the initial decomposition set is empty");
  PredictionParams p = params;
  if (!p.g_budget)
    p.g_budget = default_g_budget(cnf, initial, params, solver);

  MinimizeResult res;
  PredictionOutcome first = predict(cnf, initial, p, solver);
  if (!first.T)
    throw InputError("the predictive function is undefined at the initial "
                     "set; start from a larger set or raise the time budget");
  res.best = initial;
  res.best_outcome = first;
  double best_T = *first.T;
  std::size_t iteration = 0;
  res.trace.push_back({iteration++, initial, first, best_T, true});

  auto record = [&](const DecompositionSet &set, const PredictionOutcome &o) {
    bool better = o.T && *o.T < best_T;
    if (better) {
      best_T = *o.T;
      res.best = set;
      res.best_outcome = o;
    }
    res.trace.push_back({iteration++, set, o, best_T, better});
    return better;
  };

  if (strategy == Strategy::RemoveLast) {
    DecompositionSet cur = initial;
    while (cur.power() > 1) {
      cur.vars.pop_back();
      record(cur, predict(cnf, cur, p, solver, best_T));
    }
    return res;
  }

  DecompositionSet cur = initial;
  while (cur.power() > 1) {
    bool improved = false;
    DecompositionSet round_best;
    for (std::size_t i = 0; i < cur.power(); ++i) {
      DecompositionSet cand = cur;
      cand.vars.erase(cand.vars.begin() + static_cast<std::ptrdiff_t>(i));
      if (record(cand, predict(cnf, cand, p, solver, best_T))) {
        improved = true;
        round_best = cand;
      }
    }
    if (!improved)
      break;
    cur = round_best;
  }
  return res;
}

MinimizeResult minimize(const Cnf &cnf, const DecompositionSet &initial,
                        Strategy strategy, const PredictionParams &params,
                        const SolverConfig &config) {
  return minimize(cnf, initial, strategy, params, solver_cell_solver(config));
}

void write_trace_csv(std::ostream &out, const std::vector<TraceRecord> &trace) {
  auto precision = out.precision(10);
  out << "iteration,power,tau,T,status\n";
  for (const TraceRecord &r : trace) {
    out << r.iteration << ',' << r.set.power() << ',' << r.outcome.tau << ',';
    if (r.outcome.T)
      out << *r.outcome.T;
    out << ',' << to_string(r.outcome.status) << '\n';
  }
  out.precision(precision);
}

} // namespace logcrypt
