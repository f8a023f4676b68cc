#include "cli.hpp"

#include "logcrypt/decomposition.hpp"
#include "logcrypt/dimacs.hpp"
#include "logcrypt/encoder.hpp"
#include "logcrypt/error.hpp"
#include "logcrypt/generator_config.hpp"
#include "logcrypt/generators.hpp"
#include "logcrypt/runner.hpp"
#include "logcrypt/solver.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

namespace logcrypt::cli {

namespace {

constexpr const char *kA51Decomposition = "1-9,20-30,42-52";

struct Options {
  std::string gen;
  std::string spec;
  std::string key_hex;
  std::string keystream;
  std::size_t len = 144;
  std::vector<std::size_t> lens;
  std::vector<std::string> decomps;
  std::string cnf;
  std::size_t q = 1000;
  std::uint64_t r = 4096;
  std::optional<double> g_budget;
  std::uint64_t seed = 1;
  std::optional<std::size_t> k;
  unsigned workers = 1;
  std::string mode = "first";
  std::string strategy = "remove-last";
  std::string out;
  std::string trace_csv;
  std::string batch_csv;
  std::string manifest;
  std::optional<double> deadline;
  std::optional<std::uint64_t> max_conflicts;
  std::optional<double> cell_seconds;
  bool baseline_solver = false;
};

GeneratorSpec resolve_generator(const Options &o) {
  if (!o.gen.empty() && !o.spec.empty())
    throw InputError("--gen and --spec are mutually exclusive");
  if (!o.spec.empty())
    return load_generator_spec(o.spec);
  if (o.gen.empty())
    throw InputError("one of --gen or --spec is required");
  return builtin_generator(o.gen);
}

bool is_standard_a51(const GeneratorSpec &gen) {
  auto *a = std::get_if<A51Spec>(&gen);
  return a && *a == A51Spec::standard();
}

std::vector<std::string> default_decomps(const Options &o, const Cnf &cnf,
                                         const GeneratorSpec *gen) {
  if (!o.decomps.empty())
    return o.decomps;
  if (gen && is_standard_a51(*gen))
    return {kA51Decomposition};
  return {format_decomposition(cnf, full_input_set(cnf))};
}

SolverConfig solver_config(const Options &o) {
  SolverConfig c = o.baseline_solver ? SolverConfig::baseline() : SolverConfig{};
  c.max_conflicts = o.max_conflicts;
  c.max_seconds = o.cell_seconds;
  c.validate();
  return c;
}

PredictionParams prediction_params(const Options &o) {
  PredictionParams p;
  p.q = o.q;
  p.r = o.r;
  p.g_budget = o.g_budget;
  p.seed = o.seed;
  p.workers = o.workers;
  p.validate();
  return p;
}

/// The observed keystream of length `len`: the --keystream prefix, the
/// output of --key-hex, or (when `allow_random`) the output of a key drawn
/// from --seed.
Bits observed_keystream(const Options &o, const GeneratorSpec &gen,
                        std::size_t len, bool allow_random) {
  if (!o.keystream.empty() && !o.key_hex.empty())
    throw InputError("--keystream and --key-hex are mutually exclusive");
  if (!o.keystream.empty()) {
    Bits ks = parse_bit_string(o.keystream);
    if (ks.size() < len)
      throw InputError("--keystream has " + std::to_string(ks.size()) +
                       " bits, " + std::to_string(len) + " are needed");
    ks.resize(len);
    return ks;
  }
  if (!o.key_hex.empty())
    return keystream(gen, parse_key_hex(gen, o.key_hex), len);
  if (!allow_random)
    throw InputError("one of --keystream or --key-hex is required");
  std::mt19937_64 rng(o.seed);
  Bits key(key_bits(gen));
  for (auto &b : key)
    b = static_cast<std::uint8_t>(rng() & 1u);
  return keystream(gen, key, len);
}

/// Keystream length for attack-like commands: the --keystream length unless
/// --len was given explicitly.
std::size_t attack_length(const Options &o, bool len_given) {
  if (!o.keystream.empty() && !len_given)
    return parse_bit_string(o.keystream).size();
  return o.len;
}

class Output {
public:
  Output(const std::string &path, std::ostream &fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_)
        throw IoError("cannot write " + path);
      os_ = &file_;
    }
  }
  std::ostream &operator*() { return *os_; }
  void close(const std::string &path) {
    os_->flush();
    if (!*os_)
      throw IoError("write failed for " + (path.empty() ? "stdout" : path));
  }

private:
  std::ofstream file_;
  std::ostream *os_;
};

std::string format_T(const std::optional<double> &t) {
  if (!t)
    return "";
  std::ostringstream s;
  s << std::setprecision(10) << *t;
  return s.str();
}

int cmd_keystream(const Options &o, std::ostream &out) {
  GeneratorSpec gen = resolve_generator(o);
  if (o.key_hex.empty())
    throw InputError("--key-hex is required");
  out << format_bits(keystream(gen, parse_key_hex(gen, o.key_hex), o.len)) << '\n';
  return kFound;
}

int cmd_encode(const Options &o, std::ostream &out) {
  GeneratorSpec gen = resolve_generator(o);
  Encoding enc = encode(gen, o.len);
  Cnf cnf = enc.cnf;
  if (!o.keystream.empty() || !o.key_hex.empty())
    cnf = bind_keystream(enc, observed_keystream(o, gen, o.len, false));
  Output dest(o.out, out);
  write_dimacs(*dest, cnf);
  dest.close(o.out);
  return kFound;
}

struct Instance {
  Cnf cnf;
  std::optional<GeneratorSpec> gen;
};

/// The CNF to predict on: --cnf as given, or the generator encoding of
/// length `len` bound to the observed keystream.
Instance prediction_instance(const Options &o, std::size_t len) {
  if (!o.cnf.empty()) {
    if (!o.gen.empty() || !o.spec.empty())
      throw InputError("--cnf cannot be combined with --gen or --spec");
    return {read_dimacs_file(o.cnf), std::nullopt};
  }
  GeneratorSpec gen = resolve_generator(o);
  Encoding enc = encode(gen, len);
  return {bind_keystream(enc, observed_keystream(o, gen, len, true)), gen};
}

PredictionOutcome run_predict(const Cnf &cnf, const DecompositionSet &set,
                              PredictionParams p, const SolverConfig &config,
                              std::stop_token stop) {
  CellSolver solver = solver_cell_solver(config);
  if (!p.g_budget)
    p.g_budget = default_g_budget(cnf, set, p, solver);
  return predict(cnf, set, p, solver, std::nullopt, stop);
}

int cmd_predict(const Options &o, std::ostream &out, std::stop_token stop) {
  PredictionParams params = prediction_params(o);
  SolverConfig config = solver_config(o);
  std::vector<std::size_t> lens = o.lens.empty() ? std::vector{o.len} : o.lens;
  if (!o.cnf.empty() && !o.lens.empty())
    throw InputError("--lens applies to generator input, not to --cnf");

  Output dest(o.out, out);
  *dest << "len,power,decomposition,tau,T,status,cells\n";
  for (std::size_t len : lens) {
    Instance inst = prediction_instance(o, len);
    for (const std::string &text :
         default_decomps(o, inst.cnf, inst.gen ? &*inst.gen : nullptr)) {
      DecompositionSet set = parse_decomposition(inst.cnf, text);
      if (stop.stop_requested())
        break;
      PredictionOutcome r = run_predict(inst.cnf, set, params, config, stop);
      *dest << (o.cnf.empty() ? std::to_string(len) : "") << ',' << set.power()
            << ",\"" << text << "\"," << std::setprecision(10) << r.tau << ','
            << format_T(r.T) << ',' << to_string(r.status) << ','
            << r.cells_solved << '\n';
    }
  }
  dest.close(o.out);
  return stop.stop_requested() ? kBudget : kFound;
}

int cmd_optimize(const Options &o, std::ostream &out) {
  if (o.decomps.size() > 1)
    throw InputError("optimize takes a single --decomp");
  PredictionParams params = prediction_params(o);
  SolverConfig config = solver_config(o);
  Instance inst = prediction_instance(o, o.len);
  std::string text =
      default_decomps(o, inst.cnf, inst.gen ? &*inst.gen : nullptr).front();
  DecompositionSet initial = parse_decomposition(inst.cnf, text);
  MinimizeResult res =
      minimize(inst.cnf, initial, parse_strategy(o.strategy), params, config);

  out << "strategy=" << o.strategy << '\n'
      << "initial=" << text << '\n'
      << "best=" << format_decomposition(inst.cnf, res.best) << '\n'
      << "power=" << res.best.power() << '\n'
      << "T=" << format_T(res.best_outcome.T) << '\n'
      << "status=" << to_string(res.best_outcome.status) << '\n'
      << "evaluations=" << res.trace.size() << '\n';
  if (!o.trace_csv.empty()) {
    Output trace(o.trace_csv, out);
    write_trace_csv(*trace, res.trace);
    trace.close(o.trace_csv);
  }
  return kFound;
}

int exit_for(AttackStatus s) {
  switch (s) {
  case AttackStatus::Found:
    return kFound;
  case AttackStatus::Exhausted:
    return kExhausted;
  default:
    return kBudget;
  }
}

int cmd_attack(const Options &o, bool len_given, bool find_all,
               std::ostream &out, std::stop_token stop) {
  GeneratorSpec gen = resolve_generator(o);
  std::size_t len = attack_length(o, len_given);
  Bits stream = observed_keystream(o, gen, len, false);
  Encoding enc = encode(gen, len);

  AttackConfig cfg;
  cfg.workers = o.workers;
  cfg.k = o.k;
  cfg.mode = find_all ? AttackMode::FindAll : parse_attack_mode(o.mode);
  cfg.solver = solver_config(o);
  cfg.deadline_seconds = o.deadline;

  std::string text;
  if (!o.manifest.empty()) {
    if (!o.decomps.empty() || o.k)
      throw InputError("--manifest fixes the decomposition and k");
    std::ifstream in(o.manifest);
    if (!in)
      throw IoError("cannot open " + o.manifest);
    Manifest m = read_manifest(in);
    text = m.decomposition;
    cfg.k = m.k;
    std::vector<std::size_t> only;
    for (const ManifestEntry &e : m.entries)
      only.push_back(e.index);
    cfg.only_batches = std::move(only);
  } else {
    if (o.decomps.size() > 1)
      throw InputError("attack takes a single --decomp");
    text = default_decomps(o, enc.cnf, &gen).front();
  }
  DecompositionSet set = parse_decomposition(enc.cnf, text);

  AttackResult res = run_attack(gen, enc, stream, set, cfg, stop);

  out << "status=" << to_string(res.status) << '\n'
      << "mode=" << (cfg.mode == AttackMode::FindAll ? "all" : "first") << '\n'
      << "decomposition=" << text << '\n'
      << "power=" << set.power() << '\n'
      << "k=" << res.k << '\n'
      << "workers=" << cfg.workers << '\n'
      << "cells_total=" << res.cells_total << '\n'
      << "cells_solved=" << res.cells_solved << '\n'
      << "cells_skipped=" << res.cells_skipped << '\n'
      << "seconds=" << res.seconds << '\n'
      << "keys=" << res.keys.size() << '\n';
  for (const Bits &key : res.keys) {
    if (!verify_key(gen, key, stream))
      throw std::logic_error("key " + format_key_hex(gen, key) +
                             " does not reproduce the keystream");
    out << "key=" << format_key_hex(gen, key) << " verified=1\n";
  }
  if (!o.batch_csv.empty()) {
    Output csv(o.batch_csv, out);
    write_batch_csv(*csv, res);
    csv.close(o.batch_csv);
  }
  return exit_for(res.status);
}

int cmd_manifest(const Options &o, std::ostream &out) {
  Cnf cnf;
  const GeneratorSpec *genp = nullptr;
  std::optional<GeneratorSpec> gen;
  if (!o.cnf.empty()) {
    cnf = read_dimacs_file(o.cnf);
  } else {
    gen = resolve_generator(o);
    genp = &*gen;
    cnf = encode(*gen, o.len).cnf;
  }
  if (o.decomps.size() > 1)
    throw InputError("manifest takes a single --decomp");
  DecompositionSet set =
      parse_decomposition(cnf, default_decomps(o, cnf, genp).front());
  Output dest(o.out, out);
  export_manifest(*dest, cnf, set,
                  o.k.value_or(default_batch_prefix(set.power(), o.workers)));
  dest.close(o.out);
  return kFound;
}

int cmd_verify(const Options &o, std::ostream &out) {
  GeneratorSpec gen = resolve_generator(o);
  if (o.key_hex.empty() || o.keystream.empty())
    throw InputError("verify needs --key-hex and --keystream");
  bool ok = verify_key(gen, parse_key_hex(gen, o.key_hex),
                       parse_bit_string(o.keystream));
  out << "verified=" << (ok ? 1 : 0) << '\n';
  return ok ? kFound : kExhausted;
}

void add_generator(CLI::App *c, Options &o) {
  c->add_option("--gen", o.gen, "built-in generator (a51, threshold5, summation4, gifford)");
  c->add_option("--spec", o.spec, "generator description (JSON file)");
}

void add_solver(CLI::App *c, Options &o) {
  c->add_flag("--baseline-solver", o.baseline_solver,
              "stock branching: no input priority, decay, random decisions");
  c->add_option("--max-conflicts", o.max_conflicts, "conflict budget per solver call");
  c->add_option("--cell-seconds", o.cell_seconds, "time budget per solver call");
}

void add_prediction(CLI::App *c, Options &o) {
  c->add_option("--cnf", o.cnf, "DIMACS input instead of a generator");
  c->add_option("--decomp", o.decomps, "decomposition set, e.g. 1-9,20-30,42-52");
  c->add_option("--q", o.q, "sample size")->check(CLI::PositiveNumber);
  c->add_option("--r", o.r, "exact evaluation threshold on 2^d")->check(CLI::PositiveNumber);
  c->add_option("--g-budget", o.g_budget, "time budget in seconds (default from a pilot run)");
  c->add_option("--seed", o.seed, "random seed");
  c->add_option("--workers", o.workers, "cells solved in parallel")->check(CLI::PositiveNumber);
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out,
        std::ostream &err, std::stop_token stop) {
  Options o;
  CLI::App app{"Keystream generator inversion with SAT", "logcrypt"};
  app.require_subcommand(1);

  auto *ks = app.add_subcommand("keystream", "print keystream bits for a key");
  add_generator(ks, o);
  ks->add_option("--key-hex", o.key_hex, "key as colon-separated hex");
  ks->add_option("--len", o.len, "keystream length in bits");

  auto *en = app.add_subcommand("encode", "write the generator CNF in DIMACS");
  add_generator(en, o);
  en->add_option("--len", o.len, "keystream length in bits");
  en->add_option("--keystream", o.keystream, "bind these output bits (0/1 or 0x hex)");
  en->add_option("--key-hex", o.key_hex, "bind the output of this key");
  en->add_option("--out", o.out, "output file (default stdout)");

  auto *pr = app.add_subcommand("predict", "evaluate the predictive function");
  add_generator(pr, o);
  add_prediction(pr, o);
  add_solver(pr, o);
  pr->add_option("--len", o.len, "keystream length in bits");
  pr->add_option("--lens", o.lens, "grid of keystream lengths")->delimiter(',');
  pr->add_option("--keystream", o.keystream, "observed keystream");
  pr->add_option("--key-hex", o.key_hex, "planted key (default: random from --seed)");
  pr->add_option("--out", o.out, "CSV report file (default stdout)");

  auto *op = app.add_subcommand("optimize", "minimize the predictive function");
  add_generator(op, o);
  add_prediction(op, o);
  add_solver(op, o);
  op->add_option("--len", o.len, "keystream length in bits");
  op->add_option("--keystream", o.keystream, "observed keystream");
  op->add_option("--key-hex", o.key_hex, "planted key (default: random from --seed)");
  op->add_option("--strategy", o.strategy, "remove-last or greedy-best");
  op->add_option("--trace-csv", o.trace_csv, "write the search trace");

  CLI::Option *attack_len = nullptr, *coll_len = nullptr;
  auto add_attack = [&](CLI::App *c, bool with_mode) {
    add_generator(c, o);
    add_solver(c, o);
    c->add_option("--keystream", o.keystream, "observed keystream (0/1 or 0x hex)");
    c->add_option("--key-hex", o.key_hex, "planted key; its output is attacked");
    c->add_option("--decomp", o.decomps, "decomposition set");
    c->add_option("--k", o.k, "batch prefix length");
    c->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
    if (with_mode)
      c->add_option("--mode", o.mode, "first or all")->check(CLI::IsMember({"first", "all"}));
    c->add_option("--deadline", o.deadline, "overall time limit in seconds");
    c->add_option("--manifest", o.manifest, "run the batches listed in this manifest");
    c->add_option("--batch-csv", o.batch_csv, "write per-batch timings");
    return c->add_option("--len", o.len, "keystream length (default: --keystream length, else 144)");
  };
  auto *at = app.add_subcommand("attack", "recover the key from a keystream");
  attack_len = add_attack(at, true);
  auto *co = app.add_subcommand("collisions", "find every key producing a keystream");
  coll_len = add_attack(co, false);

  auto *ma = app.add_subcommand("manifest", "write the batch manifest");
  add_generator(ma, o);
  ma->add_option("--cnf", o.cnf, "DIMACS input instead of a generator");
  ma->add_option("--len", o.len, "keystream length in bits");
  ma->add_option("--decomp", o.decomps, "decomposition set");
  ma->add_option("--k", o.k, "batch prefix length");
  ma->add_option("--workers", o.workers, "workers used for the default k")->check(CLI::PositiveNumber);
  ma->add_option("--out", o.out, "output file (default stdout)");

  auto *ve = app.add_subcommand("verify", "check that a key reproduces a keystream");
  add_generator(ve, o);
  ve->add_option("--key-hex", o.key_hex, "key as colon-separated hex");
  ve->add_option("--keystream", o.keystream, "observed keystream");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*ks)
      return cmd_keystream(o, out);
    if (*en)
      return cmd_encode(o, out);
    if (*pr)
      return cmd_predict(o, out, stop);
    if (*op)
      return cmd_optimize(o, out);
    if (*at)
      return cmd_attack(o, attack_len->count() > 0, false, out, stop);
    if (*co)
      return cmd_attack(o, coll_len->count() > 0, true, out, stop);
    if (*ma)
      return cmd_manifest(o, out);
    if (*ve)
      return cmd_verify(o, out);
  } catch (const IoError &e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const ParseError &e) {
    err << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const InputError &e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::logic_error &e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}

} // namespace logcrypt::cli
