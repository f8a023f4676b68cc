#include "logcrypt/error.hpp"
#include "logcrypt/runner.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

using namespace logcrypt;

namespace {

ThresholdSpec toy_threshold() {
  return ThresholdSpec{{{5, {3, 5}}, {6, {5, 6}}, {7, {6, 7}}}};
}

DecompositionSet first_vars(std::size_t d) {
  DecompositionSet s;
  for (Var v = 1; v <= d; ++v)
    s.vars.push_back(v);
  return s;
}

} // namespace

TEST(Batches, Counting) {
  auto b = make_batches(first_vars(3), 1);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0].cell_count(), 4u);
  EXPECT_EQ(b[0].prefix, Bits{0});
  EXPECT_EQ(b[1].prefix, Bits{1});
  EXPECT_EQ(b[1].index, 2u);
  EXPECT_EQ(b[1].cell(2), (Bits{1, 1, 0}));

  auto whole = make_batches(first_vars(3), 0);
  ASSERT_EQ(whole.size(), 1u);
  EXPECT_EQ(whole[0].cell_count(), 8u);

  auto big = make_batches(first_vars(31), 18);
  EXPECT_EQ(big.size(), std::size_t{1} << 18);
  EXPECT_EQ(big.back().cell_count(), std::uint64_t{1} << 13);

  EXPECT_THROW((void)make_batches(first_vars(3), 4), InputError);
}

TEST(Batches, PartitionTheFamily) {
  for (std::size_t k = 0; k <= 6; ++k) {
    std::set<Bits> cells;
    std::uint64_t total = 0;
    for (const Batch &b : make_batches(first_vars(6), k))
      for (std::uint64_t j = 0; j < b.cell_count(); ++j) {
        EXPECT_TRUE(cells.insert(b.cell(j)).second);
        ++total;
      }
    EXPECT_EQ(total, 64u);
    EXPECT_EQ(cells.size(), 64u);
  }
}

TEST(Batches, DefaultPrefix) {
  EXPECT_EQ(default_batch_prefix(31, 1), 2u);
  EXPECT_EQ(default_batch_prefix(31, 8), 5u);
  EXPECT_EQ(default_batch_prefix(31, 3), 4u);
  EXPECT_EQ(default_batch_prefix(3, 8), 3u);
}

TEST(Attack, RecoversPlantedKey) {
  auto gen = toy_threshold();
  auto enc = encode(gen, 36);
  std::mt19937_64 rng(61);
  for (int i = 0; i < 3; ++i) {
    Bits key = oracle::random_bits(rng, 18);
    Bits stream = oracle::threshold(gen, key, 36);
    AttackConfig cfg;
    cfg.workers = 4;
    cfg.k = 2;
    auto res = run_attack(gen, enc, stream, first_vars(8), cfg);
    ASSERT_EQ(res.status, AttackStatus::Found);
    ASSERT_FALSE(res.keys.empty());
    for (const Bits &k : res.keys)
      EXPECT_TRUE(verify_key(gen, k, stream));
  }
}

TEST(Attack, FindAllIndependentOfScheduling) {
  auto gen = toy_threshold();
  const std::size_t len = 20; // short enough to leave collisions
  auto enc = encode(gen, len);
  std::mt19937_64 rng(62);
  Bits key = oracle::random_bits(rng, 18);
  Bits stream = oracle::threshold(gen, key, len);
  std::set<Bits> expected;
  for (std::uint64_t k = 0; k < (1u << 18); ++k) {
    Bits cand = oracle::key_from_index(k, 18);
    if (oracle::threshold(gen, cand, len) == stream)
      expected.insert(cand);
  }
  ASSERT_GT(expected.size(), 1u);

  AttackConfig seq;
  seq.mode = AttackMode::FindAll;
  seq.workers = 1;
  seq.k = 0;
  auto base = run_attack(gen, enc, stream, first_vars(6), seq);
  EXPECT_EQ(base.status, AttackStatus::Found);
  EXPECT_EQ(std::set<Bits>(base.keys.begin(), base.keys.end()), expected);
  EXPECT_EQ(base.cells_solved, 64u);
  for (unsigned m : {2u, 3u}) {
    AttackConfig par = seq;
    par.workers = m;
    par.k = 3;
    auto res = run_attack(gen, enc, stream, first_vars(6), par);
    EXPECT_EQ(res.keys, base.keys);
    EXPECT_EQ(res.batches.size(), 8u);
  }
}

TEST(Attack, WrongStreamExhausts) {
  auto gen = toy_threshold();
  const std::size_t len = 60;
  auto enc = encode(gen, len);
  // find a stream with no preimage by brute force
  std::set<Bits> reachable;
  for (std::uint64_t k = 0; k < (1u << 18); ++k)
    reachable.insert(oracle::threshold(gen, oracle::key_from_index(k, 18), len));
  std::mt19937_64 rng(63);
  Bits stream;
  do
    stream = oracle::random_bits(rng, len);
  while (reachable.count(stream));
  AttackConfig cfg;
  cfg.workers = 2;
  auto res = run_attack(gen, enc, stream, first_vars(6), cfg);
  EXPECT_EQ(res.status, AttackStatus::Exhausted);
  EXPECT_TRUE(res.keys.empty());
  EXPECT_EQ(res.cells_solved, 64u);
  EXPECT_EQ(res.cells_skipped, 0u);
}

TEST(Attack, DeadlineStopsWork) {
  auto gen = A51Spec::standard();
  auto enc = encode(gen, 64);
  std::mt19937_64 rng(64);
  Bits stream = oracle::a51(gen, oracle::random_bits(rng, 64), 64);
  AttackConfig cfg;
  cfg.workers = 2;
  cfg.deadline_seconds = 0.3;
  auto start = std::chrono::steady_clock::now();
  auto res = run_attack(gen, enc, stream, first_vars(4), cfg);
  double took = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(res.status, AttackStatus::Deadline);
  EXPECT_LT(took, 5.0);
  EXPECT_GT(res.cells_skipped, 0u);
}

TEST(Attack, CancelledByCaller) {
  auto gen = A51Spec::standard();
  auto enc = encode(gen, 64);
  std::mt19937_64 rng(65);
  Bits stream = oracle::a51(gen, oracle::random_bits(rng, 64), 64);
  std::stop_source src;
  src.request_stop();
  auto res = run_attack(gen, enc, stream, first_vars(4), {}, src.get_token());
  EXPECT_EQ(res.status, AttackStatus::Cancelled);
}

TEST(Attack, PerCellBudgetMarksIncomplete) {
  auto gen = A51Spec::standard();
  auto enc = encode(gen, 64);
  std::mt19937_64 rng(66);
  Bits stream = oracle::a51(gen, oracle::random_bits(rng, 64), 64);
  AttackConfig cfg;
  cfg.solver.max_conflicts = 1;
  cfg.k = 0;
  auto res = run_attack(gen, enc, stream, first_vars(1), cfg);
  EXPECT_EQ(res.status, AttackStatus::Incomplete);
}

TEST(Attack, InputChecks) {
  auto gen = toy_threshold();
  auto enc = encode(gen, 20);
  AttackConfig cfg;
  EXPECT_THROW((void)run_attack(gen, enc, Bits(19, 0), first_vars(4), cfg), InputError);
  cfg.k = 5;
  EXPECT_THROW((void)run_attack(gen, enc, Bits(20, 0), first_vars(4), cfg), InputError);
  cfg.k = 1;
  cfg.workers = 0;
  EXPECT_THROW((void)run_attack(gen, enc, Bits(20, 0), first_vars(4), cfg), InputError);
  EXPECT_THROW((void)run_attack(gen, enc, Bits(20, 0), DecompositionSet{{30}}, {}),
               InputError);
}

TEST(Attack, BatchCsv) {
  auto gen = toy_threshold();
  auto enc = encode(gen, 30);
  std::mt19937_64 rng(67);
  Bits key = oracle::random_bits(rng, 18);
  AttackConfig cfg;
  cfg.mode = AttackMode::FindAll;
  cfg.k = 2;
  auto res = run_attack(gen, enc, oracle::threshold(gen, key, 30), first_vars(6), cfg);
  std::ostringstream out;
  write_batch_csv(out, res);
  std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "batch,prefix,cells,solved,seconds,worker");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
}

TEST(Manifest, RecordsAndRoundTrip) {
  auto enc = encode(toy_threshold(), 10);
  std::ostringstream out;
  export_manifest(out, enc.cnf, first_vars(3), 1);
  EXPECT_EQ(out.str(), "# decomposition 1-3\n# power 3\n# prefix 1\n1 0 4\n2 1 4\n");
  std::istringstream in(out.str());
  Manifest m = read_manifest(in);
  EXPECT_EQ(m.decomposition, "1-3");
  EXPECT_EQ(m.power, 3u);
  EXPECT_EQ(m.k, 1u);
  ASSERT_EQ(m.entries.size(), 2u);
  EXPECT_EQ(m.entries[1], (ManifestEntry{2, Bits{1}, 4}));

  std::ostringstream whole;
  export_manifest(whole, enc.cnf, first_vars(3), 0);
  EXPECT_NE(whole.str().find("\n1 - 8\n"), std::string::npos);
}

TEST(Manifest, FullScaleA51Split) {
  auto enc = encode(A51Spec::standard(), 4);
  std::ostringstream out;
  export_manifest(out, enc.cnf, parse_decomposition(enc.cnf, "1-9,20-30,42-52"), 18);
  std::istringstream in(out.str());
  Manifest m = read_manifest(in);
  EXPECT_EQ(m.entries.size(), std::size_t{1} << 18);
  EXPECT_EQ(m.entries.back().cells, 8192u);
  EXPECT_EQ(m.decomposition, "1-9,20-30,42-52");
}

TEST(Manifest, RejectsMalformed) {
  auto parse = [](const std::string &text) {
    std::istringstream in(text);
    return read_manifest(in);
  };
  std::string head = "# decomposition 1-3\n# power 3\n# prefix 1\n";
  EXPECT_THROW((void)parse(head + "1 0\n"), ParseError);
  EXPECT_THROW((void)parse(head + "1 01 4\n"), ParseError);
  EXPECT_THROW((void)parse(head + "1 0 3\n"), ParseError);
  EXPECT_THROW((void)parse(head + "2 0 4\n"), ParseError);
  EXPECT_THROW((void)parse(head + "1 x 4\n"), ParseError);
  EXPECT_THROW((void)parse("1 0 4\n"), ParseError);
}

TEST(Manifest, DrivenRunEqualsInProcessRun) {
  auto gen = toy_threshold();
  const std::size_t len = 20;
  auto enc = encode(gen, len);
  std::mt19937_64 rng(68);
  Bits stream = oracle::threshold(gen, oracle::random_bits(rng, 18), len);
  auto set = first_vars(6);

  AttackConfig cfg;
  cfg.mode = AttackMode::FindAll;
  cfg.k = 2;
  auto whole = run_attack(gen, enc, stream, set, cfg);

  std::ostringstream out;
  export_manifest(out, enc.cnf, set, 2);
  std::istringstream in(out.str());
  Manifest m = read_manifest(in);
  std::set<Bits> merged;
  for (const ManifestEntry &e : m.entries) {
    AttackConfig one = cfg;
    one.k = m.k;
    one.only_batches = std::vector<std::size_t>{e.index};
    auto part = run_attack(gen, enc, stream,
                           parse_decomposition(enc.cnf, m.decomposition), one);
    EXPECT_EQ(part.cells_total, e.cells);
    merged.insert(part.keys.begin(), part.keys.end());
  }
  EXPECT_EQ(std::vector<Bits>(merged.begin(), merged.end()), whole.keys);
}
