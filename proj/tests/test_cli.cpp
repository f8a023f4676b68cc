#include "cli.hpp"

#include "logcrypt/dimacs.hpp"
#include "logcrypt/encoder.hpp"
#include "logcrypt/generator_config.hpp"
#include "logcrypt/runner.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

using namespace logcrypt;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string spec_path(const std::string &name) {
  return std::string(LOGCRYPT_SPEC_DIR) + "/" + name;
}

fs::path temp_file(const std::string &name) {
  fs::path dir = fs::temp_directory_path() / "logcrypt_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string &text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);)
    out.push_back(l);
  return out;
}

std::vector<std::string> lines_with(const std::string &text,
                                    const std::string &prefix) {
  std::vector<std::string> out;
  for (auto &l : lines(text))
    if (l.rfind(prefix, 0) == 0)
      out.push_back(l);
  return out;
}

// Drops the tau and T columns (wall-clock dependent) of a predict row.
std::string without_timing(const std::string &row) {
  std::vector<std::string> cols;
  std::string cur;
  bool quoted = false;
  for (char c : row) {
    if (c == '"')
      quoted = !quoted;
    if (c == ',' && !quoted) {
      cols.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  cols.push_back(cur);
  if (cols.size() != 7)
    return row;
  return cols[0] + ',' + cols[1] + ',' + cols[2] + ',' + cols[5] + ',' + cols[6];
}

} // namespace

TEST(CliKeystream, ZeroKeyGivesZeroBits) {
  auto r = run({"keystream", "--gen", "a51", "--key-hex", "0:0:0", "--len", "64"});
  ASSERT_EQ(r.code, cli::kFound) << r.err;
  EXPECT_EQ(r.out, std::string(64, '0') + "\n");
}

TEST(CliKeystream, CollisionKeysAgree) {
  auto a = run({"keystream", "--gen", "a51", "--key-hex", "2C1A7:3D35B9:EEAF2"});
  auto b = run({"keystream", "--gen", "a51", "--key-hex", "2C1A7:3E9ADC:EEAF2"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out.size(), 145u);
  EXPECT_EQ(a.out, b.out);
}

TEST(CliKeystream, SpecFileMatchesLibrary) {
  GeneratorSpec gen = load_generator_spec(spec_path("a51_mini.json"));
  std::mt19937_64 rng(81);
  Bits key = oracle::random_bits(rng, key_bits(gen));
  auto r = run({"keystream", "--spec", spec_path("a51_mini.json"), "--key-hex",
                format_key_hex(gen, key), "--len", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, format_bits(keystream(gen, key, 50)) + "\n");
}

TEST(CliEncode, ReparseEqualsInMemoryEncoding) {
  auto path = temp_file("a51.cnf");
  auto r = run({"encode", "--gen", "a51", "--len", "40", "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  Cnf parsed = read_dimacs_file(path.string());
  Encoding enc = encode(A51Spec::standard(), 40);
  EXPECT_EQ(parsed, enc.cnf);
  EXPECT_EQ(parsed.inputs().size(), 64u);
}

TEST(CliEncode, BindingAddsOneUnitPerBit) {
  auto free_path = temp_file("thr_free.cnf");
  auto bound_path = temp_file("thr_bound.cnf");
  ASSERT_EQ(run({"encode", "--gen", "threshold5", "--len", "30", "--out",
                 free_path.string()})
                .code,
            0);
  ASSERT_EQ(run({"encode", "--gen", "threshold5", "--len", "30", "--key-hex",
                 "1:2:3:4:5", "--out", bound_path.string()})
                .code,
            0);
  Cnf a = read_dimacs_file(free_path.string());
  Cnf b = read_dimacs_file(bound_path.string());
  ASSERT_EQ(b.clauses().size(), a.clauses().size() + 30);
  for (std::size_t i = a.clauses().size(); i < b.clauses().size(); ++i)
    EXPECT_EQ(b.clauses()[i].size(), 1u);
  EXPECT_TRUE(std::equal(a.clauses().begin(), a.clauses().end(), b.clauses().begin()));
}

TEST(CliEncode, GiffordLengthMustBeWholeBytes) {
  auto r = run({"encode", "--gen", "gifford", "--len", "12"});
  EXPECT_EQ(r.code, cli::kUsage);
  EXPECT_FALSE(r.err.empty());
}

TEST(CliPredict, GridReportAndExactMode) {
  std::vector<std::string> args = {
      "predict", "--spec", spec_path("threshold_mini.json"), "--lens", "24,30",
      "--decomp", "1-4", "--decomp", "1-8", "--key-hex", "5:A:1C",
      "--g-budget", "60", "--seed", "7"};
  auto r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], "len,power,decomposition,tau,T,status,cells");
  EXPECT_EQ(without_timing(rows[1]), "24,4,\"1-4\",exact,16");
  EXPECT_EQ(without_timing(rows[2]), "24,8,\"1-8\",exact,256");
  EXPECT_EQ(without_timing(rows[4]), "30,8,\"1-8\",exact,256");
}

TEST(CliPredict, FixedSeedGivesIdenticalReport) {
  std::vector<std::string> args = {
      "predict", "--spec", spec_path("threshold_mini.json"), "--len", "24",
      "--decomp", "1-10", "--q", "50", "--r", "64", "--g-budget", "60",
      "--seed", "11"};
  auto a = run(args);
  auto b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  auto ra = lines(a.out), rb = lines(b.out);
  ASSERT_EQ(ra.size(), 2u);
  ASSERT_EQ(rb.size(), 2u);
  EXPECT_EQ(without_timing(ra[1]), "24,10,\"1-10\",estimated,50");
  EXPECT_EQ(without_timing(ra[1]), without_timing(rb[1]));
}

TEST(CliOptimize, WritesTrace) {
  auto trace = temp_file("trace.csv");
  auto r = run({"optimize", "--spec", spec_path("threshold_mini.json"), "--len",
                "24", "--decomp", "1-6", "--key-hex", "5:A:1C", "--g-budget",
                "60", "--trace-csv", trace.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines_with(r.out, "strategy=").front(), "strategy=remove-last");
  auto rows = lines(slurp(trace));
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0], "iteration,power,tau,T,status");
  EXPECT_EQ(rows[1].substr(0, 4), "0,6,");
  EXPECT_EQ(rows[6].substr(0, 4), "5,1,");
}

TEST(CliAttack, RecoversPlantedKey) {
  auto r = run({"attack", "--spec", spec_path("threshold24.json"), "--key-hex",
                "5:A7:1F3", "--len", "48", "--decomp", "1-10", "--k", "4",
                "--workers", "2"});
  ASSERT_EQ(r.code, cli::kFound) << r.err;
  EXPECT_EQ(lines_with(r.out, "status=").front(), "status=found");
  auto keys = lines_with(r.out, "key=");
  ASSERT_FALSE(keys.empty());
  for (auto &k : keys)
    EXPECT_NE(k.find(" verified=1"), std::string::npos);
}

TEST(CliAttack, AttacksObservedKeystream) {
  GeneratorSpec gen = load_generator_spec(spec_path("threshold24.json"));
  Bits key = parse_key_hex(gen, "3:11:1BC");
  auto r = run({"attack", "--spec", spec_path("threshold24.json"), "--keystream",
                format_bits(keystream(gen, key, 48)), "--decomp", "1-10"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(lines_with(r.out, "key=").empty());
}

TEST(CliCollisions, MatchesBruteForce) {
  GeneratorSpec gen = load_generator_spec(spec_path("threshold_mini.json"));
  const auto &spec = std::get<ThresholdSpec>(gen);
  const std::size_t len = 10, n = 12;
  Bits planted = parse_key_hex(gen, "5:A:1C");
  Bits stream = oracle::threshold(spec, planted, len);
  std::set<std::string> expected;
  for (std::uint64_t i = 0; i < (1u << n); ++i) {
    Bits cand = oracle::key_from_index(i, n);
    if (oracle::threshold(spec, cand, len) == stream)
      expected.insert("key=" + format_key_hex(gen, cand) + " verified=1");
  }
  ASSERT_GT(expected.size(), 1u);
  auto r = run({"collisions", "--spec", spec_path("threshold_mini.json"),
                "--keystream", format_bits(stream), "--decomp", "1-5",
                "--workers", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto keys = lines_with(r.out, "key=");
  EXPECT_EQ(std::set<std::string>(keys.begin(), keys.end()), expected);
  EXPECT_EQ(lines_with(r.out, "keys=").front(),
            "keys=" + std::to_string(expected.size()));
}

TEST(CliAttack, ExhaustedStreamExitsOne) {
  GeneratorSpec gen = load_generator_spec(spec_path("threshold_mini.json"));
  const auto &spec = std::get<ThresholdSpec>(gen);
  const std::size_t len = 40;
  std::set<Bits> reachable;
  for (std::uint64_t i = 0; i < (1u << 12); ++i)
    reachable.insert(oracle::threshold(spec, oracle::key_from_index(i, 12), len));
  std::mt19937_64 rng(82);
  Bits stream;
  do
    stream = oracle::random_bits(rng, len);
  while (reachable.count(stream));
  auto r = run({"attack", "--spec", spec_path("threshold_mini.json"),
                "--keystream", format_bits(stream)});
  EXPECT_EQ(r.code, cli::kExhausted);
  EXPECT_EQ(lines_with(r.out, "status=").front(), "status=exhausted");
  EXPECT_TRUE(lines_with(r.out, "key=").empty());
}

TEST(CliAttack, DeadlineExitsTwo) {
  auto r = run({"attack", "--gen", "a51", "--key-hex", "2C1A7:3D35B9:EEAF2",
                "--len", "64", "--decomp", "1-4", "--deadline", "0.2"});
  EXPECT_EQ(r.code, cli::kBudget) << r.err;
  EXPECT_EQ(lines_with(r.out, "status=").front(), "status=deadline");
}

TEST(CliAttack, CancellationPrintsPartialReport) {
  std::stop_source src;
  src.request_stop();
  std::ostringstream out, err;
  int code = cli::run({"attack", "--gen", "a51", "--key-hex", "1:2:3", "--len",
                       "64", "--decomp", "1-4"},
                      out, err, src.get_token());
  EXPECT_EQ(code, cli::kBudget);
  EXPECT_NE(out.str().find("status=cancelled"), std::string::npos);
}

TEST(CliManifest, DrivesAttack) {
  auto manifest = temp_file("batches.txt");
  auto r = run({"manifest", "--spec", spec_path("threshold_mini.json"), "--len",
                "10", "--decomp", "1-5", "--k", "2", "--out", manifest.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto text = slurp(manifest);
  EXPECT_EQ(text, "# decomposition 1-5\n# power 5\n# prefix 2\n1 00 8\n2 01 8\n"
                  "3 10 8\n4 11 8\n");

  // the last two batches alone
  auto part = temp_file("part.txt");
  {
    std::ofstream o(part);
    o << "# decomposition 1-5\n# power 5\n# prefix 2\n3 10 8\n4 11 8\n";
  }
  auto a = run({"collisions", "--spec", spec_path("threshold_mini.json"),
                "--key-hex", "5:A:1C", "--len", "10", "--manifest", part.string()});
  ASSERT_LE(a.code, cli::kExhausted) << a.err;
  EXPECT_EQ(lines_with(a.out, "cells_total=").front(), "cells_total=16");
}

TEST(CliVerify, ExitStatusFollowsResult) {
  auto stream = run({"keystream", "--gen", "summation4", "--key-hex",
                     "3:1:2:3:4", "--len", "80"});
  ASSERT_EQ(stream.code, 0) << stream.err;
  std::string bits = stream.out.substr(0, 80);
  auto ok = run({"verify", "--gen", "summation4", "--key-hex", "3:1:2:3:4",
                 "--keystream", bits});
  EXPECT_EQ(ok.code, 0);
  EXPECT_EQ(ok.out, "verified=1\n");
  auto bad = run({"verify", "--gen", "summation4", "--key-hex", "3:1:2:3:5",
                  "--keystream", bits});
  EXPECT_EQ(bad.code, cli::kExhausted);
  EXPECT_EQ(bad.out, "verified=0\n");
}

TEST(CliErrors, ExitCodes) {
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"keystream", "--frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(run({"keystream", "--gen", "a51"}).code, cli::kUsage);
  EXPECT_EQ(run({"keystream", "--gen", "a51", "--spec", "x.json", "--key-hex", "0:0:0"}).code,
            cli::kUsage);
  EXPECT_EQ(run({"attack", "--gen", "a51", "--mode", "sometimes", "--key-hex", "1:1:1"}).code,
            cli::kUsage);
  EXPECT_EQ(run({"predict", "--cnf", "/nonexistent/in.cnf", "--decomp", "1"}).code,
            cli::kIo);
  EXPECT_EQ(run({"keystream", "--spec", "/nonexistent/spec.json", "--key-hex", "1"}).code,
            cli::kIo);

  auto bad = temp_file("bad.cnf");
  {
    std::ofstream o(bad);
    o << "p cnf 2 1\n1 x 0\n";
  }
  auto r = run({"predict", "--cnf", bad.string(), "--decomp", "1"});
  EXPECT_EQ(r.code, cli::kParse);
  EXPECT_NE(r.err.find("line 2"), std::string::npos);

  auto help = run({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("collisions"), std::string::npos);
}
