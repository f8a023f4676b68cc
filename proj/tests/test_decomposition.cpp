#include "logcrypt/decomposition.hpp"
#include "logcrypt/encoder.hpp"
#include "logcrypt/error.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

using namespace logcrypt;

namespace {

Literal P(Var v) { return Literal::pos(v); }

Cnf inputs_only(Var n, std::vector<Clause> clauses = {}) {
  std::vector<InputVar> inputs;
  for (Var v = 1; v <= n; ++v)
    inputs.push_back({std::to_string(v), v});
  return Cnf(n, std::move(clauses), inputs);
}

DecompositionSet first_vars(std::size_t d) {
  DecompositionSet s;
  for (Var v = 1; v <= d; ++v)
    s.vars.push_back(v);
  return s;
}

// Fake clock: every cell of a set of power d costs cost(d) seconds.
CellSolver fixed_cost(std::function<double(std::size_t)> cost) {
  return [cost](const Cnf &, const PartialAssignment &cell, double limit,
                std::stop_token) {
    double t = cost(cell.size());
    if (t > limit)
      return CellTiming{SolveStatus::BudgetExceeded, limit};
    return CellTiming{SolveStatus::Unsat, t};
  };
}

PredictionParams params_with(std::size_t q, std::uint64_t r, double g) {
  PredictionParams p;
  p.q = q;
  p.r = r;
  p.g_budget = g;
  return p;
}

} // namespace

TEST(DecompositionText, A51DefaultSet) {
  auto enc = encode_a51(A51Spec::standard(), 8);
  auto set = parse_decomposition(enc.cnf, "1-9,20-30,42-52");
  EXPECT_EQ(set.power(), 31u);
  EXPECT_EQ(set.vars.front(), 1u);
  EXPECT_EQ(set.vars[9], 20u);
  EXPECT_EQ(set.vars.back(), 52u);
  EXPECT_EQ(format_decomposition(enc.cnf, set), "1-9,20-30,42-52");
  EXPECT_EQ(format_decomposition(enc.cnf, parse_decomposition(enc.cnf, "5, 3,4")),
            "5,3-4");
}

TEST(DecompositionText, Errors) {
  auto enc = encode_a51(A51Spec::standard(), 8);
  EXPECT_THROW((void)parse_decomposition(enc.cnf, "65"), InputError);
  EXPECT_THROW((void)parse_decomposition(enc.cnf, "1,1"), InputError);
  EXPECT_THROW((void)parse_decomposition(enc.cnf, "3-1"), InputError);
  EXPECT_THROW((void)parse_decomposition(enc.cnf, ""), InputError);
  EXPECT_THROW((void)parse_decomposition(enc.cnf, "1,,2"), InputError);
  // keystream variables are not inputs
  EXPECT_THROW(check_decomposition(enc.cnf, DecompositionSet{{65}}), InputError);
}

TEST(Cells, SingleVariable) {
  Cnf c = inputs_only(2, {Clause{P(1), P(2)}});
  auto family = cells(c, first_vars(1));
  ASSERT_EQ(family.size(), 2u);
  EXPECT_EQ(family[0].clauses(), (std::vector<Clause>{Clause{P(2)}}));
  EXPECT_TRUE(family[1].clauses().empty());
  std::size_t n = 0;
  for (const Cnf &cell : family) {
    EXPECT_EQ(cell.num_vars(), 2u);
    ++n;
  }
  EXPECT_EQ(n, 2u);
}

TEST(Cells, EmptySetIsWholeCnf) {
  Cnf c = inputs_only(2, {Clause{P(1), P(2)}});
  auto family = cells(c, DecompositionSet{});
  ASSERT_EQ(family.size(), 1u);
  EXPECT_EQ(family[0], c);
}

TEST(Cells, LexicographicVectors) {
  EXPECT_EQ(cell_vector(3, 0), (Bits{0, 0, 0}));
  EXPECT_EQ(cell_vector(3, 1), (Bits{0, 0, 1}));
  EXPECT_EQ(cell_vector(3, 6), (Bits{1, 1, 0}));
}

TEST(Cells, ModelsPartitionIntoCells) {
  std::mt19937_64 rng(51);
  for (int round = 0; round < 50; ++round) {
    Cnf raw = oracle::random_kcnf(rng, 10, 25, 3);
    Cnf c = inputs_only(10, raw.clauses());
    DecompositionSet set{{3, 7, 1}};
    std::set<std::uint32_t> expected;
    for (auto m : oracle::brute_force_models(c))
      expected.insert(m);
    std::set<std::uint32_t> got;
    auto family = cells(c, set);
    for (std::uint64_t j = 0; j < family.size(); ++j) {
      Bits y = family.vector(j);
      Cnf cell = family[j];
      if (cell.has_empty_clause())
        continue;
      for (auto m : oracle::brute_force_models(cell)) {
        bool agrees = true;
        for (std::size_t i = 0; i < set.power(); ++i)
          agrees = agrees && ((m >> (set.vars[i] - 1)) & 1u) == y[i];
        if (agrees)
          EXPECT_TRUE(got.insert(m).second);
      }
    }
    EXPECT_EQ(got, expected);
  }
}

TEST(Sample, SmallFamilyIsExhaustive) {
  Cnf c = inputs_only(5);
  PredictionParams p;
  p.r = 8;
  auto s = sample_cells(c, first_vars(3), p);
  EXPECT_TRUE(s.exhaustive);
  ASSERT_EQ(s.vectors.size(), 8u);
  for (std::uint64_t j = 0; j < 8; ++j)
    EXPECT_EQ(s.vectors[j], cell_vector(3, j));
}

TEST(Sample, SeededAndReproducible) {
  Cnf c = inputs_only(40);
  PredictionParams p;
  p.q = 1000;
  p.seed = 5;
  auto a = sample_cells(c, first_vars(40), p);
  auto b = sample_cells(c, first_vars(40), p);
  EXPECT_FALSE(a.exhaustive);
  EXPECT_EQ(a.vectors.size(), 1000u);
  EXPECT_EQ(a.vectors, b.vectors);
  p.seed = 6;
  EXPECT_NE(sample_cells(c, first_vars(40), p).vectors, a.vectors);
}

TEST(Sample, MarginalsNearHalf) {
  Cnf c = inputs_only(20);
  PredictionParams p;
  p.q = 10000;
  p.r = 1;
  auto s = sample_cells(c, first_vars(20), p);
  for (std::size_t b = 0; b < 20; ++b) {
    double ones = 0;
    for (const Bits &y : s.vectors)
      ones += y[b];
    double f = ones / 10000.0;
    EXPECT_GT(f, 0.45) << "bit " << b;
    EXPECT_LT(f, 0.55) << "bit " << b;
  }
}

TEST(Predict, EstimatedIsScaledSampleTime) {
  Cnf c = inputs_only(12);
  auto out = predict(c, first_vars(12), params_with(100, 16, 1e9),
                     fixed_cost([](std::size_t) { return 0.5; }));
  EXPECT_EQ(out.status, PredictionStatus::Estimated);
  EXPECT_DOUBLE_EQ(out.tau, 50.0);
  ASSERT_TRUE(out.T);
  EXPECT_DOUBLE_EQ(*out.T, 4096 * 0.5);
  EXPECT_EQ(out.cells_solved, 100u);
}

TEST(Predict, ExactWhenFamilyIsSmall) {
  Cnf c = inputs_only(12);
  auto out = predict(c, first_vars(4), params_with(1000, 16, 1e9),
                     fixed_cost([](std::size_t) { return 0.25; }));
  EXPECT_EQ(out.status, PredictionStatus::Exact);
  EXPECT_DOUBLE_EQ(*out.T, 16 * 0.25);
  EXPECT_DOUBLE_EQ(out.tau, *out.T);
  EXPECT_EQ(out.cells_planned, 16u);
}

TEST(Predict, UndefinedAtBudget) {
  Cnf c = inputs_only(12);
  auto out = predict(c, first_vars(12), params_with(100, 16, 10.5),
                     fixed_cost([](std::size_t) { return 1.0; }));
  EXPECT_EQ(out.status, PredictionStatus::Undefined);
  EXPECT_FALSE(out.T);
  EXPECT_EQ(out.cells_solved, 10u);
  EXPECT_DOUBLE_EQ(out.tau, 10.5);
}

TEST(Predict, DominatedByIncumbent) {
  Cnf c = inputs_only(12);
  // running estimate 4096/100 * tau exceeds 1000 once tau > 24.4
  auto out = predict(c, first_vars(12), params_with(100, 16, 1e9),
                     fixed_cost([](std::size_t) { return 1.0; }), 1000.0);
  EXPECT_EQ(out.status, PredictionStatus::Dominated);
  EXPECT_FALSE(out.T);
  EXPECT_LE(out.cells_solved, 25u);
  EXPECT_LE(out.tau, 1000.0 * 100 / 4096 + 1.0);
}

TEST(Predict, NeverEstimatedForSmallFamilies) {
  Cnf c = inputs_only(10);
  for (std::size_t d = 0; d <= 10; ++d) {
    auto out = predict(c, first_vars(d), params_with(50, 64, 1e9),
                       fixed_cost([](std::size_t) { return 0.01; }));
    if ((1u << d) <= 64)
      EXPECT_EQ(out.status, PredictionStatus::Exact);
    else
      EXPECT_EQ(out.status, PredictionStatus::Estimated);
  }
}

TEST(Predict, ParallelSumsCellTimes) {
  Cnf c = inputs_only(12);
  auto p = params_with(100, 16, 1e9);
  p.workers = 4;
  auto out = predict(c, first_vars(12), p, fixed_cost([](std::size_t) { return 0.5; }));
  EXPECT_EQ(out.status, PredictionStatus::Estimated);
  EXPECT_DOUBLE_EQ(*out.T, 4096 * 0.5);
}

TEST(Predict, RealSolverOnToyThreshold) {
  ThresholdSpec toy{{{5, {3, 5}}, {6, {5, 6}}, {7, {6, 7}}}};
  std::mt19937_64 rng(52);
  Bits key = oracle::random_bits(rng, 18);
  auto enc = encode_threshold(toy, 36);
  Cnf bound = bind_keystream(enc, oracle::threshold(toy, key, 36));
  PredictionParams p;
  p.q = 64;
  p.r = 16;
  p.g_budget = 60.0;
  auto out = predict(bound, first_vars(10), p);
  EXPECT_EQ(out.status, PredictionStatus::Estimated);
  EXPECT_EQ(out.cells_solved, 64u);
  EXPECT_GT(*out.T, 0.0);
}

TEST(Minimize, KeepsInitialSetWhenItIsOptimal) {
  Cnf c = inputs_only(10);
  // T(d) = 2^d * 4^(10-d) grows as variables are removed
  auto cost = fixed_cost([](std::size_t d) { return std::ldexp(1e-3, 2 * (10 - static_cast<int>(d))); });
  auto res = minimize(c, first_vars(10), Strategy::RemoveLast,
                      params_with(32, 64, 1e9), cost);
  EXPECT_EQ(res.best, first_vars(10));
  ASSERT_EQ(res.trace.size(), 10u);
  std::size_t dominated = 0;
  for (const auto &r : res.trace)
    dominated += r.outcome.status == PredictionStatus::Dominated ? 1 : 0;
  EXPECT_GT(dominated, 0u);
}

TEST(Minimize, RemoveLastFindsChainMinimum) {
  Cnf c = inputs_only(12);
  // cell time 2^(12-d) * 1e-3 + 0.01: T bottoms out in the middle
  auto cost_of = [](std::size_t d) {
    return std::ldexp(1e-4, 12 - static_cast<int>(d)) * (12 - static_cast<double>(d)) + 0.01;
  };
  auto params = params_with(16, 8, 1e12);
  auto res = minimize(c, first_vars(12), Strategy::RemoveLast, params,
                      fixed_cost(cost_of));
  std::size_t best_d = 12;
  double best = 1e300;
  for (std::size_t d = 1; d <= 12; ++d) {
    double scale = (1u << d) <= 8 ? 1.0 : std::ldexp(1.0, static_cast<int>(d)) / 16;
    double n = (1u << d) <= 8 ? std::ldexp(1.0, static_cast<int>(d)) : 16;
    double T = scale * n * cost_of(d);
    if (T < best) {
      best = T;
      best_d = d;
    }
  }
  EXPECT_EQ(res.best.power(), best_d);
  EXPECT_NEAR(*res.best_outcome.T, best, best * 1e-9);
  std::optional<double> prev;
  for (const auto &r : res.trace) {
    ASSERT_TRUE(r.best_T);
    if (prev)
      EXPECT_LE(*r.best_T, *prev);
    prev = r.best_T;
    EXPECT_NE(r.outcome.status, PredictionStatus::Undefined);
  }
}

TEST(Minimize, GreedyDropsCheapVariables) {
  Cnf c = inputs_only(6);
  // removing variables 1..3 halves the cell count for free; removing
  // 4..6 makes every cell 8x slower
  CellSolver cost = [](const Cnf &, const PartialAssignment &cell, double limit,
                       std::stop_token) {
    double t = 1.0;
    for (Var v = 4; v <= 6; ++v)
      if (!cell.bound(v))
        t *= 8.0;
    if (t > limit)
      return CellTiming{SolveStatus::BudgetExceeded, limit};
    return CellTiming{SolveStatus::Unsat, t};
  };
  auto res = minimize(c, first_vars(6), Strategy::GreedyBest,
                      params_with(1000, 1000, 1e12), cost);
  EXPECT_EQ(res.best.vars, (std::vector<Var>{4, 5, 6}));
  EXPECT_DOUBLE_EQ(*res.best_outcome.T, 8.0);
}

TEST(Minimize, UndefinedInitialSetIsAnError) {
  Cnf c = inputs_only(6);
  EXPECT_THROW((void)minimize(c, first_vars(6), Strategy::RemoveLast,
                              params_with(10, 4, 1.0),
                              fixed_cost([](std::size_t) { return 5.0; })),
               InputError);
  EXPECT_THROW((void)minimize(c, DecompositionSet{}, Strategy::RemoveLast,
                              params_with(10, 4, 1.0),
                              fixed_cost([](std::size_t) { return 5.0; })),
               InputError);
}

TEST(Minimize, TraceCsv) {
  Cnf c = inputs_only(4);
  auto res = minimize(c, first_vars(4), Strategy::RemoveLast,
                      params_with(4, 2, 1e9),
                      fixed_cost([](std::size_t) { return 1.0; }));
  std::ostringstream out;
  write_trace_csv(out, res.trace);
  std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "iteration,power,tau,T,status");
  EXPECT_NE(text.find("\n0,4,4,16,estimated\n"), std::string::npos);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
}

TEST(Strategy, Names) {
  EXPECT_EQ(parse_strategy("remove-last"), Strategy::RemoveLast);
  EXPECT_EQ(parse_strategy("greedy-best"), Strategy::GreedyBest);
  EXPECT_THROW((void)parse_strategy("random"), InputError);
}

TEST(Params, Validation) {
  PredictionParams p;
  p.q = 0;
  EXPECT_THROW(p.validate(), InputError);
  p = {};
  p.g_budget = 0.0;
  EXPECT_THROW(p.validate(), InputError);
  p = {};
  p.r = 0;
  EXPECT_THROW(p.validate(), InputError);
}
