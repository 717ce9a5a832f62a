#include "support.hh"

#include <gtest/gtest.h>

using namespace rpmon;

namespace
{
  formula
  qf(const char* text)
  {
    static spec s = parse_spec("input e : int; var x : int; var y : int; guarantee true;");
    return parse_formula(text, s);
  }
}

TEST(smt, check_sat)
{
  solver& s = test::shared_solver();
  EXPECT_EQ(s.check_sat(qf("x = 0 && x > 0")), sat_result::unsat);
  EXPECT_EQ(s.check_sat(qf("x = 0 && x' = x && x' = 1")), sat_result::unsat);
  EXPECT_EQ(s.check_sat(qf("x > 3 && y < x")), sat_result::sat);
  fo_formula q = fo_forall({"x'"}, fo_implies(fo_formula(qf("x' > x")), fo_formula(qf("x' >= x + 1"))));
  EXPECT_EQ(s.check_sat(q), sat_result::sat);
}

TEST(smt, entails)
{
  solver& s = test::shared_solver();
  EXPECT_EQ(s.entails(qf("x = 0 && x' = x"), qf("x' = 0")), truth::yes);
  EXPECT_EQ(s.entails(raw_atom(cmp::gt, lin_term::var("x")), qf("x >= 1")), truth::yes);
  EXPECT_EQ(s.entails(qf("x >= 0"), qf("x > 0")), truth::no);
  EXPECT_EQ(s.valid(qf("x <= 0 || x > 0")), truth::yes);
}

TEST(smt, cache_answers_repeated_queries)
{
  solver s(test::solver_cfg());
  formula a = qf("x > 0 && y > x"), b = qf("y >= 2");
  EXPECT_EQ(s.entails(a, b), truth::yes);
  auto before = s.stats();
  EXPECT_EQ(s.entails(a, b), truth::yes);
  EXPECT_EQ(s.stats().cache_hits, before.cache_hits + 1);
  EXPECT_EQ(s.stats().queries, before.queries + 1);
}

TEST(smt, alpha_equivalent_queries_share_a_key)
{
  fo_formula a = fo_exists({"u"}, fo_formula(qf("x' = x + 1")));
  fo_formula b = fo_exists({"v"}, fo_formula(qf("x' = x + 1")));
  EXPECT_EQ(solver::cache_key(a), solver::cache_key(b));
}

TEST(smt, distinct_formulas_have_distinct_keys)
{
  test::formula_gen gen(3);
  std::map<std::string, formula> seen;
  for (int k = 0; k < 2000; ++k)
    {
      formula f = gen.atom();
      for (int d = 0; d < gen.pick(0, 3); ++d)
        f = gen.pick(0, 1) ? f_and(f, gen.atom()) : f_or(f, f_not(gen.atom()));
      auto [it, fresh] = seen.emplace(solver::cache_key(f), f);
      ASSERT_TRUE(fresh || it->second == f) << to_string(f) << " vs " << to_string(it->second);
    }
}

TEST(smt, quantifier_elimination)
{
  solver& s = test::shared_solver();
  auto r = s.eliminate(fo_exists({"x'"}, fo_formula(qf("x' = x + 1 && x' <= 5"))));
  ASSERT_TRUE(r);
  EXPECT_EQ(s.entails(*r, qf("x <= 4")), truth::yes);
  EXPECT_EQ(s.entails(qf("x <= 4"), *r), truth::yes);
}

TEST(smt, model_satisfies_its_formula)
{
  solver& s = test::shared_solver();
  formula f = qf("x + y = 3 && x >= 2 && y >= -1 && x' = x - 1");
  auto m = s.model(f);
  ASSERT_TRUE(m);
  EXPECT_TRUE(evaluate(f, *m));
  EXPECT_FALSE(s.model(qf("x > 0 && x < 1")));
}

TEST(smt, smtlib_round_trip)
{
  test::formula_gen gen(5);
  for (int k = 0; k < 200; ++k)
    {
      formula f = f_and(gen.atom(), f_or(gen.atom(), f_not(gen.atom())));
      auto back = from_smtlib(parse_sexpr(smtlib(f)));
      ASSERT_TRUE(back) << smtlib(f);
      EXPECT_EQ(*back, f) << smtlib(f);
    }
}

TEST(smt, broken_command_is_reported)
{
  solver_config c;
  c.command = "/nonexistent/solver-binary";
  EXPECT_THROW(
    {
      solver s(c);
      s.check_sat(qf("x > 0"));
    },
    smt_process_error);
}
