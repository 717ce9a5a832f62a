#include "support.hh"

#include <gtest/gtest.h>

using namespace rpmon;

namespace
{
  spec
  xy()
  {
    return parse_spec("input e : int; var x : int; var y : int; guarantee true;");
  }

  formula
  qf(const char* text)
  {
    static spec s = xy();
    return parse_formula(text, s);
  }
}

TEST(formula, substitute_is_textual)
{
  EXPECT_EQ(substitute(qf("x' <= x + 2"), renaming({{"x'", "x"}})), qf("x <= x + 2"));
  EXPECT_TRUE(qf("x <= x + 2").is_true());
}

TEST(formula, substitute_is_simultaneous)
{
  EXPECT_EQ(substitute(qf("x = 0 && y = x"), renaming({{"x", "y"}, {"y", "x"}})),
            qf("y = 0 && x = y"));
}

TEST(formula, substitute_identity)
{
  formula f = qf("x + y > 3 || e = 1");
  EXPECT_EQ(substitute(f, std::map<std::string, lin_term>{}), f);
}

TEST(formula, prime)
{
  std::set<std::string> xs{"x", "y"};
  EXPECT_EQ(prime(qf("x = 0"), xs), qf("x' = 0"));
  EXPECT_EQ(prime(qf("x >= 1 && y > 0"), xs), qf("x' >= 1 && y' > 0"));
  EXPECT_EQ(prime(f_true(), xs), f_true());
  // inputs have no next-step copy
  EXPECT_EQ(prime(qf("e > 0"), xs), qf("e > 0"));
  EXPECT_EQ(unprime(qf("x' = y'")), qf("x = y"));
}

TEST(formula, evaluate)
{
  EXPECT_TRUE(evaluate(qf("x' <= x + 2"), {{"x", 3}, {"x'", 5}}));
  EXPECT_FALSE(evaluate(qf("e > 0"), {{"e", 0}}));
  EXPECT_TRUE(evaluate(qf("x + y > 10"), {{"x", 7}, {"y", 4}}));
  EXPECT_THROW(evaluate(qf("x > 0"), {{"y", 1}}), eval_error);
}

TEST(formula, canonical_forms)
{
  EXPECT_EQ(f_and(f_true(), qf("x > 0")), qf("x > 0"));
  EXPECT_EQ(f_or(qf("x > 0"), qf("x > 0")), qf("x > 0"));
  EXPECT_EQ(f_cmp(lin_term(0), cmp::lt, lin_term::var("x")), qf("x > 0"));
  // gcd reduction and integer tightening
  EXPECT_EQ(qf("2 * x <= 3"), qf("x <= 1"));
  EXPECT_EQ(qf("x > 0"), qf("x >= 1"));
  EXPECT_EQ(f_and(qf("x > 0"), f_not(qf("x > 0"))), f_false());
}

TEST(formula, canonical_forms_agree_by_brute_force)
{
  formula a = f_cmp(lin_term(0), cmp::lt, lin_term::var("x"));
  formula b = raw_atom(cmp::gt, lin_term::var("x"));
  for (int x = -2; x <= 2; ++x)
    EXPECT_EQ(evaluate(a, {{"x", x}}), x > 0) << x;
  for (int x = -2; x <= 2; ++x)
    EXPECT_EQ(evaluate(canonicalize(b), {{"x", x}}), x > 0) << x;
}

TEST(formula, canonicalize_idempotent_and_semantics_preserving)
{
  test::formula_gen gen(7);
  for (int k = 0; k < 300; ++k)
    {
      // raw trees exercise the smart constructors from scratch
      std::function<formula(int)> raw_tree = [&](int d) -> formula
      {
        if (d == 0 || gen.pick(0, 3) == 0)
          {
            formula a = gen.atom();
            return gen.pick(0, 1) ? a : raw(op::not_, {a});
          }
        return raw(gen.pick(0, 1) ? op::and_ : op::or_, {raw_tree(d - 1), raw_tree(d - 1)});
      };
      formula f = raw_tree(3);
      formula c = canonicalize(f);
      ASSERT_EQ(canonicalize(c), c) << to_string(f);
      for (int x = -2; x <= 2; ++x)
        for (int xp = -2; xp <= 2; ++xp)
          for (int i = -2; i <= 2; ++i)
            {
              valuation v{{"x", x}, {"x'", xp}, {"i", i}};
              ASSERT_EQ(evaluate(f, v), evaluate(c, v)) << to_string(f);
            }
    }
}

TEST(formula, printing_round_trips)
{
  test::formula_gen gen(11);
  spec s = test::xi_spec();
  for (int k = 0; k < 300; ++k)
    {
      formula f = gen(3);
      ASSERT_EQ(parse_formula(to_string(f), s), f) << to_string(f);
    }
}

TEST(formula, free_vars_and_atoms)
{
  formula f = qf("x' = x + e && G (y > 0)");
  EXPECT_EQ(free_vars(f), (std::set<std::string>{"e", "x", "x'", "y"}));
  EXPECT_EQ(atoms(f).size(), 2u);
  EXPECT_TRUE(mentions_primed(f));
}

TEST(formula, univariate_simplification)
{
  formula f = f_or(qf("x = 1"), f_or(qf("x = 2"), qf("x >= 3")));
  formula g = simplify_univariate(f);
  EXPECT_EQ(g, qf("x >= 1"));
}

TEST(quant, substitution_avoids_capture)
{
  // forall y. x < y  with x := y must not capture the free y
  fo_formula f = fo_forall({"y"}, fo_formula(qf("x < y")));
  fo_formula g = substitute(f, renaming({{"x", "y"}}));
  EXPECT_EQ(free_vars(g), std::set<std::string>{"y"});
}

TEST(sexpr, parses_nested_lists_and_quoted_symbols)
{
  sexpr e = parse_sexpr("(and (<= |x'| 3) (not b))");
  ASSERT_FALSE(e.is_atom);
  ASSERT_EQ(e.size(), 3u);
  EXPECT_TRUE(e[0].is("and"));
  EXPECT_TRUE(e[1][1].is("x'"));
  EXPECT_THROW(parse_sexpr("(a (b)"), sexpr_error);
  EXPECT_EQ(parse_sexprs("a (b) c").size(), 3u);
}
