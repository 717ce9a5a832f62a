#include "support.hh"

#include <gtest/gtest.h>

using namespace rpmon;

namespace
{
  const spec&
  sp()
  {
    static spec s = parse_spec("input e : int; input i : int; var x : int; var y : int; var c : int;"
                               "guarantee true;");
    return s;
  }

  formula
  f(const char* text)
  {
    return parse_formula(text, sp());
  }

  valuation
  xv(std::int64_t x)
  {
    return {{"x", x}};
  }
}

TEST(parse, guarantee_with_primed_atom)
{
  spec s = parse_spec("input e : int; var x : int;\nguarantee G (e > 0 -> x' <= x + 2);\n");
  ASSERT_EQ(s.guarantees.size(), 1u);
  auto as = atoms(s.guarantees[0]);
  EXPECT_NE(std::find(as.begin(), as.end(), parse_formula("x' <= x + 2", s)), as.end());
}

TEST(parse, missing_guarantees_mean_true)
{
  spec s = parse_spec("var x : int; assume x = 0;");
  EXPECT_TRUE(s.guarantee().is_true());
}

TEST(parse, errors_carry_positions)
{
  try
    {
      parse_spec("input i : int;\nassume G (i' > 0);\n");
      FAIL() << "primed input accepted";
    }
  catch (const parse_error& e)
    {
      EXPECT_EQ(e.line, 2u);
    }
  EXPECT_THROW(parse_spec("var x : int; guarantee z = 0;"), parse_error);
  EXPECT_THROW(parse_spec("var x : int; var x : int; guarantee true;"), parse_error);
  EXPECT_THROW(parse_spec("var x : int; guarantee (x = 0;"), parse_error);
}

TEST(parse, bool_variables)
{
  spec s = parse_spec("var b : bool; guarantee G (b -> !b');");
  formula g = s.guarantees.at(0);
  lasso w{{}, {{{"b", 1}}, {{"b", 0}}}};
  EXPECT_TRUE(lasso_eval(g, w));
  lasso v{{}, {{{"b", 1}}}};
  EXPECT_FALSE(lasso_eval(g, v));
}

TEST(nnf, dualities)
{
  EXPECT_EQ(nnf(f_not(f("G (x > 0)"))), f("F (x <= 0)"));
  EXPECT_EQ(nnf(f("x > 0")), f("x > 0"));
  EXPECT_EQ(nnf(f_not(f("x > 0 U y = 1"))), f("y != 1 W (x <= 0 && y != 1)"));
}

TEST(nnf, preserves_semantics_on_random_lassos)
{
  test::formula_gen gen(17);
  for (int k = 0; k < 200; ++k)
    {
      formula phi = gen(4);
      formula n = nnf(f_not(phi)), d = desugar(phi);
      for (int j = 0; j < 5; ++j)
        {
          lasso w = gen.word();
          bool v = lasso_eval(phi, w);
          ASSERT_EQ(lasso_eval(n, w), !v) << to_string(phi) << " on " << to_string(w);
          ASSERT_EQ(lasso_eval(d, w), v) << to_string(phi) << " on " << to_string(w);
        }
    }
}

TEST(safety, syntactic_classification)
{
  EXPECT_TRUE(is_syntactic_safety(f("G (x' = x + 1)")));
  EXPECT_FALSE(is_syntactic_safety(f("F (x >= 42)")));
  EXPECT_TRUE(is_syntactic_safety(f_not(f("F (x > 0)"))));
  EXPECT_FALSE(is_syntactic_safety(f("x = 0 U y = 0")));
  EXPECT_TRUE(is_syntactic_safety(f("x = 0 W y = 0")));
  EXPECT_FALSE(is_syntactic_safety(f_not(f("G (x > 0)"))));
}

TEST(closure, base_cases)
{
  formula a = f("x > 0");
  EXPECT_EQ(closure(a), (std::set<formula>{a, f_true(), f_false()}));
  std::set<formula> cx = closure(raw(op::next, {a}));
  for (formula g: {raw(op::next, {a}), a, raw(op::next, {f_true()}), raw(op::next, {f_false()}),
                   f_true(), f_false()})
    EXPECT_TRUE(cx.count(g)) << to_string(g);
}

TEST(closure, finite_for_random_formulas)
{
  test::formula_gen gen(23);
  for (int k = 0; k < 50; ++k)
    {
      formula d = desugar(gen(2));
      auto c = closure(d);
      EXPECT_TRUE(c.count(d));
      EXPECT_TRUE(c.count(f_true()));
    }
}

TEST(booleanize, shares_propositions_between_equal_atoms)
{
  spec s = parse_spec("input e : int; var x : int; guarantee G (e > 0 -> x' <= x + 2);");
  booleanized b = booleanize(s.guarantee());
  EXPECT_EQ(b.text, "G (p0 | p1)");
  ASSERT_EQ(b.props.size(), 2u);
  EXPECT_EQ(b.props[0], parse_formula("x' <= x + 2", s));
  EXPECT_EQ(b.props[1], parse_formula("e <= 0", s));

  formula twice = f_and(f_cmp(lin_term(0), cmp::lt, lin_term::var("x")), f("F (x > 0)"));
  EXPECT_EQ(booleanize(twice).props.size(), 1u);
  EXPECT_EQ(booleanize(f_true()).text, "true");
}

TEST(lasso_eval, small_words)
{
  EXPECT_FALSE(lasso_eval(f("G (x' = x + 1)"), lasso{{}, {xv(0)}}));
  EXPECT_TRUE(lasso_eval(f("F (x = 1)"), lasso{{xv(0)}, {xv(1)}}));
  EXPECT_TRUE(lasso_eval(f("X X G (x = 1)"), lasso{{xv(0), xv(5)}, {xv(1)}}));
  EXPECT_FALSE(lasso_eval(f("x = 0 U x = 2"), lasso{{xv(0), xv(1)}, {xv(2)}}));
  EXPECT_TRUE(lasso_eval(f("x = 0 W x = 2"), lasso{{}, {xv(0)}}));
  EXPECT_FALSE(lasso_eval(f("x = 0 U x = 2"), lasso{{}, {xv(0)}}));
}

TEST(lasso_eval, recurring_obligation_under_simulated_dynamics)
{
  // counter phase with c = 0 until x reaches 5, then hold x at 5 with c = 1
  lasso w;
  for (int x = 0; x < 5; ++x)
    w.stem.push_back({{"x", x}, {"c", 0}, {"e", 0}});
  w.loop.push_back({{"x", 5}, {"c", 1}, {"e", 1}});
  EXPECT_TRUE(lasso_eval(f("G F (x >= 5)"), w));
  EXPECT_TRUE(lasso_eval(f("G (c = 0 -> x' = x + 1)"), w));
  EXPECT_TRUE(lasso_eval(f("G (!(c = 0) -> x' = 5)"), w));
  EXPECT_FALSE(lasso_eval(f("G F (x >= 6)"), w));
}

TEST(lasso_eval, suffixes_and_pairs)
{
  lasso w{{xv(0), xv(1)}, {xv(2), xv(3)}};
  EXPECT_EQ(w.word(5).at("x"), 3);
  EXPECT_EQ(w.shift(3).at(0).at("x"), 3);
  EXPECT_EQ(w.shift(3).at(1).at("x"), 2);
  EXPECT_EQ(w.pair(3).at("x'"), 2);
  test::formula_gen gen(29);
  for (int k = 0; k < 200; ++k)
    {
      formula phi = gen(3);
      lasso v = gen.word();
      ASSERT_EQ(lasso_eval(f_next(phi), v), lasso_eval(phi, v.shift(1))) << to_string(phi);
    }
}
