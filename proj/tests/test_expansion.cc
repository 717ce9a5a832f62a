#include "support.hh"

#include <gtest/gtest.h>

using namespace rpmon;

namespace
{
  const spec&
  sp()
  {
    static spec s = parse_spec("input i : int; var x : int; var y : int; guarantee true;");
    return s;
  }

  formula
  f(const char* text)
  {
    return parse_formula(text, sp());
  }

  predicate_table
  table()
  {
    return predicate_table(sp().program_vars(), sp().input_vars());
  }

  /// The letter that a pair valuation induces on the given atoms.
  letter
  letter_of(const std::vector<formula>& as, predicate_table& t, const valuation& pair)
  {
    letter a;
    for (auto& at: as)
      a.set(t.intern(at), evaluate(at, pair));
    return a;
  }

  bool
  has_position(const std::vector<letter>& ls, std::size_t id)
  {
    for (auto& l: ls)
      if (l.value(id))
        return true;
    return false;
  }
}

TEST(expand, follows_the_letter)
{
  predicate_table t = table();
  formula phi = f("G (i > 0 -> X (x' > x))");
  std::size_t p = t.intern(f("i <= 0"));
  letter pos, neg;
  pos.set(p, false);
  neg.set(p, true);
  EXPECT_EQ(expand(phi, pos, t), f_and(f("x' > x"), phi));
  EXPECT_EQ(expand(phi, neg, t), phi);
  EXPECT_EQ(expand(f_true(), letter{}, t), f_true());
}

TEST(expand, undetermined_atom_is_an_error)
{
  predicate_table t = table();
  EXPECT_THROW(expand(f("x > 0 U y > 0"), letter{}, t), std::logic_error);
}

// One expansion step moves satisfaction from a word to its suffix.
TEST(expand, one_step_agrees_with_lasso_semantics)
{
  test::formula_gen gen(101);
  predicate_table t(std::set<std::string>{"x"}, std::set<std::string>{"i"});
  int checked = 0;
  for (int k = 0; k < 400; ++k)
    {
      formula phi = gen(4);
      for (int j = 0; j < 3; ++j, ++checked)
        {
          lasso w = gen.word();
          letter a = letter_of(depth0_atoms(phi), t, w.pair(0));
          formula e = expand(phi, a, t);
          ASSERT_EQ(lasso_eval(phi, w), lasso_eval(e, w.shift(1)))
            << to_string(phi) << " on " << to_string(w) << " expands to " << to_string(e);
        }
    }
  EXPECT_GE(checked, 1000);
}

TEST(letters, irrelevant_predicates_are_not_branched_on)
{
  solver& s = test::shared_solver();
  predicate_table t = table();
  monitor_state q;
  q.fg = {f("x = 0 || x > 0 && X (y = 0)")};
  auto ls = relevant_letters(q, t, f_true(), s);
  std::size_t y0 = t.intern(f("y = 0"));
  EXPECT_FALSE(has_position(ls, y0));
  EXPECT_FALSE(ls.empty());
}

TEST(letters, inconsistent_selections_are_pruned)
{
  solver& s = test::shared_solver();
  predicate_table t = table();
  monitor_state q;
  q.fg = {f("x = 0 || F (x > 0)")};
  std::size_t eq = t.intern(f("x = 0")), gt = t.intern(f("x <= 0"));
  auto ls = relevant_letters(q, t, f_true(), s);
  // x = 0 and x > 0 together, i.e. x = 0 true and x <= 0 false
  for (auto& l: ls)
    EXPECT_FALSE(l.value(eq) == true && l.value(gt) == false);
  // the remaining three combinations are all present
  EXPECT_EQ(ls.size(), 3u);
}

TEST(letters, empty_state_has_one_letter)
{
  solver& s = test::shared_solver();
  predicate_table t = table();
  auto ls = relevant_letters(monitor_state{}, t, f_true(), s);
  ASSERT_EQ(ls.size(), 1u);
  EXPECT_TRUE(ls[0].lits.empty());
}

TEST(letters, letters_partition_pair_valuations)
{
  solver& s = test::shared_solver();
  spec sp2 = test::xi_spec();
  predicate_table t = predicate_table::from_spec(sp2);
  test::formula_gen gen(5);
  for (int k = 0; k < 30; ++k)
    {
      monitor_state q;
      q.fg = {gen(3)};
      auto ls = relevant_letters(q, t, f_true(), s);
      for (int x = -2; x <= 2; ++x)
        for (int xp = -2; xp <= 2; ++xp)
          for (int i = -2; i <= 2; ++i)
            {
              valuation v{{"x", x}, {"x'", xp}, {"i", i}};
              int hits = 0;
              for (auto& l: ls)
                {
                  bool all = true;
                  for (auto& [id, val]: l.lits)
                    all = all && evaluate(t.atom(id), v) == val;
                  hits += all;
                }
              ASSERT_EQ(hits, 1) << to_string(q.fg[0]);
            }
    }
}

TEST(propagate, carries_current_facts_forward)
{
  solver& s = test::shared_solver();
  predicate_table t = table();
  t.add_prop_pred(f("x = 0"));
  t.add_prop_pred(f("x > 0"));
  letter a;
  a.set(t.intern(f("x = 0")), true);
  a.set(t.intern(f("x' = x")), true);
  auto ps = propagate(a, t, s);
  EXPECT_NE(std::find(ps.begin(), ps.end(), f("x = 0")), ps.end());

  letter b;
  b.set(t.intern(f("x = 0")), true);
  b.set(t.intern(f("x' = x + 1")), true);
  ps = propagate(b, t, s);
  EXPECT_NE(std::find(ps.begin(), ps.end(), f("x > 0")), ps.end());

  letter c;
  c.set(t.intern(f("x = 0")), true);
  EXPECT_TRUE(propagate(c, t, s).empty());
}

TEST(next_state, expansion_step_moves_obligations)
{
  solver& s = test::shared_solver();
  predicate_table t = table();
  monitor_state q;
  q.fg = {f("X (y = 1)"), f("X G (y = x')")};
  monitor_state r = next_state_raw(q, letter{}, t, s);
  r.normalize();
  formula_vec want{f("y = 1"), f("G (y = x')")};
  sort_unique(want);
  EXPECT_EQ(r.eg, want);
  EXPECT_TRUE(r.fg.empty());
}

TEST(next_state, invariant_and_propagation)
{
  solver& s = test::shared_solver();
  predicate_table t = table();
  t.add_prop_pred(f("x = 0"));
  monitor_state q;
  q.eg = {f("x = 0"), f("G (x' >= x)")};
  letter a;
  a.set(t.intern(f("x = 0")), true);
  a.set(t.intern(f("x' <= x - 1")), false);
  a.set(t.intern(f("x' = x")), true);
  monitor_state r = next_state_raw(q, a, t, s);
  r.normalize();
  EXPECT_NE(std::find(r.eg.begin(), r.eg.end(), f("G (x' >= x)")), r.eg.end());
  EXPECT_NE(std::find(r.eg.begin(), r.eg.end(), f("x = 0")), r.eg.end());

  monitor_state empty = next_state_raw(monitor_state{}, letter{}, t, s);
  EXPECT_TRUE(empty.fa.empty() && empty.fg.empty() && empty.ea.empty());
}

TEST(predicates, defaults_from_spec)
{
  spec s = parse_spec("var x : int; input e : int;"
                      "guarantee G (x' = 3 || x' = x + e);");
  predicate_table t = predicate_table::from_spec(s);
  auto& pp = t.prop_preds();
  auto has = [&](const char* text)
  {
    return std::find(pp.begin(), pp.end(), parse_formula(text, s)) != pp.end();
  };
  EXPECT_TRUE(has("x = 3"));
  for (auto& p: pp)
    EXPECT_TRUE(t.over_state_vars(p)) << to_string(p);
}
