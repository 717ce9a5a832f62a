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

  imp_fact
  always(const char* body)
  {
    return {f_true(), imp_kind::now, f(body)};
  }

  struct harness
  {
    explicit harness(bool gen_inv_p = false)
      : t(predicate_table::from_spec(sp())), e(test::shared_solver(), t, cfg(gen_inv_p))
    {
    }

    static engine_config
    cfg(bool gen_inv_p)
    {
      engine_config c;
      c.gen_inv_p = gen_inv_p;
      return c;
    }

    monitor_state
    run(const monitor_state& q, std::vector<std::string>& names)
    {
      std::vector<rule_app> log;
      monitor_state r = e.apply_rules(q, &log);
      for (auto& a: log)
        names.push_back(rule_name(a.rule));
      return r;
    }

    predicate_table t;
    rule_engine e;
  };

  using names = std::vector<std::string>;

  bool
  contains(const imp_set& s, const imp_fact& f)
  {
    return std::find(s.begin(), s.end(), f) != s.end();
  }

  monitor_state
  normalized(monitor_state q)
  {
    q.normalize();
    normalize_imps(q.imp_a);
    normalize_imps(q.imp_g);
    return q;
  }
}

TEST(state, partition_of_initial_formula)
{
  spec s = parse_spec("input i : int; var x : int; var y : int;"
                      "assume G (i > 0); assume i = 0;"
                      "guarantee x = 0; guarantee G (x' - y = x); guarantee G X (x > 0);"
                      "guarantee G F (x = 10);");
  monitor_state q = partition_initial(s);
  auto P = [&](const char* t) { return parse_formula(t, s); };
  formula_vec ea{P("G (i > 0)"), P("i = 0")}, fg{P("G F (x = 10)")},
    eg{P("x = 0"), P("G (x' - y = x)"), P("G X (x > 0)")};
  sort_unique(ea);
  sort_unique(eg);
  EXPECT_TRUE(q.fa.empty());
  EXPECT_EQ(q.ea, ea);
  EXPECT_EQ(q.fg, fg);
  EXPECT_EQ(q.eg, eg);
  EXPECT_TRUE(q.imp_a.empty() && q.imp_g.empty());

  monitor_state live = partition_initial(parse_spec("var x : int; guarantee F (x >= 42);"));
  EXPECT_EQ(live.fg.size(), 1u);
  EXPECT_TRUE(live.eg.empty());
  monitor_state top = partition_initial(parse_spec("var x : int; guarantee true;"));
  EXPECT_TRUE(top.fa.empty() && top.ea.empty() && top.fg.empty() && top.eg.empty());
}

TEST(state, current_facts_and_invariants)
{
  monitor_state q;
  q.ea = {f("G (i > 0)"), f("i = 0")};
  q.eg = {f("x = 0"), f("G (x' - y = x)"), f("G X (x > 0)")};
  q.normalize();
  q.imp_a = {always("i > 0")};
  q.imp_g = {always("x' - y = x"), {f_true(), imp_kind::next, f("x > 0")}};
  EXPECT_EQ(q.curr(side::assume), f("i = 0"));
  EXPECT_EQ(q.curr(side::guarantee), f("i = 0 && x = 0"));
  EXPECT_EQ(q.imp_inv(side::assume), f("i > 0"));
  EXPECT_EQ(q.imp_inv(side::guarantee), f("x' - y = x"));

  monitor_state empty;
  EXPECT_TRUE(empty.curr(side::guarantee).is_true());
  EXPECT_TRUE(empty.imp_inv(side::guarantee).is_true());

  monitor_state cond;
  cond.eg = {f("x = 0"), f("G (x' >= x)")};
  cond.imp_g = {{f("y = 1"), imp_kind::eventually, f("y < 0")}};
  EXPECT_EQ(cond.curr(side::guarantee), f("x = 0"));
  EXPECT_TRUE(cond.imp_inv(side::guarantee).is_true());
}

TEST(substitution, replaces_occurrences)
{
  formula fx = f("F (x > 5)");
  EXPECT_EQ(replace_non_nested(formula_vec{fx}, fx, f_true()), formula_vec{f_true()});
  formula g = f("G (x > 5 || y = 0)");
  EXPECT_EQ(replace_non_nested(g, f("x > 5"), f_true()), g);
  EXPECT_EQ(replace_all(g, f("x > 5"), f_true()), f_true());
  EXPECT_EQ(replace_all(g, f("y = 7"), f_false()), g);
  // a conjunction matches inside a larger one
  EXPECT_EQ(replace_all(f("x = 1 && y = 2 && i = 3"), f("x = 1 && i = 3"), f_false()), f_false());
}

TEST(rules, unsat_on_contradicting_invariant)
{
  harness h;
  monitor_state q;
  q.eg = {f("x = 0")};
  q.imp_g = {always("x != 0")};
  auto r = h.e.try_rule(rule_id::unsat, side::guarantee, q);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->fg, formula_vec{f_false()});
  EXPECT_EQ(r->eg, formula_vec{f_false()});
  EXPECT_EQ(r->imp_g, q.imp_g);
}

TEST(rules, unsat_f_on_unreachable_target)
{
  harness h;
  monitor_state q;
  q.eg = {f("x = 0")};
  q.imp_g = {{f("x = 0"), imp_kind::eventually, f("y = 0")}, always("y != 0")};
  normalize_imps(q.imp_g);
  EXPECT_FALSE(h.e.try_rule(rule_id::unsat, side::guarantee, q));
  auto r = h.e.try_rule(rule_id::unsat_f, side::guarantee, q);
  ASSERT_TRUE(r);
  EXPECT_TRUE(r->trivially_false());
}

TEST(rules, failing_premise_leaves_state_alone)
{
  harness h;
  monitor_state q;
  q.eg = {f("x = 0")};
  q.fg = {f("F (y > 0)")};
  for (rule_id r: {rule_id::unsat, rule_id::unsat_f, rule_id::subst_true, rule_id::subst_false,
                   rule_id::simplify_non_nested, rule_id::chain_imp})
    EXPECT_FALSE(h.e.try_rule(r, side::guarantee, q)) << rule_name(r);
}

TEST(rules, bottom_is_a_fixed_point)
{
  harness h;
  std::vector<std::string> log;
  monitor_state b = bottom_state();
  EXPECT_EQ(h.run(b, log), b);
  EXPECT_TRUE(log.empty());
}

// Invariant generation exposes an unsatisfiable liveness obligation.
TEST(trace, invariant_then_unsat)
{
  harness h;
  monitor_state q;
  q.eg = {f("x = 0"), f("G (x = y)"), f("G (x' >= x)")};
  q.fg = {f("y = 0 -> F (x = -5)")};
  names log;
  monitor_state r = h.run(q, log);
  EXPECT_EQ(log, (names{"PropagateG", "GenInv", "ChainImpG", "SubstFalse", "Unsat"}));

  monitor_state want;
  want.fg = {f_false()};
  want.eg = {f_false()};
  want.imp_g = {always("x = y"), always("x' >= x"),
                {f("x = 0"), imp_kind::always, f("x != -5")}, always("x != -5")};
  EXPECT_EQ(r, normalized(want)) << r.to_string();
}

// The precise invariant computed in one state closes a conflict in its
// successor.
TEST(trace, precise_invariant_then_unsat_f)
{
  harness h(true);
  monitor_state q;
  q.eg = {f("x = 1")};
  q.fg = {f("X (y = 1)"), f("X G (y = x')")};
  q.imp_g = {always("x' > x"), {f("y = 1"), imp_kind::eventually, f("y < 0")}};
  normalize_imps(q.imp_g);
  names log;
  monitor_state r = h.run(q, log);
  EXPECT_EQ(log, (names{"GenInvP", "ChainImpG"}));
  EXPECT_TRUE(contains(r.imp_g, {f("x = 1"), imp_kind::always, f("x >= 1")}));
  EXPECT_TRUE(contains(r.imp_g, always("x >= 1")));

  solver& s = test::shared_solver();
  auto letters = relevant_letters(r, h.t, f_true(), s);
  int checked = 0;
  for (auto& a: letters)
    {
      monitor_state raw = next_state_raw(r, a, h.t, s);
      raw.normalize();
      if (raw.trivially_false())
        continue;
      formula_vec eg{f("y = 1"), f("G (y = x')")};
      sort_unique(eg);
      for (auto& e: eg)
        EXPECT_NE(std::find(raw.eg.begin(), raw.eg.end(), e), raw.eg.end()) << to_string(e);
      names succ_log;
      monitor_state succ = h.run(raw, succ_log);
      ASSERT_FALSE(succ_log.empty());
      EXPECT_EQ(succ_log.back(), "UnsatF");
      EXPECT_EQ(std::count(succ_log.begin(), succ_log.end(), "Unsat"), 0);
      EXPECT_EQ(succ.fg, formula_vec{f_false()});
      EXPECT_EQ(succ.eg, formula_vec{f_false()});
      EXPECT_TRUE(contains(succ.imp_g, always("x >= 1")));
      ++checked;
    }
  EXPECT_GE(checked, 1);
}

TEST(trace, precise_invariant_is_off_by_default)
{
  harness h;
  monitor_state q;
  q.eg = {f("x = 1")};
  q.imp_g = {always("x' > x")};
  names log;
  h.run(q, log);
  EXPECT_EQ(std::count(log.begin(), log.end(), "GenInvP"), 0);
}

// Reachability discharges an eventuality (target scaled down to 5).
TEST(trace, reachability_then_simplify)
{
  harness h;
  monitor_state q;
  q.eg = {f("x = 0"), f("G (x' > x)")};
  q.fg = {f("F (x > 5)")};
  q.imp_g = {always("x' > x")};
  names log;
  monitor_state r = h.run(q, log);
  EXPECT_EQ(log, (names{"GenReach", "SimplifyNonNested"}));

  monitor_state want;
  want.eg = {f("x = 0"), f("G (x' > x)")};
  want.imp_g = {always("x' > x"), {f("x = 0"), imp_kind::eventually, f("x > 5")}};
  EXPECT_EQ(r, normalized(want)) << r.to_string();
}

TEST(pipeline, idempotent_on_rule_fixed_points)
{
  harness h;
  monitor_state q;
  q.eg = {f("x = 0"), f("G (x' > x)")};
  q.fg = {f("F (x > 5)"), f("G F (y = 0)")};
  names first, second;
  monitor_state r = h.run(q, first);
  monitor_state r2 = h.run(r, second);
  EXPECT_EQ(r2, r);
}

TEST(pipeline, rules_preserve_state_meaning_on_sampled_words)
{
  // Formula(q) with the derived facts must agree with the input formula
  test::formula_gen gen(41);
  harness h;
  for (int k = 0; k < 40; ++k)
    {
      monitor_state q;
      q.eg = {gen.atom(), f_globally(gen.atom())};
      q.fg = {gen(3)};
      q.normalize();
      names log;
      monitor_state r = h.run(q, log);
      formula before = q.as_formula(), after = r.as_formula();
      for (int j = 0; j < 30; ++j)
        {
          lasso w = gen.word();
          ASSERT_EQ(lasso_eval(before, w), lasso_eval(after, w))
            << q.to_string() << "\n=>\n" << r.to_string() << "\non " << to_string(w);
        }
    }
}

TEST(rules, names_round_trip)
{
  for (int r = 0; r <= static_cast<int>(rule_id::rewrite); ++r)
    {
      auto id = static_cast<rule_id>(r);
      EXPECT_EQ(rule_from_name(rule_name(id)), id);
    }
  EXPECT_FALSE(rule_from_name("NoSuchRule"));
}
