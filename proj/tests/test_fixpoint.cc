#include "fixpoint_oracle.hh"

#include <gtest/gtest.h>

using namespace rpmon;
using test::explicit_system;
using test::reach_all;
using test::lo;

namespace
{
  const spec&
  sp()
  {
    static spec s = parse_spec("input e : int; var x : int; var y : int; guarantee true;");
    return s;
  }

  formula
  f(const char* text)
  {
    return parse_formula(text, sp());
  }

  fixpoint_engine
  engine(std::set<std::string> xs = {"x"}, std::set<std::string> is = {})
  {
    return fixpoint_engine(test::shared_solver(), std::move(xs), std::move(is));
  }

  bool
  equivalent(const formula& a, const formula& b)
  {
    solver& s = test::shared_solver();
    return s.entails(a, b) == truth::yes && s.entails(b, a) == truth::yes;
  }
}

TEST(fixpoint, inductive_strengthening)
{
  auto e = engine();
  EXPECT_EQ(e.check_inductive(f("x >= 0"), f("x' >= x")), truth::yes);
  EXPECT_EQ(e.check_inductive(f("x > 0"), f("x' = x - 1")), truth::no);

  auto e2 = engine({"x", "y"}, {"e"});
  formula theta = f("x > -10 && y > 0");
  formula inv = f("(x' = x + 1 || x' = x + y) && y' = y");
  EXPECT_EQ(e2.check_inductive(theta, inv), truth::yes);
  solver& s = test::shared_solver();
  EXPECT_EQ(s.entails(f("x = 0 && y = e && e > 0"), theta), truth::yes);
  EXPECT_EQ(s.entails(theta, f("!(x <= -10)")), truth::yes);
}

TEST(fixpoint, reachability)
{
  auto e = engine();
  EXPECT_EQ(e.reach_entails(f("x = 0"), f("x > 5"), f("x' > x")), truth::yes);
  EXPECT_EQ(e.reach_entails(f("x > 3"), f("x > 3"), f("x' = x")), truth::yes);
  EXPECT_EQ(e.reach_entails(f("x = 0"), f("x < 0"), f("x' >= x")), truth::no);
}

TEST(fixpoint, reachability_by_brute_force_on_small_box)
{
  // x = 0 with x' > x reaches x > 5 within 6 steps on every run
  formula inv = f("x' > x && x' <= 7");
  explicit_system m({"x"}, std::nullopt, inv);
  auto b = reach_all(m, m.states_of(f("x > 5")));
  EXPECT_TRUE(b[0 - lo]);
  formula inv2 = f("x' >= x && x' <= 3");
  explicit_system m2({"x"}, std::nullopt, inv2);
  auto b2 = reach_all(m2, m2.states_of(f("x < 0")));
  EXPECT_FALSE(b2[0 - lo]);
}

TEST(fixpoint, reachable_sets)
{
  auto e = engine();
  auto a = e.reachable_set(f("x = 1"), f("x' > x"));
  ASSERT_TRUE(a);
  EXPECT_TRUE(equivalent(*a, f("x >= 1"))) << to_string(*a);
  auto b = e.reachable_set(f("x = 0"), f("x' = x"));
  ASSERT_TRUE(b);
  EXPECT_TRUE(equivalent(*b, f("x = 0"))) << to_string(*b);
  auto c = e.reachable_set(f("x = 0"), f("x' = x + 1 && x < 3"));
  ASSERT_TRUE(c);
  EXPECT_TRUE(equivalent(*c, f("x >= 0 && x <= 3"))) << to_string(*c);
}

TEST(fixpoint, agrees_with_explicit_state_oracle)
{
  // the acceptance run covers a larger sample with another seed
  auto r = test::compare_fixpoint_engine(test::fixpoint_solver(), 20, 7);
  for (auto& d: r.disagreements)
    ADD_FAILURE() << d;
  std::cout << "definite reachability answers: " << r.definite << "/" << r.relations
            << ", reachable sets: " << r.exact_sets << "/" << r.relations << "\n";
  EXPECT_GE(r.definite, r.relations / 2);
}
