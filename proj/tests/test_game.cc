#include "support.hh"

#include <gtest/gtest.h>

using namespace rpmon;

namespace
{
  std::string
  hoa(const std::string& acc_name, const std::string& acceptance, const std::string& body,
      unsigned states = 2, unsigned aps = 1)
  {
    std::string ap;
    for (unsigned k = 0; k < aps; ++k)
      ap += " \"p" + std::to_string(k) + "\"";
    return "HOA: v1\nStates: " + std::to_string(states) + "\nStart: 0\nAP: " + std::to_string(aps)
      + ap + "\nacc-name: " + acc_name + "\nAcceptance: " + acceptance + "\n--BODY--\n" + body
      + "--END--\n";
  }

  /// Run of a DPA on a periodic proposition sequence; true iff accepted.
  bool
  dpa_accepts(const parity_dpa& d, const std::vector<std::vector<bool>>& stem,
              const std::vector<std::vector<bool>>& loop)
  {
    unsigned q = d.initial;
    for (auto& p: stem)
      q = d.step(q, p);
    // the state at the loop head eventually repeats; the passes from its
    // first occurrence on form the periodic part
    std::vector<unsigned> heads;
    std::vector<std::vector<unsigned>> passes;
    while (std::find(heads.begin(), heads.end(), q) == heads.end())
      {
        heads.push_back(q);
        passes.emplace_back();
        for (auto& p: loop)
          {
            q = d.step(q, p);
            passes.back().push_back(d.color[q]);
          }
      }
    std::vector<unsigned> colors;
    auto first = std::find(heads.begin(), heads.end(), q) - heads.begin();
    for (auto k = first; k < static_cast<long>(passes.size()); ++k)
      colors.insert(colors.end(), passes[k].begin(), passes[k].end());
    return max_even_accepts(colors);
  }

  std::vector<std::vector<bool>>
  random_props(std::mt19937_64& rng, unsigned len, unsigned aps)
  {
    std::vector<std::vector<bool>> r(len, std::vector<bool>(aps));
    for (auto& v: r)
      for (unsigned k = 0; k < aps; ++k)
        v[k] = rng() & 1;
    return r;
  }

  const spec&
  xe_spec()
  {
    static spec s = parse_spec("input e : int; var x : int; guarantee true;");
    return s;
  }

  formula
  f(const char* text)
  {
    return parse_formula(text, xe_spec());
  }

  symbolic_game
  game_of(const std::string& text, const std::vector<formula>& atoms)
  {
    return game_from_dpa(parse_hoa(text), atoms, xe_spec().input_vars(), xe_spec().program_vars());
  }
}

TEST(hoa, max_even_acceptance)
{
  EXPECT_TRUE(max_even_accepts({0}));
  EXPECT_FALSE(max_even_accepts({1}));
  EXPECT_TRUE(max_even_accepts({1, 2, 0}));
  EXPECT_FALSE(max_even_accepts({2, 3}));
}

TEST(hoa, all_and_none_acceptance)
{
  std::string body = "State: 0\n[t] 1\nState: 1\n[t] 0\n";
  parity_dpa all = parse_hoa(hoa("all", "0 t", body));
  parity_dpa none = parse_hoa(hoa("none", "0 f", body));
  for (unsigned q = 0; q < 2; ++q)
    {
      EXPECT_EQ(all.color[q] % 2, 0u);
      EXPECT_EQ(none.color[q] % 2, 1u);
    }
}

TEST(hoa, incomplete_automaton_gets_a_rejecting_sink)
{
  parity_dpa d = parse_hoa(test::slurp(test::fixture("safe.hoa")));
  ASSERT_EQ(d.size(), 2u);
  unsigned sink = d.step(d.initial, {false});
  EXPECT_NE(sink, d.initial);
  EXPECT_EQ(d.step(sink, {true}), sink);
  EXPECT_EQ(d.color[sink] % 2, 1u);
  EXPECT_EQ(d.color[d.initial] % 2, 0u);
}

TEST(hoa, malformed_input_is_rejected)
{
  std::string det = "State: 0\n[0] 0\n[!0] 1\nState: 1\n[t] 1\n";
  EXPECT_NO_THROW(parse_hoa(hoa("Buchi", "1 Inf(0)", det)));
  EXPECT_THROW(parse_hoa(hoa("Buchi", "1 Inf(0)", "State: 0\n[t] 0\n[0] 1\nState: 1\n[t] 1\n")),
               hoa_error);
  EXPECT_THROW(parse_hoa(hoa("Buchi", "1 Inf(0)", "State: 0\n[t] 7\nState: 1\n[t] 1\n")),
               hoa_error);
  EXPECT_THROW(parse_hoa(hoa("Rabin 1", "2 Fin(0) & Inf(1)", det)), hoa_error);
  EXPECT_THROW(parse_hoa("HOA: v1\nStates: 1\n--BODY--\n"), hoa_error);
  EXPECT_THROW(parse_hoa(hoa("Buchi", "1 Inf(0)", "State: 0\n[0 &] 0\nState: 1\n[t] 1\n")),
               hoa_error);
}

// The same language (infinitely many p0) under four parity conventions.
TEST(hoa, parity_conventions_agree)
{
  auto body = [](unsigned c0, unsigned c1)
  {
    return "State: 0 {" + std::to_string(c0) + "}\n[0] 1\n[!0] 0\nState: 1 {"
      + std::to_string(c1) + "}\n[0] 1\n[!0] 0\n";
  };
  std::vector<parity_dpa> ds;
  ds.push_back(parse_hoa(hoa("parity max even 3", "3 Inf(2) | (Fin(1) & Inf(0))", body(1, 2))));
  ds.push_back(parse_hoa(hoa("parity min odd 3", "3 Fin(0) & (Inf(1) | Fin(2))", body(2, 1))));
  ds.push_back(parse_hoa(hoa("parity max odd 3", "3 Fin(2) & (Inf(1) | Fin(0))", body(0, 1))));
  ds.push_back(parse_hoa(hoa("parity min even 2", "2 Inf(0) | Fin(1)", body(1, 0))));
  ds.push_back(parse_hoa(hoa("Buchi", "1 Inf(0)", "State: 0\n[0] 1\n[!0] 0\nState: 1 {0}\n[0] 1\n[!0] 0\n")));
  // transition-based marks on a single state
  ds.push_back(parse_hoa(hoa("Buchi", "1 Inf(0)", "State: 0\n[0] 0 {0}\n[!0] 0\n", 1)));
  std::mt19937_64 rng(7);
  for (int k = 0; k < 300; ++k)
    {
      auto stem = random_props(rng, rng() % 4, 1);
      auto loop = random_props(rng, 1 + rng() % 4, 1);
      bool want = false;
      for (auto& p: loop)
        want = want || p[0];
      for (std::size_t j = 0; j < ds.size(); ++j)
        ASSERT_EQ(dpa_accepts(ds[j], stem, loop), want) << "automaton " << j;
    }
}

TEST(bexpr, parse_and_eval)
{
  bexpr b = parse_bexpr("0 & !1 | t");
  EXPECT_TRUE(b.eval({false, false}));
  bexpr c = parse_bexpr("0 & (!1 | 2)");
  EXPECT_TRUE(c.eval({true, false, false}));
  EXPECT_FALSE(c.eval({true, true, false}));
  EXPECT_FALSE(c.eval({false, false, true}));
  EXPECT_TRUE(parse_bexpr(c.str()).eval({true, true, true}));
}

TEST(game, guards_substitute_atoms)
{
  std::string body = "State: 0 {0}\n[0 & !1] 0\n[!0 | 1] 1\nState: 1 {1}\n[t] 1\n";
  symbolic_game g = game_of(hoa("Buchi", "1 Inf(0)", body, 2, 2), {f("x' <= x"), f("e <= 0")});
  ASSERT_EQ(g.locs.size(), 2u);
  auto out = g.outgoing(0);
  ASSERT_EQ(out.size(), 2u);
  solver& s = test::shared_solver();
  const game_edge* self = out[0]->to == 0 ? out[0] : out[1];
  EXPECT_TRUE(s.proves(self->guard, f("x' <= x && e > 0")));
  EXPECT_TRUE(s.proves(f("x' <= x && e > 0"), self->guard));
  ASSERT_EQ(g.outgoing(1).size(), 1u);
  EXPECT_TRUE(g.outgoing(1)[0]->guard.is_true());
  EXPECT_TRUE(check_wellformed(g, s).clean());

  EXPECT_THROW(game_of(hoa("Buchi", "1 Inf(0)", body, 2, 2), {f("x' <= x")}), std::invalid_argument);
}

TEST(game, wellformedness_violations)
{
  solver& s = test::shared_solver();
  // p0 implies p1 in the theory; the missing !p0 & !p1 case goes to the sink.
  // Dropping a guard over x' alone never blocks since x' is chosen freely.
  std::string body = "State: 0 {0}\n[0] 0\n[1 & !0] 1\nState: 1 {0}\n[t] 1\n";
  symbolic_game ok = game_of(hoa("Buchi", "1 Inf(0)", body, 2, 2), {f("x' <= x"), f("x' <= x + 1")});
  EXPECT_TRUE(check_wellformed(ok, s).clean());

  symbolic_game overlap = ok;
  for (auto& e: overlap.edges)
    if (e.from == 0 && e.to == 0)
      e.guard = f_true();
  EXPECT_FALSE(check_wellformed(overlap, s).clean());

  symbolic_game free_choice = ok;
  std::erase_if(free_choice.edges, [](auto& e) { return e.from == 0 && e.to == 1; });
  EXPECT_TRUE(check_wellformed(free_choice, s).clean());

  // only the input decides whether the remaining edge is enabled
  std::string in_body = "State: 0 {0}\n[0 & !1] 0\n[!0 | 1] 1\nState: 1 {1}\n[t] 1\n";
  symbolic_game blocking = game_of(hoa("Buchi", "1 Inf(0)", in_body, 2, 2), {f("x' <= x"), f("e <= 0")});
  std::erase_if(blocking.edges, [](auto& e) { return e.from == 0 && e.to == 1; });
  auto rb = check_wellformed(blocking, s);
  ASSERT_EQ(rb.violations.size(), 1u);
  EXPECT_NE(rb.violations[0].find("block"), std::string::npos);
}

TEST(game, fixture_automata_recognize_their_specs)
{
  solver& s = test::shared_solver();
  for (auto& name: test::fixture_names())
    {
      spec sp = parse_spec_file(test::fixture(name + ".rpltl"));
      symbolic_game g = test::fixture_game(sp, name);
      EXPECT_TRUE(check_wellformed(g, s).clean()) << name;
      formula phi = sp.phi();
      lasso_source src(sp, {}, s);
      std::size_t n = 0;
      for (auto& w: src.mixed(phi))
        {
          bool want = lasso_eval(phi, w);
          ASSERT_EQ(game_accepts(g, w), want) << name << " on " << to_string(w);
          ++n;
        }
      EXPECT_GT(n, 0u) << name;
    }
}

TEST(game, serialize_round_trip)
{
  spec sp = parse_spec_file(test::fixture("counter.rpltl"));
  symbolic_game g = test::fixture_game(sp, "counter");
  std::string text = serialize(g);
  symbolic_game back = parse_game(text);
  EXPECT_EQ(serialize(back), text);
  ASSERT_EQ(back.locs.size(), g.locs.size());
  EXPECT_EQ(back.edges.size(), g.edges.size());
  EXPECT_THROW(parse_game("location 0 bogus"), std::runtime_error);
}

TEST(product, trivial_game_mirrors_the_monitor)
{
  solver& s = test::shared_solver();
  spec sp = parse_spec_file(test::fixture("counter.rpltl"));
  monitor m = monitor_builder(sp, s).build();
  std::string body = "State: 0 {0}\n[t] 0\n";
  symbolic_game top = game_from_dpa(parse_hoa(hoa("Buchi", "1 Inf(0)", body, 1, 0)), {},
                                    sp.input_vars(), sp.program_vars());
  product_game p = product(top, m, s);
  // monitor states that are reachable and not merged into an UNSAT sink
  std::set<std::size_t> qs;
  for (auto& [l, q]: p.pairs)
    {
      EXPECT_EQ(l, 0u);
      qs.insert(q);
    }
  EXPECT_EQ(qs.size(), p.locs.size());
  for (std::size_t k = 0; k < p.locs.size(); ++k)
    EXPECT_EQ(p.locs[k].verd, m.verdicts[p.pairs[k].second]);
  EXPECT_TRUE(check_wellformed(p, s).clean());
}

TEST(product, guards_refine_game_guards)
{
  solver& s = test::shared_solver();
  for (auto name: {"safe", "inputs", "unsat", "counter"})
    {
      spec sp = parse_spec_file(test::fixture(std::string(name) + ".rpltl"));
      symbolic_game g = test::fixture_game(sp, name);
      monitor m = monitor_builder(sp, s).build();
      product_game p = product(g, m, s);
      EXPECT_TRUE(check_wellformed(p, s).clean()) << name;
      for (auto& e: p.edges)
        {
          std::size_t l = p.pairs[e.from].first, l2 = p.pairs[e.to].first;
          bool found = false;
          for (auto* ge: g.outgoing(l))
            if (ge->to == l2 && s.proves(e.guard, ge->guard))
              found = true;
          // edges into an UNSAT sink may merge game targets
          if (p.locs[e.to].verd != verdict::unsat)
            EXPECT_TRUE(found) << name << " edge " << e.from << " -> " << e.to;
        }
      lasso_source src(sp, {}, s);
      EXPECT_TRUE(check_pseudo_language(g, p, src.mixed(sp.phi())).ok()) << name;
    }
}

TEST(product, unsat_fixture_reaches_a_losing_sink)
{
  solver& s = test::shared_solver();
  spec sp = parse_spec_file(test::fixture("unsat.rpltl"));
  product_game p = product(test::fixture_game(sp, "unsat"), monitor_builder(sp, s).build(), s);
  EXPECT_GE(p.count(verdict::unsat), 1u);
  for (std::size_t k = 0; k < p.locs.size(); ++k)
    if (p.locs[k].verd == verdict::unsat)
      for (auto* e: p.outgoing(k))
        EXPECT_EQ(e->to, k);
}

TEST(product, recurrence_fixture_needs_no_parity)
{
  solver& s = test::shared_solver();
  spec sp = parse_spec_file(test::fixture("simplify.rpltl"));
  product_game p = product(test::fixture_game(sp, "simplify"), monitor_builder(sp, s).build(), s);
  EXPECT_EQ(p.count(verdict::open), 0u);
  EXPECT_GE(p.count(verdict::safety), 1u);
}
