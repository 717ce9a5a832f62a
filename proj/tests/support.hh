// Shared helpers for the test suites: a solver connected to the configured
// SMT command, fixture paths and random generators for property tests.

#pragma once

#include "rpmon/booleanize.hh"
#include "rpmon/game.hh"
#include "rpmon/oracle.hh"

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

namespace rpmon::test
{
  inline std::string
  solver_command()
  {
    if (const char* s = std::getenv("RPMON_SOLVER"); s && *s)
      return s;
    return RPMON_TEST_SOLVER;
  }

  inline solver_config
  solver_cfg()
  {
    solver_config c;
    c.command = solver_command();
    return c;
  }

  /// One solver process per test binary.
  inline solver&
  shared_solver()
  {
    static solver s(solver_cfg());
    return s;
  }

  inline std::string
  fixture(const std::string& name)
  {
    return std::string(RPMON_SPECS_DIR) + "/" + name;
  }

  inline std::string
  slurp(const std::string& path)
  {
    std::ifstream in(path);
    if (!in)
      throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  /// The bundled specs that come with a hand-built automaton.
  inline const std::vector<std::string>&
  fixture_names()
  {
    static const std::vector<std::string> names{
      "safe", "inputs", "counter", "unsat", "vac", "simplify"};
    return names;
  }

  /// Game of a fixture automaton over the booleanized atoms of its spec.
  inline symbolic_game
  fixture_game(const spec& sp, const std::string& name)
  {
    booleanized b = booleanize(sp.phi());
    parity_dpa d = parse_hoa(slurp(fixture(name + ".hoa")));
    return game_from_dpa(d, b.props, sp.input_vars(), sp.program_vars());
  }

  /// Random RP-LTL formulas over one program variable x and one input i.
  class formula_gen
  {
  public:
    explicit formula_gen(std::uint64_t seed) : rng_(seed) {}

    formula
    atom()
    {
      auto c = [&] { return lin_term(pick(-2, 2)); };
      auto x = lin_term::var("x"), xp = lin_term::var("x'"), i = lin_term::var("i");
      switch (pick(0, 6))
        {
        case 0: return f_cmp(x, cmp::le, c());
        case 1: return f_cmp(x, cmp::eq, c());
        case 2: return f_cmp(i, cmp::gt, c());
        case 3: return f_cmp(xp, cmp::eq, x + c());
        case 4: return f_cmp(xp, cmp::ge, x);
        case 5: return f_cmp(x + i, cmp::le, c());
        default: return f_cmp(xp, cmp::eq, i);
        }
    }

    formula
    operator()(int depth)
    {
      if (depth == 0 || pick(0, 5) == 0)
        return atom();
      switch (pick(0, 8))
        {
        case 0: return f_not((*this)(depth - 1));
        case 1: return f_and((*this)(depth - 1), (*this)(depth - 1));
        case 2: return f_or((*this)(depth - 1), (*this)(depth - 1));
        case 3: return f_next((*this)(depth - 1));
        case 4: return f_until((*this)(depth - 1), (*this)(depth - 1));
        case 5: return f_weak_until((*this)(depth - 1), (*this)(depth - 1));
        case 6: return f_eventually((*this)(depth - 1));
        case 7: return f_globally((*this)(depth - 1));
        default: return f_implies((*this)(depth - 1), (*this)(depth - 1));
        }
    }

    lasso
    word(int radius = 2)
    {
      lasso w;
      int stem = pick(0, 3), loop = pick(1, 3);
      auto val = [&] { return valuation{{"x", pick(-radius, radius)}, {"i", pick(-radius, radius)}}; };
      for (int k = 0; k < stem; ++k)
        w.stem.push_back(val());
      for (int k = 0; k < loop; ++k)
        w.loop.push_back(val());
      return w;
    }

    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    std::mt19937_64& rng() { return rng_; }

  private:
    std::mt19937_64 rng_;
  };

  /// Spec declaring the variables used by formula_gen.
  inline spec
  xi_spec()
  {
    return parse_spec("input i : int; var x : int; guarantee true;");
  }
}
