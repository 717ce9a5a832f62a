// Specification files:
//
//   input e : int;
//   var x : int;
//   assume e > 0 && x = 0;
//   guarantee x' = 0 && X G (x' = x + 1 || x' = x + y);
//
// Variables of sort bool are integers read as true iff equal to 1; they
// may only appear bare (b, b', !b).

#pragma once

#include "rpmon/formula.hh"

namespace rpmon
{
  enum class sort { integer, boolean };

  struct var_decl
  {
    std::string name;
    rpmon::sort sort = sort::integer;
    bool input = false;
  };

  struct spec
  {
    std::vector<var_decl> decls;
    std::vector<formula> assumptions;
    std::vector<formula> guarantees;

    std::set<std::string> program_vars() const;
    std::set<std::string> input_vars() const;
    /// X u I (unprimed).
    std::set<std::string> all_vars() const;
    const var_decl* find(const std::string& name) const;

    formula assumption() const { return f_and(assumptions); }
    formula guarantee() const { return f_and(guarantees); }
    /// Phi = /\A -> /\G.
    formula phi() const { return f_implies(assumption(), guarantee()); }
    /// Integer constants occurring in the formulas.
    std::set<std::int64_t> constants() const;
  };

  class parse_error : public std::runtime_error
  {
  public:
    parse_error(const std::string& msg, unsigned line, unsigned col)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line(line), col(col)
    {
    }
    unsigned line, col;
  };

  spec parse_spec(std::string_view text);
  spec parse_spec_file(const std::string& path);

  /// Parse a single formula against the declarations of s.
  formula parse_formula(std::string_view text, const spec& s);
}
