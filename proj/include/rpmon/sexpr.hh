#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rpmon
{
  struct sexpr
  {
    bool is_atom = true;
    std::string atom;
    std::vector<sexpr> list;

    bool is(std::string_view s) const { return is_atom && atom == s; }
    std::size_t size() const { return list.size(); }
    const sexpr& operator[](std::size_t i) const { return list.at(i); }
    std::string str() const;
  };

  class sexpr_error : public std::runtime_error
  {
    using std::runtime_error::runtime_error;
  };

  /// Parse every top-level expression of the text.  |quoted| symbols lose
  /// their bars; string literals keep their quotes.
  std::vector<sexpr> parse_sexprs(std::string_view text);
  sexpr parse_sexpr(std::string_view text);
}
