#include "rpmon/sexpr.hh"

#include <cctype>

namespace rpmon
{
  std::string
  sexpr::str() const
  {
    if (is_atom)
      return atom;
    std::string r = "(";
    for (std::size_t i = 0; i < list.size(); ++i)
      {
        if (i)
          r += ' ';
        r += list[i].str();
      }
    return r + ")";
  }

  namespace
  {
    struct reader
    {
      std::string_view s;
      std::size_t pos = 0;

      void
      skip()
      {
        while (pos < s.size())
          {
            if (std::isspace(static_cast<unsigned char>(s[pos])))
              ++pos;
            else if (s[pos] == ';')
              while (pos < s.size() && s[pos] != '\n')
                ++pos;
            else
              break;
          }
      }

      sexpr
      read()
      {
        skip();
        if (pos >= s.size())
          throw sexpr_error("unexpected end of s-expression");
        char c = s[pos];
        if (c == ')')
          throw sexpr_error("unexpected ')'");
        sexpr e;
        if (c == '(')
          {
            ++pos;
            e.is_atom = false;
            for (;;)
              {
                skip();
                if (pos >= s.size())
                  throw sexpr_error("unterminated list");
                if (s[pos] == ')')
                  {
                    ++pos;
                    return e;
                  }
                e.list.push_back(read());
              }
          }
        if (c == '|')
          {
            std::size_t end = s.find('|', pos + 1);
            if (end == std::string_view::npos)
              throw sexpr_error("unterminated quoted symbol");
            e.atom = std::string(s.substr(pos + 1, end - pos - 1));
            pos = end + 1;
            return e;
          }
        if (c == '"')
          {
            std::size_t end = pos + 1;
            for (;;)
              {
                end = s.find('"', end);
                if (end == std::string_view::npos)
                  throw sexpr_error("unterminated string");
                if (end + 1 < s.size() && s[end + 1] == '"')
                  end += 2;
                else
                  break;
              }
            e.atom = std::string(s.substr(pos, end - pos + 1));
            pos = end + 1;
            return e;
          }
        std::size_t start = pos;
        while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos]))
               && s[pos] != '(' && s[pos] != ')')
          ++pos;
        e.atom = std::string(s.substr(start, pos - start));
        return e;
      }
    };
  }

  std::vector<sexpr>
  parse_sexprs(std::string_view text)
  {
    reader r{text};
    std::vector<sexpr> out;
    for (;;)
      {
        r.skip();
        if (r.pos >= text.size())
          return out;
        out.push_back(r.read());
      }
  }

  sexpr
  parse_sexpr(std::string_view text)
  {
    auto v = parse_sexprs(text);
    if (v.size() != 1)
      throw sexpr_error("expected exactly one s-expression");
    return v.front();
  }
}
