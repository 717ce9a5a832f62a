#include "rpmon/spec.hh"

#include <cctype>
#include <fstream>
#include <sstream>

namespace rpmon
{
  std::set<std::string>
  spec::program_vars() const
  {
    std::set<std::string> r;
    for (auto& d: decls)
      if (!d.input)
        r.insert(d.name);
    return r;
  }

  std::set<std::string>
  spec::input_vars() const
  {
    std::set<std::string> r;
    for (auto& d: decls)
      if (d.input)
        r.insert(d.name);
    return r;
  }

  std::set<std::string>
  spec::all_vars() const
  {
    std::set<std::string> r;
    for (auto& d: decls)
      r.insert(d.name);
    return r;
  }

  const var_decl*
  spec::find(const std::string& name) const
  {
    for (auto& d: decls)
      if (d.name == name)
        return &d;
    return nullptr;
  }

  std::set<std::int64_t>
  spec::constants() const
  {
    std::set<std::int64_t> r;
    for (auto& f: assumptions)
      for (auto& a: atoms(f))
        r.insert(-a.atom_term().constant());
    for (auto& f: guarantees)
      for (auto& a: atoms(f))
        r.insert(-a.atom_term().constant());
    return r;
  }

  namespace
  {
    enum class tok { ident, number, punct, end };

    struct token
    {
      tok kind;
      std::string text;
      unsigned line, col;
    };

    std::vector<token>
    lex(std::string_view s)
    {
      std::vector<token> out;
      unsigned line = 1, col = 1;
      std::size_t i = 0;
      auto adv = [&](std::size_t n)
      {
        for (std::size_t k = 0; k < n; ++k, ++i)
          {
            if (s[i] == '\n')
              {
                ++line;
                col = 1;
              }
            else
              ++col;
          }
      };
      static const char* puncts[] = {"<->", "->", "&&", "||", "<=", ">=", "!=", "==",
                                     "(", ")", ";", ":", "'", "+", "-", "*", "<",
                                     ">", "=", "!", "&", "|"};
      while (i < s.size())
        {
          char c = s[i];
          if (std::isspace(static_cast<unsigned char>(c)))
            {
              adv(1);
              continue;
            }
          if (c == '#' || (c == '/' && i + 1 < s.size() && s[i + 1] == '/'))
            {
              while (i < s.size() && s[i] != '\n')
                adv(1);
              continue;
            }
          token t{tok::end, "", line, col};
          if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
            {
              std::size_t j = i;
              while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
                ++j;
              t.kind = tok::ident;
              t.text = std::string(s.substr(i, j - i));
              adv(j - i);
            }
          else if (std::isdigit(static_cast<unsigned char>(c)))
            {
              std::size_t j = i;
              while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])))
                ++j;
              t.kind = tok::number;
              t.text = std::string(s.substr(i, j - i));
              adv(j - i);
            }
          else
            {
              bool found = false;
              for (const char* p: puncts)
                {
                  std::string_view pv(p);
                  if (s.substr(i, pv.size()) == pv)
                    {
                      t.kind = tok::punct;
                      t.text = std::string(pv);
                      adv(pv.size());
                      found = true;
                      break;
                    }
                }
              if (!found)
                throw parse_error(std::string("unexpected character '") + c + "'", line, col);
            }
          out.push_back(std::move(t));
        }
      out.push_back({tok::end, "", line, col});
      return out;
    }

    const std::set<std::string> keywords =
      {"G", "F", "X", "U", "W", "true", "false", "input", "var", "assume",
       "guarantee", "int", "bool"};

    struct backtrack {};

    struct parser
    {
      std::vector<token> toks;
      std::size_t pos = 0;
      spec& decls;

      const token& peek(std::size_t k = 0) const
      {
        return toks[std::min(pos + k, toks.size() - 1)];
      }

      bool
      is(const char* p, std::size_t k = 0) const
      {
        auto& t = peek(k);
        return (t.kind == tok::punct || t.kind == tok::ident) && t.text == p;
      }

      [[noreturn]] void
      fail(const std::string& msg, const token& t) const
      {
        throw parse_error(msg, t.line, t.col);
      }

      void
      expect(const char* p)
      {
        if (!is(p))
          fail(std::string("expected '") + p + "'", peek());
        ++pos;
      }

      // --- terms

      std::pair<std::string, bool>
      variable(bool bool_ok)
      {
        const token& t = peek();
        if (t.kind != tok::ident || keywords.count(t.text))
          fail("expected variable", t);
        const var_decl* d = decls.find(t.text);
        if (!d)
          fail("undeclared variable '" + t.text + "'", t);
        ++pos;
        bool p = false;
        if (is("'"))
          {
            if (d->input)
              fail("input variable '" + t.text + "' cannot be primed", peek());
            ++pos;
            p = true;
          }
        if (d->sort == sort::boolean && !bool_ok)
          fail("bool variable '" + t.text + "' used in arithmetic", t);
        return {t.text, p};
      }

      lin_term
      term_atom()
      {
        const token& t = peek();
        if (is("-"))
          {
            ++pos;
            return -term_atom();
          }
        if (t.kind == tok::number)
          {
            ++pos;
            if (t.text.size() > 15)
              fail("integer constant too large", t);
            return lin_term(std::stoll(t.text));
          }
        if (is("("))
          {
            ++pos;
            lin_term r = term();
            if (!is(")"))
              throw backtrack{};
            ++pos;
            return r;
          }
        if (t.kind == tok::ident && !keywords.count(t.text))
          {
            // a bool variable can only start a formula
            if (const var_decl* d = decls.find(t.text); d && d->sort == sort::boolean)
              throw backtrack{};
            auto [name, p] = variable(false);
            return lin_term::var(p ? primed(name) : name);
          }
        throw backtrack{};
      }

      lin_term
      product()
      {
        const token& start = peek();
        lin_term r = term_atom();
        while (is("*"))
          {
            ++pos;
            lin_term o = term_atom();
            if (r.is_constant())
              r = o * r.constant();
            else if (o.is_constant())
              r = r * o.constant();
            else
              fail("nonlinear term", start);
          }
        return r;
      }

      lin_term
      term()
      {
        lin_term r = product();
        while (is("+") || is("-"))
          {
            bool plus = is("+");
            ++pos;
            lin_term o = product();
            r = plus ? r + o : r - o;
          }
        return r;
      }

      std::optional<cmp>
      comparison_op()
      {
        static const std::pair<const char*, cmp> ops[] =
          {{"<=", cmp::le}, {">=", cmp::ge}, {"!=", cmp::ne}, {"==", cmp::eq},
           {"<", cmp::lt}, {">", cmp::gt}, {"=", cmp::eq}};
        for (auto& [p, c]: ops)
          if (is(p))
            {
              ++pos;
              return c;
            }
        return std::nullopt;
      }

      formula
      comparison()
      {
        lin_term lhs = term();
        auto c = comparison_op();
        if (!c)
          throw backtrack{};
        std::vector<formula> chain;
        for (;;)
          {
            lin_term rhs = term();
            chain.push_back(f_cmp(lhs, *c, rhs));
            lhs = rhs;
            c = comparison_op();
            if (!c)
              break;
          }
        return f_and(chain);
      }

      // --- formulas

      formula
      primary()
      {
        const token& t = peek();
        if (t.kind == tok::ident && (t.text == "true" || t.text == "false"))
          {
            ++pos;
            return f_bool(t.text == "true");
          }
        if (t.kind == tok::ident && !keywords.count(t.text))
          {
            const var_decl* d = decls.find(t.text);
            if (d && d->sort == sort::boolean)
              {
                auto [name, p] = variable(true);
                return f_cmp(lin_term::var(p ? primed(name) : name), cmp::eq, lin_term(1));
              }
          }
        std::size_t save = pos;
        try
          {
            return comparison();
          }
        catch (const backtrack&)
          {
            pos = save;
          }
        if (is("("))
          {
            ++pos;
            formula f = implication();
            expect(")");
            return f;
          }
        fail("expected formula", peek());
      }

      formula
      unary()
      {
        if (is("!"))
          {
            ++pos;
            return f_not(unary());
          }
        if (is("X"))
          {
            ++pos;
            return f_next(unary());
          }
        if (is("F"))
          {
            ++pos;
            return f_eventually(unary());
          }
        if (is("G"))
          {
            ++pos;
            return f_globally(unary());
          }
        return primary();
      }

      formula
      binary_temporal()
      {
        formula l = unary();
        if (is("U") || is("W"))
          {
            bool u = is("U");
            ++pos;
            formula r = binary_temporal();
            return u ? f_until(l, r) : f_weak_until(l, r);
          }
        return l;
      }

      formula
      conjunction()
      {
        std::vector<formula> v{binary_temporal()};
        while (is("&&") || is("&"))
          {
            ++pos;
            v.push_back(binary_temporal());
          }
        return f_and(v);
      }

      formula
      disjunction()
      {
        std::vector<formula> v{conjunction()};
        while (is("||") || is("|"))
          {
            ++pos;
            v.push_back(conjunction());
          }
        return f_or(v);
      }

      formula
      implication()
      {
        formula l = disjunction();
        if (is("->"))
          {
            ++pos;
            return f_implies(l, implication());
          }
        if (is("<->"))
          {
            ++pos;
            return f_iff(l, implication());
          }
        return l;
      }

      formula
      whole_formula()
      {
        try
          {
            return implication();
          }
        catch (const backtrack&)
          {
            fail("malformed term", peek());
          }
      }

      // --- declarations

      void
      declaration(bool input)
      {
        const token& t = peek();
        if (t.kind != tok::ident || keywords.count(t.text))
          fail("expected identifier", t);
        if (decls.find(t.text))
          fail("duplicate declaration of '" + t.text + "'", t);
        for (auto& d: decls.decls)
          if (d.name + "_p" == t.text || t.text + "_p" == d.name)
            fail("'" + t.text + "' clashes with the primed rendering of another variable", t);
        ++pos;
        var_decl d{t.text, sort::integer, input};
        expect(":");
        if (is("int"))
          d.sort = sort::integer;
        else if (is("bool"))
          d.sort = sort::boolean;
        else
          fail("unknown sort '" + peek().text + "'", peek());
        ++pos;
        expect(";");
        decls.decls.push_back(d);
      }

      void
      file()
      {
        while (peek().kind != tok::end)
          {
            if (is("input") || is("var"))
              {
                bool input = is("input");
                ++pos;
                declaration(input);
              }
            else if (is("assume") || is("guarantee"))
              {
                bool a = is("assume");
                ++pos;
                formula f = whole_formula();
                expect(";");
                (a ? decls.assumptions : decls.guarantees).push_back(f);
              }
            else
              fail("expected declaration, assume or guarantee", peek());
          }
      }
    };
  }

  spec
  parse_spec(std::string_view text)
  {
    spec s;
    parser p{lex(text), 0, s};
    p.file();
    if (s.guarantees.empty())
      s.guarantees.push_back(f_true());
    return s;
  }

  spec
  parse_spec_file(const std::string& path)
  {
    std::ifstream in(path);
    if (!in)
      throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_spec(ss.str());
  }

  formula
  parse_formula(std::string_view text, const spec& s)
  {
    spec copy;
    copy.decls = s.decls;
    parser p{lex(text), 0, copy};
    formula f = p.whole_formula();
    if (p.peek().kind != tok::end)
      p.fail("trailing input", p.peek());
    return f;
  }
}
