#include "rpmon/formula.hh"

#include <sstream>

namespace rpmon
{
  namespace
  {
    void
    print_monomial(std::ostream& os, std::int64_t c, const std::string& v, bool first)
    {
      if (!first)
        os << (c < 0 ? " - " : " + ");
      else if (c < 0)
        os << "-";
      std::int64_t a = c < 0 ? -c : c;
      if (a != 1)
        os << a << "*";
      os << v;
    }

    // Print the sum of monomials, then the constant.
    void
    print_side(std::ostream& os,
               const std::vector<std::pair<std::string, std::int64_t>>& ms,
               std::int64_t k)
    {
      bool first = true;
      for (auto& [v, c]: ms)
        {
          print_monomial(os, c, v, first);
          first = false;
        }
      if (first)
        os << k;
      else if (k > 0)
        os << " + " << k;
      else if (k < 0)
        os << " - " << -k;
    }

    const char*
    cmp_str(cmp c)
    {
      switch (c)
        {
        case cmp::le: return "<=";
        case cmp::lt: return "<";
        case cmp::eq: return "=";
        case cmp::ne: return "!=";
        case cmp::ge: return ">=";
        case cmp::gt: return ">";
        }
      return "?";
    }

    cmp
    mirror(cmp c)
    {
      switch (c)
        {
        case cmp::le: return cmp::ge;
        case cmp::lt: return cmp::gt;
        case cmp::ge: return cmp::le;
        case cmp::gt: return cmp::lt;
        default: return c;
        }
    }

    cmp
    negate(cmp c)
    {
      switch (c)
        {
        case cmp::le: return cmp::gt;
        case cmp::lt: return cmp::ge;
        case cmp::eq: return cmp::ne;
        case cmp::ne: return cmp::eq;
        case cmp::ge: return cmp::lt;
        case cmp::gt: return cmp::le;
        }
      return c;
    }

    // "t c 0" rendered with positive monomials on the left.
    std::string
    print_atom(cmp c, const lin_term& t)
    {
      std::vector<std::pair<std::string, std::int64_t>> pos, neg;
      for (auto& [v, k]: t.coeffs())
        (k > 0 ? pos : neg).emplace_back(v, k > 0 ? k : -k);
      std::ostringstream os;
      if (pos.empty() && neg.empty())
        {
          os << t.constant() << " " << cmp_str(c) << " 0";
          return os.str();
        }
      if (pos.empty())
        {
          // -n*v + k c 0  <=>  n*v mirror(c) k
          print_side(os, neg, 0);
          os << " " << cmp_str(mirror(c)) << " " << t.constant();
          return os.str();
        }
      print_side(os, pos, 0);
      os << " " << cmp_str(c) << " ";
      print_side(os, neg, -t.constant());
      return os.str();
    }

    int
    prec(const formula& f)
    {
      switch (f.kind())
        {
        case op::or_: return 1;
        case op::and_: return 2;
        case op::until:
        case op::weak_until: return 3;
        case op::not_:
          return f[0].is_atom() ? 5 : 4;
        case op::next:
        case op::eventually:
        case op::globally: return 4;
        default: return 5;
        }
    }

    void print(std::ostream& os, const formula& f);

    void
    print_wrapped(std::ostream& os, const formula& f, int min_prec)
    {
      if (prec(f) < min_prec)
        {
          os << "(";
          print(os, f);
          os << ")";
        }
      else
        print(os, f);
    }

    // Operand of a prefix operator: comparisons get parentheses too.
    void
    print_operand(std::ostream& os, const formula& f)
    {
      bool bare = f.is_constant() || f.is(op::next) || f.is(op::eventually)
        || f.is(op::globally) || (f.is(op::not_) && !f[0].is_atom());
      if (bare)
        print(os, f);
      else
        {
          os << "(";
          print(os, f);
          os << ")";
        }
    }

    void
    print(std::ostream& os, const formula& f)
    {
      switch (f.kind())
        {
        case op::tt:
          os << "true";
          return;
        case op::ff:
          os << "false";
          return;
        case op::atom:
          os << print_atom(f.atom_cmp(), f.atom_term());
          return;
        case op::not_:
          if (f[0].is_atom())
            os << print_atom(negate(f[0].atom_cmp()), f[0].atom_term());
          else
            {
              os << "!";
              print_operand(os, f[0]);
            }
          return;
        case op::and_:
        case op::or_:
          {
            const char* sep = f.is(op::and_) ? " && " : " || ";
            int p = prec(f) + 1;
            for (std::size_t i = 0; i < f.size(); ++i)
              {
                if (i)
                  os << sep;
                print_wrapped(os, f[i], p);
              }
            return;
          }
        case op::until:
        case op::weak_until:
          print_wrapped(os, f[0], 4);
          os << (f.is(op::until) ? " U " : " W ");
          print_wrapped(os, f[1], 4);
          return;
        case op::next:
          os << "X ";
          print_operand(os, f[0]);
          return;
        case op::eventually:
          os << "F ";
          print_operand(os, f[0]);
          return;
        case op::globally:
          os << "G ";
          print_operand(os, f[0]);
          return;
        }
    }

    void
    print_key(std::ostream& os, const formula& f)
    {
      static const char* names[] = {"ff", "tt", "a", "!", "&", "|", "X", "U", "W", "F", "G"};
      if (f.is_constant())
        {
          os << names[static_cast<int>(f.kind())];
          return;
        }
      if (f.is_atom())
        {
          os << "(" << cmp_str(f.atom_cmp());
          for (auto& [v, c]: f.atom_term().coeffs())
            os << " " << c << "*" << v;
          os << " " << f.atom_term().constant() << ")";
          return;
        }
      os << "(" << names[static_cast<int>(f.kind())];
      for (auto& c: f.children())
        {
          os << " ";
          print_key(os, c);
        }
      os << ")";
    }
  }

  std::string
  to_string(const lin_term& t)
  {
    std::ostringstream os;
    print_side(os, t.coeffs(), t.constant());
    return os.str();
  }

  std::string
  to_string(const formula& f)
  {
    std::ostringstream os;
    print(os, f);
    return os.str();
  }

  std::string
  key_string(const formula& f)
  {
    std::ostringstream os;
    print_key(os, f);
    return os.str();
  }
}
