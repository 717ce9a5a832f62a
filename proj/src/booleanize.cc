#include "rpmon/booleanize.hh"

#include <sstream>

namespace rpmon
{
  namespace
  {
    struct printer
    {
      std::map<formula, std::size_t> index;
      std::vector<formula> props;
      std::ostringstream os;

      void
      prop(const formula& a)
      {
        auto [it, fresh] = index.emplace(a, props.size());
        if (fresh)
          props.push_back(a);
        os << "p" << it->second;
      }

      void
      print(const formula& f)
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
            prop(f);
            return;
          case op::not_:
            os << "!";
            if (f[0].is_atom())
              prop(f[0]);
            else
              {
                os << "(";
                print(f[0]);
                os << ")";
              }
            return;
          case op::and_:
          case op::or_:
            os << "(";
            for (std::size_t i = 0; i < f.size(); ++i)
              {
                if (i)
                  os << (f.is(op::and_) ? " & " : " | ");
                print(f[i]);
              }
            os << ")";
            return;
          case op::until:
          case op::weak_until:
            os << "(";
            print(f[0]);
            os << (f.is(op::until) ? " U " : " W ");
            print(f[1]);
            os << ")";
            return;
          case op::next:
          case op::eventually:
          case op::globally:
            os << (f.is(op::next) ? "X " : f.is(op::eventually) ? "F " : "G ");
            print(f[0]);
            return;
          }
      }
    };
  }

  booleanized
  booleanize(const formula& f)
  {
    printer p;
    p.print(f);
    return {p.os.str(), p.props};
  }
}
