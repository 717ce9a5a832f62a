#include "rpmon/game.hh"

#include <deque>
#include <sstream>

namespace rpmon
{
  std::vector<const game_edge*>
  symbolic_game::outgoing(std::size_t l) const
  {
    std::vector<const game_edge*> out;
    for (auto& e: edges)
      if (e.from == l)
        out.push_back(&e);
    return out;
  }

  std::size_t
  symbolic_game::count(verdict v) const
  {
    return std::count_if(locs.begin(), locs.end(),
                         [&](const game_location& l) { return l.verd == v; });
  }

  namespace
  {
    formula
    to_formula(const bexpr& e, const std::vector<formula>& props)
    {
      switch (e.k)
        {
        case bexpr::kind::tt: return f_true();
        case bexpr::kind::ff: return f_false();
        case bexpr::kind::ap: return props.at(e.ap);
        case bexpr::kind::not_: return f_not(to_formula(e.ch[0], props));
        case bexpr::kind::and_:
        case bexpr::kind::or_:
          {
            std::vector<formula> ch;
            for (auto& c: e.ch)
              ch.push_back(to_formula(c, props));
            return e.k == bexpr::kind::and_ ? f_and(ch) : f_or(ch);
          }
        }
      return f_false();
    }

    void
    sort_edges(std::vector<game_edge>& es)
    {
      std::sort(es.begin(), es.end(), [](const game_edge& a, const game_edge& b)
      {
        return std::tie(a.from, a.to) < std::tie(b.from, b.to);
      });
    }

    std::map<std::string, std::string>
    primed_map(const symbolic_game& g)
    {
      std::map<std::string, std::string> m;
      for (auto& x: g.vars)
        m[x + "_p"] = primed(x);
      return m;
    }
  }

  symbolic_game
  game_from_dpa(const parity_dpa& dpa, const std::vector<formula>& atom_map,
                const std::set<std::string>& inputs, const std::set<std::string>& vars)
  {
    // AP names p<k> index into the atom map
    std::vector<formula> props;
    for (auto& name: dpa.ap)
      {
        std::size_t k = 0;
        bool ok = name.size() > 1 && name[0] == 'p'
          && std::all_of(name.begin() + 1, name.end(), [](char c) { return std::isdigit(c); });
        if (ok)
          k = std::stoul(name.substr(1));
        if (!ok || k >= atom_map.size())
          throw std::invalid_argument("unmapped proposition '" + name + "'");
        props.push_back(atom_map[k]);
      }
    symbolic_game g;
    g.inputs.assign(inputs.begin(), inputs.end());
    g.vars.assign(vars.begin(), vars.end());
    g.init = dpa.initial;
    for (std::size_t q = 0; q < dpa.size(); ++q)
      g.locs.push_back({std::to_string(q), f_true(), dpa.color[q], std::nullopt});
    for (std::size_t q = 0; q < dpa.size(); ++q)
      {
        std::map<unsigned, std::vector<formula>> by_target;
        for (auto& e: dpa.edges[q])
          by_target[e.to].push_back(to_formula(e.guard, props));
        for (auto& [to, gs]: by_target)
          {
            formula guard = f_or(gs);
            if (!guard.is_false())
              g.edges.push_back({q, to, guard});
          }
      }
    sort_edges(g.edges);
    return g;
  }

  wellformed_report
  check_wellformed(const symbolic_game& g, solver& s)
  {
    wellformed_report r;
    std::set<std::string> xs(g.vars.begin(), g.vars.end());
    std::vector<std::string> next;
    for (auto& x: g.vars)
      next.push_back(primed(x));
    for (std::size_t l = 0; l < g.locs.size(); ++l)
      {
        formula dom = g.locs[l].dom;
        auto out = g.outgoing(l);
        for (std::size_t i = 0; i < out.size(); ++i)
          for (std::size_t j = i + 1; j < out.size(); ++j)
            {
              if (out[i]->to == out[j]->to)
                continue;
              formula both = f_and({dom, out[i]->guard, out[j]->guard,
                                    prime(g.locs[out[i]->to].dom, xs),
                                    prime(g.locs[out[j]->to].dom, xs)});
              if (!s.is_unsat(both))
                r.violations.push_back("location " + std::to_string(l) + ": edges to "
                                       + std::to_string(out[i]->to) + " and "
                                       + std::to_string(out[j]->to) + " overlap");
            }
        std::vector<formula> succ;
        for (auto* e: out)
          succ.push_back(f_and(e->guard, prime(g.locs[e->to].dom, xs)));
        fo_formula ok = fo_implies(fo_formula(dom), fo_exists(next, fo_formula(f_or(succ))));
        if (s.valid(ok) != truth::yes)
          r.violations.push_back("location " + std::to_string(l) + " may block");
      }
    return r;
  }

  product_game
  product(const symbolic_game& g, const monitor& m, solver& s)
  {
    std::set<std::string> gi(g.inputs.begin(), g.inputs.end()),
      gx(g.vars.begin(), g.vars.end()), mi, mx;
    for (auto& d: m.decls)
      (d.input ? mi : mx).insert(d.name);
    if (gi != mi || gx != mx)
      throw std::invalid_argument("game and monitor range over different variables");

    product_game p;
    p.inputs = g.inputs;
    p.vars = g.vars;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> id;
    std::deque<std::size_t> work;
    auto get = [&](std::size_t l, std::size_t q)
    {
      auto [it, fresh] = id.emplace(std::pair{l, q}, p.locs.size());
      if (fresh)
        {
          game_location loc = g.locs[l];
          loc.name = std::to_string(l) + "," + std::to_string(q);
          loc.verd = m.verdicts.at(q);
          p.locs.push_back(loc);
          p.pairs.push_back({l, q});
          work.push_back(it->second);
        }
      return it->second;
    };
    p.init = get(g.init, m.init);
    while (!work.empty())
      {
        std::size_t me = work.front();
        work.pop_front();
        auto [l, q] = p.pairs[me];
        if (m.verdicts[q] == verdict::unsat)
          {
            p.edges.push_back({me, me, f_true()});
            continue;
          }
        formula dom = g.locs[l].dom;
        std::map<std::size_t, std::vector<formula>> by_target;
        for (auto* e: g.outgoing(l))
          for (auto* t: m.outgoing(q))
            {
              formula c = f_and(e->guard, t->a.conjunction(m.preds));
              if (c.is_false() || s.is_unsat(f_and(dom, c)))
                continue;
              by_target[get(e->to, t->to)].push_back(c);
            }
        for (auto& [to, cs]: by_target)
          p.edges.push_back({me, to, f_or(cs)});
      }
    sort_edges(p.edges);
    return p;
  }

  // ---------------------------------------------------------- text format

  std::string
  serialize(const symbolic_game& g)
  {
    std::ostringstream os;
    os << "inputs:";
    for (auto& i: g.inputs)
      os << " " << i;
    os << "\nvars:";
    for (auto& x: g.vars)
      os << " " << x;
    os << "\ninit: " << g.init << "\n";
    for (std::size_t l = 0; l < g.locs.size(); ++l)
      {
        auto& loc = g.locs[l];
        os << "loc " << l << " color=" << loc.color;
        if (loc.verd)
          os << " verdict=" << verdict_name(*loc.verd);
        os << " name=" << loc.name << " dom=" << smtlib_plain(loc.dom) << "\n";
      }
    for (auto& e: g.edges)
      os << "trans " << e.from << " " << e.to << " guard=" << smtlib_plain(e.guard) << "\n";
    os << "winning {\n";
    for (std::size_t l = 0; l < g.locs.size(); ++l)
      {
        auto& loc = g.locs[l];
        const char* cond = "parity";
        if (loc.verd == verdict::unsat)
          cond = "losing";
        else if (loc.verd == verdict::safety)
          cond = "safety";
        os << "  " << l << " " << cond;
        if (!loc.verd || *loc.verd != verdict::unsat)
          os << " color=" << loc.color;
        os << "\n";
      }
    os << "}\n";
    return os.str();
  }

  symbolic_game
  parse_game(std::string_view text)
  {
    symbolic_game g;
    std::istringstream in{std::string(text)};
    std::string line;
    auto fail = [&](const std::string& m) -> void
    {
      throw std::runtime_error("malformed game: " + m + " in '" + line + "'");
    };
    auto term = [&](const std::string& s)
    {
      auto f = from_smtlib(parse_sexpr(s), primed_map(g));
      if (!f)
        fail("unsupported term");
      return *f;
    };
    bool winning = false;
    while (std::getline(in, line))
      {
        if (line.empty())
          continue;
        if (winning)
          {
            if (line == "}")
              winning = false;
            continue;
          }
        std::istringstream ls(line);
        std::string head;
        ls >> head;
        if (head == "inputs:" || head == "vars:")
          {
            auto& dst = head == "inputs:" ? g.inputs : g.vars;
            for (std::string v; ls >> v;)
              dst.push_back(v);
          }
        else if (head == "init:")
          ls >> g.init;
        else if (head == "loc")
          {
            std::size_t id;
            ls >> id;
            if (id != g.locs.size())
              fail("locations out of order");
            game_location loc;
            auto dom_at = line.find(" dom=");
            if (dom_at == std::string::npos)
              fail("missing dom");
            std::istringstream fields(line.substr(0, dom_at));
            fields >> head >> id;
            for (std::string kv; fields >> kv;)
              {
                auto eq = kv.find('=');
                if (eq == std::string::npos)
                  fail("bad field");
                std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
                if (k == "color")
                  loc.color = std::stoul(v);
                else if (k == "verdict")
                  {
                    loc.verd = verdict_from_name(v);
                    if (!loc.verd)
                      fail("bad verdict");
                  }
                else if (k == "name")
                  loc.name = v;
              }
            loc.dom = term(line.substr(dom_at + 5));
            g.locs.push_back(loc);
          }
        else if (head == "trans")
          {
            game_edge e;
            ls >> e.from >> e.to;
            auto at = line.find(" guard=");
            if (!ls || at == std::string::npos)
              fail("bad transition");
            e.guard = term(line.substr(at + 7));
            g.edges.push_back(e);
          }
        else if (head == "winning")
          winning = true;
        else
          fail("unknown line");
      }
    for (auto& e: g.edges)
      if (e.from >= g.locs.size() || e.to >= g.locs.size())
        throw std::runtime_error("malformed game: edge to unknown location");
    sort_edges(g.edges);
    return g;
  }
}
