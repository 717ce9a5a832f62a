#include "rpmon/game.hh"

#include <cctype>
#include <sstream>

namespace rpmon
{
  // -------------------------------------------------------------- guards

  bool
  bexpr::eval(const std::vector<bool>& props) const
  {
    switch (k)
      {
      case kind::tt: return true;
      case kind::ff: return false;
      case kind::ap: return props.at(ap);
      case kind::not_: return !ch[0].eval(props);
      case kind::and_:
        return std::all_of(ch.begin(), ch.end(), [&](const bexpr& e) { return e.eval(props); });
      case kind::or_:
        return std::any_of(ch.begin(), ch.end(), [&](const bexpr& e) { return e.eval(props); });
      }
    return false;
  }

  std::string
  bexpr::str() const
  {
    switch (k)
      {
      case kind::tt: return "t";
      case kind::ff: return "f";
      case kind::ap: return std::to_string(ap);
      case kind::not_: return "!" + ch[0].str();
      case kind::and_:
      case kind::or_:
        {
          std::string s = "(";
          for (std::size_t i = 0; i < ch.size(); ++i)
            s += (i ? (k == kind::and_ ? " & " : " | ") : "") + ch[i].str();
          return s + ")";
        }
      }
    return "?";
  }

  namespace
  {
    struct bexpr_parser
    {
      std::string_view s;
      std::size_t i = 0;

      void
      ws()
      {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
          ++i;
      }

      [[noreturn]] void
      fail(const std::string& m)
      {
        throw hoa_error("bad guard '" + std::string(s) + "': " + m);
      }

      bexpr
      disj()
      {
        bexpr l = conj();
        ws();
        if (i < s.size() && s[i] == '|')
          {
            bexpr r{bexpr::kind::or_, -1, {l}};
            while (ws(), i < s.size() && s[i] == '|')
              {
                ++i;
                r.ch.push_back(conj());
              }
            return r;
          }
        return l;
      }

      bexpr
      conj()
      {
        bexpr l = unary();
        ws();
        if (i < s.size() && s[i] == '&')
          {
            bexpr r{bexpr::kind::and_, -1, {l}};
            while (ws(), i < s.size() && s[i] == '&')
              {
                ++i;
                r.ch.push_back(unary());
              }
            return r;
          }
        return l;
      }

      bexpr
      unary()
      {
        ws();
        if (i >= s.size())
          fail("unexpected end");
        char c = s[i];
        if (c == '!')
          {
            ++i;
            return {bexpr::kind::not_, -1, {unary()}};
          }
        if (c == '(')
          {
            ++i;
            bexpr e = disj();
            ws();
            if (i >= s.size() || s[i] != ')')
              fail("missing )");
            ++i;
            return e;
          }
        if (c == 't' || c == 'f')
          {
            ++i;
            return {c == 't' ? bexpr::kind::tt : bexpr::kind::ff, -1, {}};
          }
        if (std::isdigit(static_cast<unsigned char>(c)))
          {
            int v = 0;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
              v = v * 10 + (s[i++] - '0');
            return {bexpr::kind::ap, v, {}};
          }
        fail(std::string("unexpected '") + c + "'");
      }
    };
  }

  bexpr
  parse_bexpr(std::string_view text)
  {
    bexpr_parser p{text};
    bexpr e = p.disj();
    p.ws();
    if (p.i != text.size())
      p.fail("trailing input");
    return e;
  }

  // --------------------------------------------------------------- automata

  unsigned
  parity_dpa::step(unsigned q, const std::vector<bool>& props) const
  {
    for (auto& e: edges.at(q))
      if (e.guard.eval(props))
        return e.to;
    throw hoa_error("automaton is not total in state " + std::to_string(q));
  }

  bool
  max_even_accepts(const std::vector<unsigned>& loop_colors)
  {
    if (loop_colors.empty())
      return false;
    return *std::max_element(loop_colors.begin(), loop_colors.end()) % 2 == 0;
  }

  namespace
  {
    struct raw_edge
    {
      bexpr guard;
      unsigned to;
      int color;  // -1: none
    };

    struct raw_state
    {
      int color = -1;
      std::vector<raw_edge> edges;
    };

    /// Split a line into tokens: quoted strings, [..] guards, {..} sets
    /// and plain words.
    std::vector<std::string>
    tokens(const std::string& line)
    {
      std::vector<std::string> out;
      std::size_t i = 0;
      while (i < line.size())
        {
          char c = line[i];
          if (std::isspace(static_cast<unsigned char>(c)))
            {
              ++i;
              continue;
            }
          std::size_t j = i + 1;
          if (c == '"')
            {
              while (j < line.size() && line[j] != '"')
                j += line[j] == '\\' ? 2 : 1;
              ++j;
            }
          else if (c == '[' || c == '{')
            {
              char close = c == '[' ? ']' : '}';
              while (j < line.size() && line[j] != close)
                ++j;
              ++j;
            }
          else
            while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))
                   && line[j] != '[' && line[j] != '{' && line[j] != '"')
              ++j;
          if (j > line.size())
            throw hoa_error("unterminated token in '" + line + "'");
          out.push_back(line.substr(i, j - i));
          i = j;
        }
      return out;
    }

    int
    mark_of(const std::string& tok)
    {
      std::istringstream is(tok.substr(1, tok.size() - 2));
      std::vector<int> marks;
      for (int m; is >> m;)
        marks.push_back(m);
      if (marks.size() > 1)
        throw hoa_error("more than one acceptance mark in " + tok);
      return marks.empty() ? -1 : marks.front();
    }

    unsigned
    to_uint(const std::string& s)
    {
      try
        {
          std::size_t pos;
          unsigned long v = std::stoul(s, &pos);
          if (pos != s.size())
            throw hoa_error("bad number '" + s + "'");
          return static_cast<unsigned>(v);
        }
      catch (const std::logic_error&)
        {
          throw hoa_error("bad number '" + s + "'");
        }
    }
  }

  parity_dpa
  parse_hoa(std::string_view text)
  {
    std::istringstream in{std::string(text)};
    std::string line;
    bool header_seen = false, body = false, ended = false;
    std::optional<unsigned> n_states, start;
    std::vector<std::string> ap;
    enum { p_max_even, p_max_odd, p_min_even, p_min_odd, p_all, p_none, p_buchi } sense = p_all;
    bool have_acc = false;
    std::vector<raw_state> states;
    int cur = -1;

    while (std::getline(in, line))
      {
        if (!line.empty() && line.back() == '\r')
          line.pop_back();
        auto toks = tokens(line);
        if (toks.empty())
          continue;
        if (!body)
          {
            const std::string& h = toks[0];
            if (h == "HOA:")
              {
                if (toks.size() < 2 || toks[1] != "v1")
                  throw hoa_error("unsupported HOA version");
                header_seen = true;
              }
            else if (h == "States:")
              n_states = to_uint(toks.at(1));
            else if (h == "Start:")
              {
                if (start || toks.size() != 2 || toks[1].find('&') != std::string::npos)
                  throw hoa_error("exactly one initial state is required");
                start = to_uint(toks[1]);
              }
            else if (h == "AP:")
              {
                unsigned n = to_uint(toks.at(1));
                for (std::size_t i = 2; i < toks.size(); ++i)
                  ap.push_back(toks[i].substr(1, toks[i].size() - 2));
                if (ap.size() != n)
                  throw hoa_error("AP count mismatch");
              }
            else if (h == "acc-name:")
              {
                have_acc = true;
                std::string name = toks.at(1);
                if (name == "parity")
                  {
                    if (toks.size() < 4)
                      throw hoa_error("incomplete parity acc-name");
                    bool mx = toks[2] == "max", ev = toks[3] == "even";
                    if ((toks[2] != "max" && toks[2] != "min")
                        || (toks[3] != "even" && toks[3] != "odd"))
                      throw hoa_error("bad parity acc-name");
                    sense = mx ? (ev ? p_max_even : p_max_odd) : (ev ? p_min_even : p_min_odd);
                  }
                else if (name == "all")
                  sense = p_all;
                else if (name == "none")
                  sense = p_none;
                else if (name == "Buchi")
                  sense = p_buchi;
                else
                  throw hoa_error("acceptance '" + name + "' is not a parity condition");
              }
            else if (h == "Alias:")
              throw hoa_error("aliases are not supported");
            else if (h == "--BODY--")
              {
                if (!header_seen)
                  throw hoa_error("missing HOA: v1 header");
                body = true;
                states.resize(n_states.value_or(0));
              }
            continue;
          }
        if (toks[0] == "--END--")
          {
            ended = true;
            break;
          }
        if (toks[0] == "State:")
          {
            std::size_t i = 1;
            if (i < toks.size() && toks[i][0] == '[')
              throw hoa_error("state labels are not supported");
            cur = static_cast<int>(to_uint(toks.at(i++)));
            if (cur >= static_cast<int>(states.size()))
              states.resize(cur + 1);
            for (; i < toks.size(); ++i)
              if (toks[i][0] == '{')
                states[cur].color = mark_of(toks[i]);
            continue;
          }
        if (cur < 0)
          throw hoa_error("edge before any State:");
        if (toks[0][0] != '[')
          throw hoa_error("implicit edge labels are not supported");
        raw_edge e{parse_bexpr(toks[0].substr(1, toks[0].size() - 2)), to_uint(toks.at(1)), -1};
        if (toks[1].find('&') != std::string::npos)
          throw hoa_error("universal branching is not supported");
        for (std::size_t i = 2; i < toks.size(); ++i)
          if (toks[i][0] == '{')
            e.color = mark_of(toks[i]);
        states[cur].edges.push_back(std::move(e));
      }
    if (!header_seen || !body || !ended)
      throw hoa_error("malformed HOA: missing header, body or --END--");
    if (!have_acc)
      throw hoa_error("missing acc-name");
    if (!start)
      throw hoa_error("missing Start:");
    if (ap.size() > 20)
      throw hoa_error("too many atomic propositions");

    // Colors as max-even values; 0 is reserved for unmarked positions.
    int top = 0;
    for (auto& s: states)
      {
        top = std::max(top, s.color);
        for (auto& e: s.edges)
          top = std::max(top, e.color);
      }
    int k = top % 2 ? top + 1 : top;
    auto convert = [&](int c) -> unsigned
    {
      switch (sense)
        {
        case p_all: return 0;
        case p_none: return 1;
        case p_buchi: return c == 0 ? 2 : 1;
        case p_max_even: return c < 0 ? 0 : c + 2;
        case p_max_odd: return c < 0 ? 0 : c + 3;
        case p_min_even: return c < 0 ? 0 : k - c + 2;
        case p_min_odd: return c < 0 ? 0 : k - c + 3;
        }
      return 0;
    };

    // determinism and totality over all proposition assignments
    std::size_t n_ap = ap.size();
    for (std::size_t q = 0; q < states.size(); ++q)
      for (auto& e: states[q].edges)
        if (e.to >= states.size())
          throw hoa_error("edge to undeclared state " + std::to_string(e.to));
    bool incomplete = false;
    for (std::size_t q = 0; q < states.size(); ++q)
      for (std::uint64_t v = 0; v < (std::uint64_t{1} << n_ap); ++v)
        {
          std::vector<bool> props(n_ap);
          for (std::size_t b = 0; b < n_ap; ++b)
            props[b] = (v >> b) & 1;
          unsigned hits = 0;
          for (auto& e: states[q].edges)
            hits += e.guard.eval(props);
          if (hits > 1)
            throw hoa_error("nondeterministic choice in state " + std::to_string(q));
          incomplete = incomplete || hits == 0;
        }

    bool transition_based = false;
    for (auto& s: states)
      for (auto& e: s.edges)
        transition_based = transition_based || e.color >= 0;

    parity_dpa d;
    d.ap = ap;
    if (!transition_based)
      {
        for (auto& s: states)
          {
            std::vector<dpa_edge> es;
            for (auto& e: s.edges)
              es.push_back({e.guard, e.to});
            d.edges.push_back(es);
            d.color.push_back(convert(s.color));
          }
        d.initial = *start;
      }
    else
      {
        // state (q, c): q entered through an edge of color c
        std::map<std::pair<unsigned, unsigned>, unsigned> id;
        std::vector<std::pair<unsigned, unsigned>> todo;
        auto get = [&](unsigned q, unsigned c)
        {
          auto [it, fresh] = id.emplace(std::pair{q, c}, d.edges.size());
          if (fresh)
            {
              d.edges.emplace_back();
              d.color.push_back(c);
              todo.push_back({q, c});
            }
          return it->second;
        };
        d.initial = get(*start, 0);
        for (std::size_t k2 = 0; k2 < todo.size(); ++k2)
          {
            auto [q, c] = todo[k2];
            unsigned me = id.at({q, c});
            for (auto& e: states.at(q).edges)
              {
                unsigned to = get(e.to, convert(e.color));
                d.edges[me].push_back({e.guard, to});
              }
          }
      }
    if (incomplete)
      {
        // complete with a rejecting sink
        unsigned sink = d.edges.size();
        auto total = [&](unsigned q)
        {
          for (std::uint64_t v = 0; v < (std::uint64_t{1} << n_ap); ++v)
            {
              std::vector<bool> props(n_ap);
              for (std::size_t b = 0; b < n_ap; ++b)
                props[b] = (v >> b) & 1;
              if (std::none_of(d.edges[q].begin(), d.edges[q].end(),
                               [&](const dpa_edge& e) { return e.guard.eval(props); }))
                return false;
            }
          return true;
        };
        std::vector<unsigned> partial;
        for (unsigned q = 0; q < sink; ++q)
          if (!total(q))
            partial.push_back(q);
        d.edges.push_back({{bexpr{}, sink}});
        d.color.push_back(1);
        for (unsigned q: partial)
          {
            bexpr covered{bexpr::kind::or_, -1, {}};
            for (auto& e: d.edges[q])
              covered.ch.push_back(e.guard);
            d.edges[q].push_back({bexpr{bexpr::kind::not_, -1, {covered}}, sink});
          }
      }
    if (d.initial >= d.size())
      throw hoa_error("initial state out of range");
    return d;
  }
}
