#include "rpmon/monitor_state.hh"

#include <algorithm>
#include <sstream>

namespace rpmon
{
  formula
  imp_fact::consequent() const
  {
    switch (kind)
      {
      case imp_kind::now: return body;
      case imp_kind::next: return f_next(body);
      case imp_kind::eventually: return f_eventually(body);
      case imp_kind::always: return f_globally(body);
      }
    return body;
  }

  formula
  imp_fact::as_formula() const
  {
    return f_globally(f_implies(guard, consequent()));
  }

  int
  imp_fact::compare(const imp_fact& o) const
  {
    if (int r = guard.compare(o.guard))
      return r;
    if (kind != o.kind)
      return kind < o.kind ? -1 : 1;
    return body.compare(o.body);
  }

  bool
  imp_subsumes(const imp_fact& f, const imp_fact& g)
  {
    if (g.body.is_true() || g.guard.is_false())
      return true;
    if (f.body != g.body)
      return false;
    if (!(f.guard.is_true() || f.guard == g.guard))
      return false;
    switch (f.kind)
      {
      case imp_kind::always:
        return true;
      case imp_kind::now:
        return f.guard.is_true() || g.kind == imp_kind::now || g.kind == imp_kind::eventually;
      case imp_kind::next:
        return g.kind == imp_kind::next || g.kind == imp_kind::eventually;
      case imp_kind::eventually:
        return g.kind == imp_kind::eventually;
      }
    return false;
  }

  namespace
  {
    std::optional<std::pair<imp_kind, formula>>
    shape(const formula& f)
    {
      if (f.is_qf())
        return std::pair{imp_kind::now, f};
      if (f.is(op::next) && f[0].is_qf())
        return std::pair{imp_kind::next, f[0]};
      if (f.is(op::eventually) && f[0].is_qf())
        return std::pair{imp_kind::eventually, f[0]};
      if (f.is(op::globally) && f[0].is_qf())
        return std::pair{imp_kind::always, f[0]};
      return std::nullopt;
    }
  }

  std::vector<imp_fact>
  decompose_invariant(const formula& psi)
  {
    std::vector<imp_fact> out;
    if (psi.is(op::and_))
      {
        for (auto& c: psi.children())
          for (auto& f: decompose_invariant(c))
            out.push_back(f);
        return out;
      }
    if (auto s = shape(psi))
      {
        out.push_back({f_true(), s->first, s->second});
        return out;
      }
    if (psi.is(op::or_))
      {
        std::vector<formula> qf, temporal;
        for (auto& c: psi.children())
          (c.is_qf() ? qf : temporal).push_back(c);
        if (temporal.size() == 1)
          if (auto s = shape(temporal.front()))
            out.push_back({f_not(f_or(qf)), s->first, s->second});
      }
    return out;
  }

  bool
  is_e_eligible(const formula& f)
  {
    if (f.is_qf())
      return true;
    if (f.is(op::weak_until))
      return f[0].is_qf() && f[1].is_qf();
    if (!f.is(op::globally))
      return false;
    std::vector<formula> todo{f[0]};
    while (!todo.empty())
      {
        formula g = todo.back();
        todo.pop_back();
        if (g.is_qf())
          continue;
        if (!(g.is(op::and_) || g.is(op::or_) || g.is(op::not_) || g.is(op::next)))
          return false;
        for (auto& c: g.children())
          todo.push_back(c);
      }
    return true;
  }

  namespace
  {
    void
    normalize_set(formula_vec& v)
    {
      formula_vec out;
      std::vector<formula> todo(v.rbegin(), v.rend());
      while (!todo.empty())
        {
          formula f = todo.back();
          todo.pop_back();
          if (f.is(op::and_))
            {
              for (auto it = f.children().rbegin(); it != f.children().rend(); ++it)
                todo.push_back(*it);
              continue;
            }
          if (f.is_true())
            continue;
          if (f.is_false())
            {
              v = {f_false()};
              return;
            }
          out.push_back(f);
        }
      sort_unique(out);
      v = std::move(out);
    }

    void
    move_eligible(formula_vec& from, formula_vec& to)
    {
      if (from.size() == 1 && from.front().is_false())
        return;
      formula_vec keep;
      for (auto& f: from)
        (is_e_eligible(f) ? to : keep).push_back(f);
      from = std::move(keep);
    }
  }

  void
  normalize_imps(imp_set& s)
  {
    imp_set out;
    for (auto& f: s)
      if (!f.body.is_true() && !f.guard.is_false())
        out.push_back(f);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    s = std::move(out);
  }

  void
  monitor_state::normalize()
  {
    for (side d: {side::assume, side::guarantee})
      {
        normalize_set(f(d));
        normalize_set(e(d));
        move_eligible(f(d), e(d));
        normalize_set(e(d));
        if (e(d).size() == 1 && e(d).front().is_false())
          {
            // a false E makes the whole side false
            f(d) = {f_false()};
          }
        else if (f(d).size() == 1 && f(d).front().is_false() && !e(d).empty())
          e(d) = {f_false()};
        normalize_imps(imp(d));
      }
  }

  formula
  monitor_state::curr(side d) const
  {
    std::vector<formula> v;
    for (auto& f: ea)
      if (f.is_qf())
        v.push_back(f);
    if (d == side::guarantee)
      for (auto& f: eg)
        if (f.is_qf())
          v.push_back(f);
    return f_and(v);
  }

  formula
  monitor_state::imp_inv(side d) const
  {
    std::vector<formula> v;
    for (auto& f: imp(d))
      if (f.guard.is_true() && (f.kind == imp_kind::now || f.kind == imp_kind::always))
        v.push_back(f.body);
    return f_and(v);
  }

  formula
  monitor_state::side_formula(side d, bool imps) const
  {
    std::vector<formula> v(f(d).begin(), f(d).end());
    v.insert(v.end(), e(d).begin(), e(d).end());
    if (imps)
      for (auto& i: imp(d))
        v.push_back(i.as_formula());
    return f_and(v);
  }

  formula
  monitor_state::as_formula() const
  {
    return f_implies(side_formula(side::assume), side_formula(side::guarantee));
  }

  formula
  monitor_state::with_imps() const
  {
    return f_implies(side_formula(side::assume, true), side_formula(side::guarantee, true));
  }

  std::string
  monitor_state::key() const
  {
    std::string k;
    auto add = [&](const formula_vec& v)
    {
      k += "[";
      for (auto& f: v)
        k += key_string(f) + ",";
      k += "]";
    };
    auto add_imp = [&](const imp_set& s)
    {
      k += "[";
      for (auto& f: s)
        k += key_string(f.guard) + ">" + std::to_string(static_cast<int>(f.kind))
          + key_string(f.body) + ",";
      k += "]";
    };
    add(fa);
    add(ea);
    add(fg);
    add(eg);
    add_imp(imp_a);
    add_imp(imp_g);
    return k;
  }

  bool
  monitor_state::operator==(const monitor_state& o) const
  {
    return fa == o.fa && ea == o.ea && fg == o.fg && eg == o.eg
      && imp_a == o.imp_a && imp_g == o.imp_g;
  }

  std::string
  to_string(const imp_fact& f)
  {
    return "G(" + rpmon::to_string(f.guard) + " -> " + rpmon::to_string(f.consequent()) + ")";
  }

  std::string
  monitor_state::to_string() const
  {
    std::ostringstream os;
    auto set = [&](const char* name, const formula_vec& v)
    {
      os << name << " = {";
      for (std::size_t i = 0; i < v.size(); ++i)
        os << (i ? ", " : "") << rpmon::to_string(v[i]);
      os << "}\n";
    };
    auto imps = [&](const char* name, const imp_set& v)
    {
      os << name << " = {";
      for (std::size_t i = 0; i < v.size(); ++i)
        os << (i ? ", " : "") << rpmon::to_string(v[i]);
      os << "}\n";
    };
    set("F_A", fa);
    set("E_A", ea);
    set("F_G", fg);
    set("E_G", eg);
    imps("Imp_A", imp_a);
    imps("Imp_G", imp_g);
    return os.str();
  }

  monitor_state
  partition_initial(const spec& s)
  {
    monitor_state q;
    q.fa = s.assumptions;
    q.fg = s.guarantees;
    q.normalize();
    return q;
  }

  monitor_state
  top_state()
  {
    return {};
  }

  monitor_state
  bottom_state()
  {
    monitor_state q;
    q.fg = {f_false()};
    q.eg = {f_false()};
    return q;
  }
}
