#include "rpmon/expansion.hh"

#include <algorithm>
#include <unordered_set>

namespace rpmon
{
  predicate_table::predicate_table(std::set<std::string> program_vars,
                                   std::set<std::string> input_vars)
    : x_(std::move(program_vars)), i_(std::move(input_vars))
  {
  }

  predicate_table
  predicate_table::from_spec(const spec& s)
  {
    predicate_table t(s.program_vars(), s.input_vars());
    formula phi = s.phi();
    for (auto& a: atoms(phi))
      t.intern(a);
    for (auto& a: atoms(phi))
      {
        if (t.over_state_vars(a))
          t.add_prop_pred(a);
        // x' = c  yields  x = c
        auto& terms = a.atom_term().coeffs();
        if (a.atom_cmp() == cmp::eq && terms.size() == 1 && is_primed(terms.front().first))
          t.add_prop_pred(unprime(a));
      }
    return t;
  }

  std::size_t
  predicate_table::intern(const formula& atom)
  {
    auto [it, fresh] = index_.emplace(atom, atoms_.size());
    if (fresh)
      atoms_.push_back(atom);
    return it->second;
  }

  std::optional<std::size_t>
  predicate_table::find(const formula& atom) const
  {
    auto it = index_.find(atom);
    if (it == index_.end())
      return std::nullopt;
    return it->second;
  }

  void
  predicate_table::add_prop_pred(const formula& p)
  {
    for (const formula& q: {p, f_not(p)})
      if (std::find(prop_preds_.begin(), prop_preds_.end(), q) == prop_preds_.end())
        prop_preds_.push_back(q);
    for (auto& a: atoms(p))
      intern(a);
  }

  void
  predicate_table::add_gen_pred(const formula& p)
  {
    if (std::find(gen_preds_.begin(), gen_preds_.end(), p) == gen_preds_.end())
      gen_preds_.push_back(p);
    for (auto& a: atoms(p))
      intern(a);
  }

  std::vector<std::string>
  predicate_table::primed_vars() const
  {
    std::vector<std::string> r;
    for (auto& x: x_)
      r.push_back(primed(x));
    return r;
  }

  bool
  predicate_table::over_state_vars(const formula& f) const
  {
    for (auto& v: free_vars(f))
      if (!x_.count(v))
        return false;
    return true;
  }

  // ---------------------------------------------------------------- letters

  std::optional<bool>
  letter::value(std::size_t id) const
  {
    auto it = std::lower_bound(lits.begin(), lits.end(), std::pair<std::size_t, bool>{id, false});
    if (it != lits.end() && it->first == id)
      return it->second;
    return std::nullopt;
  }

  void
  letter::set(std::size_t id, bool v)
  {
    auto it = std::lower_bound(lits.begin(), lits.end(), std::pair<std::size_t, bool>{id, false});
    if (it != lits.end() && it->first == id)
      it->second = v;
    else
      lits.insert(it, {id, v});
  }

  formula
  letter::conjunction(const predicate_table& t) const
  {
    std::vector<formula> v;
    for (auto& [id, b]: lits)
      v.push_back(b ? t.atom(id) : f_not(t.atom(id)));
    return f_and(v);
  }

  // -------------------------------------------------------------- expansion

  namespace
  {
    void
    collect_depth0(const formula& f, std::vector<formula>& out,
                   std::unordered_set<std::uintptr_t>& seen)
    {
      if (!seen.insert(f.id()).second)
        return;
      if (f.is_atom())
        {
          out.push_back(f);
          return;
        }
      if (f.is(op::next))
        return;
      for (auto& c: f.children())
        collect_depth0(c, out, seen);
    }
  }

  std::vector<formula>
  depth0_atoms(const formula& f)
  {
    std::vector<formula> out;
    std::unordered_set<std::uintptr_t> seen;
    collect_depth0(f, out, seen);
    sort_unique(out);
    return out;
  }

  formula
  expand(const formula& f, const letter& a, const predicate_table& t)
  {
    switch (f.kind())
      {
      case op::tt:
      case op::ff:
        return f;
      case op::atom:
        {
          auto id = t.find(f);
          std::optional<bool> v = id ? a.value(*id) : std::nullopt;
          if (!v)
            throw std::logic_error("expand: atom not determined by letter: " + to_string(f));
          return f_bool(*v);
        }
      case op::not_:
        return f_not(expand(f[0], a, t));
      case op::and_:
      case op::or_:
        {
          std::vector<formula> ch;
          for (auto& c: f.children())
            ch.push_back(expand(c, a, t));
          return f.is(op::and_) ? f_and(ch) : f_or(ch);
        }
      case op::next:
        return f[0];
      case op::until:
      case op::weak_until:
        return f_or(expand(f[1], a, t), f_and(expand(f[0], a, t), f));
      case op::globally:
        return f_and(expand(f[0], a, t), f);
      case op::eventually:
        return f_or(expand(f[0], a, t), f);
      }
    return f;
  }

  std::vector<letter>
  relevant_letters(const monitor_state& q, predicate_table& t, const formula& context, solver& s)
  {
    std::vector<formula> branch;
    for (auto* set: {&q.fa, &q.ea, &q.fg, &q.eg})
      for (auto& f: *set)
        for (auto& a: depth0_atoms(f))
          branch.push_back(a);
    sort_unique(branch);

    // Unprimed program variables that share an atom with a primed one:
    // predicates over them can feed propagation.
    std::set<std::string> linked;
    for (auto& a: branch)
      {
        auto vs = free_vars(a);
        bool has_primed = std::any_of(vs.begin(), vs.end(),
                                      [](const std::string& v) { return is_primed(v); });
        if (has_primed)
          for (auto& v: vs)
            if (!is_primed(v) && t.program_vars().count(v))
              linked.insert(v);
      }
    std::vector<formula> extra;
    for (auto* preds: {&t.prop_preds(), &t.gen_preds()})
      for (auto& p: *preds)
        for (auto& a: atoms(p))
          for (auto& v: free_vars(a))
            if (linked.count(v))
              {
                extra.push_back(a);
                break;
              }
    branch.insert(branch.end(), extra.begin(), extra.end());
    sort_unique(branch);

    std::vector<std::size_t> ids;
    for (auto& a: branch)
      ids.push_back(t.intern(a));
    std::sort(ids.begin(), ids.end());

    std::vector<letter> out;
    letter cur;
    std::vector<formula> lits{context};
    // Depth-first enumeration; each partial assignment is checked once.
    std::function<void(std::size_t)> rec = [&](std::size_t k)
    {
      if (k == ids.size())
        {
          out.push_back(cur);
          return;
        }
      for (bool v: {true, false})
        {
          formula l = v ? t.atom(ids[k]) : f_not(t.atom(ids[k]));
          lits.push_back(l);
          if (s.check_sat(f_and(lits)) != sat_result::unsat)
            {
              cur.lits.emplace_back(ids[k], v);
              rec(k + 1);
              cur.lits.pop_back();
            }
          lits.pop_back();
        }
    };
    rec(0);
    return out;
  }

  formula_vec
  propagate(const letter& a, const predicate_table& t, solver& s)
  {
    formula premise = a.conjunction(t);
    std::set<std::string> constrained;
    for (auto& v: free_vars(premise))
      if (is_primed(v))
        constrained.insert(unprimed(v));
    formula_vec out;
    if (constrained.empty())
      return out;
    for (auto& beta: t.prop_preds())
      {
        auto vs = free_vars(beta);
        bool relevant = std::any_of(vs.begin(), vs.end(),
                                    [&](const std::string& v) { return constrained.count(v) > 0; });
        if (!relevant)
          continue;
        if (s.proves(premise, prime(beta, t.program_vars())))
          out.push_back(beta);
      }
    return out;
  }

  monitor_state
  next_state_raw(const monitor_state& q, const letter& a, const predicate_table& t, solver& s)
  {
    monitor_state r;
    auto exps = [&](const formula_vec& v)
    {
      formula_vec out;
      for (auto& f: v)
        out.push_back(expand(f, a, t));
      return out;
    };
    r.fa = exps(q.fa);
    r.ea = exps(q.ea);
    r.fg = exps(q.fg);
    r.eg = exps(q.eg);
    for (auto& b: propagate(a, t, s))
      r.eg.push_back(b);
    r.imp_a = q.imp_a;
    r.imp_g = q.imp_g;
    r.normalize();
    return r;
  }
}
