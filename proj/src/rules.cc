#include "rpmon/rules.hh"

#include <algorithm>
#include <unordered_set>

namespace rpmon
{
  namespace
  {
    struct rule_entry
    {
      rule_id id;
      const char* name;
    };

    constexpr rule_entry rule_names[] = {
      {rule_id::next_ext, "NextExt"},
      {rule_id::unsat, "Unsat"},
      {rule_id::unsat_f, "UnsatF"},
      {rule_id::subst_true, "SubstTrue"},
      {rule_id::subst_false, "SubstFalse"},
      {rule_id::simplify_impl, "SimplifyImpl"},
      {rule_id::simplify_and, "SimplifyAnd"},
      {rule_id::simplify_non_nested, "SimplifyNonNested"},
      {rule_id::propagate_assump, "PropagateAssump"},
      {rule_id::propagate_g, "PropagateG"},
      {rule_id::propagate_w, "PropagateW"},
      {rule_id::join_imp, "JoinImp"},
      {rule_id::chain_imp, "ChainImp"},
      {rule_id::chain_imp_g, "ChainImpG"},
      {rule_id::chain_imp_f, "ChainImpF"},
      {rule_id::chain_imp_x, "ChainImpX"},
      {rule_id::gen_inv, "GenInv"},
      {rule_id::gen_inv_p, "GenInvP"},
      {rule_id::gen_reach, "GenReach"},
      {rule_id::rewrite, "Rewrite"},
    };
  }

  const char*
  rule_name(rule_id r)
  {
    for (auto& e: rule_names)
      if (e.id == r)
        return e.name;
    return "?";
  }

  std::optional<rule_id>
  rule_from_name(std::string_view s)
  {
    for (auto& e: rule_names)
      if (s == e.name)
        return e.id;
    return std::nullopt;
  }

  bool
  is_bookkeeping(rule_id r)
  {
    return r == rule_id::propagate_assump || r == rule_id::propagate_g
      || r == rule_id::next_ext || r == rule_id::rewrite;
  }

  // ------------------------------------------------------------ substitution

  namespace
  {
    bool
    is_temporal_op(op o)
    {
      return o == op::next || o == op::until || o == op::weak_until
        || o == op::eventually || o == op::globally;
    }

    formula
    rebuild(const formula& f, std::vector<formula> ch)
    {
      switch (f.kind())
        {
        case op::not_: return f_not(ch[0]);
        case op::and_: return f_and(std::move(ch));
        case op::or_: return f_or(std::move(ch));
        case op::next: return f_next(ch[0]);
        case op::until: return f_until(ch[0], ch[1]);
        case op::weak_until: return f_weak_until(ch[0], ch[1]);
        case op::eventually: return f_eventually(ch[0]);
        case op::globally: return f_globally(ch[0]);
        default: return f;
        }
    }

    // Children of an n-ary node minus those of `from`, when `from` is a
    // sub-multiset of them.
    std::optional<std::vector<formula>>
    nary_rest(const formula& f, const formula& from)
    {
      if (f.kind() != from.kind() || !(f.is(op::and_) || f.is(op::or_))
          || f.size() <= from.size())
        return std::nullopt;
      std::vector<formula> rest;
      std::size_t j = 0;
      for (auto& c: f.children())
        {
          if (j < from.size() && c == from[j])
            ++j;
          else
            rest.push_back(c);
        }
      if (j != from.size())
        {
          // children are sorted, but fall back to a plain membership test
          rest.clear();
          for (auto& c: f.children())
            if (std::find(from.children().begin(), from.children().end(), c)
                == from.children().end())
              rest.push_back(c);
          if (rest.size() + from.size() != f.size())
            return std::nullopt;
        }
      return rest;
    }

    formula
    replace_rec(const formula& f, const formula& from, const formula& to, bool nested,
                bool under_temporal)
    {
      bool here = nested || !under_temporal;
      if (here && f == from)
        return to;
      if (f.size() == 0)
        return f;
      bool below = under_temporal || is_temporal_op(f.kind());
      std::vector<formula> ch;
      bool changed = false;
      for (auto& c: f.children())
        {
          ch.push_back(replace_rec(c, from, to, nested, below));
          changed = changed || ch.back() != c;
        }
      formula g = changed ? rebuild(f, ch) : f;
      if (here)
        if (auto rest = nary_rest(g, from))
          {
            rest->push_back(to);
            g = rebuild(g, *rest);
          }
      return g;
    }

    // A canonical form of !f that the smart constructors do not produce
    // on their own.
    formula
    dual(const formula& f)
    {
      if (f.is(op::eventually))
        return f_globally(f_not(f[0]));
      if (f.is(op::globally))
        return f_eventually(f_not(f[0]));
      return f_not(f);
    }

    formula
    replace_both(const formula& f, const formula& from, const formula& to, bool nested)
    {
      formula g = replace_rec(f, from, to, nested, false);
      formula d = dual(from);
      if (d != from && !d.is_constant())
        g = replace_rec(g, d, f_not(to), nested, false);
      return g;
    }
  }

  formula
  replace_all(const formula& f, const formula& from, const formula& to)
  {
    return replace_both(f, from, to, true);
  }

  formula
  replace_non_nested(const formula& f, const formula& from, const formula& to)
  {
    return replace_both(f, from, to, false);
  }

  formula_vec
  replace_all(const formula_vec& v, const formula& from, const formula& to)
  {
    formula_vec out;
    for (auto& f: v)
      out.push_back(replace_all(f, from, to));
    return out;
  }

  formula_vec
  replace_non_nested(const formula_vec& v, const formula& from, const formula& to)
  {
    formula_vec out;
    for (auto& f: v)
      out.push_back(replace_non_nested(f, from, to));
    return out;
  }

  // ---------------------------------------------------------------- helpers

  namespace
  {
    void
    collect(const formula& f, bool non_nested_only, bool under_temporal,
            std::vector<formula>& out, std::unordered_set<std::uintptr_t>& seen)
    {
      if (!seen.insert(f.id() * 2 + under_temporal).second)
        return;
      if (!(non_nested_only && under_temporal))
        out.push_back(f);
      bool below = under_temporal || is_temporal_op(f.kind());
      for (auto& c: f.children())
        collect(c, non_nested_only, below, out, seen);
    }

    /// Subformulas of the members of v, sorted; optionally only those
    /// outside every temporal operator.
    std::vector<formula>
    subformulas(const formula_vec& v, bool non_nested_only)
    {
      std::vector<formula> out;
      std::unordered_set<std::uintptr_t> seen;
      for (auto& f: v)
        collect(f, non_nested_only, false, out, seen);
      sort_unique(out);
      return out;
    }

    bool
    is_bottom(const formula_vec& v)
    {
      return v.size() == 1 && v.front().is_false();
    }

    std::vector<formula>
    conjuncts(const formula& f)
    {
      if (f.is(op::and_))
        return f.children();
      if (f.is_true())
        return {};
      return {f};
    }
  }

  // ------------------------------------------------------------------ engine

  rule_engine::rule_engine(solver& s, predicate_table& preds, engine_config cfg)
    : s_(s), preds_(preds), cfg_(std::move(cfg)),
      fix_(s, preds.program_vars(), preds.input_vars(), cfg_.fixpoint)
  {
  }

  bool
  rule_engine::derive_blocked(side d, const monitor_state& q) const
  {
    return q.imp(d).size() >= cfg_.max_imp_facts;
  }

  std::optional<monitor_state>
  rule_engine::add_fact(const monitor_state& q, side d, imp_fact f)
  {
    if (f.body.is_true() || f.guard.is_false())
      return std::nullopt;
    for (auto& g: q.imp(d))
      if (imp_subsumes(g, f))
        return std::nullopt;
    monitor_state r = q;
    r.imp(d).push_back(std::move(f));
    normalize_imps(r.imp(d));
    return r;
  }

  std::optional<monitor_state>
  rule_engine::try_rule(rule_id r, side d, const monitor_state& q)
  {
    if (is_bottom(q.f(d)) && is_bottom(q.e(d)))
      return std::nullopt;
    try
      {
        switch (r)
          {
          case rule_id::next_ext: return next_ext(d, q);
          case rule_id::unsat: return unsat(d, q);
          case rule_id::unsat_f: return unsat_f(d, q);
          case rule_id::subst_true: return subst(d, q, true);
          case rule_id::subst_false: return subst(d, q, false);
          case rule_id::simplify_impl: return simplify_impl(d, q, false);
          case rule_id::simplify_and: return simplify_impl(d, q, true);
          case rule_id::simplify_non_nested: return simplify_non_nested(d, q);
          case rule_id::propagate_assump: return propagate_assump(d, q);
          case rule_id::propagate_g: return propagate_g(d, q);
          case rule_id::propagate_w: return propagate_w(d, q);
          case rule_id::join_imp: return join_imp(d, q);
          case rule_id::chain_imp: return chain_imp(d, q);
          case rule_id::chain_imp_g: return chain_imp_g(d, q);
          case rule_id::chain_imp_f: return chain_imp_fx(d, q, imp_kind::eventually);
          case rule_id::chain_imp_x: return chain_imp_fx(d, q, imp_kind::next);
          case rule_id::gen_inv: return gen_inv(d, q);
          case rule_id::gen_inv_p: return gen_inv_p(d, q);
          case rule_id::gen_reach: return gen_reach(d, q);
          case rule_id::rewrite: return std::nullopt;
          }
      }
    catch (const smt_process_error&)
      {
        // a dead solver makes the rule inapplicable
      }
    return std::nullopt;
  }

  std::optional<monitor_state>
  rule_engine::next_ext(side d, const monitor_state& q)
  {
    std::set<std::string> now_primed;
    for (auto* set: {&q.fa, &q.ea, &q.fg, &q.eg})
      for (auto& f: *set)
        for (auto& a: depth0_atoms(f))
          for (auto& v: free_vars(a))
            if (is_primed(v))
              now_primed.insert(unprimed(v));
    if (now_primed.empty())
      return std::nullopt;
    formula_vec fs = q.f(d);
    for (auto& g: subformulas(q.f(d), true))
      {
        if (!g.is(op::next) || !g[0].is_qf() || g[0].is_constant()
            || !preds_.over_state_vars(g[0]))
          continue;
        auto vs = free_vars(g[0]);
        if (!std::any_of(vs.begin(), vs.end(),
                         [&](const std::string& v) { return now_primed.count(v) > 0; }))
          continue;
        formula repl = f_and(prime(g[0], preds_.program_vars()), g);
        fs = replace_non_nested(fs, g, repl);
      }
    monitor_state r = q;
    r.f(d) = fs;
    r.normalize();
    if (r == q)
      return std::nullopt;
    return r;
  }

  std::optional<monitor_state>
  rule_engine::unsat(side d, const monitor_state& q)
  {
    if (!s_.is_unsat(f_and(q.curr(d), q.imp_inv(d))))
      return std::nullopt;
    monitor_state r = q;
    r.f(d) = {f_false()};
    r.e(d) = {f_false()};
    return r;
  }

  std::optional<monitor_state>
  rule_engine::unsat_f(side d, const monitor_state& q)
  {
    formula curr = q.curr(d);
    formula inv = q.imp_inv(d);
    for (auto& fact: q.imp(d))
      {
        if (fact.kind != imp_kind::eventually || !fact.body.is_qf())
          continue;
        if (!fact.guard.is_true() && !s_.proves(curr, fact.guard))
          continue;
        if (!s_.is_unsat(f_and(fact.body, inv)))
          continue;
        monitor_state r = q;
        r.f(d) = {f_false()};
        r.e(d) = {f_false()};
        return r;
      }
    return std::nullopt;
  }

  std::optional<monitor_state>
  rule_engine::subst(side d, const monitor_state& q, bool to_true)
  {
    formula inv = q.imp_inv(d);
    bool fault = cfg_.inject_fault && to_true;
    if (inv.is_true() && !fault)
      return std::nullopt;
    for (auto& g: subformulas(q.f(d), false))
      {
        if (!g.is_qf() || g.is_constant())
          continue;
        bool fire = fault || s_.proves(inv, to_true ? g : f_not(g));
        if (!fire)
          continue;
        monitor_state r = q;
        r.f(d) = replace_all(q.f(d), g, f_bool(to_true));
        r.normalize();
        if (r == q)
          continue;
        return r;
      }
    return std::nullopt;
  }

  std::optional<monitor_state>
  rule_engine::simplify_impl(side d, const monitor_state& q, bool conj)
  {
    for (auto& fact: q.imp(d))
      {
        // with a true guard both rules coincide with Subst-true or are
        // left to Simplify-Non-Nested and the liveness pass
        if (fact.guard.is_true())
          continue;
        formula phi = fact.consequent();
        formula from = conj ? f_and(fact.guard, phi) : f_implies(fact.guard, phi);
        formula to = conj ? fact.guard : f_true();
        if (from.is_constant())
          continue;
        monitor_state r = q;
        r.f(d) = replace_all(q.f(d), from, to);
        r.normalize();
        if (!(r == q))
          return r;
      }
    return std::nullopt;
  }

  std::optional<monitor_state>
  rule_engine::simplify_non_nested(side d, const monitor_state& q)
  {
    formula ctx = f_and(q.curr(d), q.imp_inv(d));
    for (auto& fact: q.imp(d))
      {
        formula phi = fact.consequent();
        monitor_state r = q;
        r.f(d) = replace_non_nested(q.f(d), phi, f_true());
        r.normalize();
        if (r == q)
          continue;
        if (!fact.guard.is_true() && !s_.proves(ctx, fact.guard))
          continue;
        return r;
      }
    return std::nullopt;
  }

  std::optional<monitor_state>
  rule_engine::propagate_assump(side d, const monitor_state& q)
  {
    if (d != side::guarantee)
      return std::nullopt;
    monitor_state r = q;
    bool changed = false;
    for (auto& f: q.imp_a)
      if (auto n = add_fact(r, side::guarantee, f))
        {
          r = *n;
          changed = true;
        }
    if (!changed)
      return std::nullopt;
    return r;
  }

  std::optional<monitor_state>
  rule_engine::propagate_g(side d, const monitor_state& q)
  {
    monitor_state r = q;
    bool changed = false;
    for (auto& f: q.e(d))
      {
        if (!f.is(op::globally))
          continue;
        for (auto& fact: decompose_invariant(f[0]))
          if (auto n = add_fact(r, d, fact))
            {
              r = *n;
              changed = true;
            }
      }
    if (!changed)
      return std::nullopt;
    return r;
  }

  std::optional<monitor_state>
  rule_engine::propagate_w(side d, const monitor_state& q)
  {
    if (derive_blocked(d, q))
      return std::nullopt;
    std::vector<formula> ws;
    for (auto& f: q.e(d))
      if (f.is(op::weak_until) && f[0].is_qf() && f[1].is_qf())
        ws.push_back(f);
    formula inv = q.imp_inv(d);
    for (std::size_t i = 0; i < ws.size(); ++i)
      for (std::size_t j = i; j < ws.size(); ++j)
        {
          const formula &a1 = ws[i][0], &b1 = ws[i][1], &a2 = ws[j][0], &b2 = ws[j][1];
          imp_fact fact{f_true(), imp_kind::now, f_and(a1, a2)};
          bool fresh = std::none_of(q.imp(d).begin(), q.imp(d).end(),
                                    [&](const imp_fact& g) { return imp_subsumes(g, fact); });
          if (!fresh)
            continue;
          if (s_.is_unsat(f_and({a1, b2, inv})) && s_.is_unsat(f_and({a2, b1, inv}))
              && s_.is_unsat(f_and({b1, b2, inv})))
            return add_fact(q, d, fact);
        }
    return std::nullopt;
  }

  std::optional<monitor_state>
  rule_engine::join_imp(side d, const monitor_state& q)
  {
    if (derive_blocked(d, q))
      return std::nullopt;
    formula ctx = f_and(q.curr(d), q.imp_inv(d));
    auto& imps = q.imp(d);
    for (std::size_t i = 0; i < imps.size(); ++i)
      for (std::size_t j = i + 1; j < imps.size(); ++j)
        {
          const imp_fact &f1 = imps[i], &f2 = imps[j];
          if (f1.kind != f2.kind || f1.body != f2.body || f1.guard.is_true()
              || f2.guard.is_true())
            continue;
          imp_fact joined{f_or(f1.guard, f2.guard), f1.kind, f1.body};
          bool fresh = std::none_of(imps.begin(), imps.end(),
                                    [&](const imp_fact& g) { return imp_subsumes(g, joined); });
          if (!fresh)
            continue;
          // only joins that make the guard hold now are worth keeping
          if (s_.proves(ctx, joined.guard) && !s_.proves(ctx, f1.guard)
              && !s_.proves(ctx, f2.guard))
            return add_fact(q, d, joined);
        }
    return std::nullopt;
  }

  std::optional<monitor_state>
  rule_engine::chain_imp(side d, const monitor_state& q)
  {
    if (derive_blocked(d, q))
      return std::nullopt;
    formula inv = q.imp_inv(d);
    auto& imps = q.imp(d);
    for (auto& f1: imps)
      {
        if (f1.kind != imp_kind::now)
          continue;
        for (auto& f2: imps)
          {
            if (&f1 == &f2 || f2.guard.is_true() || f1.guard == f2.guard)
              continue;
            imp_fact derived{f1.guard, f2.kind, f2.body};
            bool fresh = std::none_of(imps.begin(), imps.end(),
                                      [&](const imp_fact& g) { return imp_subsumes(g, derived); });
            if (!fresh)
              continue;
            if (s_.proves(f_and(f1.body, inv), f2.guard))
              return add_fact(q, d, derived);
          }
      }
    return std::nullopt;
  }

  std::optional<monitor_state>
  rule_engine::chain_imp_g(side d, const monitor_state& q)
  {
    if (derive_blocked(d, q))
      return std::nullopt;
    formula ctx = f_and(q.curr(d), q.imp_inv(d));
    for (auto& f: q.imp(d))
      {
        if (f.kind != imp_kind::always)
          continue;
        imp_fact derived{f_true(), imp_kind::now, f.body};
        bool fresh = std::none_of(q.imp(d).begin(), q.imp(d).end(),
                                  [&](const imp_fact& g) { return imp_subsumes(g, derived); });
        if (!fresh)
          continue;
        if (f.guard.is_true() || s_.proves(ctx, f.guard))
          return add_fact(q, d, derived);
      }
    return std::nullopt;
  }

  std::optional<monitor_state>
  rule_engine::chain_imp_fx(side d, const monitor_state& q, imp_kind k)
  {
    if (derive_blocked(d, q))
      return std::nullopt;
    formula inv = q.imp_inv(d);
    auto& imps = q.imp(d);
    for (auto& f1: imps)
      {
        if (f1.kind != k)
          continue;
        for (auto& f2: imps)
          {
            // the consequent must stay a Boolean combination of predicates
            if (&f1 == &f2 || f2.kind != imp_kind::now || f2.guard.is_true())
              continue;
            imp_fact derived{f1.guard, k, f2.body};
            bool fresh = std::none_of(imps.begin(), imps.end(),
                                      [&](const imp_fact& g) { return imp_subsumes(g, derived); });
            if (!fresh)
              continue;
            if (s_.proves(f_and(f1.body, inv), f2.guard))
              return add_fact(q, d, derived);
          }
      }
    return std::nullopt;
  }

  std::optional<formula>
  rule_engine::find_strengthening(const formula& alpha, const formula& gamma, const formula& inv)
  {
    std::string key = key_string(alpha) + "|" + key_string(gamma) + "|" + key_string(inv);
    auto it = inv_memo_.find(key);
    if (it != inv_memo_.end())
      return it->second;
    auto ok = [&](const formula& theta)
    {
      return s_.proves(gamma, theta) && s_.proves(theta, alpha)
        && fix_.check_inductive(theta, inv) == truth::yes;
    };
    std::optional<formula> found;
    if (ok(alpha))
      found = alpha;
    if (!found)
      {
        // templates: alpha conjoined with up to two predicates that the
        // context already guarantees
        formula_vec cands;
        for (auto* preds: {&preds_.prop_preds(), &preds_.gen_preds()})
          for (auto& p: *preds)
            if (preds_.over_state_vars(p) && s_.proves(gamma, p))
              cands.push_back(p);
        sort_unique(cands);
        for (std::size_t i = 0; i < cands.size() && !found; ++i)
          if (ok(f_and(alpha, cands[i])))
            found = f_and(alpha, cands[i]);
        for (std::size_t i = 0; i < cands.size() && !found; ++i)
          for (std::size_t j = i + 1; j < cands.size() && !found; ++j)
            if (ok(f_and({alpha, cands[i], cands[j]})))
              found = f_and({alpha, cands[i], cands[j]});
      }
    if (!found)
      if (auto r = fix_.reachable_set(gamma, inv))
        if (preds_.over_state_vars(*r) && ok(*r))
          found = *r;
    if (!found && !cfg_.chc_command.empty())
      if (auto r = chc_strengthening(alpha, gamma, inv))
        if (ok(*r))
          found = *r;
    inv_memo_[key] = found;
    return found;
  }

  std::optional<formula>
  rule_engine::chc_strengthening(const formula& alpha, const formula& gamma, const formula& inv)
  {
    std::vector<std::string> xs(preds_.program_vars().begin(), preds_.program_vars().end());
    std::set<std::string> all;
    for (const formula& f: {alpha, gamma, inv})
      for (auto& v: free_vars(f))
        all.insert(v);
    for (auto& x: xs)
      {
        all.insert(x);
        all.insert(primed(x));
      }
    std::string sig, args, args_next, binders;
    for (auto& x: xs)
      {
        sig += " Int";
        args += " " + smt_symbol(x);
        args_next += " " + smt_symbol(primed(x));
      }
    for (auto& v: all)
      binders += "(" + smt_symbol(v) + " Int)";
    auto app = [&](const std::string& a) { return xs.empty() ? std::string("inv!") : "(inv!" + a + ")"; };
    std::string q = "(declare-fun inv! (" + sig + ") Bool)\n";
    q += "(assert (forall (" + binders + ") (=> " + smtlib(gamma) + " " + app(args) + ")))\n";
    q += "(assert (forall (" + binders + ") (=> (and " + app(args) + " " + smtlib(inv) + ") "
      + app(args_next) + ")))\n";
    q += "(assert (forall (" + binders + ") (=> " + app(args) + " " + smtlib(alpha) + ")))\n";
    q += "(check-sat)\n(get-model)\n";
    solver_config cfg = s_.config();
    cfg.command = cfg_.chc_command;
    cfg.logic = "HORN";
    cfg.cache_capacity = 0;
    try
      {
        solver chc(cfg);
        auto lines = chc.raw(q, cfg.timeout_ms * cfg.quantified_multiplier);
        std::string text;
        for (auto& l: lines)
          text += l + "\n";
        auto es = parse_sexprs(text);
        if (es.empty() || !es[0].is_atom || es[0].atom != "sat" || es.size() < 2)
          return std::nullopt;
        std::vector<const sexpr*> defs;
        for (auto& e: es[1].list)
          defs.push_back(&e);
        for (auto* e: defs)
          {
            if (e->is_atom || e->list.size() != 5 || e->list[0].atom != "define-fun"
                || e->list[1].atom != "inv!")
              continue;
            std::map<std::string, std::string> names;
            auto& params = e->list[2].list;
            for (std::size_t i = 0; i < params.size() && i < xs.size(); ++i)
              names[params[i].list.at(0).atom] = xs[i];
            return from_smtlib(e->list[4], names);
          }
      }
    catch (const std::exception&)
      {
      }
    return std::nullopt;
  }

  std::optional<monitor_state>
  rule_engine::gen_inv(side d, const monitor_state& q)
  {
    if (derive_blocked(d, q))
      return std::nullopt;
    formula gamma = q.curr(d);
    if (gamma.is_true())
      return std::nullopt;
    formula inv = q.imp_inv(d);
    formula_vec alphas;
    for (auto& g: subformulas(q.f(d), false))
      {
        formula beta;
        if (g.is(op::eventually))
          beta = g[0];
        else if (g.is(op::weak_until))
          beta = g[1];
        else
          continue;
        if (beta.is_qf() && !beta.is_constant() && preds_.over_state_vars(beta))
          alphas.push_back(f_not(beta));
      }
    sort_unique(alphas);
    for (auto& alpha: alphas)
      {
        imp_fact fact{gamma, imp_kind::always, alpha};
        bool fresh = std::none_of(q.imp(d).begin(), q.imp(d).end(),
                                  [&](const imp_fact& g) { return imp_subsumes(g, fact); });
        if (!fresh || !s_.proves(gamma, alpha) || s_.proves(inv, alpha))
          continue;
        if (find_strengthening(alpha, gamma, inv))
          return add_fact(q, d, fact);
      }
    return std::nullopt;
  }

  std::optional<monitor_state>
  rule_engine::gen_inv_p(side d, const monitor_state& q)
  {
    if (!cfg_.gen_inv_p || derive_blocked(d, q))
      return std::nullopt;
    std::string key = side_name(d);
    for (auto& f: q.e(d))
      key += key_string(f) + ";";
    if (!gen_inv_p_seen_.insert(key).second)
      return std::nullopt;
    formula gamma = q.curr(d);
    auto alpha = fix_.reachable_set(gamma, q.imp_inv(d));
    if (!alpha || alpha->is_constant() || !preds_.over_state_vars(*alpha))
      return std::nullopt;
    auto r = add_fact(q, d, {gamma, imp_kind::always, *alpha});
    if (r)
      preds_.add_gen_pred(*alpha);
    return r;
  }

  std::optional<monitor_state>
  rule_engine::gen_reach(side d, const monitor_state& q)
  {
    if (derive_blocked(d, q))
      return std::nullopt;
    formula_vec betas;
    for (auto& g: subformulas(q.f(d), true))
      {
        formula beta;
        if (g.is(op::eventually))
          beta = g[0];
        else if (g.is(op::globally) && g[0].is_qf())
          beta = f_not(g[0]);
        else if (g.is(op::globally) && g[0].is(op::eventually))
          beta = g[0][0];
        else
          continue;
        if (beta.is_qf() && !beta.is_constant() && preds_.over_state_vars(beta))
          betas.push_back(beta);
      }
    sort_unique(betas);
    if (betas.empty())
      return std::nullopt;
    std::vector<formula> state_part;
    for (auto& c: conjuncts(q.curr(d)))
      if (preds_.over_state_vars(c))
        state_part.push_back(c);
    formula_vec gammas{f_and(state_part)};
    if (!gammas.front().is_true())
      gammas.push_back(f_true());
    formula inv = q.imp_inv(d);
    for (auto& beta: betas)
      for (auto& gamma: gammas)
        {
          imp_fact fact{gamma, imp_kind::eventually, beta};
          bool fresh = std::none_of(q.imp(d).begin(), q.imp(d).end(),
                                    [&](const imp_fact& g) { return imp_subsumes(g, fact); });
          if (!fresh)
            break;
          if (fix_.reach_entails(gamma, beta, inv) == truth::yes)
            return add_fact(q, d, fact);
        }
    return std::nullopt;
  }

  // ---------------------------------------------------------------- pipeline

  bool
  rule_engine::apply(rule_id r, side d, monitor_state& q, std::vector<rule_app>* log)
  {
    auto res = try_rule(r, d, q);
    if (!res || *res == q)
      return false;
    if (audit_)
      audit_(r, d, q, *res);
    if (log)
      log->push_back({r, d});
    q = std::move(*res);
    return true;
  }

  bool
  rule_engine::close_propagation(monitor_state& q, std::vector<rule_app>* log)
  {
    bool any = false;
    for (;;)
      {
        bool changed = apply(rule_id::propagate_g, side::assume, q, log);
        changed = apply(rule_id::propagate_g, side::guarantee, q, log) || changed;
        changed = apply(rule_id::propagate_assump, side::guarantee, q, log) || changed;
        if (!changed)
          return any;
        any = true;
      }
  }

  bool
  rule_engine::block(monitor_state& q, std::vector<rule_app>* log)
  {
    bool any = false;
    auto trivial = [&] { return q.as_formula().is_constant(); };
    auto run = [&](rule_id r, side d)
    {
      bool fired = false;
      for (unsigned k = 0; k < cfg_.max_instances && !trivial(); ++k)
        {
          if (!apply(r, d, q, log))
            break;
          fired = true;
          close_propagation(q, log);
        }
      any = any || fired;
      return fired;
    };
    static constexpr side sides[] = {side::assume, side::guarantee};

    for (side d: sides)
      {
        // a temporal conflict is reported as such even when the current
        // step is already inconsistent
        run(rule_id::unsat_f, d);
        run(rule_id::unsat, d);
      }
    if (trivial())
      return any;

    static constexpr rule_id saturate[] = {
      rule_id::propagate_w, rule_id::join_imp, rule_id::chain_imp,
      rule_id::chain_imp_g, rule_id::chain_imp_f, rule_id::chain_imp_x};
    for (unsigned pass = 0; pass < cfg_.saturation_rounds; ++pass)
      {
        bool fired = false;
        for (rule_id r: saturate)
          for (side d: sides)
            fired = run(r, d) || fired;
        if (!fired)
          break;
      }

    static constexpr rule_id simplify[] = {
      rule_id::subst_true, rule_id::subst_false, rule_id::simplify_impl,
      rule_id::simplify_and, rule_id::simplify_non_nested};
    for (rule_id r: simplify)
      for (side d: sides)
        run(r, d);
    return any;
  }

  monitor_state
  rule_engine::apply_rules(monitor_state q, std::vector<rule_app>* log)
  {
    q.normalize();
    auto trivial = [&] { return q.as_formula().is_constant(); };
    if (trivial())
      return q;
    for (side d: {side::assume, side::guarantee})
      apply(rule_id::next_ext, d, q, log);
    close_propagation(q, log);

    auto blocks = [&]
    {
      for (unsigned round = 0; round < cfg_.saturation_rounds && !trivial(); ++round)
        if (!block(q, log))
          break;
    };
    blocks();
    if (trivial())
      return q;

    bool generated = false;
    for (rule_id r: {rule_id::gen_inv, rule_id::gen_reach, rule_id::gen_inv_p})
      for (side d: {side::assume, side::guarantee})
        for (unsigned k = 0; k < 4 && !trivial(); ++k)
          {
            if (!apply(r, d, q, log))
              break;
            generated = true;
            close_propagation(q, log);
          }
    if (generated)
      blocks();
    return q;
  }
}
