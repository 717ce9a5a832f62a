#include "rpmon/monitor.hh"
#include "rpmon/rpltl.hh"

#include <json.hpp>

#include <deque>
#include <sstream>

namespace rpmon
{
  namespace
  {
    constexpr const char* verdict_names[] = {"UNSAT", "SAFETY", "OPEN"};

    formula
    collapse(monitor_state& q)
    {
      formula f = q.as_formula();
      if (f.is_true())
        q = top_state();
      else if (f.is_false())
        q = bottom_state();
      return f;
    }

    bool
    is_temporal(const formula& f)
    {
      return f.is(op::next) || f.is(op::until) || f.is(op::weak_until)
        || f.is(op::eventually) || f.is(op::globally);
    }

    void
    opaque_parts(const formula& f, std::vector<formula>& out)
    {
      if (f.is_atom() || is_temporal(f))
        out.push_back(f);
      else
        for (auto& c: f.children())
          opaque_parts(c, out);
    }

    formula
    abstract(const formula& f, std::map<formula, std::size_t>& ids)
    {
      return map_children(f, [&](const formula& g)
      {
        if (!g.is_atom() && !is_temporal(g))
          return g;
        auto [it, fresh] = ids.emplace(g, ids.size());
        (void) fresh;
        return f_atom(cmp::le, lin_term::var("!p" + std::to_string(it->second)));
      });
    }

    std::string
    signature(const monitor_state& q)
    {
      std::string sig;
      for (auto* set: {&q.fa, &q.ea, &q.fg, &q.eg})
        {
          std::vector<formula> parts;
          for (auto& f: *set)
            opaque_parts(f, parts);
          sort_unique(parts);
          sig += "[";
          for (auto& p: parts)
            sig += key_string(p) + ",";
          sig += "]";
        }
      monitor_state imps;
      imps.imp_a = q.imp_a;
      imps.imp_g = q.imp_g;
      return sig + imps.key();
    }

    /// Non-nested G F beta members of F_G with QF beta.
    formula_vec
    gf_obligations(const monitor_state& q)
    {
      formula_vec out;
      std::vector<formula> todo(q.fg.begin(), q.fg.end());
      while (!todo.empty())
        {
          formula f = todo.back();
          todo.pop_back();
          if (f.is(op::globally) && f[0].is(op::eventually) && f[0][0].is_qf())
            out.push_back(f[0][0]);
          else if (f.is(op::and_) || f.is(op::or_) || f.is(op::not_))
            todo.insert(todo.end(), f.children().begin(), f.children().end());
        }
      sort_unique(out);
      return out;
    }

    /// Merge states with equal keys, make constant states self-looping,
    /// and renumber the states reachable from init in breadth-first order.
    void
    compact(monitor& m)
    {
      std::size_t n = m.states.size();
      std::map<std::string, std::size_t> first;
      std::vector<std::size_t> rep(n);
      for (std::size_t i = 0; i < n; ++i)
        rep[i] = first.emplace(m.states[i].key(), i).first->second;
      std::vector<std::vector<transition>> out(n);
      for (auto& t: m.transitions)
        if (rep[t.from] == t.from)
          out[t.from].push_back({t.from, t.a, rep[t.to]});
      for (std::size_t i = 0; i < n; ++i)
        if (rep[i] == i && m.states[i].as_formula().is_constant())
          out[i] = {{i, letter{}, i}};

      std::vector<std::size_t> order, fresh(n, SIZE_MAX);
      std::deque<std::size_t> work{rep[m.init]};
      fresh[rep[m.init]] = 0;
      order.push_back(rep[m.init]);
      while (!work.empty())
        {
          std::size_t q = work.front();
          work.pop_front();
          for (auto& t: out[q])
            if (fresh[t.to] == SIZE_MAX)
              {
                fresh[t.to] = order.size();
                order.push_back(t.to);
                work.push_back(t.to);
              }
        }
      std::vector<monitor_state> states;
      std::vector<transition> trans;
      for (std::size_t q: order)
        {
          states.push_back(m.states[q]);
          for (auto& t: out[q])
            trans.push_back({fresh[q], t.a, fresh[t.to]});
        }
      m.states = std::move(states);
      m.transitions = std::move(trans);
      m.init = 0;
      if (!m.verdicts.empty())
        m.verdicts.clear();
    }
  }

  const char*
  verdict_name(verdict v)
  {
    return verdict_names[static_cast<int>(v)];
  }

  std::optional<verdict>
  verdict_from_name(std::string_view s)
  {
    for (int i = 0; i < 3; ++i)
      if (s == verdict_names[i])
        return static_cast<verdict>(i);
    return std::nullopt;
  }

  bool
  letter_matches(const letter& a, const predicate_table& t, const valuation& pair)
  {
    for (auto& [id, v]: a.lits)
      if (evaluate(t.atom(id), pair) != v)
        return false;
    return true;
  }

  std::vector<const transition*>
  monitor::outgoing(std::size_t q) const
  {
    std::vector<const transition*> out;
    auto it = std::lower_bound(transitions.begin(), transitions.end(), q,
                               [](const transition& t, std::size_t v) { return t.from < v; });
    for (; it != transitions.end() && it->from == q; ++it)
      out.push_back(&*it);
    return out;
  }

  std::size_t
  monitor::step(std::size_t q, const valuation& pair) const
  {
    for (auto* t: outgoing(q))
      if (letter_matches(t->a, preds, pair))
        return t->to;
    throw monitor_error("no transition from state " + std::to_string(q) + " matches the valuation");
  }

  std::size_t
  monitor::run(const std::vector<valuation>& prefix) const
  {
    std::size_t q = init;
    for (std::size_t i = 0; i + 1 < prefix.size(); ++i)
      {
        valuation pair = prefix[i];
        for (auto& [v, k]: prefix[i + 1])
          pair[primed(v)] = k;
        q = step(q, pair);
      }
    return q;
  }

  std::size_t
  monitor::count(verdict v) const
  {
    return std::count(verdicts.begin(), verdicts.end(), v);
  }

  bool
  propositionally_equivalent(const formula& a, const formula& b, solver& s)
  {
    if (a == b)
      return true;
    std::map<formula, std::size_t> ids;
    return s.valid(f_iff(abstract(a, ids), abstract(b, ids))) == truth::yes;
  }

  // ----------------------------------------------------------------- builder

  monitor_builder::monitor_builder(const spec& sp, solver& s, monitor_config cfg)
    : sp_(sp), s_(s), cfg_(std::move(cfg)), preds_(predicate_table::from_spec(sp)),
      eng_(s, preds_, cfg_.engine)
  {
  }

  monitor_state
  monitor_builder::initial_state(std::vector<rule_app>* log)
  {
    monitor_state q = eng_.apply_rules(partition_initial(sp_), log);
    collapse(q);
    return q;
  }

  monitor_state
  monitor_builder::successor(const monitor_state& q, const letter& a, std::vector<rule_app>* log)
  {
    monitor_state raw = next_state_raw(q, a, preds_, s_);
    std::string k = raw.key();
    if (!log)
      {
        auto it = succ_memo_.find(k);
        if (it != succ_memo_.end())
          return it->second;
      }
    monitor_state r = eng_.apply_rules(raw, log);
    collapse(r);
    succ_memo_[k] = r;
    return r;
  }

  std::size_t
  monitor_builder::insert(monitor& m, const monitor_state& q,
                          std::map<std::string, std::size_t>& index)
  {
    std::string k = q.key();
    auto it = index.find(k);
    if (it != index.end())
      return it->second;
    // a different key may still denote the same state up to propositional
    // equivalence of the components
    std::string sig = signature(q);
    for (std::size_t i = 0; i < m.states.size(); ++i)
      {
        const monitor_state& p = m.states[i];
        if (signature(p) != sig)
          continue;
        bool same = true;
        for (auto [x, y]: {std::pair{&p.fa, &q.fa}, {&p.ea, &q.ea}, {&p.fg, &q.fg}, {&p.eg, &q.eg}})
          if (!propositionally_equivalent(f_and(*x), f_and(*y), s_))
            {
              same = false;
              break;
            }
        if (same)
          {
            index.emplace(k, i);
            return i;
          }
      }
    if (m.states.size() >= cfg_.max_states)
      throw state_overflow("monitor exceeds " + std::to_string(cfg_.max_states) + " states");
    m.states.push_back(q);
    index.emplace(k, m.states.size() - 1);
    return m.states.size() - 1;
  }

  monitor
  monitor_builder::explore()
  {
    monitor m;
    m.decls = sp_.decls;
    std::map<std::string, std::size_t> index;
    m.init = insert(m, initial_state(), index);
    for (std::size_t i = 0; i < m.states.size(); ++i)
      {
        monitor_state q = m.states[i];
        if (q.as_formula().is_constant())
          {
            m.transitions.push_back({i, letter{}, i});
            continue;
          }
        for (auto& a: relevant_letters(q, preds_, f_true(), s_))
          {
            std::size_t j = insert(m, successor(q, a), index);
            m.transitions.push_back({i, a, j});
          }
      }
    m.preds = preds_;
    return m;
  }

  void
  monitor_builder::discharge_gf(monitor& m)
  {
    formula_vec betas;
    for (auto& q: m.states)
      for (auto& b: gf_obligations(q))
        betas.push_back(b);
    sort_unique(betas);
    if (betas.empty())
      return;

    std::size_t n = m.states.size();
    std::vector<std::vector<std::size_t>> succ(n);
    for (auto& t: m.transitions)
      succ[t.from].push_back(t.to);
    std::vector<char> triv(n);
    for (std::size_t i = 0; i < n; ++i)
      triv[i] = m.states[i].as_formula().is_constant();

    std::vector<char> modified(n);
    for (auto& beta: betas)
      {
        std::vector<char> in_a(n);
        for (std::size_t i = 0; i < n; ++i)
          {
            const monitor_state& q = m.states[i];
            in_a[i] = triv[i];
            if (in_a[i])
              continue;
            formula ctx = f_and(q.curr(side::guarantee), q.imp_inv(side::guarantee));
            for (auto& f: q.imp_g)
              if (f.kind == imp_kind::eventually && f.body == beta
                  && (f.guard.is_true() || s_.proves(ctx, f.guard)))
                {
                  in_a[i] = 1;
                  break;
                }
          }
        // AF: states all of whose paths reach the target set
        for (bool grow = true; grow;)
          {
            grow = false;
            for (std::size_t i = 0; i < n; ++i)
              if (!in_a[i] && !succ[i].empty()
                  && std::all_of(succ[i].begin(), succ[i].end(),
                                 [&](std::size_t j) { return in_a[j]; }))
                in_a[i] = grow = 1;
          }
        // AG over AF
        for (bool shrink = true; shrink;)
          {
            shrink = false;
            for (std::size_t i = 0; i < n; ++i)
              if (in_a[i]
                  && std::any_of(succ[i].begin(), succ[i].end(),
                                 [&](std::size_t j) { return !in_a[j]; }))
                {
                  in_a[i] = 0;
                  shrink = true;
                }
          }
        formula gf = f_globally(f_eventually(beta));
        bool used = false;
        for (std::size_t i = 0; i < n; ++i)
          {
            if (!in_a[i] || triv[i])
              continue;
            monitor_state q = m.states[i];
            q.fg = replace_non_nested(q.fg, gf, f_true());
            q.normalize();
            if (q == m.states[i])
              continue;
            m.states[i] = q;
            modified[i] = 1;
            used = true;
          }
        if (used)
          ++m.gf_discharged;
      }
    if (std::none_of(modified.begin(), modified.end(), [](char c) { return c; }))
      return;
    for (std::size_t i = 0; i < n; ++i)
      if (modified[i])
        {
          m.states[i] = eng_.apply_rules(m.states[i]);
          collapse(m.states[i]);
        }
    compact(m);
    m.preds = preds_;
  }

  void
  monitor_builder::label_verdicts(monitor& m)
  {
    std::size_t n = m.states.size();
    std::vector<std::vector<std::size_t>> pred(n);
    for (auto& t: m.transitions)
      pred[t.to].push_back(t.from);
    std::vector<char> unsafe(n);
    std::deque<std::size_t> work;
    std::vector<char> unsat(n);
    for (std::size_t i = 0; i < n; ++i)
      {
        formula f = m.states[i].as_formula();
        unsat[i] = f.is_false();
        if (!is_syntactic_safety(f))
          {
            unsafe[i] = 1;
            work.push_back(i);
          }
      }
    while (!work.empty())
      {
        std::size_t q = work.front();
        work.pop_front();
        for (std::size_t p: pred[q])
          if (!unsafe[p])
            {
              unsafe[p] = 1;
              work.push_back(p);
            }
      }
    m.verdicts.assign(n, verdict::open);
    for (std::size_t i = 0; i < n; ++i)
      if (unsat[i])
        m.verdicts[i] = verdict::unsat;
      else if (!unsafe[i])
        m.verdicts[i] = verdict::safety;
    for (auto& t: m.transitions)
      {
        verdict a = m.verdicts[t.from], b = m.verdicts[t.to];
        if ((a == verdict::unsat && b != verdict::unsat)
            || (a == verdict::safety && b == verdict::open))
          throw monitor_error("verdict monotonicity violated on " + std::to_string(t.from)
                              + " -> " + std::to_string(t.to));
      }
  }

  monitor
  monitor_builder::build()
  {
    s_.fresh_session();
    monitor m = explore();
    discharge_gf(m);
    label_verdicts(m);
    return m;
  }

  // ------------------------------------------------------------------ export

  namespace
  {
    std::string
    dot_escape(const std::string& s)
    {
      std::string out;
      for (char c: s)
        {
          if (c == '"' || c == '\\')
            out += '\\';
          out += c;
        }
      return out;
    }

    const char* kind_names[] = {"now", "next", "eventually", "always"};

    using json = nlohmann::json;

    json
    set_json(const formula_vec& v)
    {
      json a = json::array();
      for (auto& f: v)
        a.push_back(to_string(f));
      return a;
    }

    json
    imps_json(const imp_set& s)
    {
      json a = json::array();
      for (auto& f: s)
        a.push_back({{"guard", to_string(f.guard)},
                     {"kind", kind_names[static_cast<int>(f.kind)]},
                     {"body", to_string(f.body)}});
      return a;
    }
  }

  std::string
  to_dot(const monitor& m)
  {
    std::ostringstream os;
    os << "digraph monitor {\n  node [style=filled, shape=box];\n";
    for (std::size_t i = 0; i < m.states.size(); ++i)
      {
        const char* color = "gray";
        if (i < m.verdicts.size())
          color = m.verdicts[i] == verdict::unsat ? "red"
            : m.verdicts[i] == verdict::safety ? "green" : "gray";
        os << "  s" << i << " [label=\"" << i
           << (i == m.init ? " (init)" : "") << "\", fillcolor=" << color
           << ", tooltip=\"" << dot_escape(to_string(m.states[i].as_formula())) << "\"];\n";
      }
    for (auto& t: m.transitions)
      os << "  s" << t.from << " -> s" << t.to << " [label=\""
         << dot_escape(to_string(t.a.conjunction(m.preds))) << "\"];\n";
    os << "}\n";
    return os.str();
  }

  std::string
  to_json(const monitor& m)
  {
    json j;
    json decls = json::array();
    for (auto& d: m.decls)
      decls.push_back({{"name", d.name},
                       {"sort", d.sort == sort::boolean ? "bool" : "int"},
                       {"input", d.input}});
    j["decls"] = decls;
    json preds = json::array();
    for (std::size_t i = 0; i < m.preds.size(); ++i)
      preds.push_back(to_string(m.preds.atom(i)));
    j["predicates"] = preds;
    json props = json::array(), gens = json::array();
    for (auto& p: m.preds.prop_preds())
      props.push_back(to_string(p));
    for (auto& p: m.preds.gen_preds())
      gens.push_back(to_string(p));
    j["prop_preds"] = props;
    j["gen_preds"] = gens;
    json states = json::array();
    for (std::size_t i = 0; i < m.states.size(); ++i)
      {
        auto& q = m.states[i];
        states.push_back({{"id", i},
                          {"verdict", i < m.verdicts.size() ? verdict_name(m.verdicts[i]) : "OPEN"},
                          {"formula_text", to_string(q.as_formula())},
                          {"F_A", set_json(q.fa)},
                          {"E_A", set_json(q.ea)},
                          {"F_G", set_json(q.fg)},
                          {"E_G", set_json(q.eg)},
                          {"Imp_A", imps_json(q.imp_a)},
                          {"Imp_G", imps_json(q.imp_g)}});
      }
    j["states"] = states;
    j["init"] = m.init;
    j["gf_discharged"] = m.gf_discharged;
    json trans = json::array();
    for (auto& t: m.transitions)
      {
        json pos = json::array(), neg = json::array();
        for (auto& [id, v]: t.a.lits)
          (v ? pos : neg).push_back(id);
        trans.push_back({{"from", t.from}, {"letter", {{"true", pos}, {"false", neg}}}, {"to", t.to}});
      }
    j["transitions"] = trans;
    return j.dump(1) + "\n";
  }

  monitor
  monitor_from_json(std::string_view text)
  {
    json j;
    try
      {
        j = json::parse(text);
      }
    catch (const json::exception& e)
      {
        throw std::runtime_error(std::string("malformed monitor JSON: ") + e.what());
      }
    try
      {
        monitor m;
        // bool variables are plain integers in printed formulas
        spec parse_ctx;
        for (auto& d: j.at("decls"))
          {
            var_decl v{d.at("name").get<std::string>(),
                       d.at("sort").get<std::string>() == "bool" ? sort::boolean : sort::integer,
                       d.at("input").get<bool>()};
            m.decls.push_back(v);
            v.sort = sort::integer;
            parse_ctx.decls.push_back(v);
          }
        auto parse = [&](const json& s) { return parse_formula(s.get<std::string>(), parse_ctx); };
        m.preds = predicate_table(parse_ctx.program_vars(), parse_ctx.input_vars());
        for (auto& p: j.at("predicates"))
          m.preds.intern(parse(p));
        for (auto& p: j.at("prop_preds"))
          m.preds.add_prop_pred(parse(p));
        for (auto& p: j.at("gen_preds"))
          m.preds.add_gen_pred(parse(p));
        auto set = [&](const json& a)
        {
          formula_vec v;
          for (auto& s: a)
            v.push_back(parse(s));
          return v;
        };
        auto imps = [&](const json& a)
        {
          imp_set s;
          for (auto& f: a)
            {
              imp_fact fact{parse(f.at("guard")), imp_kind::now, parse(f.at("body"))};
              std::string k = f.at("kind").get<std::string>();
              for (int i = 0; i < 4; ++i)
                if (k == kind_names[i])
                  fact.kind = static_cast<imp_kind>(i);
              s.push_back(fact);
            }
          return s;
        };
        for (auto& s: j.at("states"))
          {
            monitor_state q;
            q.fa = set(s.at("F_A"));
            q.ea = set(s.at("E_A"));
            q.fg = set(s.at("F_G"));
            q.eg = set(s.at("E_G"));
            q.imp_a = imps(s.at("Imp_A"));
            q.imp_g = imps(s.at("Imp_G"));
            m.states.push_back(q);
            auto v = verdict_from_name(s.at("verdict").get<std::string>());
            if (!v)
              throw std::runtime_error("unknown verdict");
            m.verdicts.push_back(*v);
          }
        m.init = j.at("init").get<std::size_t>();
        m.gf_discharged = j.value("gf_discharged", std::size_t{0});
        for (auto& t: j.at("transitions"))
          {
            letter a;
            for (auto& id: t.at("letter").at("true"))
              a.set(id.get<std::size_t>(), true);
            for (auto& id: t.at("letter").at("false"))
              a.set(id.get<std::size_t>(), false);
            m.transitions.push_back({t.at("from").get<std::size_t>(), a, t.at("to").get<std::size_t>()});
          }
        return m;
      }
    catch (const json::exception& e)
      {
        throw std::runtime_error(std::string("malformed monitor JSON: ") + e.what());
      }
    catch (const parse_error& e)
      {
        throw std::runtime_error(std::string("malformed formula in monitor JSON: ") + e.what());
      }
  }
}
