#include "rpmon/oracle.hh"

#include <sstream>

namespace rpmon
{
  std::vector<std::int64_t>
  targeted_constants(const spec& sp)
  {
    std::set<std::int64_t> out;
    for (auto c: sp.constants())
      for (std::int64_t d: {-1, 0, 1})
        out.insert(c + d);
    return {out.begin(), out.end()};
  }

  std::string
  to_string(const lasso& w)
  {
    auto val = [](const valuation& v)
    {
      std::string s = "{";
      bool first = true;
      for (auto& [k, x]: v)
        {
          s += (first ? "" : ", ") + k + "=" + std::to_string(x);
          first = false;
        }
      return s + "}";
    };
    std::string s = "stem [";
    for (std::size_t i = 0; i < w.stem.size(); ++i)
      s += (i ? " " : "") + val(w.stem[i]);
    s += "] loop [";
    for (std::size_t i = 0; i < w.loop.size(); ++i)
      s += (i ? " " : "") + val(w.loop[i]);
    return s + "]";
  }

  // ---------------------------------------------------------- encoding

  namespace
  {
    std::string
    at_pos(const std::string& v, std::size_t i)
    {
      return v + "@" + std::to_string(i);
    }

    struct lasso_encoder
    {
      std::size_t n, ls;
      std::map<std::pair<std::uintptr_t, std::size_t>, formula> memo;

      std::size_t succ(std::size_t i) const { return i + 1 < n ? i + 1 : ls; }

      /// Positions visited from i, in path order, each once.
      std::vector<std::size_t>
      order(std::size_t i) const
      {
        std::vector<std::size_t> o;
        for (std::size_t j = i; j < n; ++j)
          o.push_back(j);
        for (std::size_t j = ls; j < i; ++j)
          o.push_back(j);
        return o;
      }

      formula
      enc(const formula& f, std::size_t i)
      {
        auto key = std::pair{f.id(), i};
        auto it = memo.find(key);
        if (it != memo.end())
          return it->second;
        formula r;
        if (f.is_qf())
          {
            std::map<std::string, lin_term> m;
            for (auto& v: free_vars(f))
              m[v] = lin_term::var(is_primed(v) ? at_pos(unprimed(v), succ(i)) : at_pos(v, i));
            r = substitute(f, m);
          }
        else
          switch (f.kind())
            {
            case op::not_: r = f_not(enc(f[0], i)); break;
            case op::and_:
            case op::or_:
              {
                std::vector<formula> ch;
                for (auto& c: f.children())
                  ch.push_back(enc(c, i));
                r = f.is(op::and_) ? f_and(ch) : f_or(ch);
                break;
              }
            case op::next: r = enc(f[0], succ(i)); break;
            case op::eventually:
            case op::globally:
              {
                std::vector<formula> ch;
                for (auto j: order(i))
                  ch.push_back(enc(f[0], j));
                r = f.is(op::eventually) ? f_or(ch) : f_and(ch);
                break;
              }
            case op::until:
            case op::weak_until:
              {
                std::vector<formula> disj, prefix;
                for (auto j: order(i))
                  {
                    std::vector<formula> c = prefix;
                    c.push_back(enc(f[1], j));
                    disj.push_back(f_and(c));
                    prefix.push_back(enc(f[0], j));
                  }
                if (f.is(op::weak_until))
                  disj.push_back(f_and(prefix));
                r = f_or(disj);
                break;
              }
            default:
              throw std::logic_error("unexpected operator in lasso encoding");
            }
        memo.emplace(key, r);
        return r;
      }
    };
  }

  formula
  lasso_constraint(const formula& f, unsigned stem, unsigned loop)
  {
    if (loop == 0)
      throw std::invalid_argument("lasso loop must be non-empty");
    lasso_encoder e{stem + loop, stem, {}};
    return e.enc(f, 0);
  }

  // ------------------------------------------------------------ sources

  lasso_source::lasso_source(const spec& sp, oracle_config cfg, solver& s)
    : vars_(sp.decls), cfg_(std::move(cfg)), s_(s), rng_(cfg_.seed)
  {
    std::set<std::int64_t> pool;
    for (int v = -cfg_.radius; v <= cfg_.radius; ++v)
      pool.insert(v);
    pool.insert(cfg_.targeted.begin(), cfg_.targeted.end());
    pool_.assign(pool.begin(), pool.end());
  }

  std::int64_t
  lasso_source::value(const var_decl& d)
  {
    if (d.sort == sort::boolean)
      return std::uniform_int_distribution<int>(0, 1)(rng_);
    // the box proper is favoured over the targeted constants
    if (!cfg_.targeted.empty() && std::uniform_int_distribution<int>(0, 3)(rng_) == 0)
      return pool_[std::uniform_int_distribution<std::size_t>(0, pool_.size() - 1)(rng_)];
    return std::uniform_int_distribution<int>(-cfg_.radius, cfg_.radius)(rng_);
  }

  lasso
  lasso_source::random()
  {
    unsigned stem = std::uniform_int_distribution<unsigned>(0, cfg_.max_stem)(rng_);
    unsigned loop = std::uniform_int_distribution<unsigned>(1, cfg_.max_loop)(rng_);
    lasso w;
    for (unsigned i = 0; i < stem + loop; ++i)
      {
        valuation v;
        for (auto& d: vars_)
          v[d.name] = value(d);
        (i < stem ? w.stem : w.loop).push_back(v);
      }
    return w;
  }

  lasso
  lasso_source::from_model(const valuation& m, unsigned stem, unsigned loop)
  {
    lasso w;
    for (unsigned i = 0; i < stem + loop; ++i)
      {
        valuation v;
        for (auto& d: vars_)
          {
            auto it = m.find(at_pos(d.name, i));
            v[d.name] = it != m.end() ? it->second : 0;
          }
        (i < stem ? w.stem : w.loop).push_back(v);
      }
    return w;
  }

  std::optional<lasso>
  lasso_source::satisfying(const formula& f, unsigned stem, unsigned loop)
  {
    std::vector<formula> base{lasso_constraint(f, stem, loop)};
    if (base[0].is_false())
      return std::nullopt;
    for (unsigned i = 0; i < stem + loop; ++i)
      for (auto& d: vars_)
        if (d.sort == sort::boolean)
          {
            lin_term v = lin_term::var(at_pos(d.name, i));
            base.push_back(f_cmp(v, cmp::ge, lin_term(0)));
            base.push_back(f_cmp(v, cmp::le, lin_term(1)));
          }
        else
          {
            // keep witnesses small so they stay readable
            lin_term v = lin_term::var(at_pos(d.name, i));
            std::int64_t bound = 4 * cfg_.radius + 1;
            for (auto c: cfg_.targeted)
              bound = std::max<std::int64_t>(bound, std::abs(c) + 1);
            base.push_back(f_cmp(v, cmp::le, lin_term(bound)));
            base.push_back(f_cmp(v, cmp::ge, lin_term(-bound)));
          }
    std::vector<formula> pinned = base;
    unsigned pins = std::uniform_int_distribution<unsigned>(0, 3)(rng_);
    for (unsigned k = 0; k < pins && !vars_.empty(); ++k)
      {
        auto& d = vars_[std::uniform_int_distribution<std::size_t>(0, vars_.size() - 1)(rng_)];
        unsigned pos = std::uniform_int_distribution<unsigned>(0, stem + loop - 1)(rng_);
        pinned.push_back(f_cmp(lin_term::var(at_pos(d.name, pos)), cmp::eq, lin_term(value(d))));
      }
    auto m = s_.model(f_and(pinned));
    if (!m && pins > 0)
      m = s_.model(f_and(base));
    if (!m)
      return std::nullopt;
    lasso w = from_model(*m, stem, loop);
    if (!lasso_eval(f, w))
      return std::nullopt;
    return w;
  }

  std::vector<lasso>
  lasso_source::satisfying(const formula& f, unsigned n)
  {
    std::vector<lasso> out;
    std::set<std::string> seen;
    for (unsigned attempt = 0; attempt < 3 * n && out.size() < n; ++attempt)
      {
        unsigned stem = std::uniform_int_distribution<unsigned>(0, cfg_.max_stem)(rng_);
        unsigned loop = std::uniform_int_distribution<unsigned>(1, cfg_.max_loop)(rng_);
        if (auto w = satisfying(f, stem, loop))
          if (seen.insert(to_string(*w)).second)
            out.push_back(*w);
      }
    return out;
  }

  std::vector<lasso>
  lasso_source::mixed(const formula& phi)
  {
    std::vector<lasso> out;
    for (unsigned i = 0; i < cfg_.random_lassos; ++i)
      out.push_back(random());
    for (const formula& f: {phi, f_not(phi)})
      for (auto& w: satisfying(f, cfg_.guided_lassos))
        out.push_back(w);
    return out;
  }

  // ------------------------------------------------------------- reports

  void
  oracle_report::merge(const oracle_report& o)
  {
    checked += o.checked;
    failures.insert(failures.end(), o.failures.begin(), o.failures.end());
  }

  std::string
  oracle_report::summary(const std::string& name) const
  {
    std::ostringstream os;
    os << name << ": " << (ok() ? "pass" : "FAIL") << " (" << checked << " checks, "
       << failures.size() << " failures)\n";
    for (std::size_t i = 0; i < failures.size() && i < 5; ++i)
      os << "  " << failures[i].check << ": " << failures[i].detail << "\n    lasso "
         << to_string(failures[i].witness) << "\n";
    return os.str();
  }

  monitor_trace
  trace_monitor(const monitor& m, const lasso& w)
  {
    monitor_trace t;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> seen;
    std::size_t q = m.init;
    for (std::size_t k = 0;; ++k)
      {
        std::size_t idx = k < w.stem.size() ? k : w.stem.size() + (k - w.stem.size()) % w.loop.size();
        auto [it, fresh] = seen.emplace(std::pair{idx, q}, k);
        if (!fresh)
          {
            t.loop_start = it->second;
            return t;
          }
        t.states.push_back(q);
        q = m.step(q, w.pair(idx));
      }
  }

  oracle_report
  check_state_correctness(const monitor& m, const formula& phi, const std::vector<lasso>& ws)
  {
    oracle_report r;
    for (auto& w: ws)
      {
        bool expected = lasso_eval(phi, w);
        auto t = trace_monitor(m, w);
        for (std::size_t k = 0; k < t.states.size(); ++k)
          {
            ++r.checked;
            std::size_t q = t.states[k];
            if (lasso_eval(m.states[q].as_formula(), w.shift(k)) != expected)
              {
                r.failures.push_back({"state-correctness",
                                      "position " + std::to_string(k) + ", state "
                                      + std::to_string(q) + ": word "
                                      + (expected ? "satisfies" : "violates")
                                      + " the specification but not the state formula",
                                      w});
                break;
              }
          }
      }
    return r;
  }

  oracle_report
  check_verdicts(const monitor& m, const formula& phi, const std::vector<lasso>& ws)
  {
    oracle_report r;
    for (auto& w: ws)
      {
        bool holds = lasso_eval(phi, w);
        auto t = trace_monitor(m, w);
        for (std::size_t k = 0; k < t.states.size(); ++k)
          {
            ++r.checked;
            verdict v = m.verdicts.at(t.states[k]);
            if (v == verdict::unsat && holds)
              {
                r.failures.push_back({"verdict-unsat", "UNSAT at position " + std::to_string(k)
                                      + " on a satisfying word", w});
                break;
              }
            if (v != verdict::safety || holds)
              continue;
            std::size_t from = std::min(k, t.loop_start);
            bool later_unsat = false;
            for (std::size_t j = from; j < t.states.size(); ++j)
              if ((j >= k || j >= t.loop_start) && m.verdicts[t.states[j]] == verdict::unsat)
                later_unsat = true;
            if (!later_unsat)
              {
                r.failures.push_back({"verdict-safety", "SAFETY at position " + std::to_string(k)
                                      + " without later UNSAT on a violating word", w});
                break;
              }
          }
      }
    return r;
  }

  // ------------------------------------------------------------ auditor

  soundness_auditor::soundness_auditor(solver& s, unsigned max_stem, unsigned max_loop)
    : s_(s), max_stem_(max_stem), max_loop_(max_loop)
  {
  }

  std::optional<lasso>
  soundness_auditor::counterexample(const formula& f)
  {
    if (f.is_false())
      return std::nullopt;
    std::set<std::string> vars;
    for (auto& v: free_vars(f))
      vars.insert(unprimed(v));
    for (unsigned stem = 0; stem <= max_stem_; ++stem)
      for (unsigned loop = 1; loop <= max_loop_; ++loop)
        {
          auto m = s_.model(lasso_constraint(f, stem, loop));
          if (!m)
            continue;
          lasso w;
          for (unsigned i = 0; i < stem + loop; ++i)
            {
              valuation v;
              for (auto& x: vars)
                {
                  auto it = m->find(at_pos(x, i));
                  v[x] = it != m->end() ? it->second : 0;
                }
              (i < stem ? w.stem : w.loop).push_back(v);
            }
          if (lasso_eval(f, w))
            return w;
        }
    return std::nullopt;
  }

  void
  soundness_auditor::operator()(rule_id r, side d, const monitor_state& q1, const monitor_state& q2)
  {
    if (!seen_.insert(q1.key() + "=>" + q2.key()).second)
      return;
    auto imps = [](const imp_set& s)
    {
      std::vector<formula> v;
      for (auto& f: s)
        v.push_back(f.as_formula());
      return f_and(v);
    };
    std::string where = std::string(rule_name(r)) + "/" + side_name(d);
    formula f1 = q1.with_imps(), f2 = q2.with_imps();
    std::vector<std::pair<std::string, formula>> checks = {
      {"(a) lost models", f_and(f1, f_not(f2))},
      {"(a) new models", f_and(f_not(f1), f2)},
      {"(b) assumption facts",
       f_and({f_and(q2.ea), imps(q1.imp_a), f_not(imps(q2.imp_a))})},
      {"(b) guarantee facts",
       f_and({f_and(q2.ea), f_and(q2.eg), imps(q1.imp_g), imps(q1.imp_a), f_not(imps(q2.imp_g))})},
      {"(c) E_A weakened", f_and(f_and(q2.ea), f_not(f_and(q1.ea)))},
      {"(c) E_G weakened", f_and(f_and(q2.eg), f_not(f_and(q1.eg)))},
    };
    for (auto& [name, f]: checks)
      {
        ++report_.checked;
        try
          {
            if (auto w = counterexample(f))
              {
                report_.failures.push_back({"soundness " + where, name, *w});
                return;
              }
          }
        catch (const smt_process_error&)
          {
            // an unanswered query cannot refute the rule
          }
      }
  }

  // ---------------------------------------------------------------- games

  namespace
  {
    /// Locations visited by the unique run; nothing when the run blocks.
    std::optional<std::pair<std::vector<std::size_t>, std::size_t>>
    game_run(const symbolic_game& g, const lasso& w)
    {
      if (!evaluate(g.locs[g.init].dom, w.at(0)))
        return std::nullopt;
      std::vector<std::size_t> locs;
      std::map<std::pair<std::size_t, std::size_t>, std::size_t> seen;
      std::size_t l = g.init;
      for (std::size_t k = 0;; ++k)
        {
          std::size_t idx = k < w.stem.size() ? k : w.stem.size() + (k - w.stem.size()) % w.loop.size();
          auto [it, fresh] = seen.emplace(std::pair{idx, l}, k);
          if (!fresh)
            return std::pair{locs, it->second};
          locs.push_back(l);
          valuation pair = w.pair(idx);
          std::optional<std::size_t> next;
          for (auto* e: g.outgoing(l))
            if (evaluate(e->guard, pair) && evaluate(g.locs[e->to].dom, w.at(w.succ(idx))))
              {
                if (next && *next != e->to)
                  throw std::logic_error("game is not deterministic");
                next = e->to;
              }
          if (!next)
            return std::nullopt;
          l = *next;
        }
    }

    bool
    parity_of_loop(const symbolic_game& g, const std::vector<std::size_t>& locs, std::size_t from)
    {
      std::vector<unsigned> colors;
      for (std::size_t i = from; i < locs.size(); ++i)
        colors.push_back(g.locs[locs[i]].color);
      return max_even_accepts(colors);
    }
  }

  bool
  game_accepts(const symbolic_game& g, const lasso& w)
  {
    auto run = game_run(g, w);
    return run && parity_of_loop(g, run->first, run->second);
  }

  bool
  product_accepts(const symbolic_game& p, const lasso& w)
  {
    auto run = game_run(p, w);
    if (!run)
      return false;
    bool safety = false;
    for (auto l: run->first)
      {
        if (p.locs[l].verd == verdict::unsat)
          return false;
        safety = safety || p.locs[l].verd == verdict::safety;
      }
    return safety || parity_of_loop(p, run->first, run->second);
  }

  oracle_report
  check_pseudo_language(const symbolic_game& g, const symbolic_game& p, const std::vector<lasso>& ws)
  {
    oracle_report r;
    for (auto& w: ws)
      {
        ++r.checked;
        bool a = game_accepts(g, w), b = product_accepts(p, w);
        if (a != b)
          r.failures.push_back({"pseudo-language",
                                std::string("game ") + (a ? "accepts" : "rejects")
                                + ", product " + (b ? "accepts" : "rejects"), w});
      }
    return r;
  }
}
