#include "rpmon/rpltl.hh"

namespace rpmon
{
  namespace
  {
    formula
    nnf_neg(const formula& f);

    formula
    nnf_pos(const formula& f)
    {
      switch (f.kind())
        {
        case op::not_:
          return nnf_neg(f[0]);
        case op::and_:
        case op::or_:
          {
            std::vector<formula> ch;
            for (auto& c: f.children())
              ch.push_back(nnf_pos(c));
            return f.is(op::and_) ? f_and(ch) : f_or(ch);
          }
        case op::next:
          return f_next(nnf_pos(f[0]));
        case op::until:
          return f_until(nnf_pos(f[0]), nnf_pos(f[1]));
        case op::weak_until:
          return f_weak_until(nnf_pos(f[0]), nnf_pos(f[1]));
        case op::eventually:
          return f_eventually(nnf_pos(f[0]));
        case op::globally:
          return f_globally(nnf_pos(f[0]));
        default:
          return canonicalize(f);
        }
    }

    formula
    nnf_neg(const formula& f)
    {
      switch (f.kind())
        {
        case op::tt:
        case op::ff:
        case op::atom:
          return f_not(canonicalize(f));
        case op::not_:
          return nnf_pos(f[0]);
        case op::and_:
        case op::or_:
          {
            std::vector<formula> ch;
            for (auto& c: f.children())
              ch.push_back(nnf_neg(c));
            return f.is(op::and_) ? f_or(ch) : f_and(ch);
          }
        case op::next:
          return f_next(nnf_neg(f[0]));
        case op::until:
          {
            // !(a U b) == !b W (!a & !b)
            formula na = nnf_neg(f[0]), nb = nnf_neg(f[1]);
            return f_weak_until(nb, f_and(na, nb));
          }
        case op::weak_until:
          {
            formula na = nnf_neg(f[0]), nb = nnf_neg(f[1]);
            return f_until(nb, f_and(na, nb));
          }
        case op::eventually:
          return f_globally(nnf_neg(f[0]));
        case op::globally:
          return f_eventually(nnf_neg(f[0]));
        }
      return f;
    }
  }

  formula
  nnf(const formula& f)
  {
    return nnf_pos(f);
  }

  bool
  is_syntactic_safety(const formula& f)
  {
    formula n = nnf(f);
    std::vector<formula> todo{n};
    std::set<formula> seen;
    while (!todo.empty())
      {
        formula g = todo.back();
        todo.pop_back();
        if (!seen.insert(g).second)
          continue;
        if (g.is(op::until) || g.is(op::eventually))
          return false;
        for (auto& c: g.children())
          todo.push_back(c);
      }
    return true;
  }

  formula
  desugar(const formula& f)
  {
    if (f.is_qf())
      return f;
    auto rnot = [](const formula& a) { return raw(op::not_, {a}); };
    auto rand = [](const formula& a, const formula& b) { return raw(op::and_, {a, b}); };
    switch (f.kind())
      {
      case op::not_:
        return rnot(desugar(f[0]));
      case op::and_:
        {
          formula acc = desugar(f[0]);
          for (std::size_t i = 1; i < f.size(); ++i)
            acc = rand(acc, desugar(f[i]));
          return acc;
        }
      case op::or_:
        {
          formula acc = rnot(desugar(f[0]));
          for (std::size_t i = 1; i < f.size(); ++i)
            acc = rand(acc, rnot(desugar(f[i])));
          return rnot(acc);
        }
      case op::next:
        return raw(op::next, {desugar(f[0])});
      case op::until:
        return raw(op::until, {desugar(f[0]), desugar(f[1])});
      case op::eventually:
        return raw(op::until, {f_true(), desugar(f[0])});
      case op::globally:
        return rnot(raw(op::until, {f_true(), rnot(desugar(f[0]))}));
      case op::weak_until:
        {
          // a W b == (a U b) | G a
          formula a = desugar(f[0]), b = desugar(f[1]);
          formula u = raw(op::until, {a, b});
          formula g = rnot(raw(op::until, {f_true(), rnot(a)}));
          return rnot(rand(rnot(u), rnot(g)));
        }
      default:
        return f;
      }
  }

  std::set<formula>
  closure(const formula& f)
  {
    if (f.is_qf())
      return {f, f_true(), f_false()};
    std::set<formula> r;
    switch (f.kind())
      {
      case op::not_:
      case op::next:
        {
          r = closure(f[0]);
          std::vector<formula> add;
          for (auto& g: r)
            add.push_back(raw(f.kind(), {g}));
          r.insert(add.begin(), add.end());
          return r;
        }
      case op::and_:
      case op::until:
        {
          if (f.size() != 2)
            throw std::invalid_argument("closure: expects binary core formula");
          auto c1 = closure(f[0]);
          auto c2 = closure(f[1]);
          r = c1;
          r.insert(c2.begin(), c2.end());
          for (auto& a: c1)
            for (auto& b: c2)
              r.insert(raw(f.kind(), {a, b}));
          return r;
        }
      default:
        throw std::invalid_argument("closure: formula is not in core syntax");
      }
  }

  // ------------------------------------------------------------------ lassos

  const valuation&
  lasso::word(std::size_t k) const
  {
    if (k < stem.size())
      return stem[k];
    return loop[(k - stem.size()) % loop.size()];
  }

  lasso
  lasso::shift(std::size_t k) const
  {
    lasso r;
    if (k < stem.size())
      {
        r.stem.assign(stem.begin() + static_cast<std::ptrdiff_t>(k), stem.end());
        r.loop = loop;
        return r;
      }
    std::size_t off = (k - stem.size()) % loop.size();
    r.loop.assign(loop.begin() + static_cast<std::ptrdiff_t>(off), loop.end());
    r.loop.insert(r.loop.end(), loop.begin(), loop.begin() + static_cast<std::ptrdiff_t>(off));
    return r;
  }

  valuation
  lasso::pair(std::size_t i) const
  {
    valuation v = at(i);
    for (auto& [name, val]: at(succ(i)))
      v[primed(name)] = val;
    return v;
  }

  lasso_evaluator::lasso_evaluator(const lasso& w) : w_(w)
  {
    if (w.loop.empty())
      throw std::invalid_argument("lasso with empty loop");
    for (std::size_t i = 0; i < w.length(); ++i)
      pairs_.push_back(w.pair(i));
  }

  bool
  lasso_evaluator::holds(const formula& f, std::size_t pos)
  {
    return values(f)[pos < w_.length() ? pos : w_.stem.size()
                     + (pos - w_.stem.size()) % w_.loop.size()];
  }

  const std::vector<char>&
  lasso_evaluator::values(const formula& f)
  {
    auto it = memo_.find(f.id());
    if (it != memo_.end())
      return it->second;
    std::size_t n = w_.length();
    std::size_t ls = w_.stem.size();
    std::vector<char> v(n, 0);
    if (f.is_qf())
      {
        for (std::size_t i = 0; i < n; ++i)
          v[i] = evaluate(f, pairs_[i]);
      }
    else
      switch (f.kind())
        {
        case op::not_:
          {
            auto a = values(f[0]);
            for (std::size_t i = 0; i < n; ++i)
              v[i] = !a[i];
            break;
          }
        case op::and_:
        case op::or_:
          {
            bool is_and = f.is(op::and_);
            std::fill(v.begin(), v.end(), is_and);
            for (auto& c: f.children())
              {
                auto a = values(c);
                for (std::size_t i = 0; i < n; ++i)
                  v[i] = is_and ? (v[i] && a[i]) : (v[i] || a[i]);
              }
            break;
          }
        case op::next:
          {
            auto a = values(f[0]);
            for (std::size_t i = 0; i < n; ++i)
              v[i] = a[w_.succ(i)];
            break;
          }
        case op::eventually:
        case op::globally:
          {
            auto a = values(f[0]);
            bool is_g = f.is(op::globally);
            bool loop_val = is_g;
            for (std::size_t i = ls; i < n; ++i)
              loop_val = is_g ? (loop_val && a[i]) : (loop_val || a[i]);
            for (std::size_t i = ls; i < n; ++i)
              v[i] = loop_val;
            for (std::size_t i = ls; i-- > 0;)
              v[i] = is_g ? (a[i] && v[i + 1]) : (a[i] || v[i + 1]);
            break;
          }
        case op::until:
        case op::weak_until:
          {
            auto a = values(f[0]);
            auto b = values(f[1]);
            // least (U) or greatest (W) fixpoint of v = b | (a & X v)
            char init = f.is(op::weak_until);
            for (std::size_t i = ls; i < n; ++i)
              v[i] = init;
            bool changed = true;
            while (changed)
              {
                changed = false;
                for (std::size_t i = n; i-- > ls;)
                  {
                    char nv = b[i] || (a[i] && v[w_.succ(i)]);
                    if (nv != v[i])
                      {
                        v[i] = nv;
                        changed = true;
                      }
                  }
              }
            for (std::size_t i = ls; i-- > 0;)
              v[i] = b[i] || (a[i] && v[i + 1]);
            break;
          }
        default:
          break;
        }
    return memo_.emplace(f.id(), std::move(v)).first->second;
  }

  bool
  lasso_eval(const formula& f, const lasso& w)
  {
    lasso_evaluator ev(w);
    return ev.holds(f, 0);
  }
}
