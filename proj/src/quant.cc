#include "rpmon/quant.hh"

#include <atomic>

namespace rpmon
{
  struct fo_node
  {
    fo_formula::kind k;
    formula leaf;
    std::vector<fo_formula> ch;
    std::vector<std::string> bound;
  };

  namespace
  {
    fo_formula
    make(fo_formula::kind k, std::vector<fo_formula> ch, std::vector<std::string> bound = {})
    {
      auto n = std::make_shared<fo_node>();
      n->k = k;
      n->ch = std::move(ch);
      n->bound = std::move(bound);
      return fo_formula(std::shared_ptr<const fo_node>(std::move(n)));
    }

    std::string
    fresh_name()
    {
      static std::atomic<unsigned> counter{0};
      return "q!" + std::to_string(counter++);
    }
  }

  fo_formula::fo_formula(const formula& f)
  {
    auto n = std::make_shared<fo_node>();
    n->k = kind::leaf;
    n->leaf = f;
    n_ = std::move(n);
  }

  fo_formula::kind fo_formula::type() const { return n_->k; }
  const formula& fo_formula::leaf() const { return n_->leaf; }
  const std::vector<fo_formula>& fo_formula::children() const { return n_->ch; }
  const std::vector<std::string>& fo_formula::bound() const { return n_->bound; }

  bool
  fo_formula::is_quantified() const
  {
    if (type() == kind::forall || type() == kind::exists)
      return true;
    for (auto& c: children())
      if (c.is_quantified())
        return true;
    return false;
  }

  namespace
  {
    fo_formula
    nary(fo_formula::kind k, std::vector<fo_formula> fs)
    {
      bool is_and = k == fo_formula::kind::and_;
      std::vector<fo_formula> keep;
      std::vector<formula> leaves;
      for (auto& f: fs)
        {
          if (f.type() == k)
            {
              for (auto& c: f.children())
                (c.is_leaf() ? leaves.push_back(c.leaf()) : keep.push_back(c));
            }
          else if (f.is_leaf())
            leaves.push_back(f.leaf());
          else
            keep.push_back(f);
        }
      formula merged = is_and ? f_and(leaves) : f_or(leaves);
      if (merged.is_constant() && merged.is_false() == is_and)
        return merged;
      if (keep.empty())
        return merged;
      if (!merged.is_constant())
        keep.insert(keep.begin(), fo_formula(merged));
      if (keep.size() == 1)
        return keep.front();
      return make(k, std::move(keep));
    }
  }

  fo_formula fo_and(std::vector<fo_formula> fs) { return nary(fo_formula::kind::and_, std::move(fs)); }
  fo_formula fo_or(std::vector<fo_formula> fs) { return nary(fo_formula::kind::or_, std::move(fs)); }
  fo_formula fo_and(const fo_formula& a, const fo_formula& b) { return fo_and(std::vector<fo_formula>{a, b}); }
  fo_formula fo_or(const fo_formula& a, const fo_formula& b) { return fo_or(std::vector<fo_formula>{a, b}); }

  fo_formula
  fo_not(const fo_formula& f)
  {
    if (f.is_leaf())
      return f_not(f.leaf());
    if (f.type() == fo_formula::kind::not_)
      return f.children().front();
    return make(fo_formula::kind::not_, {f});
  }

  fo_formula
  fo_implies(const fo_formula& a, const fo_formula& b)
  {
    return fo_or(fo_not(a), b);
  }

  namespace
  {
    fo_formula
    quant(fo_formula::kind k, std::vector<std::string> vars, const fo_formula& body)
    {
      auto fv = free_vars(body);
      std::vector<std::string> used;
      for (auto& v: vars)
        if (fv.count(v))
          used.push_back(v);
      if (used.empty())
        return body;
      return make(k, {body}, std::move(used));
    }
  }

  fo_formula
  fo_forall(std::vector<std::string> vars, const fo_formula& body)
  {
    return quant(fo_formula::kind::forall, std::move(vars), body);
  }

  fo_formula
  fo_exists(std::vector<std::string> vars, const fo_formula& body)
  {
    return quant(fo_formula::kind::exists, std::move(vars), body);
  }

  std::set<std::string>
  free_vars(const fo_formula& f)
  {
    if (f.is_leaf())
      return free_vars(f.leaf());
    std::set<std::string> r;
    for (auto& c: f.children())
      for (auto& v: free_vars(c))
        r.insert(v);
    for (auto& v: f.bound())
      r.erase(v);
    return r;
  }

  fo_formula
  substitute(const fo_formula& f, const std::map<std::string, lin_term>& m)
  {
    if (m.empty())
      return f;
    switch (f.type())
      {
      case fo_formula::kind::leaf:
        return substitute(f.leaf(), m);
      case fo_formula::kind::and_:
      case fo_formula::kind::or_:
        {
          std::vector<fo_formula> ch;
          for (auto& c: f.children())
            ch.push_back(substitute(c, m));
          return f.type() == fo_formula::kind::and_ ? fo_and(ch) : fo_or(ch);
        }
      case fo_formula::kind::not_:
        return fo_not(substitute(f.children().front(), m));
      case fo_formula::kind::forall:
      case fo_formula::kind::exists:
        {
          std::map<std::string, lin_term> inner = m;
          std::set<std::string> captured;
          for (auto& [v, t]: m)
            for (auto& [w, c]: t.coeffs())
              captured.insert(w);
          std::vector<std::string> bound;
          std::map<std::string, lin_term> rename;
          for (auto& b: f.bound())
            {
              inner.erase(b);
              if (captured.count(b))
                {
                  std::string nb = fresh_name();
                  rename[b] = lin_term::var(nb);
                  bound.push_back(nb);
                }
              else
                bound.push_back(b);
            }
          fo_formula body = f.children().front();
          if (!rename.empty())
            body = substitute(body, rename);
          body = substitute(body, inner);
          return f.type() == fo_formula::kind::forall
            ? fo_forall(bound, body) : fo_exists(bound, body);
        }
      }
    return f;
  }

  std::map<std::string, lin_term>
  renaming(const std::map<std::string, std::string>& m)
  {
    std::map<std::string, lin_term> r;
    for (auto& [a, b]: m)
      r[a] = lin_term::var(b);
    return r;
  }
}
