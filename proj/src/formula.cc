#include "rpmon/formula.hh"

#include <algorithm>
#include <cassert>
#include <mutex>
#include <numeric>
#include <unordered_set>

namespace rpmon
{
  bool
  is_primed(std::string_view v)
  {
    return !v.empty() && v.back() == '\'';
  }

  std::string
  primed(std::string_view v)
  {
    return std::string(v) + "'";
  }

  std::string
  unprimed(std::string_view v)
  {
    return std::string(is_primed(v) ? v.substr(0, v.size() - 1) : v);
  }

  bool
  var_less(const std::string& a, const std::string& b)
  {
    bool pa = is_primed(a), pb = is_primed(b);
    if (pa != pb)
      return pa;
    return a < b;
  }

  // ---------------------------------------------------------------- lin_term

  lin_term
  lin_term::var(std::string name, std::int64_t coeff)
  {
    lin_term t;
    if (coeff != 0)
      t.coeffs_.emplace_back(std::move(name), coeff);
    return t;
  }

  std::int64_t
  lin_term::coeff(const std::string& v) const
  {
    for (auto& [n, c]: coeffs_)
      if (n == v)
        return c;
    return 0;
  }

  void
  lin_term::add(const std::string& v, std::int64_t c)
  {
    auto it = std::lower_bound(coeffs_.begin(), coeffs_.end(), v,
                               [](auto& p, const std::string& s)
                               { return var_less(p.first, s); });
    if (it != coeffs_.end() && it->first == v)
      {
        it->second += c;
        if (it->second == 0)
          coeffs_.erase(it);
      }
    else if (c != 0)
      coeffs_.insert(it, {v, c});
  }

  lin_term
  lin_term::operator+(const lin_term& o) const
  {
    lin_term r = *this;
    for (auto& [v, c]: o.coeffs_)
      r.add(v, c);
    r.constant_ += o.constant_;
    return r;
  }

  lin_term
  lin_term::operator-() const
  {
    lin_term r = *this;
    for (auto& p: r.coeffs_)
      p.second = -p.second;
    r.constant_ = -r.constant_;
    return r;
  }

  lin_term
  lin_term::operator-(const lin_term& o) const
  {
    return *this + (-o);
  }

  lin_term
  lin_term::operator*(std::int64_t k) const
  {
    if (k == 0)
      return lin_term(0);
    lin_term r = *this;
    for (auto& p: r.coeffs_)
      p.second *= k;
    r.constant_ *= k;
    return r;
  }

  int
  lin_term::compare(const lin_term& o) const
  {
    std::size_t n = std::min(coeffs_.size(), o.coeffs_.size());
    for (std::size_t i = 0; i < n; ++i)
      {
        auto& a = coeffs_[i];
        auto& b = o.coeffs_[i];
        if (a.first != b.first)
          return var_less(a.first, b.first) ? -1 : 1;
        if (a.second != b.second)
          return a.second < b.second ? -1 : 1;
      }
    if (coeffs_.size() != o.coeffs_.size())
      return coeffs_.size() < o.coeffs_.size() ? -1 : 1;
    if (constant_ != o.constant_)
      return constant_ < o.constant_ ? -1 : 1;
    return 0;
  }

  lin_term
  lin_term::substitute(const std::map<std::string, lin_term>& m) const
  {
    lin_term r(constant_);
    for (auto& [v, c]: coeffs_)
      {
        auto it = m.find(v);
        if (it == m.end())
          r.add(v, c);
        else
          r += it->second * c;
      }
    return r;
  }

  std::int64_t
  lin_term::eval(const std::function<std::int64_t(const std::string&)>& val) const
  {
    std::int64_t r = constant_;
    for (auto& [v, c]: coeffs_)
      r += c * val(v);
    return r;
  }

  // ------------------------------------------------------------------ nodes

  struct node
  {
    op kind;
    cmp c = cmp::le;
    lin_term term;
    std::vector<formula> ch;
    std::uint64_t hash = 0;
    bool qf = true;
  };

  namespace
  {
    constexpr std::uint64_t fnv_offset = 1469598103934665603ULL;
    constexpr std::uint64_t fnv_prime = 1099511628211ULL;

    std::uint64_t
    mix(std::uint64_t h, std::uint64_t v)
    {
      // splitmix64 step folded into the running hash
      v += 0x9e3779b97f4a7c15ULL + h;
      v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
      v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
      return v ^ (v >> 31);
    }

    std::uint64_t
    hash_str(const std::string& s)
    {
      std::uint64_t h = fnv_offset;
      for (unsigned char ch: s)
        h = (h ^ ch) * fnv_prime;
      return h;
    }

    std::uint64_t
    compute_hash(const node& n)
    {
      std::uint64_t h = mix(0, static_cast<std::uint64_t>(n.kind));
      if (n.kind == op::atom)
        {
          h = mix(h, static_cast<std::uint64_t>(n.c));
          for (auto& [v, k]: n.term.coeffs())
            h = mix(mix(h, hash_str(v)), static_cast<std::uint64_t>(k));
          h = mix(h, static_cast<std::uint64_t>(n.term.constant()));
        }
      for (auto& c: n.ch)
        h = mix(h, c.hash());
      return h;
    }

    struct node_hash
    {
      std::size_t operator()(const node* n) const { return n->hash; }
    };

    struct node_eq
    {
      bool operator()(const node* a, const node* b) const
      {
        return a->kind == b->kind && a->c == b->c && a->term == b->term
          && a->ch == b->ch;
      }
    };

    struct intern_table
    {
      std::mutex mtx;
      std::unordered_set<const node*, node_hash, node_eq> set;
    };

    intern_table&
    table()
    {
      static intern_table* t = new intern_table;
      return *t;
    }

    formula
    intern(node&& n)
    {
      n.hash = compute_hash(n);
      n.qf = n.kind == op::ff || n.kind == op::tt || n.kind == op::atom
        || n.kind == op::not_ || n.kind == op::and_ || n.kind == op::or_;
      for (auto& c: n.ch)
        n.qf = n.qf && c.is_qf();
      auto& t = table();
      std::lock_guard<std::mutex> lock(t.mtx);
      auto it = t.set.find(&n);
      if (it != t.set.end())
        return formula(*it);
      const node* p = new node(std::move(n));
      t.set.insert(p);
      return formula(p);
    }

    std::int64_t
    floor_div(std::int64_t a, std::int64_t b)
    {
      std::int64_t q = a / b;
      if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
      return q;
    }

    std::int64_t
    term_gcd(const lin_term& t)
    {
      std::int64_t g = 0;
      for (auto& [v, c]: t.coeffs())
        g = std::gcd(g, c < 0 ? -c : c);
      return g;
    }

    lin_term
    scale_down(const lin_term& t, std::int64_t g, std::int64_t new_const)
    {
      lin_term r(new_const);
      for (auto& [v, c]: t.coeffs())
        r += lin_term::var(v, c / g);
      return r;
    }
  }

  op formula::kind() const { return n_->kind; }
  std::size_t formula::size() const { return n_->ch.size(); }
  const formula& formula::operator[](std::size_t i) const { return n_->ch[i]; }
  const std::vector<formula>& formula::children() const { return n_->ch; }
  cmp formula::atom_cmp() const { return n_->c; }
  const lin_term& formula::atom_term() const { return n_->term; }
  bool formula::is_qf() const { return n_->qf; }
  std::uint64_t formula::hash() const { return n_->hash; }

  bool
  formula::is_literal() const
  {
    return is_atom() || (is(op::not_) && (*this)[0].is_atom());
  }

  int
  formula::compare(const formula& o) const
  {
    if (n_ == o.n_)
      return 0;
    if (n_->hash != o.n_->hash)
      return n_->hash < o.n_->hash ? -1 : 1;
    if (n_->kind != o.n_->kind)
      return n_->kind < o.n_->kind ? -1 : 1;
    if (n_->c != o.n_->c)
      return n_->c < o.n_->c ? -1 : 1;
    if (int r = n_->term.compare(o.n_->term))
      return r;
    std::size_t n = std::min(size(), o.size());
    for (std::size_t i = 0; i < n; ++i)
      if (int r = (*this)[i].compare(o[i]))
        return r;
    if (size() != o.size())
      return size() < o.size() ? -1 : 1;
    return 0;
  }

  void
  sort_unique(formula_vec& v)
  {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }

  // ------------------------------------------------------------ constructors

  formula
  raw(op o, std::vector<formula> children)
  {
    node n;
    n.kind = o;
    n.ch = std::move(children);
    return intern(std::move(n));
  }

  formula
  raw_atom(cmp c, lin_term t)
  {
    node n;
    n.kind = op::atom;
    n.c = c;
    n.term = std::move(t);
    return intern(std::move(n));
  }

  formula f_true() { return raw(op::tt, {}); }
  formula f_false() { return raw(op::ff, {}); }
  formula f_bool(bool b) { return b ? f_true() : f_false(); }

  formula
  f_atom(cmp c, const lin_term& t)
  {
    switch (c)
      {
      case cmp::lt:
        return f_atom(cmp::le, t + lin_term(1));
      case cmp::ge:
        return f_atom(cmp::le, -t);
      case cmp::gt:
        return f_atom(cmp::le, -t + lin_term(1));
      case cmp::ne:
        return f_not(f_atom(cmp::eq, t));
      case cmp::le:
        {
          if (t.is_constant())
            return f_bool(t.constant() <= 0);
          std::int64_t g = term_gcd(t);
          // sum a*v + k <= 0  <=>  sum (a/g)*v + ceil(k/g) <= 0
          lin_term r = scale_down(t, g, -floor_div(-t.constant(), g));
          if (r.coeffs().front().second < 0)
            return raw(op::not_, {raw_atom(cmp::le, -r + lin_term(1))});
          return raw_atom(cmp::le, r);
        }
      case cmp::eq:
        {
          if (t.is_constant())
            return f_bool(t.constant() == 0);
          std::int64_t g = term_gcd(t);
          if (t.constant() % g != 0)
            return f_false();
          lin_term r = scale_down(t, g, t.constant() / g);
          if (r.coeffs().front().second < 0)
            r = -r;
          return raw_atom(cmp::eq, r);
        }
      }
    return f_false();
  }

  formula
  f_cmp(const lin_term& lhs, cmp c, const lin_term& rhs)
  {
    return f_atom(c, lhs - rhs);
  }

  formula
  f_not(const formula& f)
  {
    switch (f.kind())
      {
      case op::tt:
        return f_false();
      case op::ff:
        return f_true();
      case op::not_:
        return f[0];
      case op::atom:
        if (f.atom_cmp() != cmp::le && f.atom_cmp() != cmp::eq)
          return f_not(canonicalize(f));
        return raw(op::not_, {f});
      case op::and_:
        {
          std::vector<formula> v;
          for (auto& c: f.children())
            v.push_back(f_not(c));
          return f_or(std::move(v));
        }
      case op::or_:
        {
          std::vector<formula> v;
          for (auto& c: f.children())
            v.push_back(f_not(c));
          return f_and(std::move(v));
        }
      case op::next:
        return f_next(f_not(f[0]));
      default:
        return raw(op::not_, {f});
      }
  }

  namespace
  {
    formula
    nary(op o, std::vector<formula> fs)
    {
      op absorbing = o == op::and_ ? op::ff : op::tt;
      op neutral = o == op::and_ ? op::tt : op::ff;
      std::vector<formula> flat;
      for (auto& f: fs)
        {
          if (f.is(absorbing))
            return raw(absorbing, {});
          if (f.is(neutral))
            continue;
          if (f.is(o))
            flat.insert(flat.end(), f.children().begin(), f.children().end());
          else
            flat.push_back(f);
        }
      sort_unique(flat);
      for (auto& f: flat)
        if (f.is(op::not_) && std::binary_search(flat.begin(), flat.end(), f[0]))
          return raw(absorbing, {});
      if (flat.empty())
        return raw(neutral, {});
      if (flat.size() == 1)
        return flat.front();
      return raw(o, std::move(flat));
    }
  }

  formula f_and(std::vector<formula> fs) { return nary(op::and_, std::move(fs)); }
  formula f_or(std::vector<formula> fs) { return nary(op::or_, std::move(fs)); }
  formula f_and(const formula& a, const formula& b) { return f_and(std::vector<formula>{a, b}); }
  formula f_or(const formula& a, const formula& b) { return f_or(std::vector<formula>{a, b}); }
  formula f_implies(const formula& a, const formula& b) { return f_or(f_not(a), b); }

  formula
  f_iff(const formula& a, const formula& b)
  {
    return f_and(f_implies(a, b), f_implies(b, a));
  }

  formula
  f_next(const formula& f)
  {
    if (f.is_constant())
      return f;
    return raw(op::next, {f});
  }

  formula
  f_globally(const formula& f)
  {
    if (f.is_constant() || f.is(op::globally))
      return f;
    return raw(op::globally, {f});
  }

  formula
  f_eventually(const formula& f)
  {
    if (f.is_constant() || f.is(op::eventually))
      return f;
    return raw(op::eventually, {f});
  }

  formula
  f_until(const formula& a, const formula& b)
  {
    if (b.is_constant() || a.is_false() || a == b)
      return b;
    if (a.is_true())
      return f_eventually(b);
    return raw(op::until, {a, b});
  }

  formula
  f_weak_until(const formula& a, const formula& b)
  {
    if (b.is_true() || a.is_true())
      return f_true();
    if (b.is_false())
      return f_globally(a);
    if (a.is_false() || a == b)
      return b;
    return raw(op::weak_until, {a, b});
  }

  formula
  map_children(const formula& f, const std::function<formula(const formula&)>& g)
  {
    if (f.size() == 0)
      return g(f);
    std::vector<formula> ch;
    ch.reserve(f.size());
    bool same = true;
    for (auto& c: f.children())
      {
        ch.push_back(map_children(c, g));
        same = same && ch.back() == c;
      }
    formula rebuilt = same ? f : raw(f.kind(), std::move(ch));
    return g(rebuilt);
  }

  namespace
  {
    formula
    smart(const formula& f)
    {
      switch (f.kind())
        {
        case op::tt:
        case op::ff:
          return f;
        case op::atom:
          return f_atom(f.atom_cmp(), f.atom_term());
        case op::not_:
          return f_not(f[0]);
        case op::and_:
          return f_and(f.children());
        case op::or_:
          return f_or(f.children());
        case op::next:
          return f_next(f[0]);
        case op::until:
          return f_until(f[0], f[1]);
        case op::weak_until:
          return f_weak_until(f[0], f[1]);
        case op::eventually:
          return f_eventually(f[0]);
        case op::globally:
          return f_globally(f[0]);
        }
      return f;
    }
  }

  formula
  canonicalize(const formula& f)
  {
    return map_children(f, smart);
  }

  // --------------------------------------------------------------- queries

  namespace
  {
    template<class F>
    void
    visit(const formula& f, F&& fn, std::unordered_set<std::uintptr_t>& seen)
    {
      if (!seen.insert(f.id()).second)
        return;
      fn(f);
      for (auto& c: f.children())
        visit(c, fn, seen);
    }
  }

  std::set<std::string>
  free_vars(const formula& f)
  {
    std::set<std::string> r;
    std::unordered_set<std::uintptr_t> seen;
    visit(f, [&](const formula& g)
    {
      if (g.is_atom())
        for (auto& [v, c]: g.atom_term().coeffs())
          r.insert(v);
    }, seen);
    return r;
  }

  std::vector<formula>
  atoms(const formula& f)
  {
    std::vector<formula> r;
    std::unordered_set<std::uintptr_t> seen;
    visit(f, [&](const formula& g) { if (g.is_atom()) r.push_back(g); }, seen);
    sort_unique(r);
    return r;
  }

  bool
  mentions_primed(const formula& f)
  {
    for (auto& v: free_vars(f))
      if (is_primed(v))
        return true;
    return false;
  }

  formula
  substitute(const formula& f, const std::map<std::string, lin_term>& m)
  {
    return map_children(f, [&](const formula& g)
    {
      if (g.is_atom())
        return f_atom(g.atom_cmp(), g.atom_term().substitute(m));
      return smart(g);
    });
  }

  formula
  prime(const formula& f, const std::set<std::string>& vars)
  {
    std::map<std::string, lin_term> m;
    for (auto& v: vars)
      m[v] = lin_term::var(primed(v));
    return substitute(f, m);
  }

  formula
  unprime(const formula& f)
  {
    std::map<std::string, lin_term> m;
    for (auto& v: free_vars(f))
      if (is_primed(v))
        m[v] = lin_term::var(unprimed(v));
    return substitute(f, m);
  }

  bool
  eval_atom(cmp c, const lin_term& t, const valuation& v)
  {
    std::int64_t x = t.eval([&](const std::string& name)
    {
      auto it = v.find(name);
      if (it == v.end())
        throw eval_error("no value for variable " + name);
      return it->second;
    });
    switch (c)
      {
      case cmp::le: return x <= 0;
      case cmp::lt: return x < 0;
      case cmp::eq: return x == 0;
      case cmp::ne: return x != 0;
      case cmp::ge: return x >= 0;
      case cmp::gt: return x > 0;
      }
    return false;
  }

  bool
  evaluate(const formula& f, const valuation& v)
  {
    switch (f.kind())
      {
      case op::tt:
        return true;
      case op::ff:
        return false;
      case op::atom:
        return eval_atom(f.atom_cmp(), f.atom_term(), v);
      case op::not_:
        return !evaluate(f[0], v);
      case op::and_:
        for (auto& c: f.children())
          if (!evaluate(c, v))
            return false;
        return true;
      case op::or_:
        for (auto& c: f.children())
          if (evaluate(c, v))
            return true;
        return false;
      default:
        throw eval_error("evaluate: temporal operator in QF context");
      }
  }
}

namespace rpmon
{
  formula
  simplify_univariate(const formula& f)
  {
    if (!f.is_qf() || f.is_constant())
      return f;
    auto vars = free_vars(f);
    if (vars.size() != 1)
      return f;
    const std::string x = *vars.begin();
    std::set<std::int64_t> pts;
    for (auto& a: atoms(f))
      {
        // canonical single-variable atoms are x + k (<=|=) 0
        std::int64_t c = -a.atom_term().constant();
        if (a.atom_term().coeff(x) != 1)
          return f;
        pts.insert({c - 1, c, c + 1});
      }
    auto holds = [&](std::int64_t v) { return evaluate(f, valuation{{x, v}}); };
    // runs of constant truth: (-inf, p0), p0, (p0, p1), p1, ..., (pm, +inf)
    struct run { std::optional<std::int64_t> lo, hi; bool val; };
    std::vector<run> runs;
    std::vector<std::int64_t> p(pts.begin(), pts.end());
    runs.push_back({std::nullopt, p.front() - 1, holds(p.front() - 1)});
    for (std::size_t j = 0; j < p.size(); ++j)
      {
        runs.push_back({p[j], p[j], holds(p[j])});
        if (j + 1 < p.size() && p[j] + 1 < p[j + 1])
          runs.push_back({p[j] + 1, p[j + 1] - 1, holds(p[j] + 1)});
      }
    runs.push_back({p.back() + 1, std::nullopt, holds(p.back() + 1)});
    std::vector<formula> parts;
    for (std::size_t j = 0; j < runs.size();)
      {
        if (!runs[j].val)
          {
            ++j;
            continue;
          }
        std::optional<std::int64_t> lo = runs[j].lo, hi = runs[j].hi;
        while (j + 1 < runs.size() && runs[j + 1].val)
          hi = runs[++j].hi;
        ++j;
        lin_term tx = lin_term::var(x);
        if (lo && hi && *lo == *hi)
          parts.push_back(f_cmp(tx, cmp::eq, lin_term(*lo)));
        else
          parts.push_back(f_and(lo ? f_cmp(tx, cmp::ge, lin_term(*lo)) : f_true(),
                                hi ? f_cmp(tx, cmp::le, lin_term(*hi)) : f_true()));
      }
    return f_or(parts);
  }
}
