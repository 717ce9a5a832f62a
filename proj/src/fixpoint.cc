#include "rpmon/fixpoint.hh"

namespace rpmon
{
  fixpoint_engine::fixpoint_engine(solver& s, std::set<std::string> program_vars,
                                   std::set<std::string> input_vars, fixpoint_budget b)
    : s_(s), x_(std::move(program_vars)), i_(std::move(input_vars)), budget_(b)
  {
  }

  truth
  fixpoint_engine::check_inductive(const formula& theta, const formula& inv)
  {
    return s_.entails(f_and(theta, inv), prime(theta, x_));
  }

  fo_formula
  fixpoint_engine::simplify(const fo_formula& f)
  {
    if (!f.is_quantified())
      return f;
    if (auto e = s_.eliminate(f))
      return *e;
    return f;
  }

  fo_formula
  fixpoint_engine::pre_step(const fo_formula& b, const formula& inv, unsigned level)
  {
    // Level-specific names keep nested binders apart.
    std::string tag = "#" + std::to_string(level);
    std::map<std::string, std::string> to_next, inputs;
    std::vector<std::string> bound;
    for (auto& x: x_)
      {
        to_next[x] = x + tag;
        to_next[primed(x)] = x + tag;
        bound.push_back(x + tag);
      }
    for (auto& i: i_)
      {
        inputs[i] = i + tag;
        bound.push_back(i + tag);
      }
    std::map<std::string, std::string> inv_map = inputs;
    for (auto& x: x_)
      inv_map[primed(x)] = x + tag;
    formula inv_l = substitute(inv, renaming(inv_map));
    std::map<std::string, std::string> b_map;
    for (auto& x: x_)
      b_map[x] = x + tag;
    fo_formula b_next = substitute(b, renaming(b_map));
    return fo_or(b, fo_forall(bound, fo_implies(inv_l, b_next)));
  }

  truth
  fixpoint_engine::iterate(const formula& gamma, const fo_formula& start, const formula& inv)
  {
    fo_formula b = simplify(start);
    for (unsigned k = 0; k <= budget_.max_iterations; ++k)
      {
        if (s_.entails(gamma, b) == truth::yes)
          return truth::yes;
        fo_formula nb = simplify(pre_step(b, inv, k));
        truth conv = s_.entails(nb, b);
        if (conv == truth::yes)
          {
            // b is the fixpoint
            return s_.entails(gamma, b) == truth::no ? truth::no : truth::unknown;
          }
        if (conv == truth::unknown && nb.is_quantified())
          return truth::unknown;
        b = nb;
      }
    return truth::unknown;
  }

  fo_formula
  fixpoint_engine::image(const fo_formula& s, const formula& inv)
  {
    std::map<std::string, std::string> back;
    std::vector<std::string> bound;
    for (auto& x: x_)
      {
        back[x] = x + "^";
        bound.push_back(x + "^");
      }
    std::map<std::string, std::string> inv_map = back;
    for (auto& x: x_)
      inv_map[primed(x)] = x;
    for (auto& i: i_)
      {
        inv_map[i] = i + "^";
        bound.push_back(i + "^");
      }
    fo_formula body = fo_and(substitute(s, renaming(back)),
                             fo_formula(substitute(inv, renaming(inv_map))));
    return simplify(fo_exists(bound, body));
  }

  bool
  fixpoint_engine::ranked_region(const fo_formula& region, const formula& beta, const formula& inv)
  {
    // Candidate ranking terms: for each literal l of beta with l == (r <= 0)
    // and (r <= 0) |= beta.
    std::vector<lin_term> ranks;
    for (auto& a: atoms(beta))
      {
        if (a.atom_cmp() != cmp::le)
          continue;
        const lin_term& t = a.atom_term();
        for (const lin_term& r: {t, -t + lin_term(1)})
          if (s_.entails(f_atom(cmp::le, r), beta) == truth::yes)
            ranks.push_back(r);
      }
    if (ranks.empty())
      return false;
    std::map<std::string, lin_term> nx;
    for (auto& x: x_)
      nx[x] = lin_term::var(primed(x));
    fo_formula region_next = substitute(region, nx);
    if (s_.entails(fo_and(region, fo_formula(inv)), region_next) != truth::yes)
      return false;
    formula beta_next = prime(beta, x_);
    for (auto& r: ranks)
      {
        formula decrease = f_cmp(r.substitute(nx), cmp::lt, r);
        fo_formula lhs = fo_and({region, fo_formula(f_not(beta)), fo_formula(inv)});
        if (s_.entails(lhs, fo_formula(f_or(beta_next, decrease))) == truth::yes)
          return true;
      }
    return false;
  }

  truth
  fixpoint_engine::reach_entails(const formula& gamma, const formula& beta, const formula& inv)
  {
    std::string key = key_string(gamma) + "|" + key_string(beta) + "|" + key_string(inv);
    auto it = reach_memo_.find(key);
    if (it != reach_memo_.end())
      return it->second;
    truth r = iterate(gamma, beta, inv);
    if (r == truth::unknown && budget_.ranking)
      {
        std::vector<fo_formula> regions{fo_formula(f_true())};
        fo_formula img = image(f_true(), inv);
        if (!img.is_quantified() && !img.is_true())
          regions.push_back(img);
        for (auto& region: regions)
          if (ranked_region(region, beta, inv))
            {
              truth t = iterate(gamma, fo_or(fo_formula(beta), region), inv);
              if (t == truth::yes)
                {
                  r = t;
                  break;
                }
            }
      }
    reach_memo_[key] = r;
    return r;
  }

  std::optional<formula>
  fixpoint_engine::reachable_set(const formula& gamma, const formula& inv)
  {
    std::string key = key_string(gamma) + "|" + key_string(inv);
    auto it = reach_set_memo_.find(key);
    if (it != reach_set_memo_.end())
      return it->second;
    std::optional<formula> result;
    std::vector<std::string> bound(i_.begin(), i_.end());
    for (auto& x: x_)
      bound.push_back(primed(x));
    auto r0 = s_.eliminate(fo_exists(bound, fo_formula(f_and(gamma, inv))));
    if (r0)
      {
        formula r = *r0;
        for (unsigned k = 0; k <= budget_.max_iterations; ++k)
          {
            fo_formula img = image(r, inv);
            if (img.is_quantified())
              break;
            truth inside = s_.entails(img, r);
            if (inside == truth::yes)
              {
                result = simplify_univariate(r);
                break;
              }
            if (inside == truth::unknown)
              break;
            r = simplify_univariate(f_or(r, img.leaf()));
          }
      }
    reach_set_memo_[key] = result;
    return result;
  }
}
