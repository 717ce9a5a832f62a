// Temporal layer: negation normal form, syntactic safety, closure and
// evaluation of RP-LTL formulas on lasso-shaped words.

#pragma once

#include "rpmon/formula.hh"

#include <unordered_map>

namespace rpmon
{
  /// Push negations down to literals, dualizing temporal operators.
  formula nnf(const formula& f);

  /// True when the negation normal form contains neither U nor F.
  bool is_syntactic_safety(const formula& f);

  /// Rewrite F, G, W, | into the core {!, &, X, U} with raw constructors.
  formula desugar(const formula& f);

  /// Subformula closure of a core formula; QF subformulas are atomic.
  std::set<formula> closure(const formula& f);

  /// Infinite word rho = stem . loop^omega over valuations of X u I.
  struct lasso
  {
    std::vector<valuation> stem;
    std::vector<valuation> loop;

    std::size_t length() const { return stem.size() + loop.size(); }
    std::size_t succ(std::size_t i) const
    {
      return i + 1 < length() ? i + 1 : stem.size();
    }
    const valuation& at(std::size_t i) const
    {
      return i < stem.size() ? stem[i] : loop[i - stem.size()];
    }
    /// Valuation at position k of the infinite word.
    const valuation& word(std::size_t k) const;
    /// The suffix rho+k, as a lasso.
    lasso shift(std::size_t k) const;
    /// Pair valuation <rho[i], rho[i+1]> with next values under primed names.
    valuation pair(std::size_t i) const;
  };

  /// Memoizing evaluator for one lasso.
  class lasso_evaluator
  {
  public:
    explicit lasso_evaluator(const lasso& w);
    bool holds(const formula& f, std::size_t pos = 0);
    const std::vector<char>& values(const formula& f);

  private:
    const lasso& w_;
    std::vector<valuation> pairs_;
    std::unordered_map<std::uintptr_t, std::vector<char>> memo_;
  };

  /// rho |= f.
  bool lasso_eval(const formula& f, const lasso& w);
}
