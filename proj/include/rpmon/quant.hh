// First-order formulas over linear integer arithmetic: QF leaves combined
// with Boolean connectives and quantifier blocks.

#pragma once

#include "rpmon/formula.hh"

#include <memory>

namespace rpmon
{
  struct fo_node;

  class fo_formula
  {
  public:
    enum class kind { leaf, and_, or_, not_, forall, exists };

    fo_formula() = default;
    /// Lift a QF formula.
    fo_formula(const formula& f);

    kind type() const;
    const formula& leaf() const;
    const std::vector<fo_formula>& children() const;
    /// Bound variables of a quantifier node.
    const std::vector<std::string>& bound() const;

    bool is_leaf() const { return type() == kind::leaf; }
    bool is_true() const { return is_leaf() && leaf().is_true(); }
    bool is_false() const { return is_leaf() && leaf().is_false(); }
    bool is_quantified() const;

    explicit fo_formula(std::shared_ptr<const fo_node> n) : n_(std::move(n)) {}

  private:
    std::shared_ptr<const fo_node> n_;
  };

  fo_formula fo_and(std::vector<fo_formula> fs);
  fo_formula fo_or(std::vector<fo_formula> fs);
  fo_formula fo_and(const fo_formula& a, const fo_formula& b);
  fo_formula fo_or(const fo_formula& a, const fo_formula& b);
  fo_formula fo_not(const fo_formula& f);
  fo_formula fo_implies(const fo_formula& a, const fo_formula& b);
  fo_formula fo_forall(std::vector<std::string> vars, const fo_formula& body);
  fo_formula fo_exists(std::vector<std::string> vars, const fo_formula& body);

  std::set<std::string> free_vars(const fo_formula& f);

  /// Capture-avoiding substitution of free variables.
  fo_formula substitute(const fo_formula& f, const std::map<std::string, lin_term>& m);

  /// Pure variable renaming helper.
  std::map<std::string, lin_term> renaming(const std::map<std::string, std::string>& m);
}
