// Invariant and reachability queries over a transition invariant
// inv in QF(X u I u X').

#pragma once

#include "rpmon/smt.hh"

#include <unordered_map>

namespace rpmon
{
  struct fixpoint_budget
  {
    unsigned max_iterations = 25;
    /// Try a linear ranking certificate when iteration does not settle.
    bool ranking = true;
  };

  class fixpoint_engine
  {
  public:
    fixpoint_engine(solver& s, std::set<std::string> program_vars,
                    std::set<std::string> input_vars, fixpoint_budget b = {});

    /// theta /\ inv |= theta[X -> X'].
    truth check_inductive(const formula& theta, const formula& inv);

    /// gamma |= mu B. beta \/ (forall I X'. inv -> B(X')).
    /// yes: proved; no: the iteration converged and gamma is not inside;
    /// unknown otherwise.
    truth reach_entails(const formula& gamma, const formula& beta, const formula& inv);

    /// Least fixpoint of the forward image starting from
    /// exists I X'. gamma /\ inv; nothing if elimination fails or the
    /// budget runs out.
    std::optional<formula> reachable_set(const formula& gamma, const formula& inv);

    /// exists X^ I. S(X^) /\ inv(X^, I, X), eliminated when possible.
    fo_formula image(const fo_formula& s, const formula& inv);

    const fixpoint_budget& budget() const { return budget_; }
    solver& smt() { return s_; }

  private:
    /// B(X) \/ forall I Y. inv(X, I, Y) -> B(Y).
    fo_formula pre_step(const fo_formula& b, const formula& inv, unsigned level);
    fo_formula simplify(const fo_formula& f);
    truth iterate(const formula& gamma, const fo_formula& start, const formula& inv);
    bool ranked_region(const fo_formula& region, const formula& beta, const formula& inv);

    solver& s_;
    std::set<std::string> x_, i_;
    fixpoint_budget budget_;
    std::unordered_map<std::string, truth> reach_memo_;
    std::unordered_map<std::string, std::optional<formula>> reach_set_memo_;
  };
}
