// Letters, the one-step expansion of formulas, propagation of next-state
// predicates, and the raw successor of a monitor state.

#pragma once

#include "rpmon/monitor_state.hh"
#include "rpmon/smt.hh"

namespace rpmon
{
  /// The predicate set P: every canonical atom gets a letter position;
  /// PropPreds and GenPreds are QF(X) formulas used as propagation targets
  /// and invariant templates.
  class predicate_table
  {
  public:
    predicate_table() = default;
    predicate_table(std::set<std::string> program_vars, std::set<std::string> input_vars);
    static predicate_table from_spec(const spec& s);

    /// Letter position of a canonical atom (registered on first use).
    std::size_t intern(const formula& atom);
    std::optional<std::size_t> find(const formula& atom) const;
    const formula& atom(std::size_t id) const { return atoms_[id]; }
    std::size_t size() const { return atoms_.size(); }

    const formula_vec& prop_preds() const { return prop_preds_; }
    const formula_vec& gen_preds() const { return gen_preds_; }
    void add_prop_pred(const formula& p);
    void add_gen_pred(const formula& p);

    const std::set<std::string>& program_vars() const { return x_; }
    const std::set<std::string>& input_vars() const { return i_; }
    std::vector<std::string> primed_vars() const;
    std::vector<std::string> input_list() const { return {i_.begin(), i_.end()}; }
    /// True when f only mentions unprimed program variables.
    bool over_state_vars(const formula& f) const;

  private:
    std::vector<formula> atoms_;
    std::map<formula, std::size_t> index_;
    formula_vec prop_preds_;
    formula_vec gen_preds_;
    std::set<std::string> x_, i_;
  };

  /// Partial truth assignment to letter positions.
  struct letter
  {
    std::vector<std::pair<std::size_t, bool>> lits;  // sorted by position

    std::optional<bool> value(std::size_t id) const;
    void set(std::size_t id, bool v);
    /// Conjunction of the determined literals.
    formula conjunction(const predicate_table& t) const;
    bool operator==(const letter& o) const = default;
    bool operator<(const letter& o) const { return lits < o.lits; }
  };

  /// Atoms that expand() consults (outside every X).
  std::vector<formula> depth0_atoms(const formula& f);

  /// One-step expansion; throws std::logic_error on an undetermined atom.
  formula expand(const formula& f, const letter& a, const predicate_table& t);

  /// Letters over the atoms needed to expand q and to drive propagation,
  /// pruned to those consistent with context.  Every full assignment over
  /// the branching atoms that is consistent appears exactly once.
  std::vector<letter> relevant_letters(const monitor_state& q, predicate_table& t,
                                       const formula& context, solver& s);

  /// beta in PropPreds with  /\a  |=  beta[X -> X'].
  formula_vec propagate(const letter& a, const predicate_table& t, solver& s);

  monitor_state next_state_raw(const monitor_state& q, const letter& a,
                               const predicate_table& t, solver& s);
}
