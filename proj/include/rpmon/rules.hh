// State transformation rules and the rule-application pipeline.

#pragma once

#include "rpmon/expansion.hh"
#include "rpmon/fixpoint.hh"

#include <unordered_set>

namespace rpmon
{
  enum class rule_id
  {
    next_ext, unsat, unsat_f, subst_true, subst_false,
    simplify_impl, simplify_and, simplify_non_nested,
    propagate_assump, propagate_g, propagate_w,
    join_imp, chain_imp, chain_imp_g, chain_imp_f, chain_imp_x,
    gen_inv, gen_inv_p, gen_reach, rewrite
  };

  const char* rule_name(rule_id r);
  std::optional<rule_id> rule_from_name(std::string_view s);
  /// Rules that only shuffle information already present in the state.
  bool is_bookkeeping(rule_id r);

  struct rule_app
  {
    rule_id rule;
    side d;
  };

  struct engine_config
  {
    unsigned saturation_rounds = 3;
    /// Applications of a single rule within one saturation pass.
    unsigned max_instances = 16;
    /// Imp facts per side beyond which derivation rules stop firing.
    unsigned max_imp_facts = 48;
    fixpoint_budget fixpoint;
    bool gen_inv_p = false;
    /// Optional CHC solver used as a last resort for Gen-Inv strengthenings.
    std::string chc_command;
    /// Test hook: make Subst-true fire without checking its premise.
    bool inject_fault = false;
  };

  /// Called after every applied rule with the states before and after.
  using audit_hook = std::function<void(rule_id, side, const monitor_state&, const monitor_state&)>;

  // Substitution helpers.  Both keep the result canonical; a conjunction
  // or disjunction `from` also matches inside larger ones of the same kind.
  formula replace_all(const formula& f, const formula& from, const formula& to);
  /// Only occurrences outside every temporal operator.
  formula replace_non_nested(const formula& f, const formula& from, const formula& to);
  formula_vec replace_all(const formula_vec& v, const formula& from, const formula& to);
  formula_vec replace_non_nested(const formula_vec& v, const formula& from, const formula& to);

  class rule_engine
  {
  public:
    rule_engine(solver& s, predicate_table& preds, engine_config cfg = {});

    /// One instance of rule r on side d, or nothing when no instance
    /// applies.  The result is normalized.
    std::optional<monitor_state> try_rule(rule_id r, side d, const monitor_state& q);

    monitor_state apply_rules(monitor_state q, std::vector<rule_app>* log = nullptr);

    void set_audit(audit_hook h) { audit_ = std::move(h); }
    const engine_config& config() const { return cfg_; }
    fixpoint_engine& fixpoints() { return fix_; }
    solver& smt() { return s_; }
    predicate_table& predicates() { return preds_; }

  private:
    bool derive_blocked(side d, const monitor_state& q) const;
    std::optional<monitor_state> add_fact(const monitor_state& q, side d, imp_fact f);

    std::optional<monitor_state> next_ext(side d, const monitor_state& q);
    std::optional<monitor_state> unsat(side d, const monitor_state& q);
    std::optional<monitor_state> unsat_f(side d, const monitor_state& q);
    std::optional<monitor_state> subst(side d, const monitor_state& q, bool to_true);
    std::optional<monitor_state> simplify_impl(side d, const monitor_state& q, bool conj);
    std::optional<monitor_state> simplify_non_nested(side d, const monitor_state& q);
    std::optional<monitor_state> propagate_assump(side d, const monitor_state& q);
    std::optional<monitor_state> propagate_g(side d, const monitor_state& q);
    std::optional<monitor_state> propagate_w(side d, const monitor_state& q);
    std::optional<monitor_state> join_imp(side d, const monitor_state& q);
    std::optional<monitor_state> chain_imp(side d, const monitor_state& q);
    std::optional<monitor_state> chain_imp_g(side d, const monitor_state& q);
    std::optional<monitor_state> chain_imp_fx(side d, const monitor_state& q, imp_kind k);
    std::optional<monitor_state> gen_inv(side d, const monitor_state& q);
    std::optional<monitor_state> gen_inv_p(side d, const monitor_state& q);
    std::optional<monitor_state> gen_reach(side d, const monitor_state& q);

    std::optional<formula> find_strengthening(const formula& alpha, const formula& gamma,
                                              const formula& inv);
    std::optional<formula> chc_strengthening(const formula& alpha, const formula& gamma,
                                             const formula& inv);

    bool apply(rule_id r, side d, monitor_state& q, std::vector<rule_app>* log);
    bool close_propagation(monitor_state& q, std::vector<rule_app>* log);
    bool block(monitor_state& q, std::vector<rule_app>* log);

    solver& s_;
    predicate_table& preds_;
    engine_config cfg_;
    fixpoint_engine fix_;
    audit_hook audit_;
    std::map<std::string, std::optional<formula>> inv_memo_;
    std::unordered_set<std::string> gen_inv_p_seen_;
  };
}
