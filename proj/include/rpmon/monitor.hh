// Monitor construction: worklist exploration, the GF-discharge post-pass,
// verdict labeling and DOT/JSON export.

#pragma once

#include "rpmon/rules.hh"

namespace rpmon
{
  enum class verdict { unsat, safety, open };
  const char* verdict_name(verdict v);
  std::optional<verdict> verdict_from_name(std::string_view s);

  struct transition
  {
    std::size_t from;
    letter a;
    std::size_t to;
  };

  struct monitor
  {
    std::vector<var_decl> decls;
    std::vector<monitor_state> states;
    std::size_t init = 0;
    predicate_table preds;
    /// Sorted by source; the letters of one source partition all pair
    /// valuations.
    std::vector<transition> transitions;
    std::vector<verdict> verdicts;
    /// Number of GF obligations removed by the discharge pass.
    std::size_t gf_discharged = 0;

    std::vector<const transition*> outgoing(std::size_t q) const;
    /// Successor of q on the letter matching a pair valuation.
    std::size_t step(std::size_t q, const valuation& pair) const;
    /// delta* of a finite prefix of valuations.
    std::size_t run(const std::vector<valuation>& prefix) const;
    std::size_t count(verdict v) const;
  };

  /// Does the valuation satisfy every determined literal of a?
  bool letter_matches(const letter& a, const predicate_table& t, const valuation& pair);

  class state_overflow : public std::runtime_error
  {
    using std::runtime_error::runtime_error;
  };

  class monitor_error : public std::logic_error
  {
    using std::logic_error::logic_error;
  };

  struct monitor_config
  {
    engine_config engine;
    std::size_t max_states = 5000;
  };

  class monitor_builder
  {
  public:
    monitor_builder(const spec& sp, solver& s, monitor_config cfg = {});

    /// Exploration, GF discharge and verdict labeling.
    monitor build();
    monitor explore();
    void discharge_gf(monitor& m);
    void label_verdicts(monitor& m);

    /// apply_rules of the initial partition.
    monitor_state initial_state(std::vector<rule_app>* log = nullptr);
    monitor_state successor(const monitor_state& q, const letter& a,
                            std::vector<rule_app>* log = nullptr);

    rule_engine& engine() { return eng_; }
    predicate_table& predicates() { return preds_; }

  private:
    std::size_t insert(monitor& m, const monitor_state& q,
                       std::map<std::string, std::size_t>& index);

    spec sp_;
    solver& s_;
    monitor_config cfg_;
    predicate_table preds_;
    rule_engine eng_;
    std::map<std::string, monitor_state> succ_memo_;
  };

  /// Same formula after replacing atoms and maximal temporal subformulas by
  /// fresh propositions.
  bool propositionally_equivalent(const formula& a, const formula& b, solver& s);

  std::string to_dot(const monitor& m);
  std::string to_json(const monitor& m);
  /// Throws std::runtime_error on malformed input.
  monitor monitor_from_json(std::string_view text);
}
