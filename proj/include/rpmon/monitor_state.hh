// Monitor states <F_A, E_A, F_G, E_G, Imp_A, Imp_G>.

#pragma once

#include "rpmon/spec.hh"

namespace rpmon
{
  /// Consequent shape of an implication fact G(guard -> K body).
  enum class imp_kind { now, next, eventually, always };

  struct imp_fact
  {
    formula guard;
    imp_kind kind = imp_kind::now;
    formula body;

    /// K body, e.g. X body.
    formula consequent() const;
    /// G(guard -> K body).
    formula as_formula() const;

    int compare(const imp_fact& o) const;
    bool operator<(const imp_fact& o) const { return compare(o) < 0; }
    bool operator==(const imp_fact& o) const { return compare(o) == 0; }
  };

  using imp_set = std::vector<imp_fact>;

  /// True when f implies g for every word (syntactic check only).
  bool imp_subsumes(const imp_fact& f, const imp_fact& g);

  /// Decompose psi into guard/kind/body pieces with psi == /\ (guard -> K body).
  std::vector<imp_fact> decompose_invariant(const formula& psi);

  enum class side { assume, guarantee };
  inline const char* side_name(side d) { return d == side::assume ? "A" : "G"; }

  /// Formulas that may live in an E set: QF formulas, G of a formula built
  /// from Boolean connectives and X over QF parts, and a W b with QF a, b.
  bool is_e_eligible(const formula& f);

  struct monitor_state
  {
    formula_vec fa, ea, fg, eg;
    imp_set imp_a, imp_g;

    formula_vec& f(side d) { return d == side::assume ? fa : fg; }
    formula_vec& e(side d) { return d == side::assume ? ea : eg; }
    imp_set& imp(side d) { return d == side::assume ? imp_a : imp_g; }
    const formula_vec& f(side d) const { return d == side::assume ? fa : fg; }
    const formula_vec& e(side d) const { return d == side::assume ? ea : eg; }
    const imp_set& imp(side d) const { return d == side::assume ? imp_a : imp_g; }

    /// Split conjunctions, drop true, collapse false, sort; move
    /// E-eligible members of F into E.
    void normalize();

    /// QF members of E_A (side A) or E_A u E_G (side G).
    formula curr(side d) const;
    /// Conjunction of alpha over G(true -> alpha) and G(true -> G alpha).
    formula imp_inv(side d) const;

    /// /\(F_A u E_A) -> /\(F_G u E_G).
    formula as_formula() const;
    /// Same with Imp_A and Imp_G conjoined on their sides.
    formula with_imps() const;
    formula side_formula(side d, bool imps = false) const;

    bool trivially_true() const { return as_formula().is_true(); }
    bool trivially_false() const { return as_formula().is_false(); }

    std::string key() const;
    bool operator==(const monitor_state& o) const;

    /// Multi-line rendering of the six components.
    std::string to_string() const;
  };

  /// Conjuncts of the assumptions/guarantees split into F and E sets.
  monitor_state partition_initial(const spec& s);

  /// The trivially true state and the canonical UNSAT sink.
  monitor_state top_state();
  monitor_state bottom_state();

  void normalize_imps(imp_set& s);
  std::string to_string(const imp_fact& f);
}
