// Bounded lasso oracles: random and SMT-guided lasso generation, the
// monitor-state correctness and verdict checks, per-rule soundness audit
// and pseudo-language comparison of games and products.

#pragma once

#include "rpmon/game.hh"
#include "rpmon/rpltl.hh"

#include <random>

namespace rpmon
{
  struct oracle_config
  {
    /// Random values are drawn from {-radius..radius} and the targeted
    /// constants.
    int radius = 2;
    std::vector<std::int64_t> targeted;
    unsigned max_stem = 3;
    unsigned max_loop = 2;
    unsigned random_lassos = 200;
    /// Lassos per guided query (satisfying or violating a formula).
    unsigned guided_lassos = 12;
    std::uint64_t seed = 1;
  };

  /// Constants of the spec together with their neighbours.
  std::vector<std::int64_t> targeted_constants(const spec& sp);

  std::string to_string(const lasso& w);

  /// QF constraint over v@i (i < stem + loop) that holds exactly for the
  /// lassos of that shape satisfying f.
  formula lasso_constraint(const formula& f, unsigned stem, unsigned loop);

  class lasso_source
  {
  public:
    lasso_source(const spec& sp, oracle_config cfg, solver& s);

    lasso random();
    /// A lasso of the given shape satisfying f, randomized by pinning a
    /// few positions to random values first.
    std::optional<lasso> satisfying(const formula& f, unsigned stem, unsigned loop);
    /// Up to n lassos satisfying f over all shapes.
    std::vector<lasso> satisfying(const formula& f, unsigned n);
    /// Random lassos followed by lassos satisfying and violating phi.
    std::vector<lasso> mixed(const formula& phi);

    const oracle_config& config() const { return cfg_; }
    std::mt19937_64& rng() { return rng_; }

  private:
    std::int64_t value(const var_decl& d);
    lasso from_model(const valuation& m, unsigned stem, unsigned loop);

    std::vector<var_decl> vars_;
    oracle_config cfg_;
    solver& s_;
    std::mt19937_64 rng_;
    std::vector<std::int64_t> pool_;
  };

  struct oracle_failure
  {
    std::string check;
    std::string detail;
    lasso witness;
  };

  struct oracle_report
  {
    std::size_t checked = 0;
    std::vector<oracle_failure> failures;
    bool ok() const { return failures.empty(); }
    void merge(const oracle_report& o);
    std::string summary(const std::string& name) const;
  };

  /// Monitor states met along a lasso: q_k for k = 0 .. until the pair
  /// (lasso index, state) repeats; loop_start marks the periodic part.
  struct monitor_trace
  {
    std::vector<std::size_t> states;
    std::size_t loop_start = 0;
  };
  monitor_trace trace_monitor(const monitor& m, const lasso& w);

  /// pi.nu.rho |= Phi  iff  nu.rho |= Formula(q) at every position.
  oracle_report check_state_correctness(const monitor& m, const formula& phi,
                                        const std::vector<lasso>& ws);
  /// UNSAT excludes every extension; SAFETY with no later UNSAT implies
  /// membership.
  oracle_report check_verdicts(const monitor& m, const formula& phi,
                               const std::vector<lasso>& ws);

  /// Checks every rule application against the three local soundness
  /// conditions by a bounded SMT search for a counterexample lasso.
  class soundness_auditor
  {
  public:
    soundness_auditor(solver& s, unsigned max_stem = 2, unsigned max_loop = 2);
    void operator()(rule_id r, side d, const monitor_state& before, const monitor_state& after);
    const oracle_report& report() const { return report_; }
    std::size_t audited() const { return report_.checked; }

  private:
    std::optional<lasso> counterexample(const formula& f);

    solver& s_;
    unsigned max_stem_, max_loop_;
    oracle_report report_;
    std::set<std::string> seen_;
  };

  /// Membership of a lasso in the pseudo-language of a game (unique run,
  /// max-even parity over location colors).
  bool game_accepts(const symbolic_game& g, const lasso& w);
  /// Product acceptance: no UNSAT location and (parity or a SAFETY location).
  bool product_accepts(const symbolic_game& p, const lasso& w);

  oracle_report check_pseudo_language(const symbolic_game& g, const symbolic_game& p,
                                      const std::vector<lasso>& ws);
}
