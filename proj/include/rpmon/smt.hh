// A persistent SMT-LIB2 solver process driven over pipes.  Every query is
// wrapped in push/pop; answers are cached on the canonical query text.

#pragma once

#include "rpmon/quant.hh"
#include "rpmon/sexpr.hh"

#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>

namespace rpmon
{
  enum class sat_result { sat, unsat, unknown };
  /// Three-valued answer for validity and entailment queries.
  enum class truth { yes, no, unknown };

  struct solver_config
  {
    /// Command line; split on whitespace.
    std::string command = "z3 -in -smt2";
    unsigned timeout_ms = 2000;
    unsigned quantified_multiplier = 2;
    std::string logic = "ALL";
    std::size_t cache_capacity = 200000;
  };

  /// The solver process died, could not be started, or sent garbage.
  class smt_process_error : public std::runtime_error
  {
    using std::runtime_error::runtime_error;
  };

  struct solver_stats
  {
    std::size_t queries = 0;
    std::size_t cache_hits = 0;
    std::size_t timeouts = 0;
    std::size_t restarts = 0;
  };

  /// SMT-LIB2 text of a formula; primed variables are quoted as |x'|.
  std::string smtlib(const fo_formula& f);
  std::string smtlib(const formula& f);
  /// SMT-LIB2 text with primes rendered as name_p (for game files).
  std::string smtlib_plain(const formula& f);
  /// Declared symbol for a variable in solver queries.
  std::string smt_symbol(const std::string& v);

  /// Convert a solver term back into a QF formula.  name_map translates
  /// solver symbols into variable names (identity when absent).  Returns
  /// nothing on constructs outside linear integer arithmetic.
  std::optional<formula>
  from_smtlib(const sexpr& e, const std::map<std::string, std::string>& name_map = {});

  class solver
  {
  public:
    explicit solver(solver_config cfg = {});
    ~solver();
    solver(const solver&) = delete;
    solver& operator=(const solver&) = delete;

    sat_result check_sat(const fo_formula& f);
    /// Validity of f (unknown when the solver gives up).
    truth valid(const fo_formula& f);
    /// a |= b.
    truth entails(const fo_formula& a, const fo_formula& b);
    /// Convenience: definite entailment; unknown counts as failure.
    bool proves(const fo_formula& a, const fo_formula& b)
    {
      return entails(a, b) == truth::yes;
    }
    bool is_unsat(const fo_formula& f) { return check_sat(f) == sat_result::unsat; }

    /// Quantifier elimination; nothing if the result leaves linear
    /// arithmetic (divisibility, leftover quantifiers) or the solver fails.
    std::optional<formula> eliminate(const fo_formula& f);

    /// A satisfying assignment of the free variables of a QF formula;
    /// nothing when unsat or unknown.
    std::optional<valuation> model(const formula& f);

    /// Canonical cache key of a query.
    static std::string cache_key(const fo_formula& f) { return smtlib(f); }

    /// Restart the solver process; cached answers are kept.  Long sessions
    /// slow the solver down, so independent builds start afresh.
    void fresh_session();

    const solver_stats& stats() const { return stats_; }
    const solver_config& config() const { return cfg_; }
    /// Raw command round trip (for tests); returns the response lines.
    std::vector<std::string> raw(const std::string& commands, unsigned timeout_ms);

  private:
    void start();
    void stop();
    void send(const std::string& s);
    std::vector<std::string> read_until_marker(unsigned timeout_ms, bool& timed_out);
    std::vector<std::string> round_trip(const std::string& cmds, unsigned timeout_ms, bool& timed_out);
    std::string declarations(const fo_formula& f) const;

    std::optional<std::string> cache_get(const std::string& k);
    void cache_put(const std::string& k, const std::string& v);

    solver_config cfg_;
    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string pending_;
    solver_stats stats_;
    std::mutex mtx_;
    unsigned current_timeout_ = 0;

    std::list<std::pair<std::string, std::string>> lru_;
    std::unordered_map<std::string, std::list<std::pair<std::string, std::string>>::iterator> index_;
  };
}
