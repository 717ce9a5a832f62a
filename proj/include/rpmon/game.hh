// Parity automata in HOA format, symbolic game structures built from them,
// well-formedness checks and the game-monitor product.

#pragma once

#include "rpmon/monitor.hh"

namespace rpmon
{
  /// Propositional guard over atomic-proposition indices.
  struct bexpr
  {
    enum class kind { tt, ff, ap, not_, and_, or_ } k = kind::tt;
    int ap = -1;
    std::vector<bexpr> ch;

    bool eval(const std::vector<bool>& props) const;
    std::string str() const;
  };

  bexpr parse_bexpr(std::string_view text);

  struct dpa_edge
  {
    bexpr guard;
    unsigned to;
  };

  /// Deterministic parity automaton with state-based max-even colors.
  struct parity_dpa
  {
    unsigned initial = 0;
    std::vector<std::string> ap;
    std::vector<std::vector<dpa_edge>> edges;
    std::vector<unsigned> color;

    std::size_t size() const { return edges.size(); }
    /// Successor on a proposition assignment; throws if none matches.
    unsigned step(unsigned q, const std::vector<bool>& props) const;
  };

  class hoa_error : public std::runtime_error
  {
    using std::runtime_error::runtime_error;
  };

  /// HOA v1 with any parity acceptance; transition-based colors are moved
  /// onto states.  Throws hoa_error.
  parity_dpa parse_hoa(std::string_view text);

  /// max-even acceptance of the color sequence visited infinitely often.
  bool max_even_accepts(const std::vector<unsigned>& loop_colors);

  struct game_location
  {
    std::string name;
    formula dom;
    unsigned color = 0;
    /// Monitor verdict for product locations.
    std::optional<verdict> verd;
  };

  struct game_edge
  {
    std::size_t from, to;
    formula guard;
  };

  struct symbolic_game
  {
    std::vector<std::string> inputs;
    std::vector<std::string> vars;
    std::vector<game_location> locs;
    std::size_t init = 0;
    /// Sorted by source, then target.
    std::vector<game_edge> edges;

    std::vector<const game_edge*> outgoing(std::size_t l) const;
    std::size_t count(verdict v) const;
  };

  /// Guards are the DPA guards with atom_map[k] substituted for p<k>.
  symbolic_game game_from_dpa(const parity_dpa& dpa, const std::vector<formula>& atom_map,
                              const std::set<std::string>& inputs,
                              const std::set<std::string>& vars);

  struct wellformed_report
  {
    std::vector<std::string> violations;
    bool clean() const { return violations.empty(); }
  };

  wellformed_report check_wellformed(const symbolic_game& g, solver& s);

  /// Product locations (l, q); UNSAT monitor states become losing sinks.
  struct product_game : symbolic_game
  {
    /// Game and monitor components of every location.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
  };

  product_game product(const symbolic_game& g, const monitor& m, solver& s);

  std::string serialize(const symbolic_game& g);
  /// Throws std::runtime_error on malformed text.
  symbolic_game parse_game(std::string_view text);
}
