// Hash-consed formulas: linear integer atoms, Boolean connectives and the
// temporal operators of RP-LTL share one node type.  A formula without
// temporal operators is a quantifier-free (QF) formula.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rpmon
{
  /// Variables are plain names; a trailing apostrophe marks the primed
  /// (next-position) copy of a program variable.
  bool is_primed(std::string_view v);
  std::string primed(std::string_view v);
  std::string unprimed(std::string_view v);

  /// Variable order used for canonical terms: primed variables first,
  /// then by base name.
  bool var_less(const std::string& a, const std::string& b);

  class lin_term
  {
  public:
    lin_term() = default;
    explicit lin_term(std::int64_t c) : constant_(c) {}
    static lin_term var(std::string name, std::int64_t coeff = 1);

    const std::vector<std::pair<std::string, std::int64_t>>& coeffs() const
    {
      return coeffs_;
    }
    std::int64_t constant() const { return constant_; }
    bool is_constant() const { return coeffs_.empty(); }
    std::int64_t coeff(const std::string& v) const;

    lin_term operator+(const lin_term& o) const;
    lin_term operator-(const lin_term& o) const;
    lin_term operator-() const;
    lin_term operator*(std::int64_t k) const;
    lin_term& operator+=(const lin_term& o) { return *this = *this + o; }

    bool operator==(const lin_term& o) const = default;
    int compare(const lin_term& o) const;

    /// Rename or replace variables.
    lin_term substitute(const std::map<std::string, lin_term>& m) const;
    std::int64_t eval(const std::function<std::int64_t(const std::string&)>& val) const;

  private:
    void add(const std::string& v, std::int64_t c);
    std::vector<std::pair<std::string, std::int64_t>> coeffs_;
    std::int64_t constant_ = 0;
  };

  enum class op : std::uint8_t
  {
    ff, tt, atom, not_, and_, or_,
    next, until, weak_until, eventually, globally
  };

  /// Comparison of an atom "t cmp 0".  Canonical atoms only use le and eq.
  enum class cmp : std::uint8_t { le, lt, eq, ne, ge, gt };

  struct node;

  class formula
  {
  public:
    formula() = default;

    op kind() const;
    bool is(op o) const { return kind() == o; }
    bool is_true() const { return is(op::tt); }
    bool is_false() const { return is(op::ff); }
    bool is_constant() const { return is_true() || is_false(); }
    std::size_t size() const;
    const formula& operator[](std::size_t i) const;
    const std::vector<formula>& children() const;
    cmp atom_cmp() const;
    const lin_term& atom_term() const;

    /// True when no temporal operator occurs.
    bool is_qf() const;
    /// True for canonical atoms (le/eq with canonical term).
    bool is_atom() const { return is(op::atom); }
    /// True for a canonical atom or its negation.
    bool is_literal() const;
    std::uint64_t hash() const;
    /// Identity of the interned node; equal ids iff structurally equal.
    std::uintptr_t id() const { return reinterpret_cast<std::uintptr_t>(n_); }
    bool valid() const { return n_ != nullptr; }

    bool operator==(const formula& o) const { return n_ == o.n_; }
    bool operator!=(const formula& o) const { return n_ != o.n_; }
    /// Structural total order, stable across runs.
    bool operator<(const formula& o) const { return compare(o) < 0; }
    int compare(const formula& o) const;

    explicit formula(const node* n) : n_(n) {}

  private:
    const node* n_ = nullptr;
  };

  struct formula_hash
  {
    std::size_t operator()(const formula& f) const { return f.hash(); }
  };

  // Raw constructors: intern the node without any simplification.
  formula raw(op o, std::vector<formula> children);
  formula raw_atom(cmp c, lin_term t);

  // Smart constructors: the results are canonical.
  formula f_true();
  formula f_false();
  formula f_bool(bool b);
  /// Canonical atom for "t c 0": orientation fixed by the leading
  /// coefficient, gcd reduced, strict/negated forms expressed through le,
  /// eq and negation.
  formula f_atom(cmp c, const lin_term& t);
  formula f_cmp(const lin_term& lhs, cmp c, const lin_term& rhs);
  formula f_not(const formula& f);
  formula f_and(std::vector<formula> fs);
  formula f_or(std::vector<formula> fs);
  formula f_and(const formula& a, const formula& b);
  formula f_or(const formula& a, const formula& b);
  formula f_implies(const formula& a, const formula& b);
  formula f_iff(const formula& a, const formula& b);
  formula f_next(const formula& f);
  formula f_until(const formula& a, const formula& b);
  formula f_weak_until(const formula& a, const formula& b);
  formula f_eventually(const formula& f);
  formula f_globally(const formula& f);

  /// Rebuild bottom-up through the smart constructors.
  formula canonicalize(const formula& f);

  /// Bottom-up rebuild with a per-node hook; the hook sees the node with
  /// already-mapped children and may return a replacement.
  formula map_children(const formula& f, const std::function<formula(const formula&)>& g);

  std::set<std::string> free_vars(const formula& f);
  /// All canonical atoms, in structural order.
  std::vector<formula> atoms(const formula& f);
  bool mentions_primed(const formula& f);

  /// Replace variables by terms; the result is canonical.
  formula substitute(const formula& f, const std::map<std::string, lin_term>& m);
  /// x -> x' for each program variable in vars.
  formula prime(const formula& f, const std::set<std::string>& vars);
  /// x' -> x.
  formula unprime(const formula& f);

  /// A valuation of variables (primed entries included where needed).
  using valuation = std::map<std::string, std::int64_t>;

  class eval_error : public std::runtime_error
  {
    using std::runtime_error::runtime_error;
  };

  /// Evaluate a QF formula; throws eval_error on a missing variable.
  bool evaluate(const formula& f, const valuation& v);
  bool eval_atom(cmp c, const lin_term& t, const valuation& v);

  /// A QF formula over a single variable rewritten as a union of
  /// intervals; other formulas are returned unchanged.
  formula simplify_univariate(const formula& f);

  /// Sorted, duplicate-free formula vector.
  using formula_vec = std::vector<formula>;
  void sort_unique(formula_vec& v);

  /// Human-readable rendering in the input syntax; parseable back.
  std::string to_string(const formula& f);
  std::string to_string(const lin_term& t);
  /// Compact form used for canonical keys.
  std::string key_string(const formula& f);
}
