// Propositional abstraction: each distinct canonical atom becomes p<k>.

#pragma once

#include "rpmon/formula.hh"

namespace rpmon
{
  struct booleanized
  {
    /// Formula over propositions p0, p1, ... in LTL syntax
    /// (G F X U W ! & | true false).
    std::string text;
    /// props[k] is the atom abstracted by p<k>.
    std::vector<formula> props;
  };

  /// Propositions are numbered in order of first occurrence.
  booleanized booleanize(const formula& f);
}
