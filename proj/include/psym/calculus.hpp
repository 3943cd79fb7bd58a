#pragma once

#include <map>
#include <set>
#include <string>

#include "psym/ratfunc.hpp"

namespace psym {

RationalFunction differentiate(const RationalFunction& e, SymbolId s);

using Bindings = std::map<SymbolId, RationalFunction>;

// Simultaneous substitution. A binding may mention its own symbol
// (p -> p*s is fine); chains between distinct bound symbols that close a
// cycle (x -> y, y -> x) are rejected with AlgebraError.
RationalFunction substitute(const RationalFunction& e, const Bindings& bindings);
RationalFunction substitute(const SparsePoly& p, const Bindings& bindings);

// Groups terms of `e` by their power product over `along`. The values hold
// no symbol from `along`; zero groups are omitted.
std::map<Monomial, SparsePoly> collect(const SparsePoly& e, const std::set<SymbolId>& along);

inline bool is_zero(const RationalFunction& e) { return e.is_zero(); }

// Infix rendering in the model DSL grammar (parse/print round-trips).
std::string to_string(const SparsePoly& p, const SymbolTable& table);
std::string to_string(const RationalFunction& e, const SymbolTable& table);
std::string to_string(const Monomial& m, const SymbolTable& table);
std::string to_string(const Rational& q);

}  // namespace psym
