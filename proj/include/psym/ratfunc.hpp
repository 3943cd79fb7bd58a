#pragma once

#include <map>
#include <span>

#include "psym/poly.hpp"

namespace psym {

// Quotient of two polynomials, kept normalized:
//   - the denominator is never zero;
//   - shared monomial factors and the polynomial gcd are cancelled;
//   - the denominator has coprime integer coefficients and a positive
//     leading coefficient.
// Equality is decided by cross-multiplication.
class RationalFunction {
public:
    RationalFunction() : den_(1) {}
    RationalFunction(const SparsePoly& num);  // NOLINT: implicit promotion
    RationalFunction(const Rational& c) : RationalFunction(SparsePoly(c)) {}  // NOLINT
    RationalFunction(long c) : RationalFunction(SparsePoly(c)) {}  // NOLINT
    RationalFunction(int c) : RationalFunction(SparsePoly(c)) {}   // NOLINT
    // Throws AlgebraError when den is zero.
    RationalFunction(SparsePoly num, SparsePoly den);
    static RationalFunction var(SymbolId s) { return SparsePoly::var(s); }

    const SparsePoly& num() const { return num_; }
    const SparsePoly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.is_constant(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    std::set<SymbolId> symbols() const;
    bool contains(SymbolId s) const { return num_.contains(s) || den_.contains(s); }

    RationalFunction& operator+=(const RationalFunction& o);
    RationalFunction& operator-=(const RationalFunction& o);
    RationalFunction& operator*=(const RationalFunction& o);
    RationalFunction& operator/=(const RationalFunction& o);
    friend RationalFunction operator+(RationalFunction a, const RationalFunction& b) { return a += b; }
    friend RationalFunction operator-(RationalFunction a, const RationalFunction& b) { return a -= b; }
    friend RationalFunction operator*(RationalFunction a, const RationalFunction& b) { return a *= b; }
    friend RationalFunction operator/(RationalFunction a, const RationalFunction& b) { return a /= b; }
    RationalFunction operator-() const;
    // Integer power; negative exponents invert (throws on zero base).
    RationalFunction pow(int e) const;

    double evaluate(std::span<const double> values) const;
    Rational evaluate(std::span<const Rational> values) const;

    friend bool operator==(const RationalFunction& a, const RationalFunction& b);
    friend bool canonical_less(const RationalFunction& a, const RationalFunction& b);

private:
    void normalize();
    SparsePoly num_;
    SparsePoly den_;
};

}  // namespace psym
