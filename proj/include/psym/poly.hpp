#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "psym/monomial.hpp"

namespace psym {

using Rational = mpq_class;

// Multivariate polynomial with exact rational coefficients. Terms are kept
// in ascending graded-lex order; zero coefficients are never stored.
class SparsePoly {
public:
    using Terms = std::map<Monomial, Rational>;

    SparsePoly() = default;
    SparsePoly(const Rational& c);  // NOLINT: implicit constant promotion
    SparsePoly(long c) : SparsePoly(Rational(c)) {}  // NOLINT
    SparsePoly(int c) : SparsePoly(Rational(c)) {}   // NOLINT
    SparsePoly(const Monomial& m, const Rational& c = 1);
    static SparsePoly var(SymbolId s, unsigned exponent = 1) { return {Monomial::var(s, exponent)}; }
    static SparsePoly from_terms(Terms terms);

    const Terms& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    bool is_monomial() const { return terms_.size() == 1; }
    // Constant value; requires is_constant().
    Rational constant_value() const;

    // Leading term under graded lex.
    const Monomial& leading_monomial() const { return terms_.rbegin()->first; }
    const Rational& leading_coefficient() const { return terms_.rbegin()->second; }

    unsigned total_degree() const;
    unsigned degree_in(SymbolId s) const;
    std::set<SymbolId> symbols() const;
    bool contains(SymbolId s) const;
    Rational coefficient(const Monomial& m) const;

    SparsePoly& operator+=(const SparsePoly& o);
    SparsePoly& operator-=(const SparsePoly& o);
    SparsePoly& operator*=(const SparsePoly& o);
    SparsePoly& operator*=(const Rational& c);
    friend SparsePoly operator+(SparsePoly a, const SparsePoly& b) { return a += b; }
    friend SparsePoly operator-(SparsePoly a, const SparsePoly& b) { return a -= b; }
    friend SparsePoly operator*(const SparsePoly& a, const SparsePoly& b);
    friend SparsePoly operator*(SparsePoly a, const Rational& c) { return a *= c; }
    SparsePoly operator-() const;
    SparsePoly pow(unsigned e) const;

    SparsePoly mul_monomial(const Monomial& m, const Rational& c = 1) const;
    // Exact division by a monomial; requires divisibility of every term.
    SparsePoly div_monomial(const Monomial& m) const;

    // Partial derivative.
    SparsePoly derivative(SymbolId s) const;

    // Largest monomial dividing every term (1 for the zero polynomial).
    Monomial monomial_content() const;
    // Positive rational c such that *this / c has coprime integer coefficients.
    Rational integer_content() const;
    // Divides out integer content and makes the leading coefficient positive.
    SparsePoly primitive() const;

    // View as a polynomial in `s` with coefficients free of `s`.
    std::map<unsigned, SparsePoly> coefficients_in(SymbolId s) const;

    double evaluate(std::span<const double> values) const;
    Rational evaluate(std::span<const Rational> values) const;

    friend bool operator==(const SparsePoly& a, const SparsePoly& b) { return a.terms_ == b.terms_; }
    // Total order consistent with ==, used for deterministic sorting: compares
    // term lists from the leading term down.
    friend bool canonical_less(const SparsePoly& a, const SparsePoly& b);

private:
    void add_term(const Monomial& m, const Rational& c);
    Terms terms_;
};

// Exact quotient a / b, or nullopt when b does not divide a.
std::optional<SparsePoly> divide_exact(const SparsePoly& a, const SparsePoly& b);

// Greatest common divisor, integer-primitive with positive leading
// coefficient. gcd(0, 0) = 0.
SparsePoly gcd(const SparsePoly& a, const SparsePoly& b);
SparsePoly lcm(const SparsePoly& a, const SparsePoly& b);

// Largest positive rational g with a/g and b/g integers (gcd(0, b) = |b|).
Rational rational_gcd(const Rational& a, const Rational& b);

}  // namespace psym
