#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "psym/symbol.hpp"

namespace psym {

// Power product of symbols. Factors are kept sorted by symbol id with no
// zero exponents.
class Monomial {
public:
    using Factor = std::pair<SymbolId, unsigned>;

    Monomial() = default;
    explicit Monomial(std::vector<Factor> factors);
    static Monomial var(SymbolId s, unsigned exponent = 1);

    const std::vector<Factor>& factors() const { return factors_; }
    unsigned degree() const { return degree_; }
    unsigned exponent(SymbolId s) const;
    bool is_one() const { return factors_.empty(); }
    bool contains(SymbolId s) const { return exponent(s) != 0; }

    Monomial operator*(const Monomial& other) const;
    // Exact quotient, or nullopt when `other` does not divide *this.
    std::optional<Monomial> divide(const Monomial& other) const;
    bool divides(const Monomial& other) const;
    Monomial gcd(const Monomial& other) const;
    Monomial lcm(const Monomial& other) const;
    // Splits into (part over `along`, remainder).
    std::pair<Monomial, Monomial> split(const std::set<SymbolId>& along) const;
    Monomial without(SymbolId s) const;

    friend bool operator==(const Monomial& a, const Monomial& b) {
        return a.factors_ == b.factors_;
    }

    // Graded lexicographic order by symbol id: total degree first, then the
    // exponent of the lowest-id symbol where the two differ.
    friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b);

    std::size_t hash() const;

private:
    std::vector<Factor> factors_;
    unsigned degree_ = 0;
};

struct MonomialHash {
    std::size_t operator()(const Monomial& m) const { return m.hash(); }
};

// All monomials in `symbols` of total degree <= max_degree, ascending.
std::vector<Monomial> monomials_up_to(const std::vector<SymbolId>& symbols, unsigned max_degree);

}  // namespace psym
