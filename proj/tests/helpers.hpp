#pragma once

#include <random>
#include <string>
#include <vector>

#include "psym/calculus.hpp"
#include "psym/model.hpp"
#include "psym/symbol.hpp"

namespace testing {

struct Scope {
    psym::SymbolTable table;
    std::vector<psym::SymbolId> ids;

    explicit Scope(const std::vector<std::string>& names) {
        for (const auto& n : names) ids.push_back(table.add(n, psym::SymbolKind::Param));
    }
    psym::RationalFunction operator()(const std::string& text) const { return psym::parse_expression(text, table); }
    psym::SymbolId id(const std::string& n) const { return *table.find(n); }
};

inline psym::SparsePoly random_poly(std::mt19937& rng, const std::vector<psym::SymbolId>& vars, unsigned max_deg,
                                    int max_terms) {
    std::uniform_int_distribution<int> nterms(0, max_terms);
    std::uniform_int_distribution<int> coef(-9, 9);
    std::uniform_int_distribution<int> den(1, 4);
    std::uniform_int_distribution<std::size_t> pick(0, vars.size() - 1);
    std::uniform_int_distribution<unsigned> deg(0, max_deg);
    psym::SparsePoly p;
    const int n = nterms(rng);
    for (int k = 0; k < n; ++k) {
        psym::Rational c(coef(rng), den(rng));
        c.canonicalize();
        psym::SparsePoly term(c);
        const unsigned d = deg(rng);
        for (unsigned j = 0; j < d; ++j) term *= psym::SparsePoly::var(vars[pick(rng)]);
        p += term;
    }
    return p;
}

inline psym::SparsePoly random_nonzero_poly(std::mt19937& rng, const std::vector<psym::SymbolId>& vars,
                                            unsigned max_deg, int max_terms) {
    for (;;) {
        auto p = random_poly(rng, vars, max_deg, max_terms);
        if (!p.is_zero()) return p;
    }
}

}  // namespace testing
