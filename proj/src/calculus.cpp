#include "psym/calculus.hpp"

#include <functional>
#include <sstream>

#include "psym/errors.hpp"

namespace psym {

RationalFunction differentiate(const RationalFunction& e, SymbolId s) {
    if (!e.contains(s)) return RationalFunction();
    if (e.is_polynomial()) return RationalFunction(e.num().derivative(s));
    const SparsePoly& n = e.num();
    const SparsePoly& d = e.den();
    return RationalFunction(n.derivative(s) * d - n * d.derivative(s), d * d);
}

namespace {

void check_acyclic(const Bindings& bindings) {
    // edges: bound symbol -> other bound symbols appearing in its value
    std::map<SymbolId, std::set<SymbolId>> edges;
    for (const auto& [s, v] : bindings)
        for (SymbolId t : v.symbols())
            if (t != s && bindings.count(t)) edges[s].insert(t);
    std::map<SymbolId, int> state;  // 1 = on stack, 2 = done
    std::function<void(SymbolId)> visit = [&](SymbolId s) {
        state[s] = 1;
        for (SymbolId t : edges[s]) {
            if (state[t] == 1) throw AlgebraError("cyclic substitution bindings");
            if (state[t] == 0) visit(t);
        }
        state[s] = 2;
    };
    for (const auto& [s, v] : bindings)
        if (state[s] == 0) visit(s);
}

RationalFunction substitute_unchecked(const SparsePoly& p, const Bindings& bindings,
                                      std::map<std::pair<SymbolId, unsigned>, RationalFunction>& powers) {
    // Terms whose monomial touches no bound symbol are accumulated as a
    // polynomial; the rest go through rational arithmetic.
    SparsePoly plain;
    RationalFunction acc;
    for (const auto& [m, c] : p.terms()) {
        std::vector<Monomial::Factor> kept;
        RationalFunction factor(c);
        bool touched = false;
        for (const auto& [s, e] : m.factors()) {
            auto it = bindings.find(s);
            if (it == bindings.end()) {
                kept.emplace_back(s, e);
                continue;
            }
            touched = true;
            auto key = std::make_pair(s, e);
            auto pw = powers.find(key);
            if (pw == powers.end()) pw = powers.emplace(key, it->second.pow(int(e))).first;
            factor *= pw->second;
        }
        if (!touched) {
            plain += SparsePoly(m, c);
        } else {
            factor *= RationalFunction(SparsePoly(Monomial(std::move(kept))));
            acc += factor;
        }
    }
    return acc + RationalFunction(plain);
}

}  // namespace

RationalFunction substitute(const SparsePoly& p, const Bindings& bindings) {
    Bindings effective;
    for (const auto& [s, v] : bindings)
        if (!(v == RationalFunction::var(s))) effective.emplace(s, v);
    if (effective.empty()) return RationalFunction(p);
    check_acyclic(effective);
    std::map<std::pair<SymbolId, unsigned>, RationalFunction> powers;
    return substitute_unchecked(p, effective, powers);
}

RationalFunction substitute(const RationalFunction& e, const Bindings& bindings) {
    Bindings effective;
    for (const auto& [s, v] : bindings)
        if (!(v == RationalFunction::var(s))) effective.emplace(s, v);
    if (effective.empty()) return e;
    check_acyclic(effective);
    std::map<std::pair<SymbolId, unsigned>, RationalFunction> powers;
    RationalFunction n = substitute_unchecked(e.num(), effective, powers);
    if (e.is_polynomial()) return n;
    return n / substitute_unchecked(e.den(), effective, powers);
}

std::map<Monomial, SparsePoly> collect(const SparsePoly& e, const std::set<SymbolId>& along) {
    std::map<Monomial, SparsePoly> out;
    for (const auto& [m, c] : e.terms()) {
        auto [key, rest] = m.split(along);
        out[key] += SparsePoly(rest, c);
    }
    std::erase_if(out, [](const auto& kv) { return kv.second.is_zero(); });
    return out;
}

std::string to_string(const Rational& q) {
    return q.get_str();
}

std::string to_string(const Monomial& m, const SymbolTable& table) {
    if (m.is_one()) return "1";
    std::string out;
    for (const auto& [s, e] : m.factors()) {
        if (!out.empty()) out += '*';
        out += table.name(s);
        if (e > 1) out += '^' + std::to_string(e);
    }
    return out;
}

std::string to_string(const SparsePoly& p, const SymbolTable& table) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const auto& [m, c] = *it;
        Rational mag = abs(c);
        if (first) {
            if (c < 0) out += '-';
        } else {
            out += c < 0 ? " - " : " + ";
        }
        first = false;
        if (m.is_one()) {
            out += to_string(mag);
        } else {
            if (mag != 1) out += to_string(mag) + '*';
            out += to_string(m, table);
        }
    }
    return out;
}

namespace {

bool needs_parens_as_factor(const SparsePoly& p) {
    if (p.size() > 1) return true;
    if (p.is_zero()) return false;
    const auto& [m, c] = *p.terms().begin();
    return c < 0 || (c.get_den() != 1);
}

}  // namespace

std::string to_string(const RationalFunction& e, const SymbolTable& table) {
    if (e.is_polynomial()) return to_string(e.num(), table);
    std::string num = to_string(e.num(), table);
    if (e.num().size() > 1) num = '(' + num + ')';
    const SparsePoly& d = e.den();
    std::string den = to_string(d, table);
    const bool simple_den = d.is_monomial() && d.leading_coefficient() == 1 &&
                            d.leading_monomial().factors().size() == 1;
    if (!simple_den || needs_parens_as_factor(d)) den = '(' + den + ')';
    return num + '/' + den;
}

}  // namespace psym
