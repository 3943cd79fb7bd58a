#include "psym/monomial.hpp"

#include <algorithm>
#include <functional>

namespace psym {

Monomial::Monomial(std::vector<Factor> factors) {
    std::sort(factors.begin(), factors.end());
    for (const auto& [s, e] : factors) {
        if (e == 0) continue;
        if (!factors_.empty() && factors_.back().first == s)
            factors_.back().second += e;
        else
            factors_.emplace_back(s, e);
        degree_ += e;
    }
}

Monomial Monomial::var(SymbolId s, unsigned exponent) {
    return Monomial({{s, exponent}});
}

unsigned Monomial::exponent(SymbolId s) const {
    auto it = std::lower_bound(factors_.begin(), factors_.end(), Factor{s, 0});
    return (it != factors_.end() && it->first == s) ? it->second : 0;
}

Monomial Monomial::operator*(const Monomial& other) const {
    Monomial out;
    out.factors_.reserve(factors_.size() + other.factors_.size());
    auto a = factors_.begin(), b = other.factors_.begin();
    while (a != factors_.end() || b != other.factors_.end()) {
        if (b == other.factors_.end() || (a != factors_.end() && a->first < b->first)) {
            out.factors_.push_back(*a++);
        } else if (a == factors_.end() || b->first < a->first) {
            out.factors_.push_back(*b++);
        } else {
            out.factors_.emplace_back(a->first, a->second + b->second);
            ++a;
            ++b;
        }
    }
    out.degree_ = degree_ + other.degree_;
    return out;
}

std::optional<Monomial> Monomial::divide(const Monomial& other) const {
    Monomial out;
    auto a = factors_.begin();
    for (const auto& [s, e] : other.factors_) {
        while (a != factors_.end() && a->first < s) out.factors_.push_back(*a++);
        if (a == factors_.end() || a->first != s || a->second < e) return std::nullopt;
        if (a->second > e) out.factors_.emplace_back(s, a->second - e);
        ++a;
    }
    while (a != factors_.end()) out.factors_.push_back(*a++);
    out.degree_ = degree_ - other.degree_;
    return out;
}

bool Monomial::divides(const Monomial& other) const {
    return other.divide(*this).has_value();
}

Monomial Monomial::gcd(const Monomial& other) const {
    std::vector<Factor> f;
    for (const auto& [s, e] : factors_) {
        const unsigned o = other.exponent(s);
        if (o) f.emplace_back(s, std::min(e, o));
    }
    return Monomial(std::move(f));
}

Monomial Monomial::lcm(const Monomial& other) const {
    std::vector<Factor> f = factors_;
    for (const auto& [s, e] : other.factors_) {
        auto it = std::find_if(f.begin(), f.end(), [s = s](const Factor& x) { return x.first == s; });
        if (it == f.end())
            f.emplace_back(s, e);
        else
            it->second = std::max(it->second, e);
    }
    return Monomial(std::move(f));
}

std::pair<Monomial, Monomial> Monomial::split(const std::set<SymbolId>& along) const {
    std::vector<Factor> in, out;
    for (const auto& f : factors_) (along.count(f.first) ? in : out).push_back(f);
    return {Monomial(std::move(in)), Monomial(std::move(out))};
}

Monomial Monomial::without(SymbolId s) const {
    std::vector<Factor> f;
    for (const auto& x : factors_)
        if (x.first != s) f.push_back(x);
    return Monomial(std::move(f));
}

std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
    if (a.degree_ != b.degree_) return a.degree_ <=> b.degree_;
    auto x = a.factors_.begin(), y = b.factors_.begin();
    for (; x != a.factors_.end() && y != b.factors_.end(); ++x, ++y) {
        if (x->first != y->first)
            // the one carrying the lower-id symbol is larger
            return x->first < y->first ? std::strong_ordering::greater : std::strong_ordering::less;
        if (x->second != y->second) return x->second <=> y->second;
    }
    // equal degree and equal prefix means equal factor lists
    return std::strong_ordering::equal;
}

std::size_t Monomial::hash() const {
    std::size_t h = 0x9e3779b97f4a7c15ull;
    for (const auto& [s, e] : factors_) {
        h ^= std::hash<std::uint64_t>{}((std::uint64_t(s) << 32) | e) + 0x9e3779b9 + (h << 6) + (h >> 2);
    }
    return h;
}

std::vector<Monomial> monomials_up_to(const std::vector<SymbolId>& symbols, unsigned max_degree) {
    std::vector<Monomial> out{Monomial()};
    std::vector<Monomial> frontier{Monomial()};
    std::vector<SymbolId> sorted = symbols;
    std::sort(sorted.begin(), sorted.end());
    // frontier holds the monomials of the previous degree; extending only by
    // symbols >= the monomial's largest factor enumerates each monomial once
    for (unsigned d = 1; d <= max_degree; ++d) {
        std::vector<Monomial> next;
        for (const auto& m : frontier) {
            const SymbolId last = m.is_one() ? 0 : m.factors().back().first;
            for (SymbolId s : sorted) {
                if (!m.is_one() && s < last) continue;
                next.push_back(m * Monomial::var(s));
            }
        }
        out.insert(out.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace psym
