#include "psym/poly.hpp"

#include <algorithm>

#include "psym/errors.hpp"

namespace psym {

SparsePoly::SparsePoly(const Rational& c) {
    if (c != 0) terms_.emplace(Monomial(), c);
}

SparsePoly::SparsePoly(const Monomial& m, const Rational& c) {
    if (c != 0) terms_.emplace(m, c);
}

SparsePoly SparsePoly::from_terms(Terms terms) {
    SparsePoly p;
    for (auto& [m, c] : terms)
        if (c != 0) p.terms_.emplace(m, std::move(c));
    return p;
}

bool SparsePoly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

Rational SparsePoly::constant_value() const {
    if (terms_.empty()) return 0;
    return terms_.begin()->first.is_one() ? terms_.begin()->second : Rational(0);
}

unsigned SparsePoly::total_degree() const {
    return terms_.empty() ? 0 : terms_.rbegin()->first.degree();
}

unsigned SparsePoly::degree_in(SymbolId s) const {
    unsigned d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.exponent(s));
    return d;
}

std::set<SymbolId> SparsePoly::symbols() const {
    std::set<SymbolId> out;
    for (const auto& [m, c] : terms_)
        for (const auto& [s, e] : m.factors()) out.insert(s);
    return out;
}

bool SparsePoly::contains(SymbolId s) const {
    for (const auto& [m, c] : terms_)
        if (m.contains(s)) return true;
    return false;
}

Rational SparsePoly::coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
}

void SparsePoly::add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

SparsePoly& SparsePoly::operator+=(const SparsePoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

SparsePoly& SparsePoly::operator-=(const SparsePoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

SparsePoly operator*(const SparsePoly& a, const SparsePoly& b) {
    SparsePoly out;
    if (a.is_zero() || b.is_zero()) return out;
    for (const auto& [ma, ca] : a.terms_)
        for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
    return out;
}

SparsePoly& SparsePoly::operator*=(const SparsePoly& o) {
    *this = *this * o;
    return *this;
}

SparsePoly& SparsePoly::operator*=(const Rational& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, x] : terms_) x *= c;
    return *this;
}

SparsePoly SparsePoly::operator-() const {
    SparsePoly out = *this;
    for (auto& [m, c] : out.terms_) c = -c;
    return out;
}

SparsePoly SparsePoly::pow(unsigned e) const {
    SparsePoly result(1), base = *this;
    while (e) {
        if (e & 1u) result *= base;
        e >>= 1u;
        if (e) base *= base;
    }
    return result;
}

SparsePoly SparsePoly::mul_monomial(const Monomial& m, const Rational& c) const {
    SparsePoly out;
    if (c == 0) return out;
    for (const auto& [t, x] : terms_) out.terms_.emplace_hint(out.terms_.end(), t * m, x * c);
    return out;
}

SparsePoly SparsePoly::div_monomial(const Monomial& m) const {
    SparsePoly out;
    for (const auto& [t, x] : terms_) {
        auto q = t.divide(m);
        if (!q) throw AlgebraError("monomial does not divide polynomial");
        out.terms_.emplace_hint(out.terms_.end(), *q, x);
    }
    return out;
}

SparsePoly SparsePoly::derivative(SymbolId s) const {
    SparsePoly out;
    for (const auto& [m, c] : terms_) {
        const unsigned e = m.exponent(s);
        if (!e) continue;
        std::vector<Monomial::Factor> f;
        for (const auto& x : m.factors())
            f.emplace_back(x.first, x.first == s ? x.second - 1 : x.second);
        out.add_term(Monomial(std::move(f)), c * e);
    }
    return out;
}

Monomial SparsePoly::monomial_content() const {
    if (terms_.empty()) return Monomial();
    Monomial g = terms_.begin()->first;
    for (const auto& [m, c] : terms_) {
        if (g.is_one()) break;
        g = g.gcd(m);
    }
    return g;
}

Rational SparsePoly::integer_content() const {
    if (terms_.empty()) return 1;
    mpz_class num_gcd = 0, den_lcm = 1;
    for (const auto& [m, c] : terms_) {
        mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), c.get_num_mpz_t());
        mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), c.get_den_mpz_t());
    }
    Rational out(num_gcd, den_lcm);
    out.canonicalize();
    return out;
}

SparsePoly SparsePoly::primitive() const {
    if (terms_.empty()) return *this;
    Rational c = integer_content();
    if (leading_coefficient() < 0) c = -c;
    SparsePoly out = *this;
    for (auto& [m, x] : out.terms_) x /= c;
    return out;
}

std::map<unsigned, SparsePoly> SparsePoly::coefficients_in(SymbolId s) const {
    std::map<unsigned, SparsePoly> out;
    for (const auto& [m, c] : terms_) out[m.exponent(s)].add_term(m.without(s), c);
    return out;
}

double SparsePoly::evaluate(std::span<const double> values) const {
    double sum = 0.0;
    for (const auto& [m, c] : terms_) {
        double t = c.get_d();
        for (const auto& [s, e] : m.factors()) {
            const double v = values[s];
            for (unsigned k = 0; k < e; ++k) t *= v;
        }
        sum += t;
    }
    return sum;
}

Rational SparsePoly::evaluate(std::span<const Rational> values) const {
    Rational sum = 0;
    for (const auto& [m, c] : terms_) {
        Rational t = c;
        for (const auto& [s, e] : m.factors())
            for (unsigned k = 0; k < e; ++k) t *= values[s];
        sum += t;
    }
    return sum;
}

bool canonical_less(const SparsePoly& a, const SparsePoly& b) {
    auto x = a.terms_.rbegin(), y = b.terms_.rbegin();
    for (; x != a.terms_.rend() && y != b.terms_.rend(); ++x, ++y) {
        if (x->first != y->first) return x->first < y->first;
        if (x->second != y->second) return x->second < y->second;
    }
    return x == a.terms_.rend() && y != b.terms_.rend();
}

std::optional<SparsePoly> divide_exact(const SparsePoly& a, const SparsePoly& b) {
    if (b.is_zero()) throw AlgebraError("division by zero polynomial");
    if (a.is_zero()) return SparsePoly();
    if (b.is_constant()) return a * Rational(1 / b.constant_value());
    if (b.is_monomial()) {
        const Monomial& m = b.leading_monomial();
        SparsePoly q;
        for (const auto& [t, c] : a.terms()) {
            auto d = t.divide(m);
            if (!d) return std::nullopt;
            q += SparsePoly(*d, c);
        }
        return q * Rational(1 / b.leading_coefficient());
    }
    // degree bounds are necessary conditions for exact division
    for (SymbolId s : b.symbols())
        if (a.degree_in(s) < b.degree_in(s)) return std::nullopt;

    const Monomial& lm = b.leading_monomial();
    const Rational lc = b.leading_coefficient();
    SparsePoly rem = a, quot;
    while (!rem.is_zero()) {
        auto d = rem.leading_monomial().divide(lm);
        if (!d) return std::nullopt;
        const Rational c = rem.leading_coefficient() / lc;
        quot += SparsePoly(*d, c);
        rem -= b.mul_monomial(*d, c);
    }
    return quot;
}

namespace {

SparsePoly content_in(const SparsePoly& p, SymbolId v) {
    SparsePoly g;
    for (const auto& [e, c] : p.coefficients_in(v)) {
        g = gcd(g, c);
        if (g.is_constant()) break;
    }
    return g;
}

SparsePoly lead_in(const SparsePoly& p, SymbolId v, unsigned& degree) {
    auto coeffs = p.coefficients_in(v);
    degree = coeffs.rbegin()->first;
    return coeffs.rbegin()->second;
}

// Pseudo-remainder of a by b as polynomials in v.
SparsePoly prem(const SparsePoly& a, const SparsePoly& b, SymbolId v) {
    unsigned db = 0;
    const SparsePoly lb = lead_in(b, v, db);
    SparsePoly r = a;
    while (!r.is_zero() && r.degree_in(v) >= db) {
        unsigned dr = 0;
        const SparsePoly lr = lead_in(r, v, dr);
        r = lb * r - (lr * b).mul_monomial(Monomial::var(v, dr - db));
        r = r.primitive();
    }
    return r;
}

SparsePoly primitive_in(const SparsePoly& p, SymbolId v) {
    if (p.is_zero()) return p;
    const SparsePoly c = content_in(p, v);
    auto q = divide_exact(p, c);
    return q->primitive();
}

}  // namespace

SparsePoly gcd(const SparsePoly& a, const SparsePoly& b) {
    if (a.is_zero()) return b.primitive();
    if (b.is_zero()) return a.primitive();
    if (a.is_constant() || b.is_constant()) return SparsePoly(1);

    const Monomial ma = a.monomial_content(), mb = b.monomial_content();
    const Monomial mg = ma.gcd(mb);
    SparsePoly pa = a.div_monomial(ma).primitive();
    SparsePoly pb = b.div_monomial(mb).primitive();
    const SparsePoly mono(mg);
    if (pa.is_constant() || pb.is_constant()) return mono;
    if (pa == pb) return (pa * mono).primitive();

    if (pa.size() > pb.size() || (pa.size() == pb.size() && canonical_less(pa, pb))) std::swap(pa, pb);
    if (auto q = divide_exact(pb, pa)) return (pa * mono).primitive();

    std::set<SymbolId> sa = pa.symbols(), sb = pb.symbols();
    std::vector<SymbolId> common;
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(common));
    if (common.empty()) return mono;

    // Any symbol present in only one operand can be stripped via content.
    for (SymbolId s : sa)
        if (!sb.count(s)) return (gcd(content_in(pa, s), pb) * mono).primitive();
    for (SymbolId s : sb)
        if (!sa.count(s)) return (gcd(pa, content_in(pb, s)) * mono).primitive();

    // Same symbol set: primitive PRS in the symbol of lowest degree.
    SymbolId v = common.front();
    unsigned best = ~0u;
    for (SymbolId s : common) {
        const unsigned d = std::max(pa.degree_in(s), pb.degree_in(s));
        if (d < best) {
            best = d;
            v = s;
        }
    }
    const SparsePoly ca = content_in(pa, v), cb = content_in(pb, v);
    const SparsePoly cg = gcd(ca, cb);
    SparsePoly A = primitive_in(pa, v), B = primitive_in(pb, v);
    if (A.degree_in(v) < B.degree_in(v)) std::swap(A, B);
    while (!B.is_zero() && B.degree_in(v) > 0) {
        SparsePoly R = prem(A, B, v);
        A = std::move(B);
        B = primitive_in(R, v);
    }
    SparsePoly g = B.is_zero() ? primitive_in(A, v) : SparsePoly(1);
    return (g * cg * mono).primitive();
}

SparsePoly lcm(const SparsePoly& a, const SparsePoly& b) {
    if (a.is_zero() || b.is_zero()) return SparsePoly();
    const SparsePoly g = gcd(a, b);
    return (*divide_exact(a, g) * b).primitive();
}

}  // namespace psym

namespace psym {

Rational rational_gcd(const Rational& a, const Rational& b) {
    if (a == 0) return abs(b);
    if (b == 0) return abs(a);
    mpz_class n, d;
    mpz_gcd(n.get_mpz_t(), a.get_num_mpz_t(), b.get_num_mpz_t());
    mpz_lcm(d.get_mpz_t(), a.get_den_mpz_t(), b.get_den_mpz_t());
    Rational g(n, d);
    g.canonicalize();
    return g;
}

}  // namespace psym
