#include "psym/linalg.hpp"

#include <algorithm>

#include "psym/errors.hpp"

namespace psym {

EchelonForm bareiss_echelon(PolyMatrix m, std::size_t columns) {
    EchelonForm out;
    out.columns = columns;
    const std::size_t nrows = m.size();
    for (auto& row : m)
        if (row.size() != columns) throw AlgebraError("ragged matrix");

    std::size_t r = 0;
    SparsePoly prev(1);
    for (std::size_t c = 0; c < columns && r < nrows; ++c) {
        // sparsest nonzero entry in column c at or below row r
        std::size_t best = nrows;
        for (std::size_t i = r; i < nrows; ++i) {
            if (m[i][c].is_zero()) continue;
            if (best == nrows || m[i][c].size() < m[best][c].size()) best = i;
        }
        if (best == nrows) continue;
        std::swap(m[r], m[best]);
        const SparsePoly& piv = m[r][c];
        for (std::size_t i = r + 1; i < nrows; ++i) {
            const SparsePoly lead = m[i][c];
            for (std::size_t j = c + 1; j < columns; ++j) {
                SparsePoly v = piv * m[i][j];
                if (!lead.is_zero()) v -= lead * m[r][j];
                if (v.is_zero()) {
                    m[i][j] = SparsePoly();
                    continue;
                }
                auto q = divide_exact(v, prev);
                if (!q) throw AlgebraError("Bareiss step is not exact");
                m[i][j] = std::move(*q);
            }
            m[i][c] = SparsePoly();
        }
        prev = m[r][c];
        out.pivots.push_back(c);
        ++r;
    }
    m.resize(r);
    out.rows = std::move(m);
    return out;
}

std::size_t rank(const PolyMatrix& m, std::size_t columns) {
    return bareiss_echelon(m, columns).pivots.size();
}

PolyVector clear_denominators(const std::vector<RationalFunction>& v) {
    SparsePoly l(1);
    for (const auto& x : v)
        if (!x.is_zero()) l = lcm(l, x.den());
    PolyVector out;
    out.reserve(v.size());
    SparsePoly g;
    for (const auto& x : v) {
        SparsePoly p = x.is_zero() ? SparsePoly() : *divide_exact(l, x.den()) * x.num();
        g = gcd(g, p);
        out.push_back(std::move(p));
    }
    if (!g.is_zero() && !(g == SparsePoly(1)))
        for (auto& p : out)
            if (!p.is_zero()) p = *divide_exact(p, g);
    if (!g.is_zero()) {
        // integer-primitive overall
        Rational c = 0;
        for (const auto& p : out)
            if (!p.is_zero()) c = rational_gcd(c, p.integer_content());
        if (c != 0 && c != 1)
            for (auto& p : out) p *= Rational(1 / c);
    }
    return out;
}

std::vector<PolyVector> nullspace(const PolyMatrix& m, std::size_t columns) {
    const EchelonForm ef = bareiss_echelon(m, columns);
    std::vector<bool> is_pivot(columns, false);
    for (auto p : ef.pivots) is_pivot[p] = true;

    std::vector<PolyVector> basis;
    for (std::size_t f = 0; f < columns; ++f) {
        if (is_pivot[f]) continue;
        std::vector<RationalFunction> x(columns);
        x[f] = RationalFunction(1);
        for (std::size_t i = ef.pivots.size(); i-- > 0;) {
            const std::size_t p = ef.pivots[i];
            RationalFunction acc;
            for (std::size_t j = p + 1; j < columns; ++j)
                if (!ef.rows[i][j].is_zero() && !x[j].is_zero()) acc += RationalFunction(ef.rows[i][j]) * x[j];
            if (!acc.is_zero()) x[p] = -acc / RationalFunction(ef.rows[i][p]);
        }
        PolyVector v = clear_denominators(x);
        if (v[f].leading_coefficient() < 0)
            for (auto& e : v) e = -e;
        basis.push_back(std::move(v));
    }
    return basis;
}

std::vector<PolyVector> nullspace(const std::vector<std::vector<RationalFunction>>& m, std::size_t columns) {
    PolyMatrix pm;
    pm.reserve(m.size());
    for (const auto& row : m) pm.push_back(clear_denominators(row));
    return nullspace(pm, columns);
}

bool same_span(const std::vector<PolyVector>& a, const std::vector<PolyVector>& b, std::size_t dim) {
    PolyMatrix both = a;
    both.insert(both.end(), b.begin(), b.end());
    const std::size_t ra = rank(a, dim), rb = rank(b, dim);
    return ra == rb && rank(both, dim) == ra;
}

bool in_span(const PolyVector& v, const std::vector<PolyVector>& basis, std::size_t dim) {
    PolyMatrix both = basis;
    both.push_back(v);
    return rank(both, dim) == rank(basis, dim);
}

void SparseRationalSystem::add_row(Row row) {
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    Row merged;
    for (auto& [c, v] : row) {
        if (c >= columns_) throw AlgebraError("column out of range");
        if (!merged.empty() && merged.back().first == c)
            merged.back().second += v;
        else
            merged.emplace_back(c, std::move(v));
    }
    std::erase_if(merged, [](const auto& e) { return e.second == 0; });

    // reduce the leading entry until it lands on a fresh pivot column
    while (!merged.empty()) {
        auto it = basis_.find(merged.front().first);
        if (it == basis_.end()) break;
        const Rational factor = merged.front().second;
        Row next;
        next.reserve(merged.size() + it->second.size());
        auto a = merged.begin(), b = it->second.begin();
        while (a != merged.end() || b != it->second.end()) {
            if (b == it->second.end() || (a != merged.end() && a->first < b->first)) {
                next.push_back(*a++);
            } else if (a == merged.end() || b->first < a->first) {
                next.emplace_back(b->first, -factor * b->second);
                ++b;
            } else {
                Rational v = a->second - factor * b->second;
                if (v != 0) next.emplace_back(a->first, std::move(v));
                ++a;
                ++b;
            }
        }
        merged = std::move(next);
    }
    if (merged.empty()) return;
    const Rational lead = merged.front().second;
    for (auto& e : merged) e.second /= lead;
    basis_.emplace(merged.front().first, std::move(merged));
}

std::vector<std::vector<std::pair<std::size_t, Rational>>> SparseRationalSystem::kernel() const {
    // back-reduce to RREF, processing pivots from the right
    std::map<std::size_t, std::map<std::size_t, Rational>> rref;
    for (const auto& [p, row] : basis_) rref[p] = std::map<std::size_t, Rational>(row.begin(), row.end());
    for (auto it = rref.rbegin(); it != rref.rend(); ++it) {
        const std::size_t p = it->first;
        const auto& prow = it->second;
        for (auto& [q, qrow] : rref) {
            if (q >= p) break;
            auto hit = qrow.find(p);
            if (hit == qrow.end()) continue;
            const Rational factor = hit->second;
            for (const auto& [c, v] : prow) {
                Rational& dst = qrow[c];
                dst -= factor * v;
                if (dst == 0) qrow.erase(c);
            }
        }
    }
    std::vector<Row> out;
    for (std::size_t f = 0; f < columns_; ++f) {
        if (rref.count(f)) continue;
        Row v;
        for (const auto& [p, prow] : rref) {
            if (p > f) break;
            auto hit = prow.find(f);
            if (hit != prow.end()) v.emplace_back(p, -hit->second);
        }
        v.emplace_back(f, Rational(1));
        out.push_back(std::move(v));
    }
    return out;
}

void RankTracker::reduce(RationalVector& v) const {
    for (const auto& [p, row] : rows_) {
        if (v[p] == 0) continue;
        const Rational factor = v[p];
        for (std::size_t j = p; j < dim_; ++j)
            if (row[j] != 0) v[j] -= factor * row[j];
    }
}

bool RankTracker::independent(RationalVector v) const {
    reduce(v);
    return std::any_of(v.begin(), v.end(), [](const Rational& x) { return x != 0; });
}

bool RankTracker::insert(RationalVector v) {
    if (v.size() != dim_) throw AlgebraError("dimension mismatch");
    reduce(v);
    std::size_t p = 0;
    while (p < dim_ && v[p] == 0) ++p;
    if (p == dim_) return false;
    const Rational lead = v[p];
    for (auto& x : v) x /= lead;
    // keep stored rows reduced against the new pivot
    for (auto& [q, row] : rows_) {
        if (row[p] == 0) continue;
        const Rational factor = row[p];
        for (std::size_t j = 0; j < dim_; ++j)
            if (v[j] != 0) row[j] -= factor * v[j];
    }
    rows_.emplace(p, std::move(v));
    return true;
}

}  // namespace psym
