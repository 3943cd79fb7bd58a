#pragma once

#include <map>
#include <vector>

#include "psym/ratfunc.hpp"

namespace psym {

using PolyVector = std::vector<SparsePoly>;
using PolyMatrix = std::vector<PolyVector>;  // row-major
using RationalVector = std::vector<Rational>;

// Row echelon form from fraction-free (Bareiss) elimination over the
// polynomial ring. `rows` holds the first `pivots.size()` rows of the
// reduced matrix; pivots[i] is the pivot column of rows[i].
struct EchelonForm {
    PolyMatrix rows;
    std::vector<std::size_t> pivots;
    std::size_t columns = 0;
};

EchelonForm bareiss_echelon(PolyMatrix m, std::size_t columns);

// Rank over the field of fractions.
std::size_t rank(const PolyMatrix& m, std::size_t columns);

// Basis of {v : M v = 0} over the field of fractions. One vector per free
// column, in column order; each vector is denominator-cleared, has no
// common polynomial factor, and is positive in its free coordinate.
std::vector<PolyVector> nullspace(const PolyMatrix& m, std::size_t columns);

// Rows are scaled by the lcm of their denominators before elimination.
std::vector<PolyVector> nullspace(const std::vector<std::vector<RationalFunction>>& m, std::size_t columns);

// True iff the spans of the two vector lists coincide over the fraction
// field (exact rank comparison).
bool same_span(const std::vector<PolyVector>& a, const std::vector<PolyVector>& b, std::size_t dim);
bool in_span(const PolyVector& v, const std::vector<PolyVector>& basis, std::size_t dim);

// Clears denominators and removes the common polynomial factor of a
// vector of rational functions.
PolyVector clear_denominators(const std::vector<RationalFunction>& v);

// Sparse exact rational elimination used where entries are plain numbers.
// Columns are given in preference order; the kernel vector of free column f
// only involves f and earlier columns.
class SparseRationalSystem {
public:
    explicit SparseRationalSystem(std::size_t columns) : columns_(columns) {}
    // Adds one equation sum_j row[j] x_j = 0 (entries with equal column are summed).
    void add_row(std::vector<std::pair<std::size_t, Rational>> row);
    std::size_t rank() const { return basis_.size(); }
    std::vector<std::vector<std::pair<std::size_t, Rational>>> kernel() const;

private:
    using Row = std::vector<std::pair<std::size_t, Rational>>;
    std::size_t columns_;
    std::map<std::size_t, Row> basis_;  // pivot column -> row with leading 1
};

// Incremental rank tracker for dense rational vectors.
class RankTracker {
public:
    explicit RankTracker(std::size_t dim) : dim_(dim) {}
    // Returns true (and keeps v) iff v is independent of what was kept so far.
    bool insert(RationalVector v);
    bool independent(RationalVector v) const;
    std::size_t rank() const { return rows_.size(); }

private:
    void reduce(RationalVector& v) const;
    std::size_t dim_;
    std::map<std::size_t, RationalVector> rows_;
};

}  // namespace psym
