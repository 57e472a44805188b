#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "numeric.hpp"

namespace bellscope {

/// Reduced row echelon form of a list of rows, computed exactly.
struct RowEchelon {
    std::vector<RationalVector> rows; // nonzero rows, leading entry 1
    std::vector<std::size_t> pivots;  // pivot column of each row, increasing
    std::size_t cols = 0;

    std::size_t rank() const { return rows.size(); }
};

inline RowEchelon reduced_row_echelon(std::vector<RationalVector> m, std::size_t cols) {
    RowEchelon out;
    out.cols = cols;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
        std::size_t piv = r;
        while (piv < m.size() && sgn(m[piv][c]) == 0)
            ++piv;
        if (piv == m.size())
            continue;
        std::swap(m[r], m[piv]);
        Rational inv = 1 / m[r][c];
        for (std::size_t j = c; j < cols; ++j)
            if (sgn(m[r][j]) != 0)
                m[r][j] *= inv;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i == r || sgn(m[i][c]) == 0)
                continue;
            Rational f = m[i][c];
            for (std::size_t j = c; j < cols; ++j)
                if (sgn(m[r][j]) != 0)
                    m[i][j] -= f * m[r][j];
        }
        out.pivots.push_back(c);
        ++r;
    }
    m.resize(r);
    out.rows = std::move(m);
    return out;
}

/// Basis of { x : row . x = 0 for every row } (one vector per free column).
inline std::vector<RationalVector> nullspace(const RowEchelon &ech) {
    std::vector<bool> is_pivot(ech.cols, false);
    for (auto p : ech.pivots)
        is_pivot[p] = true;
    std::vector<RationalVector> basis;
    for (std::size_t f = 0; f < ech.cols; ++f) {
        if (is_pivot[f])
            continue;
        RationalVector v(ech.cols);
        v[f] = 1;
        for (std::size_t i = 0; i < ech.rows.size(); ++i)
            v[ech.pivots[i]] = -ech.rows[i][f];
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Incrementally maintained row basis over the integers (fraction-free
/// elimination with gcd reduction). `add` returns true when the vector is
/// independent of the rows added so far.
class IncrementalBasis {
  public:
    explicit IncrementalBasis(std::size_t cols) : cols_(cols) {}

    std::size_t rank() const { return rows_.size(); }
    std::size_t cols() const { return cols_; }

    bool add(IntegerVector v) {
        reduce(v);
        for (std::size_t c = 0; c < cols_; ++c) {
            if (sgn(v[c]) != 0) {
                if (sgn(v[c]) < 0)
                    for (auto &x : v)
                        x = -x;
                rows_.push_back(std::move(v));
                pivots_.push_back(c);
                return true;
            }
        }
        return false;
    }

    bool add(std::span<const Rational> v) { return add(to_primitive_integers(v)); }

    bool contains(IntegerVector v) const {
        reduce(v);
        for (const auto &x : v)
            if (sgn(x) != 0)
                return false;
        return true;
    }

  private:
    void reduce(IntegerVector &v) const {
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            std::size_t c = pivots_[i];
            if (sgn(v[c]) == 0)
                continue;
            const auto &b = rows_[i];
            Integer f = v[c];
            Integer p = b[c];
            for (std::size_t j = 0; j < cols_; ++j) {
                if (sgn(b[j]) == 0) {
                    if (sgn(v[j]) != 0)
                        v[j] *= p;
                } else {
                    v[j] = v[j] * p - f * b[j];
                }
            }
            make_primitive(v);
        }
    }

    std::size_t cols_;
    std::vector<IntegerVector> rows_;
    std::vector<std::size_t> pivots_;
};

/// Maximal number of affinely independent points among `points`.
inline std::size_t affine_rank(std::span<const RationalVector> points) {
    if (points.empty())
        return 0;
    const auto &base = points.front();
    IncrementalBasis basis(base.size());
    RationalVector diff(base.size());
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i].size() != base.size())
            throw DimensionMismatchError("points of unequal length in affine_rank");
        for (std::size_t j = 0; j < base.size(); ++j)
            diff[j] = points[i][j] - base[j];
        basis.add(diff);
        if (basis.rank() == base.size())
            break;
    }
    return basis.rank() + 1;
}

/// Affine hull of a finite point set. `pivots` lists coordinates that
/// parametrize the hull: projecting onto them is injective on the hull.
struct AffineHull {
    RationalVector base;
    std::vector<RationalVector> directions; // RREF rows
    std::vector<std::size_t> pivots;
    // Equalities e . x = e0 satisfied by every point of the hull.
    std::vector<std::pair<RationalVector, Rational>> equalities;

    std::size_t dimension() const { return directions.size(); }
    std::size_t ambient_dimension() const { return base.size(); }

    bool contains(std::span<const Rational> x) const {
        for (const auto &[e, e0] : equalities)
            if (dot(e, x) != e0)
                return false;
        return true;
    }
};

inline AffineHull affine_hull(std::span<const RationalVector> points) {
    if (points.empty())
        throw PreconditionError("affine hull of an empty point set");
    AffineHull hull;
    hull.base = points.front();
    std::size_t dim = hull.base.size();
    std::vector<RationalVector> diffs;
    diffs.reserve(points.size());
    for (std::size_t i = 1; i < points.size(); ++i) {
        RationalVector d(dim);
        for (std::size_t j = 0; j < dim; ++j)
            d[j] = points[i][j] - hull.base[j];
        if (!is_zero(d))
            diffs.push_back(std::move(d));
    }
    auto ech = reduced_row_echelon(std::move(diffs), dim);
    for (auto &e : nullspace(ech)) {
        auto ints = to_primitive_integers(e);
        RationalVector eq(ints.begin(), ints.end());
        Rational e0 = dot(eq, hull.base);
        hull.equalities.emplace_back(std::move(eq), std::move(e0));
    }
    hull.pivots = ech.pivots;
    hull.directions = std::move(ech.rows);
    return hull;
}

/// Solves the square system A x = b exactly; nullopt when A is singular.
inline std::optional<RationalVector> solve(std::vector<RationalVector> a, RationalVector b) {
    std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i)
        a[i].push_back(b[i]);
    auto ech = reduced_row_echelon(std::move(a), n + 1);
    if (ech.rank() != n || ech.pivots.back() != n - 1)
        return std::nullopt;
    RationalVector x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = ech.rows[i][n];
    return x;
}

} // namespace bellscope
