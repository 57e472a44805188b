#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "correlation.hpp"
#include "linalg.hpp"
#include "lp.hpp"
#include "numeric.hpp"
#include "scenario.hpp"

namespace bellscope {

/// A valid-inequality candidate h . p <= h0 over a declared coordinate frame.
struct Inequality {
    RationalVector coeffs;
    Rational bound = 0;
    Param param = Param::NoSignalling;
    bool symmetric_basis = false; // coordinates are orbit-class averages
    std::string provenance;

    Rational slack(std::span<const Rational> p) const { return bound - dot(coeffs, p); }
    Rational value(std::span<const Rational> p) const { return dot(coeffs, p) - bound; }

    bool same_halfspace(const Inequality &o) const {
        return coeffs == o.coeffs && bound == o.bound && param == o.param &&
               symmetric_basis == o.symmetric_basis;
    }
};

/// Clears denominators and divides by the gcd of (h, h0). Only positive
/// factors are applied: the direction of the inequality is part of its meaning.
inline Inequality normalized(Inequality ineq) {
    RationalVector all(ineq.coeffs);
    all.push_back(ineq.bound);
    Rational s = primitive_scale(all);
    for (auto &c : ineq.coeffs)
        c *= s;
    ineq.bound *= s;
    return ineq;
}

inline bool operator<(const Inequality &a, const Inequality &b) {
    if (a.coeffs != b.coeffs)
        return a.coeffs < b.coeffs;
    return a.bound < b.bound;
}

/// V-representation of a polytope with a lazily computed affine hull.
class Polytope {
  public:
    Polytope() = default;
    Polytope(Scenario s, Param p, std::vector<RationalVector> vertices, bool symmetric = false)
        : scenario_(s), param_(p), symmetric_(symmetric), vertices_(std::move(vertices)) {
        if (vertices_.empty())
            throw PreconditionError("a polytope needs at least one vertex");
        for (const auto &v : vertices_)
            if (v.size() != vertices_.front().size())
                throw DimensionMismatchError("vertices of unequal length");
    }

    const Scenario &scenario() const { return scenario_; }
    Param param() const { return param_; }
    bool symmetric_basis() const { return symmetric_; }
    const std::vector<RationalVector> &vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    std::size_t ambient_dimension() const { return vertices_.front().size(); }

    const AffineHull &hull() const {
        auto h = std::atomic_load(&hull_);
        if (!h) {
            h = std::make_shared<const AffineHull>(affine_hull(vertices_));
            std::atomic_store(&hull_, h);
        }
        return *h;
    }

    std::size_t dimension() const { return hull().dimension(); }

  private:
    Scenario scenario_;
    Param param_ = Param::NoSignalling;
    bool symmetric_ = false;
    std::vector<RationalVector> vertices_;
    mutable std::shared_ptr<const AffineHull> hull_;
};

inline void sort_unique(std::vector<RationalVector> &pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
}

inline bool is_valid(const Inequality &ineq, const Polytope &poly) {
    for (const auto &v : poly.vertices())
        if (dot(ineq.coeffs, v) > ineq.bound)
            return false;
    return true;
}

/// Vertices on the hyperplane h . v = h0.
inline std::vector<std::size_t> saturating_vertices(const Inequality &ineq, const Polytope &poly) {
    std::vector<std::size_t> w;
    for (std::size_t i = 0; i < poly.size(); ++i)
        if (dot(ineq.coeffs, poly.vertices()[i]) == ineq.bound)
            w.push_back(i);
    return w;
}

inline std::size_t affine_rank_of(const Polytope &poly, std::span<const std::size_t> subset) {
    std::vector<RationalVector> pts;
    pts.reserve(subset.size());
    for (auto i : subset)
        pts.push_back(poly.vertices()[i]);
    return affine_rank(pts);
}

/// The face cut out by a valid inequality.
struct FaceContext {
    Inequality inequality;
    std::vector<std::size_t> saturating;
    std::size_t rank = 0;      // affinely independent saturating vertices
    std::size_t dimension = 0; // rank - 1 (0 for an empty face)
};

inline FaceContext face_of(const Inequality &ineq, const Polytope &poly) {
    FaceContext f{ineq, saturating_vertices(ineq, poly), 0, 0};
    f.rank = affine_rank_of(poly, f.saturating);
    f.dimension = f.rank == 0 ? 0 : f.rank - 1;
    return f;
}

/// Valid and tight on as many affinely independent vertices as the hull dimension.
inline bool is_facet(const Inequality &ineq, const Polytope &poly) {
    if (!is_valid(ineq, poly))
        return false;
    auto f = face_of(ineq, poly);
    // A valid inequality tight on the whole polytope is an implicit equality.
    if (f.saturating.size() == poly.size())
        return false;
    return f.rank == poly.dimension();
}

/// Exact LP locality test: a convex decomposition over the vertices, or a
/// valid inequality strictly violated by p.
struct LocalityResult {
    bool inside = false;
    RationalVector weights;
    Inequality separator;
};

inline LocalityResult is_local_lp(std::span<const Rational> p, const Polytope &poly) {
    if (p.size() != poly.ambient_dimension())
        throw DimensionMismatchError("point and polytope live in different spaces");
    std::vector<const RationalVector *> pts;
    for (const auto &v : poly.vertices())
        pts.push_back(&v);
    auto m = convex_membership(pts, RationalVector(p.begin(), p.end()));
    LocalityResult r;
    r.inside = m.inside;
    if (m.inside) {
        r.weights = std::move(m.weights);
    } else {
        r.separator.coeffs = std::move(m.separator);
        r.separator.bound = std::move(m.separator_bound);
        r.separator.param = poly.param();
        r.separator.symmetric_basis = poly.symmetric_basis();
        r.separator.provenance = "lp-separator";
        r.separator = normalized(std::move(r.separator));
    }
    return r;
}

/// Re-checks an LP certificate exactly.
inline bool verify_locality(const LocalityResult &r, std::span<const Rational> p, const Polytope &poly) {
    if (r.inside) {
        if (r.weights.size() != poly.size())
            return false;
        Rational total = 0;
        RationalVector sum(p.size());
        for (std::size_t j = 0; j < poly.size(); ++j) {
            if (sgn(r.weights[j]) < 0)
                return false;
            total += r.weights[j];
            if (sgn(r.weights[j]) == 0)
                continue;
            for (std::size_t i = 0; i < p.size(); ++i)
                sum[i] += r.weights[j] * poly.vertices()[j][i];
        }
        return total == 1 && std::equal(sum.begin(), sum.end(), p.begin());
    }
    return is_valid(r.separator, poly) && r.separator.value(p) > 0;
}

} // namespace bellscope
