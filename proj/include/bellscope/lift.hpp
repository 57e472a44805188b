#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <vector>

#include "double_description.hpp"
#include "linalg.hpp"
#include "lp.hpp"
#include "polytope.hpp"

namespace bellscope {

namespace detail {

inline RationalVector homogeneous_hull_point(const AffineHull &hull, std::span<const Rational> v) {
    RationalVector h;
    h.reserve(hull.pivots.size() + 1);
    h.push_back(1);
    for (auto c : hull.pivots)
        h.push_back(v[c]);
    return h;
}

/// x0 + x'.y >= 0 in hull coordinates, written as an ambient inequality.
inline Inequality inequality_from_hull_ray(const Polytope &poly, std::span<const Rational> x,
                                           const std::string &provenance) {
    const auto &hull = poly.hull();
    Inequality f;
    f.coeffs.assign(poly.ambient_dimension(), Rational(0));
    for (std::size_t j = 0; j < hull.pivots.size(); ++j)
        f.coeffs[hull.pivots[j]] = -x[j + 1];
    f.bound = x[0];
    f.param = poly.param();
    f.symmetric_basis = poly.symmetric_basis();
    f.provenance = provenance;
    return normalized(std::move(f));
}

} // namespace detail

/// A valid inequality tight on every vertex of `tight` and on `extra`, found
/// by an exact feasibility LP; nullopt when every such inequality is tight on
/// the whole polytope.
inline std::optional<Inequality> raise_face(const Polytope &poly, const std::vector<std::size_t> &tight,
                                            std::size_t extra) {
    const auto &hull = poly.hull();
    const std::size_t dim = hull.pivots.size() + 1;
    std::vector<bool> on(poly.size(), false);
    for (auto i : tight)
        on[i] = true;
    on[extra] = true;
    std::vector<RationalVector> rows;
    for (std::size_t i = 0; i < poly.size(); ++i)
        rows.push_back(detail::homogeneous_hull_point(hull, poly.vertices()[i]));
    // Variables: x+ , x- (free x split), then one slack per loose vertex.
    std::vector<std::size_t> loose;
    for (std::size_t i = 0; i < poly.size(); ++i)
        if (!on[i])
            loose.push_back(i);
    if (loose.empty())
        return std::nullopt;
    const std::size_t cols = 2 * dim + loose.size();
    std::vector<RationalVector> a;
    RationalVector b;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        RationalVector r(cols);
        for (std::size_t j = 0; j < dim; ++j) {
            r[j] = rows[i][j];
            r[dim + j] = -rows[i][j];
        }
        if (!on[i]) {
            auto pos = std::lower_bound(loose.begin(), loose.end(), i) - loose.begin();
            r[2 * dim + pos] = -1; // row . x - s = 0, s >= 0
        }
        a.push_back(std::move(r));
        b.push_back(0);
    }
    // Total slack 1 rules out the zero inequality and implicit equalities.
    RationalVector norm(cols);
    for (std::size_t q = 0; q < loose.size(); ++q)
        norm[2 * dim + q] = 1;
    a.push_back(std::move(norm));
    b.push_back(1);
    auto res = solve_lp(a, b);
    if (res.status != LpStatus::Optimal)
        return std::nullopt;
    RationalVector x(dim);
    for (std::size_t j = 0; j < dim; ++j)
        x[j] = res.x[j] - res.x[dim + j];
    return detail::inequality_from_hull_ray(poly, x, "lift");
}

enum class LiftMethod {
    Complete,  // every facet containing the face (double description on the tangent cone)
    Recursive, // dimension-raising recursion through raise_face
};

/// Facets of `poly` whose saturating set contains the face of `ineq`,
/// sorted and deduplicated.
inline std::vector<Inequality> lift_to_facets(const Inequality &ineq, const Polytope &poly,
                                              LiftMethod method = LiftMethod::Complete,
                                              const DDOptions &opts = {}) {
    if (!is_valid(ineq, poly))
        throw PreconditionError("lift_to_facets needs a valid inequality");
    const auto &hull = poly.hull();
    const std::size_t d = hull.dimension();
    auto face = face_of(ineq, poly);
    if (face.saturating.size() == poly.size())
        throw PreconditionError("the inequality is tight on the whole polytope");
    if (face.rank == d)
        return {normalized(ineq)};

    std::vector<Inequality> out;
    if (method == LiftMethod::Complete) {
        // Ineqs tight on W form the subspace { x : (1,y_w).x = 0 }; parametrize
        // it by a nullspace basis N and enumerate { z : (1,y_v).N z >= 0 }.
        std::vector<RationalVector> eq;
        for (auto i : face.saturating)
            eq.push_back(detail::homogeneous_hull_point(hull, poly.vertices()[i]));
        auto basis = nullspace(reduced_row_echelon(std::move(eq), d + 1));
        for (auto &v : basis) {
            auto ints = to_primitive_integers(v);
            v.assign(ints.begin(), ints.end());
        }
        std::vector<bool> on(poly.size(), false);
        for (auto i : face.saturating)
            on[i] = true;
        std::vector<std::vector<long>> rows;
        for (std::size_t i = 0; i < poly.size(); ++i) {
            if (on[i])
                continue;
            auto h = detail::homogeneous_hull_point(hull, poly.vertices()[i]);
            RationalVector r(basis.size());
            for (std::size_t q = 0; q < basis.size(); ++q)
                r[q] = dot(h, basis[q]);
            if (!is_zero(r))
                rows.push_back(detail::to_long_row(r));
        }
        DoubleDescription dd(std::move(rows), opts);
        for (const auto &z : dd.run()) {
            RationalVector x(d + 1);
            for (std::size_t q = 0; q < basis.size(); ++q)
                for (std::size_t j = 0; j <= d; ++j)
                    x[j] += Rational(z[q]) * basis[q][j];
            out.push_back(detail::inequality_from_hull_ray(poly, x, "lift"));
        }
    } else {
        std::set<std::vector<std::size_t>> seen;
        std::vector<Inequality> stack{normalized(ineq)};
        while (!stack.empty()) {
            auto cur = std::move(stack.back());
            stack.pop_back();
            auto f = face_of(cur, poly);
            if (!seen.insert(f.saturating).second)
                continue;
            if (f.rank == d) {
                cur.provenance = "lift";
                out.push_back(std::move(cur));
                continue;
            }
            std::vector<bool> on(poly.size(), false);
            for (auto i : f.saturating)
                on[i] = true;
            for (std::size_t u = 0; u < poly.size(); ++u) {
                if (on[u])
                    continue;
                // Every vertex off an affinely spanning face raises the rank.
                if (auto next = raise_face(poly, f.saturating, u))
                    stack.push_back(std::move(*next));
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](const Inequality &a, const Inequality &b) { return a.same_halfspace(b); }),
              out.end());
    return out;
}

} // namespace bellscope
