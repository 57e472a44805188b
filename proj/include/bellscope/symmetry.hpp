#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "correlation.hpp"
#include "lp.hpp"
#include "polytope.hpp"
#include "scenario.hpp"
#include "vertices.hpp"

namespace bellscope {

/// A permutation of the parties, perm[i] = pi(i).
using PartyPermutation = std::vector<int>;

inline PartyPermutation identity_permutation(int n) {
    PartyPermutation p(n);
    std::iota(p.begin(), p.end(), 0);
    return p;
}

/// (pi o sigma)(i) = pi(sigma(i)).
inline PartyPermutation compose(const PartyPermutation &pi, const PartyPermutation &sigma) {
    PartyPermutation out(pi.size());
    for (std::size_t i = 0; i < pi.size(); ++i)
        out[i] = pi[sigma[i]];
    return out;
}

inline std::vector<PartyPermutation> all_permutations(int n) {
    std::vector<PartyPermutation> out;
    auto p = identity_permutation(n);
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

/// Coordinate permutation induced by a party permutation: the permuted
/// vector is (pi p)[j] = p[map[j]], where (pi p)(a|x) = p(a o pi | x o pi).
inline std::vector<std::size_t> coordinate_map(const Scenario &s, Param param, const PartyPermutation &pi) {
    const int n = s.parties;
    if (static_cast<int>(pi.size()) != n)
        throw DimensionMismatchError("permutation size differs from the party count");
    std::vector<std::size_t> map(space_dimension(s, param));
    switch (param) {
    case Param::NoSignalling:
    case Param::Correlator: {
        const auto &cg = collins_gisin_index(s);
        std::vector<int> st2(n);
        for (std::size_t j = 0; j < cg.size(); ++j) {
            auto st = cg.states(j);
            for (int i = 0; i < n; ++i)
                st2[i] = st[pi[i]];
            map[j] = cg.index_of_states(st2);
        }
        break;
    }
    case Param::FullProbability: {
        auto fi = full_index(s);
        std::vector<int> s2(n), r2(n);
        for (std::size_t si = 0; si < fi.settings_count(); ++si) {
            auto st = FullIndex::tuple_of(si, n, s.settings);
            for (std::size_t ri = 0; ri < fi.outcomes_count(); ++ri) {
                auto rt = FullIndex::tuple_of(ri, n, s.outcomes);
                for (int i = 0; i < n; ++i) {
                    s2[i] = st[pi[i]];
                    r2[i] = rt[pi[i]];
                }
                map[si * fi.outcomes_count() + ri] = fi.index(s2, r2);
            }
        }
        break;
    }
    case Param::FullCorrelatorOnly: {
        std::vector<int> s2(n);
        for (std::size_t si = 0; si < map.size(); ++si) {
            auto st = FullIndex::tuple_of(si, n, s.settings);
            for (int i = 0; i < n; ++i)
                s2[i] = st[pi[i]];
            map[si] = FullIndex::tuple_index(s2, s.settings);
        }
        break;
    }
    }
    return map;
}

inline RationalVector permute_coordinates(std::span<const Rational> p, const std::vector<std::size_t> &map) {
    RationalVector out(p.size());
    for (std::size_t j = 0; j < p.size(); ++j)
        out[j] = p[map[j]];
    return out;
}

inline CorrelationVector act(const CorrelationVector &p, const PartyPermutation &pi) {
    return {p.scenario, p.param, permute_coordinates(p.coords, coordinate_map(p.scenario, p.param, pi))};
}

/// Orbit classes of coordinates under all party permutations. The class
/// basis averages the coordinates of each class; classes are ordered by
/// their smallest coordinate index.
class SymmetricSubspace {
  public:
    SymmetricSubspace() = default;
    SymmetricSubspace(const Scenario &s, Param param) : scenario_(s), param_(param) {
        const std::size_t d = space_dimension(s, param);
        std::vector<std::size_t> parent(d);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](std::size_t x) {
            while (parent[x] != x)
                x = parent[x] = parent[parent[x]];
            return x;
        };
        // Adjacent transpositions generate the symmetric group.
        for (int i = 0; i + 1 < s.parties; ++i) {
            auto pi = identity_permutation(s.parties);
            std::swap(pi[i], pi[i + 1]);
            auto map = coordinate_map(s, param, pi);
            for (std::size_t j = 0; j < d; ++j) {
                auto a = find(j), b = find(map[j]);
                if (a != b)
                    parent[std::max(a, b)] = std::min(a, b);
            }
        }
        class_of_.assign(d, 0);
        std::vector<std::size_t> root_class(d, d);
        for (std::size_t j = 0; j < d; ++j) {
            auto r = find(j);
            if (root_class[r] == d) {
                root_class[r] = classes_.size();
                classes_.emplace_back();
            }
            class_of_[j] = root_class[r];
            classes_[root_class[r]].push_back(j);
        }
    }

    const Scenario &scenario() const { return scenario_; }
    Param param() const { return param_; }
    std::size_t dimension() const { return classes_.size(); }
    std::size_t ambient_dimension() const { return class_of_.size(); }
    std::size_t complement_dimension() const { return ambient_dimension() - dimension(); }
    const std::vector<std::vector<std::size_t>> &classes() const { return classes_; }
    std::size_t class_of(std::size_t coord) const { return class_of_[coord]; }

    /// Class-basis coordinates: the average over each orbit class.
    RationalVector project(std::span<const Rational> p) const {
        if (p.size() != ambient_dimension())
            throw DimensionMismatchError("vector does not match the subspace's ambient space");
        RationalVector out(dimension());
        for (std::size_t c = 0; c < classes_.size(); ++c) {
            Rational sum = 0;
            for (auto j : classes_[c])
                sum += p[j];
            out[c] = sum / static_cast<long>(classes_[c].size());
        }
        return out;
    }

    /// Symmetric vector of the ambient space with the given class coordinates.
    RationalVector embed(std::span<const Rational> ps) const {
        RationalVector out(ambient_dimension());
        for (std::size_t j = 0; j < out.size(); ++j)
            out[j] = ps[class_of_[j]];
        return out;
    }

    /// Full-space inequality (f_s (+) 0, f0): each coordinate gets its class
    /// coefficient divided by the class size, so f . p = f_s . p_s.
    Inequality extend(const Inequality &fs) const {
        if (fs.coeffs.size() != dimension())
            throw DimensionMismatchError("inequality is not expressed in the class basis");
        Inequality out;
        out.coeffs.resize(ambient_dimension());
        for (std::size_t j = 0; j < out.coeffs.size(); ++j) {
            const auto c = class_of_[j];
            out.coeffs[j] = fs.coeffs[c] / static_cast<long>(classes_[c].size());
        }
        out.bound = fs.bound;
        out.param = param_;
        out.symmetric_basis = false;
        out.provenance = fs.provenance.empty() ? "symmetric-extension" : fs.provenance + "+extension";
        return normalized(std::move(out));
    }

    /// Class-basis form of a full-space inequality (its restriction to S).
    Inequality restrict(const Inequality &f) const {
        Inequality out;
        out.coeffs.assign(dimension(), Rational(0));
        for (std::size_t j = 0; j < f.coeffs.size(); ++j)
            out.coeffs[class_of_[j]] += f.coeffs[j];
        out.bound = f.bound;
        out.param = param_;
        out.symmetric_basis = true;
        out.provenance = f.provenance;
        return out;
    }

  private:
    Scenario scenario_;
    Param param_ = Param::NoSignalling;
    std::vector<std::vector<std::size_t>> classes_;
    std::vector<std::size_t> class_of_;
};

inline SymmetricSubspace build_symmetric_subspace(const Scenario &s, Param param) { return {s, param}; }

/// Group average (1/n!) sum_pi act(p, pi), computed through the orbit classes.
inline CorrelationVector symmetrize(const CorrelationVector &p) {
    SymmetricSubspace sub(p.scenario, p.param);
    return {p.scenario, p.param, sub.embed(sub.project(p.coords))};
}

inline bool is_symmetric(const Inequality &ineq, const Scenario &s) {
    for (int i = 0; i + 1 < s.parties; ++i) {
        auto pi = identity_permutation(s.parties);
        std::swap(pi[i], pi[i + 1]);
        if (permute_coordinates(ineq.coeffs, coordinate_map(s, ineq.param, pi)) != ineq.coeffs)
            return false;
    }
    return true;
}

/// Keeps the points that are not convex combinations of the others (exact LP
/// in the affine-hull coordinates). Input must be duplicate-free.
inline std::vector<RationalVector> extreme_points(std::vector<RationalVector> pts) {
    if (pts.size() <= 2)
        return pts;
    auto hull = affine_hull(pts);
    std::vector<RationalVector> reduced;
    reduced.reserve(pts.size());
    for (const auto &p : pts) {
        RationalVector r;
        r.reserve(hull.pivots.size());
        for (auto c : hull.pivots)
            r.push_back(p[c]);
        reduced.push_back(std::move(r));
    }
    std::vector<bool> keep(pts.size(), true);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        std::vector<const RationalVector *> others;
        for (std::size_t j = 0; j < pts.size(); ++j)
            if (j != i && keep[j])
                others.push_back(&reduced[j]);
        if (convex_membership(others, reduced[i]).inside)
            keep[i] = false;
    }
    std::vector<RationalVector> out;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (keep[i])
            out.push_back(std::move(pts[i]));
    return out;
}

/// Vertex set of the projection of `poly` onto the symmetric subspace,
/// expressed in the class basis.
inline Polytope project_vertices_symmetric(const Polytope &poly, const SymmetricSubspace &sub) {
    if (poly.param() != sub.param() || poly.symmetric_basis())
        throw PreconditionError("polytope and subspace use different coordinates");
    std::vector<RationalVector> pts;
    pts.reserve(poly.size());
    for (const auto &v : poly.vertices())
        pts.push_back(sub.project(v));
    sort_unique(pts);
    return Polytope(poly.scenario(), poly.param(), extreme_points(std::move(pts)), true);
}

/// Symmetrized local polytope generated strategy by strategy, without
/// materializing the full vertex list.
inline Polytope symmetrized_local_polytope(const Scenario &s, const SymmetricSubspace &sub,
                                           std::size_t cap = default_vertex_cap) {
    std::vector<RationalVector> pts;
    for_each_local_strategy(
        s, [&](const LocalStrategy &st) { pts.push_back(sub.project(local_vertex(s, st, sub.param()))); }, cap);
    sort_unique(pts);
    return Polytope(s, sub.param(), extreme_points(std::move(pts)), true);
}

/// Upper bound (n+1)(n+2)(n+3)/6 on the vertices of the symmetrized (n,2,2) polytope.
inline std::size_t symmetric_vertex_bound(int n) {
    return static_cast<std::size_t>(n + 1) * (n + 2) * (n + 3) / 6;
}

} // namespace bellscope
