#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "correlation.hpp"
#include "polytope.hpp"
#include "scenario.hpp"

namespace bellscope {

inline constexpr std::size_t default_vertex_cap = 10'000'000;

/// Deterministic local strategy: assignment[party * m + setting] = outcome.
using LocalStrategy = std::vector<int>;

inline std::size_t local_strategy_count(const Scenario &s, std::size_t cap = default_vertex_cap) {
    std::size_t entries = static_cast<std::size_t>(s.parties) * s.settings;
    std::size_t count = 1;
    for (std::size_t i = 0; i < entries; ++i) {
        if (count > cap / s.outcomes)
            throw TooLargeError("k^(nm) local strategies exceed the cap of " + std::to_string(cap));
        count *= s.outcomes;
    }
    return count;
}

/// Visits every local strategy in lexicographic order of the assignment table.
inline void for_each_local_strategy(const Scenario &s, const std::function<void(const LocalStrategy &)> &f,
                                    std::size_t cap = default_vertex_cap) {
    local_strategy_count(s, cap);
    detail::for_each_tuple(s.parties * s.settings, s.outcomes, f);
}

/// Distribution induced by a deterministic strategy in the given coordinates.
inline RationalVector local_vertex(const Scenario &s, const LocalStrategy &strategy, Param param) {
    const int n = s.parties, m = s.settings, k = s.outcomes;
    switch (param) {
    case Param::FullProbability: {
        auto fi = full_index(s);
        RationalVector v(fi.size());
        std::vector<int> out(n);
        for (std::size_t si = 0; si < fi.settings_count(); ++si) {
            auto settings = FullIndex::tuple_of(si, n, m);
            for (int i = 0; i < n; ++i)
                out[i] = strategy[i * m + settings[i]];
            v[fi.index(settings, out)] = 1;
        }
        return v;
    }
    case Param::NoSignalling: {
        const auto &cg = collins_gisin_index(s);
        RationalVector v(cg.size());
        for (std::size_t j = 0; j < cg.size(); ++j) {
            const auto &t = cg.term(j);
            bool hit = true;
            for (std::size_t q = 0; q < t.parties.size() && hit; ++q)
                hit = strategy[t.parties[q] * m + t.settings[q]] == t.outcomes[q];
            if (hit)
                v[j] = 1;
        }
        return v;
    }
    case Param::Correlator: {
        auto ns = local_vertex(s, strategy, Param::NoSignalling);
        return no_signalling_to_correlator<Rational>(s, ns);
    }
    case Param::FullCorrelatorOnly: {
        if (k != 2)
            throw UnsupportedError("full correlators require k = 2");
        auto fi = full_index(s);
        RationalVector v(fi.settings_count());
        for (std::size_t si = 0; si < fi.settings_count(); ++si) {
            auto settings = FullIndex::tuple_of(si, n, m);
            int parity = 0;
            for (int i = 0; i < n; ++i)
                parity += strategy[i * m + settings[i]];
            v[si] = parity % 2 == 0 ? 1 : -1;
        }
        return v;
    }
    }
    return {};
}

/// All k^(nm) deterministic local strategies, lexicographic in the assignment.
inline Polytope enumerate_local_vertices(const Scenario &s, Param param = Param::FullProbability,
                                         std::size_t cap = default_vertex_cap) {
    s.validate();
    std::vector<RationalVector> verts;
    verts.reserve(local_strategy_count(s, cap));
    for_each_local_strategy(
        s, [&](const LocalStrategy &st) { verts.push_back(local_vertex(s, st, param)); }, cap);
    return Polytope(s, param, std::move(verts));
}

/// Which pair of parties may communicate in a Svetlichny strategy.
enum class Bipartition { AB_C, AC_B, BC_A };

/// Deterministic Svetlichny strategy: the pair outputs are functions of both
/// pair settings, the solo output depends on its own setting only.
struct SvetlichnyStrategy {
    Bipartition bipartition = Bipartition::AB_C;
    std::vector<int> first_output;  // alpha(x_i, x_j), index x_i * m + x_j
    std::vector<int> second_output; // beta(x_i, x_j)
    std::vector<int> solo_output;   // gamma(x_l)
};

inline std::array<int, 3> bipartition_parties(Bipartition b) {
    switch (b) {
    case Bipartition::AB_C: return {0, 1, 2};
    case Bipartition::AC_B: return {0, 2, 1};
    case Bipartition::BC_A: return {1, 2, 0};
    }
    return {0, 1, 2};
}

inline RationalVector svetlichny_vertex(const Scenario &s, const SvetlichnyStrategy &st) {
    const int m = s.settings;
    auto [pi, pj, pl] = bipartition_parties(st.bipartition);
    auto fi = full_index(s);
    RationalVector v(fi.size());
    std::vector<int> out(3);
    for (std::size_t si = 0; si < fi.settings_count(); ++si) {
        auto settings = FullIndex::tuple_of(si, 3, m);
        int pair = settings[pi] * m + settings[pj];
        out[pi] = st.first_output[pair];
        out[pj] = st.second_output[pair];
        out[pl] = st.solo_output[settings[pl]];
        v[fi.index(settings, out)] = 1;
    }
    return v;
}

/// Union of the deterministic strategies of the three bipartitions, in
/// full-probability coordinates, duplicates removed, sorted.
inline Polytope enumerate_svetlichny_vertices(const Scenario &s, std::size_t cap = default_vertex_cap) {
    if (s.parties != 3)
        throw UnsupportedError("Svetlichny vertices are defined for three parties");
    Scenario sv = s;
    sv.model = Model::Svetlichny;
    sv.validate();
    const int m = s.settings, k = s.outcomes;
    std::size_t per = 1;
    for (int i = 0; i < 2 * m * m + m; ++i) {
        if (per > cap / k)
            throw TooLargeError("Svetlichny strategies exceed the cap");
        per *= k;
    }
    std::vector<RationalVector> verts;
    verts.reserve(3 * per);
    for (auto b : {Bipartition::AB_C, Bipartition::AC_B, Bipartition::BC_A}) {
        detail::for_each_tuple(2 * m * m + m, k, [&](const std::vector<int> &t) {
            SvetlichnyStrategy st;
            st.bipartition = b;
            st.first_output.assign(t.begin(), t.begin() + m * m);
            st.second_output.assign(t.begin() + m * m, t.begin() + 2 * m * m);
            st.solo_output.assign(t.begin() + 2 * m * m, t.end());
            verts.push_back(svetlichny_vertex(sv, st));
        });
    }
    sort_unique(verts);
    return Polytope(sv, Param::FullProbability, std::move(verts));
}

/// Maps each vertex to its m^n full n-party correlators and deduplicates.
inline Polytope project_full_correlators(const Polytope &poly) {
    const auto &s = poly.scenario();
    if (s.outcomes != 2)
        throw UnsupportedError("full-correlator projection requires k = 2");
    if (poly.symmetric_basis())
        throw PreconditionError("project full correlators before symmetrizing");
    std::vector<RationalVector> pts;
    pts.reserve(poly.size());
    for (const auto &v : poly.vertices()) {
        CorrelationVector cv{s, poly.param(), v};
        pts.push_back(poly.param() == Param::FullCorrelatorOnly ? v
                                                                : convert(cv, Param::FullCorrelatorOnly).coords);
    }
    sort_unique(pts);
    Scenario out = s;
    out.model = Model::FullCorrelator;
    return Polytope(out, Param::FullCorrelatorOnly, std::move(pts));
}

/// Vertices of the polytope of the given model in its natural coordinates:
/// local -> no-signalling, svetlichny -> full probabilities,
/// fullcorr -> full correlators.
inline Polytope model_vertices(const Scenario &s, std::size_t cap = default_vertex_cap) {
    switch (s.model) {
    case Model::Local: return enumerate_local_vertices(s, Param::NoSignalling, cap);
    case Model::Svetlichny: return enumerate_svetlichny_vertices(s, cap);
    case Model::FullCorrelator: {
        Scenario loc = s;
        loc.model = Model::Local;
        loc.validate();
        std::vector<RationalVector> pts;
        for_each_local_strategy(
            loc, [&](const LocalStrategy &st) { pts.push_back(local_vertex(loc, st, Param::FullCorrelatorOnly)); },
            cap);
        sort_unique(pts);
        return Polytope(s, Param::FullCorrelatorOnly, std::move(pts));
    }
    }
    throw UnsupportedError("unknown model");
}

} // namespace bellscope
