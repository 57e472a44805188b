#include "oracles.hpp"

#include <gtest/gtest.h>
#include <map>
#include <random>

using namespace bellscope;

namespace {

// Orbit label of a CG term under party permutations: the sorted list of
// (setting, outcome) pairs, party identities forgotten.
std::vector<std::pair<int, int>> orbit_label(const MarginalTerm &t) {
    std::vector<std::pair<int, int>> l;
    for (std::size_t i = 0; i < t.parties.size(); ++i)
        l.push_back({t.settings[i], t.outcomes[i]});
    std::sort(l.begin(), l.end());
    return l;
}

} // namespace

TEST(Symmetry, ClassesMatchOrbitLabels) {
    for (Scenario s : {Scenario{3, 2, 2}, Scenario{4, 2, 2}, Scenario{3, 2, 3}}) {
        const auto &cg = collins_gisin_index(s);
        SymmetricSubspace sub(s, Param::NoSignalling);
        std::map<std::vector<std::pair<int, int>>, std::size_t> label_class;
        for (std::size_t i = 0; i < cg.size(); ++i) {
            auto [it, fresh] = label_class.emplace(orbit_label(cg.term(i)), sub.class_of(i));
            EXPECT_EQ(it->second, sub.class_of(i)) << describe(cg.term(i));
        }
        EXPECT_EQ(label_class.size(), sub.dimension());
    }
}

TEST(Symmetry, DimensionFormulaForBinaryScenarios) {
    for (int n = 2; n <= 6; ++n) {
        SymmetricSubspace sub(Scenario{n, 2, 2}, Param::NoSignalling);
        EXPECT_EQ(sub.dimension(), static_cast<std::size_t>(n * (n + 3) / 2)) << n;
        EXPECT_EQ(sub.ambient_dimension(), space_dimension(Scenario{n, 2, 2}, Param::NoSignalling));
    }
}

TEST(Symmetry, SymmetricVertexCounts) {
    for (int n = 2; n <= 6; ++n) {
        Scenario s{n, 2, 2};
        SymmetricSubspace sub(s, Param::NoSignalling);
        auto ps = symmetrized_local_polytope(s, sub);
        EXPECT_EQ(ps.size(), symmetric_vertex_bound(n)) << n;
        EXPECT_EQ(ps.dimension(), sub.dimension()) << n;
    }
}

TEST(Symmetry, ProjectionAgreesWithVertexPath) {
    Scenario s{3, 2, 2};
    SymmetricSubspace sub(s, Param::NoSignalling);
    auto via_vertices = project_vertices_symmetric(model_vertices(s), sub);
    auto direct = symmetrized_local_polytope(s, sub);
    auto a = via_vertices.vertices(), b = direct.vertices();
    sort_unique(a);
    sort_unique(b);
    EXPECT_EQ(a, b);
}

TEST(Symmetry, ExtendPreservesValuesOnSymmetricPoints) {
    Scenario s{3, 2, 2};
    SymmetricSubspace sub(s, Param::NoSignalling);
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> coef(-5, 5);
    auto verts = model_vertices(s);
    for (int rep = 0; rep < 20; ++rep) {
        Inequality fs;
        fs.param = Param::NoSignalling;
        fs.symmetric_basis = true;
        for (std::size_t i = 0; i < sub.dimension(); ++i)
            fs.coeffs.push_back(coef(rng));
        fs.bound = coef(rng);
        auto f = sub.extend(fs);
        EXPECT_TRUE(is_symmetric(f, s));
        RationalVector raw(sub.ambient_dimension());
        for (std::size_t j = 0; j < raw.size(); ++j)
            raw[j] = fs.coeffs[sub.class_of(j)] / static_cast<long>(sub.classes()[sub.class_of(j)].size());
        const auto &v = verts.vertices()[rng() % verts.size()];
        auto sym = symmetrize(CorrelationVector{s, Param::NoSignalling, v}).coords;
        EXPECT_EQ(dot(raw, sym), dot(fs.coeffs, sub.project(sym)));
        // extend() only rescales by a positive factor
        auto back = normalized(Inequality{raw, fs.bound, Param::NoSignalling, false, {}});
        EXPECT_EQ(back.coeffs, f.coeffs);
        EXPECT_EQ(back.bound, f.bound);
    }
}

TEST(Symmetry, ActionMapsLocalVerticesToLocalVertices) {
    Scenario s{3, 2, 2};
    auto verts = model_vertices(s).vertices();
    sort_unique(verts);
    for (const auto &pi : all_permutations(3))
        for (const auto &v : verts) {
            auto w = act(CorrelationVector{s, Param::NoSignalling, v}, pi).coords;
            EXPECT_TRUE(std::binary_search(verts.begin(), verts.end(), w));
        }
}

TEST(Symmetry, ActionIsAGroupAction) {
    Scenario s{3, 2, 3};
    std::mt19937 rng(5);
    RationalVector p(space_dimension(s, Param::NoSignalling));
    for (auto &c : p) {
        c = Rational(static_cast<long>(rng() % 100), 7);
        c.canonicalize();
    }
    CorrelationVector cv{s, Param::NoSignalling, p};
    for (const auto &a : all_permutations(3))
        for (const auto &b : all_permutations(3)) {
            auto lhs = act(act(cv, b), a);
            auto rhs = act(cv, compose(a, b));
            EXPECT_EQ(lhs.coords, rhs.coords);
        }
}

TEST(Symmetry, SymmetrizedPointIsFixed) {
    Scenario s{4, 2, 2};
    auto verts = model_vertices(s);
    auto sym = symmetrize(CorrelationVector{s, Param::NoSignalling, verts.vertices()[77]});
    for (const auto &pi : all_permutations(4))
        EXPECT_EQ(act(sym, pi).coords, sym.coords);
}
