#include "oracles.hpp"

#include <gtest/gtest.h>
#include <random>

using namespace bellscope;

namespace {

// Facets of poly whose tight set contains that of ineq, by brute force.
std::set<std::pair<RationalVector, Rational>> containing_facets(const Inequality &ineq, const Polytope &poly) {
    auto face = saturating_vertices(ineq, poly);
    std::set<std::pair<RationalVector, Rational>> out;
    for (const auto &[h, h0] : oracle::facets_by_subsets(poly.vertices())) {
        Inequality f{h, h0, poly.param(), false, {}};
        auto sat = saturating_vertices(f, poly);
        if (std::includes(sat.begin(), sat.end(), face.begin(), face.end()))
            out.insert({h, h0});
    }
    return out;
}

std::set<std::pair<RationalVector, Rational>> as_set(const std::vector<Inequality> &fs) {
    std::set<std::pair<RationalVector, Rational>> out;
    for (const auto &f : fs)
        out.insert({f.coeffs, f.bound});
    return out;
}

Inequality sum_of(const std::vector<Inequality> &fs) {
    Inequality out = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i) {
        for (std::size_t j = 0; j < out.coeffs.size(); ++j)
            out.coeffs[j] += fs[i].coeffs[j];
        out.bound += fs[i].bound;
    }
    return out;
}

} // namespace

TEST(Lift, FacetLiftsToItself) {
    auto poly = model_vertices({2, 2, 2});
    auto f = facet_enumeration(poly).facets[3];
    for (auto m : {LiftMethod::Complete, LiftMethod::Recursive}) {
        auto out = lift_to_facets(f, poly, m);
        ASSERT_EQ(out.size(), 1u);
        EXPECT_TRUE(out[0].same_halfspace(f));
    }
}

TEST(Lift, CompleteLiftMatchesBruteForce) {
    auto poly = model_vertices({2, 2, 2});
    auto facets = facet_enumeration(poly).facets;
    std::mt19937 rng(9);
    for (int rep = 0; rep < 15; ++rep) {
        std::vector<Inequality> pick;
        for (int t = 0; t < 2 + rep % 3; ++t)
            pick.push_back(facets[rng() % facets.size()]);
        auto f = normalized(sum_of(pick));
        if (saturating_vertices(f, poly).size() == poly.size() || saturating_vertices(f, poly).empty())
            continue;
        auto complete = lift_to_facets(f, poly, LiftMethod::Complete);
        EXPECT_EQ(as_set(complete), containing_facets(f, poly)) << rep;
        auto recursive = lift_to_facets(f, poly, LiftMethod::Recursive);
        EXPECT_FALSE(recursive.empty());
        auto all = as_set(complete);
        for (const auto &g : recursive) {
            EXPECT_TRUE(all.count({g.coeffs, g.bound})) << rep;
            EXPECT_TRUE(is_facet(g, poly));
        }
    }
}

TEST(Lift, LowerDimensionalFaceInThreeParties) {
    Scenario s{3, 2, 2};
    auto poly = model_vertices(s);
    // Sum of two three-party positivity constraints.
    const auto &cg = collins_gisin_index(s);
    Inequality f;
    f.param = Param::NoSignalling;
    f.coeffs.assign(cg.size(), 0);
    f.coeffs[cg.size() - 1] = -1;
    f.coeffs[cg.size() - 2] = -1;
    ASSERT_TRUE(is_valid(f, poly));
    ASSERT_FALSE(is_facet(f, poly));
    auto out = lift_to_facets(f, poly, LiftMethod::Recursive);
    ASSERT_FALSE(out.empty());
    auto face = saturating_vertices(f, poly);
    for (const auto &g : out) {
        EXPECT_TRUE(is_facet(g, poly));
        auto sat = saturating_vertices(g, poly);
        EXPECT_TRUE(std::includes(sat.begin(), sat.end(), face.begin(), face.end()));
    }
}

TEST(Lift, Preconditions) {
    auto poly = model_vertices({2, 2, 2});
    Inequality bad;
    bad.param = Param::NoSignalling;
    bad.coeffs.assign(8, 0);
    bad.coeffs[0] = 1; // p(a=0|x=0) <= 0 is violated
    EXPECT_THROW(lift_to_facets(bad, poly), PreconditionError);
    Inequality trivial;
    trivial.param = Param::NoSignalling;
    trivial.coeffs.assign(8, 0);
    EXPECT_THROW(lift_to_facets(trivial, poly), PreconditionError);
}

TEST(Lift, RaiseFaceRecoversAFacet) {
    auto poly = model_vertices({2, 2, 2});
    auto ch = normalized(load_inequality(std::string(BELLSCOPE_DATA_DIR) + "/CH.json").inequality);
    auto face = saturating_vertices(ch, poly);
    ASSERT_EQ(face.size(), 8u);
    std::vector<std::size_t> sub(face.begin(), face.end() - 1);
    auto g = raise_face(poly, sub, face.back());
    ASSERT_TRUE(g.has_value());
    auto n = normalized(*g);
    EXPECT_EQ(n.coeffs, ch.coeffs);
    EXPECT_EQ(n.bound, ch.bound);
    // Every vertex tight: nothing to raise.
    std::vector<std::size_t> all(poly.size() - 1);
    std::iota(all.begin(), all.end(), 0);
    EXPECT_FALSE(raise_face(poly, all, poly.size() - 1).has_value());
}
