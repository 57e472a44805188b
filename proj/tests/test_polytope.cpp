#include "oracles.hpp"

#include <filesystem>
#include <gtest/gtest.h>
#include <random>

using namespace bellscope;

namespace {

using FacetSet = std::set<std::pair<RationalVector, Rational>>;

FacetSet as_set(const std::vector<Inequality> &fs) {
    FacetSet out;
    for (const auto &f : fs)
        out.insert({f.coeffs, f.bound});
    return out;
}

Polytope random_polytope(std::mt19937 &rng, std::size_t d, std::size_t n) {
    std::uniform_int_distribution<int> c(-4, 4);
    std::vector<RationalVector> pts(n, RationalVector(d));
    for (auto &p : pts)
        for (auto &x : p)
            x = c(rng);
    sort_unique(pts);
    return Polytope(Scenario{1, 1, 2}, Param::FullProbability, std::move(pts));
}

std::filesystem::path temp_file(const std::string &name) {
    return std::filesystem::temp_directory_path() / ("bellscope_test_" + name);
}

RationalVector pr_box() {
    return {Rational(1, 2), Rational(1, 2), Rational(1, 2), Rational(1, 2),
            Rational(1, 2), Rational(1, 2), Rational(1, 2), Rational(0)};
}

} // namespace

TEST(Polytope, DoubleDescriptionMatchesSubsetOracleOnRandomPolytopes) {
    std::mt19937 rng(17);
    for (int rep = 0; rep < 12; ++rep) {
        std::size_t d = 2 + rep % 3;
        auto poly = random_polytope(rng, d, 7 + rep % 4);
        if (poly.dimension() != d)
            continue;
        auto res = facet_enumeration(poly);
        EXPECT_EQ(as_set(res.facets), oracle::facets_by_subsets(poly.vertices())) << rep;
    }
}

TEST(Polytope, ChshPolytopeFacets) {
    auto poly = model_vertices({2, 2, 2});
    auto res = facet_enumeration(poly);
    EXPECT_EQ(res.hull_dimension, 8u);
    EXPECT_EQ(res.facets.size(), 24u); // 16 positivity + 8 CHSH
    EXPECT_EQ(as_set(res.facets), oracle::facets_by_subsets(poly.vertices()));
    for (const auto &f : res.facets) {
        EXPECT_TRUE(is_valid(f, poly));
        EXPECT_TRUE(is_facet(f, poly));
    }
}

TEST(Polytope, LowerDimensionalHull) {
    // A triangular prism embedded in a hyperplane of R^4.
    std::vector<RationalVector> pts;
    for (auto [x, y] : {std::pair{0, 0}, {1, 0}, {0, 1}})
        for (int z : {0, 1})
            pts.push_back({x, y, z, 1 - x - y - z});
    Polytope poly(Scenario{1, 1, 2}, Param::FullProbability, pts);
    auto res = facet_enumeration(poly);
    EXPECT_EQ(res.hull_dimension, 3u);
    EXPECT_EQ(res.equalities.size(), 1u);
    EXPECT_EQ(res.facets.size(), 5u);
    for (const auto &f : res.facets) {
        auto sat = saturating_vertices(f, poly);
        std::vector<RationalVector> tight;
        for (auto i : sat)
            tight.push_back(pts[i]);
        EXPECT_TRUE(is_valid(f, poly));
        EXPECT_EQ(oracle::affine_rank(tight), 3u);
    }
}

TEST(Polytope, ReverseInsertionGivesSameFacets) {
    auto poly = model_vertices({2, 2, 3});
    auto fwd = facet_enumeration(poly);
    DDOptions o;
    o.reverse_insertion = true;
    auto rev = facet_enumeration(poly, o);
    EXPECT_EQ(as_set(fwd.facets), as_set(rev.facets));
}

TEST(Polytope, BudgetCheckpointAndChainedResume) {
    auto poly = model_vertices({2, 2, 3});
    auto full = facet_enumeration(poly);
    auto ckpt = temp_file("dd_ckpt.json");
    std::filesystem::remove(ckpt);
    DDOptions o;
    o.budget_seconds = 1e-9;
    o.checkpoint_path = ckpt.string();
    int interruptions = 0;
    std::optional<FacetEnumeration> done;
    while (!done && interruptions < 10000) {
        try {
            done = facet_enumeration(poly, o);
        } catch (const BudgetExhaustedError &e) {
            ++interruptions;
            EXPECT_EQ(e.checkpoint_path(), ckpt.string());
            ASSERT_TRUE(std::filesystem::exists(ckpt));
            o.resume_path = ckpt.string();
        }
    }
    ASSERT_TRUE(done.has_value());
    EXPECT_GT(interruptions, 0);
    EXPECT_EQ(done->facets.size(), full.facets.size());
    EXPECT_EQ(as_set(done->facets), as_set(full.facets));
    std::filesystem::remove(ckpt);
}

TEST(Polytope, CheckpointFromOtherPolytopeIsRejected) {
    auto ckpt = temp_file("dd_ckpt_other.json");
    DDOptions o;
    o.budget_seconds = 1e-9;
    o.checkpoint_path = ckpt.string();
    EXPECT_THROW(facet_enumeration(model_vertices({2, 2, 3}), o), BudgetExhaustedError);
    DDOptions r;
    r.resume_path = ckpt.string();
    EXPECT_ANY_THROW(facet_enumeration(model_vertices({2, 3, 2}), r));
    std::filesystem::remove(ckpt);
}

TEST(Polytope, ValidityAndFacetChecks) {
    auto poly = model_vertices({2, 2, 2});
    auto ch = load_inequality(std::string(BELLSCOPE_DATA_DIR) + "/CH.json").inequality;
    EXPECT_TRUE(is_valid(ch, poly));
    EXPECT_TRUE(is_facet(ch, poly));
    Inequality loose = ch;
    loose.bound += 1;
    EXPECT_TRUE(is_valid(loose, poly));
    EXPECT_FALSE(is_facet(loose, poly));
    Inequality tight = ch;
    tight.bound -= 1;
    EXPECT_FALSE(is_valid(tight, poly));
    auto face = face_of(ch, poly);
    EXPECT_EQ(face.saturating.size(), 8u);
    EXPECT_EQ(face.rank, 8u);
}

TEST(Polytope, LpCertificateForLocalPoint) {
    Scenario s{2, 2, 2};
    auto poly = model_vertices(s);
    RationalVector p(8);
    for (const auto &v : poly.vertices())
        for (std::size_t i = 0; i < 8; ++i)
            p[i] += v[i] / 16;
    auto r = is_local_lp(p, poly);
    EXPECT_TRUE(r.inside);
    EXPECT_TRUE(verify_locality(r, p, poly));
    r.weights[0] += Rational(1, 1000);
    EXPECT_FALSE(verify_locality(r, p, poly));
}

TEST(Polytope, LpSeparatesPrBox) {
    auto poly = model_vertices({2, 2, 2});
    auto p = pr_box();
    auto r = is_local_lp(p, poly);
    ASSERT_FALSE(r.inside);
    EXPECT_TRUE(is_valid(r.separator, poly));
    EXPECT_GT(r.separator.value(p), 0);
    EXPECT_TRUE(verify_locality(r, p, poly));
}

TEST(Polytope, LpAgreesWithFacetsOnNoisyPrBoxes) {
    auto poly = model_vertices({2, 2, 2});
    auto facets = facet_enumeration(poly).facets;
    RationalVector center(8);
    for (const auto &v : poly.vertices())
        for (std::size_t i = 0; i < 8; ++i)
            center[i] += v[i] / 16;
    auto pr = pr_box();
    // Mixing with the white center: local iff v <= 1/2.
    for (int num = 0; num <= 10; ++num) {
        Rational v(num, 10);
        v.canonicalize();
        RationalVector p(8);
        for (std::size_t i = 0; i < 8; ++i)
            p[i] = v * pr[i] + (1 - v) * center[i];
        bool by_facets = std::all_of(facets.begin(), facets.end(), [&](const Inequality &f) { return f.value(p) <= 0; });
        auto r = is_local_lp(p, poly);
        EXPECT_EQ(r.inside, by_facets) << num;
        EXPECT_EQ(r.inside, v <= Rational(1, 2)) << num;
        EXPECT_TRUE(verify_locality(r, p, poly)) << num;
    }
}

TEST(Polytope, DimensionMismatchIsReported) {
    auto poly = model_vertices({2, 2, 2});
    RationalVector p(5);
    EXPECT_THROW(is_local_lp(p, poly), DimensionMismatchError);
}
