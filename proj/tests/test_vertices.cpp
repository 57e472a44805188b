#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace bellscope;

namespace {

std::vector<RationalVector> sorted(std::vector<RationalVector> v) {
    sort_unique(v);
    return v;
}

} // namespace

TEST(Vertices, LocalFullProbabilityMatchesOracle) {
    for (Scenario s : {Scenario{2, 2, 2}, Scenario{3, 2, 2}, Scenario{2, 3, 2}, Scenario{2, 2, 3}}) {
        std::vector<RationalVector> expect;
        for (const auto &r : oracle::local_strategies(s))
            expect.push_back(oracle::full_vertex(s, r));
        auto poly = enumerate_local_vertices(s, Param::FullProbability);
        EXPECT_EQ(sorted(poly.vertices()), sorted(expect)) << s.parties << s.settings << s.outcomes;
    }
}

TEST(Vertices, LocalCountsAndDimensions) {
    auto p222 = model_vertices({2, 2, 2});
    EXPECT_EQ(p222.size(), 16u);
    EXPECT_EQ(p222.dimension(), 8u);
    auto p422 = model_vertices({4, 2, 2});
    EXPECT_EQ(p422.size(), 256u);
    EXPECT_EQ(p422.dimension(), 80u);
    auto p224 = model_vertices({2, 2, 4});
    EXPECT_EQ(p224.size(), 256u);
    EXPECT_EQ(p224.dimension(), 48u);
}

TEST(Vertices, NoSignallingVertexIsConversionOfFull) {
    Scenario s{3, 2, 2};
    for_each_local_strategy(s, [&](const LocalStrategy &st) {
        CorrelationVector full{s, Param::FullProbability, local_vertex(s, st, Param::FullProbability)};
        EXPECT_EQ(convert(full, Param::NoSignalling).coords, local_vertex(s, st, Param::NoSignalling));
        EXPECT_EQ(convert(full, Param::Correlator).coords, local_vertex(s, st, Param::Correlator));
    });
}

TEST(Vertices, CapIsEnforced) {
    EXPECT_THROW(local_strategy_count({4, 2, 2}, 100), TooLargeError);
    EXPECT_THROW(model_vertices({3, 3, 3}, 1000), TooLargeError);
    EXPECT_EQ(local_strategy_count({4, 2, 2}), 256u);
}

TEST(Vertices, SvetlichnyCountAndHull) {
    Scenario s{3, 2, 2, Model::Svetlichny};
    auto poly = model_vertices(s);
    // 3 * 2^8 * 2^2 strategies; the 64 fully local ones appear once per bipartition.
    EXPECT_EQ(poly.size(), 3u * 256 * 4 - 2 * 64);
    EXPECT_EQ(poly.dimension() + 1, oracle::affine_rank(poly.vertices()));
    for (const auto &v : poly.vertices()) {
        auto rep = validate_distribution(CorrelationVector{s, Param::FullProbability, v});
        EXPECT_TRUE(rep.normalized());
        EXPECT_TRUE(rep.nonnegative());
    }
    // Local vertices are a subset.
    auto local = sorted(poly.vertices());
    for (const auto &r : oracle::local_strategies(Scenario{3, 2, 2}))
        EXPECT_TRUE(std::binary_search(local.begin(), local.end(), oracle::full_vertex(Scenario{3, 2, 2}, r)));
}

TEST(Vertices, SvetlichnyVertexFactorizes) {
    Scenario s{3, 2, 2, Model::Svetlichny};
    SvetlichnyStrategy st;
    st.bipartition = Bipartition::AC_B;
    st.first_output = {0, 1, 1, 0}; // alpha = x xor z
    st.second_output = {0, 0, 0, 1}; // gamma' = x and z
    st.solo_output = {1, 0};
    auto v = svetlichny_vertex(s, st);
    const auto &fi = full_index(s);
    for (std::size_t si = 0; si < 8; ++si)
        for (std::size_t oi = 0; oi < 8; ++oi) {
            auto x = FullIndex::tuple_of(si, 3, 2), a = FullIndex::tuple_of(oi, 3, 2);
            bool hit = a[0] == (x[0] ^ x[2]) && a[2] == (x[0] & x[2]) && a[1] == (x[1] == 0 ? 1 : 0);
            EXPECT_EQ(v[fi.index(x, a)], hit ? 1 : 0);
        }
}

TEST(Vertices, FullCorrelatorProjection) {
    Scenario s{3, 3, 2, Model::FullCorrelator};
    auto poly = model_vertices(s);
    EXPECT_EQ(local_strategy_count(Scenario{3, 3, 2}), 512u);
    EXPECT_EQ(poly.size(), 128u); // flipping two parties together is invisible
    EXPECT_EQ(poly.dimension(), 27u);
    for (const auto &v : poly.vertices())
        for (const auto &c : v)
            EXPECT_TRUE(c == 1 || c == -1);
}
