// Oracles are checked against hand-derived facts before anything relies on them.

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace bellscope;

TEST(OracleSelfCheck, StrategyCountsAndNormalization) {
    Scenario s{2, 2, 2};
    auto st = oracle::local_strategies(s);
    EXPECT_EQ(st.size(), 16u);
    auto p = oracle::full_vertex(s, st[5]);
    ASSERT_EQ(p.size(), 16u);
    for (int x = 0; x < 4; ++x) {
        Rational sum = 0;
        for (int r = 0; r < 4; ++r)
            sum += p[x * 4 + r];
        EXPECT_EQ(sum, 1);
    }
    EXPECT_EQ(oracle::local_strategies(Scenario{1, 1, 2}).size(), 2u);
    EXPECT_EQ(oracle::local_strategies(Scenario{2, 2, 3}).size(), 81u);
}

TEST(OracleSelfCheck, RankOfSimplexAndSquare) {
    std::vector<RationalVector> simplex{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    EXPECT_EQ(oracle::affine_rank(simplex), 4u);
    std::vector<RationalVector> line{{0, 0}, {1, 1}, {2, 2}};
    EXPECT_EQ(oracle::affine_rank(line), 2u);
}

TEST(OracleSelfCheck, SubsetFacetsOfSquare) {
    std::vector<RationalVector> sq{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    auto f = oracle::facets_by_subsets(sq);
    EXPECT_EQ(f.size(), 4u);
    EXPECT_TRUE(f.count({RationalVector{1, 0}, Rational(1)}));
    EXPECT_TRUE(f.count({RationalVector{-1, 0}, Rational(0)}));
}

TEST(OracleSelfCheck, InductiveCorrelatorSinglePartyAndPair) {
    Scenario s{2, 1, 2};
    // p(a=0) = 3/4 for both, independent.
    auto marg = [](const std::vector<int> &st) {
        Rational v = 1;
        for (int x : st)
            if (x >= 0)
                v *= Rational(3, 4);
        return v;
    };
    EXPECT_EQ(oracle::inductive_correlator(s, marg, {0}, {0}), Rational(1, 2));
    EXPECT_EQ(oracle::inductive_correlator(s, marg, {0, 1}, {0, 0}), Rational(1, 4));
}

TEST(OracleSelfCheck, RelabelingGroupOrder) {
    std::size_t count = 0;
    oracle::for_each_relabeling(Scenario{2, 2, 2}, [&](const Relabeling &) {
        ++count;
        return true;
    });
    EXPECT_EQ(count, 128u); // 2! * (2! * 2!^2)^2
}

TEST(OracleSelfCheck, DenseProbabilityOfProductState) {
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(2, 2);
    rho(0, 0) = 1;
    EXPECT_NEAR(oracle::dense_probability(rho, {0.0}, {0}), 0.5, 1e-15);
    // |+><+| gives outcome 0 with certainty along X.
    rho.setConstant(0.5);
    EXPECT_NEAR(oracle::dense_probability(rho, {0.0}, {0}), 1.0, 1e-15);
    EXPECT_NEAR(oracle::dense_probability(rho, {std::numbers::pi}, {0}), 0.0, 1e-15);
}

TEST(OracleSelfCheck, ChValueOnStrategies) {
    Scenario s{2, 2, 2};
    auto ch = load_inequality(std::string(BELLSCOPE_DATA_DIR) + "/CH.json").inequality;
    int tight = 0;
    for (const auto &r : oracle::local_strategies(s)) {
        auto v = oracle::ns_value(ch, s, r);
        EXPECT_LE(v, 0);
        tight += sgn(v) == 0;
    }
    EXPECT_EQ(tight, 8);
}
