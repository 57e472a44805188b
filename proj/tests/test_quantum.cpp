#include "oracles.hpp"

#include <gtest/gtest.h>
#include <random>

using namespace bellscope;

namespace {

Inequality data(const std::string &name) {
    return load_inequality(std::string(BELLSCOPE_DATA_DIR) + "/" + name + ".json").inequality;
}

ComplexMatrix random_mixed_state(int n, std::mt19937 &rng) {
    std::normal_distribution<double> g;
    const int d = 1 << n;
    ComplexMatrix a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            a(i, j) = {g(rng), g(rng)};
    ComplexMatrix rho = a * a.adjoint();
    return rho / rho.trace();
}

void expect_matches_dense(const ComplexMatrix &rho, const std::vector<std::vector<double>> &angles) {
    const int n = static_cast<int>(angles.size()), m = static_cast<int>(angles[0].size());
    auto p = correlations(PauliTensor(rho), angles);
    FullIndex fi{n, m, 2};
    for (std::size_t si = 0; si < fi.settings_count(); ++si)
        for (std::size_t oi = 0; oi < fi.outcomes_count(); ++oi) {
            auto x = FullIndex::tuple_of(si, n, m), a = FullIndex::tuple_of(oi, n, 2);
            std::vector<double> phi(n);
            for (int i = 0; i < n; ++i)
                phi[i] = angles[i][x[i]];
            EXPECT_NEAR(p.full[fi.index(x, a)], oracle::dense_probability(rho, phi, a), 1e-12);
        }
}

} // namespace

TEST(Quantum, PauliTensorMatchesDenseProbabilities) {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> ang(-3.2, 3.2);
    for (int n = 1; n <= 4; ++n) {
        std::vector<ComplexMatrix> states{w_state(n), ghz_state(n, 0.3), random_mixed_state(n, rng)};
        for (const auto &rho : states) {
            std::vector<std::vector<double>> angles(n, std::vector<double>(2));
            for (auto &row : angles)
                for (auto &a : row)
                    a = ang(rng);
            expect_matches_dense(rho, angles);
        }
    }
}

TEST(Quantum, ZMeasurementsOnProductState) {
    // |0><0| measured along Z gives outcome 0; along X it is uniform.
    ComplexMatrix rho = ComplexMatrix::Zero(2, 2);
    rho(0, 0) = 1;
    auto p = correlations(PauliTensor(rho), {{0.0, 0.0}}, 1.0, {{0.0, std::numbers::pi / 2}});
    EXPECT_NEAR(p.full[0], 1.0, 1e-12);
    EXPECT_NEAR(p.full[1], 0.0, 1e-12);
    EXPECT_NEAR(p.full[2], 0.5, 1e-12);
}

TEST(Quantum, DistributionsAreValid) {
    std::mt19937 rng(2);
    auto rho = random_mixed_state(3, rng);
    auto p = correlations(PauliTensor(rho), {{0.1, 1.2}, {0.4, -2.0}, {2.2, 0.7}}, 1.0, {{0.3, 1.0}, {2.0, 0.1}, {1.4, 1.6}});
    for (std::size_t x = 0; x < 8; ++x) {
        double sum = 0;
        for (std::size_t a = 0; a < 8; ++a) {
            EXPECT_GE(p.full[x * 8 + a], -1e-12);
            sum += p.full[x * 8 + a];
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
    }
}

TEST(Quantum, VisibilityMixesWithWhiteNoise) {
    PauliTensor t(w_state(3));
    std::vector<std::vector<double>> angles{{0.2, 1.0}, {0.5, 2.0}, {-1.0, 0.3}};
    auto pure = correlations(t, angles);
    auto noisy = correlations(t, angles, 0.3);
    for (std::size_t i = 0; i < pure.full.size(); ++i)
        EXPECT_NEAR(noisy.full[i], 0.3 * pure.full[i] + 0.7 / 8, 1e-12);
}

TEST(Quantum, WStateViolatesIW) {
    auto iw = data("I_W");
    const double t = std::acos(0.25), u = 2 * std::asin(0.25);
    QuantumSetup w{w_state(4), {{0, t}, {t - u, -u}, {0, t}, {t - u, -u}}, 1.0, {}};
    EXPECT_NEAR(evaluate(iw, correlations(w)), 0.0625, 1e-9);
}

TEST(Quantum, IWIsAFacetOfTheFourPartyPolytope) {
    EXPECT_TRUE(is_facet(data("I_W"), model_vertices({4, 2, 2})));
}

TEST(Quantum, GhzThresholdForICorr) {
    auto ic = data("I_Corr");
    auto rho = ghz_state(3, std::numbers::pi / 4);
    auto best = optimize_symmetric_angles(ic, rho);
    QuantumSetup g{rho, std::vector<std::vector<double>>(3, best.parameters), 1.0, {}};
    double thr = visibility_threshold(ic, g);
    EXPECT_NEAR(thr, 0.956784, 1e-6);
    // Value is affine in v: zero exactly at the threshold.
    PauliTensor t(rho);
    EXPECT_NEAR(evaluate(ic, correlations(t, g.angles, thr)), 0.0, 1e-7);
    EXPECT_LT(evaluate(ic, correlations(t, g.angles, thr - 1e-3)), 0.0);
    EXPECT_GT(evaluate(ic, correlations(t, g.angles, thr + 1e-3)), 0.0);
    // Threshold from the correlator form agrees.
    auto cf = canonical_correlator_form(ic, Scenario{3, 2, 2});
    EXPECT_NEAR(noise_resistance(cf, evaluate(cf, correlations(t, g.angles))), thr, 1e-6);
}

TEST(Quantum, GhzViolatesIGhzWithTiltedMeasurements) {
    auto ig = data("I_GHZ");
    auto rho = ghz_state(3, std::numbers::pi / 4);
    auto best = optimize_symmetric_bloch(ig, rho, 2, 40);
    EXPECT_GT(best.value, 1e-3);
    std::vector<double> az(best.parameters.begin(), best.parameters.begin() + 2);
    std::vector<double> po(best.parameters.begin() + 2, best.parameters.end());
    auto p = correlations(PauliTensor(rho), std::vector<std::vector<double>>(3, az), 1.0,
                          std::vector<std::vector<double>>(3, po));
    EXPECT_NEAR(evaluate(ig, p), best.value, 1e-12);
}

TEST(Quantum, RejectsBadStates) {
    ComplexMatrix bad = ComplexMatrix::Zero(2, 2);
    bad(0, 0) = 1.5;
    bad(1, 1) = -0.5;
    EXPECT_THROW(PauliTensor{bad}, InvalidStateError);
    ComplexMatrix odd = ComplexMatrix::Identity(3, 3) / 3.0;
    EXPECT_THROW(PauliTensor{odd}, InvalidStateError);
    ComplexMatrix nonherm = ComplexMatrix::Identity(2, 2) / 2.0;
    nonherm(0, 1) = 0.1;
    EXPECT_THROW(PauliTensor{nonherm}, InvalidStateError);
}

TEST(Quantum, AngleTablesMustMatch) {
    PauliTensor t(w_state(3));
    EXPECT_ANY_THROW(correlations(t, {{0.0, 1.0}, {0.0, 1.0}}));
    EXPECT_ANY_THROW(correlations(t, {{0.0, 1.0}, {0.0}, {0.0, 1.0}}));
}

TEST(Quantum, NoThresholdWithoutViolation) {
    auto ch = data("CH");
    QuantumSetup prod{ghz_state(2, 0.0), {{0.0, 1.0}, {0.5, 2.0}}, 1.0, {}};
    EXPECT_LE(evaluate(ch, correlations(prod)), 1e-12);
    EXPECT_THROW(visibility_threshold(ch, prod), NoViolationError);
}
