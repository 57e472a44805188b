#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "canon.hpp"
#include "correlation.hpp"
#include "errors.hpp"
#include "polytope.hpp"
#include "scenario.hpp"

namespace bellscope {

using ComplexMatrix = Eigen::MatrixXcd;

/// Pure-state density matrices over n qubits, basis index with qubit 0 most significant.
inline ComplexMatrix w_state(int n) {
    const std::size_t dim = std::size_t{1} << n;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
    for (int i = 0; i < n; ++i)
        psi(static_cast<Eigen::Index>(std::size_t{1} << i)) = 1.0 / std::sqrt(static_cast<double>(n));
    return psi * psi.adjoint();
}

/// cos(theta)|0...0> + sin(theta)|1...1>.
inline ComplexMatrix ghz_state(int n, double theta) {
    const std::size_t dim = std::size_t{1} << n;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
    psi(0) = std::cos(theta);
    psi(static_cast<Eigen::Index>(dim - 1)) = std::sin(theta);
    return psi * psi.adjoint();
}

inline void check_density_matrix(const ComplexMatrix &rho, double tol = 1e-10) {
    if (rho.rows() != rho.cols() || rho.rows() == 0 || (rho.rows() & (rho.rows() - 1)) != 0)
        throw InvalidStateError("density matrix must be square with a power-of-two size");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol)
        throw InvalidStateError("density matrix is not Hermitian");
    if (std::abs(rho.trace() - std::complex<double>(1.0)) > tol)
        throw InvalidStateError("density matrix does not have unit trace");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho);
    if (es.eigenvalues().minCoeff() < -tol)
        throw InvalidStateError("density matrix is not positive semidefinite");
}

/// T[mu] = Tr[rho (s_mu1 x ... x s_mun)] for mu in {I, X, Y, Z}^n, mu_1 most
/// significant. Every projective qubit statistic is a contraction of T.
class PauliTensor {
  public:
    PauliTensor() = default;
    explicit PauliTensor(const ComplexMatrix &rho) {
        check_density_matrix(rho);
        n_ = 0;
        while ((Eigen::Index{1} << n_) < rho.rows())
            ++n_;
        std::size_t count = 1;
        for (int i = 0; i < n_; ++i)
            count *= 4;
        t_.assign(count, 0.0);
        const std::size_t dim = std::size_t{1} << n_;
        // Tr[rho P] = sum_{r} (P rho)_{rr}; P is a signed/phased permutation.
        for (std::size_t mu = 0; mu < count; ++mu) {
            std::vector<int> digits(n_);
            std::size_t rest = mu;
            for (int i = n_ - 1; i >= 0; --i) {
                digits[i] = static_cast<int>(rest % 4);
                rest /= 4;
            }
            std::complex<double> tr = 0;
            for (std::size_t r = 0; r < dim; ++r) {
                // (P)_{r,c} nonzero for one column c.
                std::size_t c = r;
                std::complex<double> amp = 1;
                for (int i = 0; i < n_; ++i) {
                    const int shift = n_ - 1 - i;
                    const int bit = static_cast<int>((r >> shift) & 1u);
                    if (digits[i] == 1) {
                        c ^= std::size_t{1} << shift;
                    } else if (digits[i] == 2) {
                        c ^= std::size_t{1} << shift;
                        amp *= bit == 0 ? std::complex<double>(0, -1) : std::complex<double>(0, 1);
                    } else if (digits[i] == 3 && bit == 1) {
                        amp = -amp;
                    }
                }
                tr += amp * rho(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r));
            }
            t_[mu] = tr.real();
        }
    }

    int qubits() const { return n_; }
    const std::vector<double> &values() const { return t_; }

    /// sum_mu T[mu] prod_i w_i[mu_i], with w_i a length-4 weight vector per qubit.
    double contract(std::span<const std::array<double, 4>> w, double visibility = 1.0) const {
        // Successive contraction over the last index.
        std::vector<double> cur(t_);
        std::size_t len = cur.size();
        for (int i = n_ - 1; i >= 0; --i) {
            len /= 4;
            for (std::size_t j = 0; j < len; ++j)
                cur[j] = cur[4 * j] * w[i][0] + cur[4 * j + 1] * w[i][1] + cur[4 * j + 2] * w[i][2] +
                         cur[4 * j + 3] * w[i][3];
        }
        // Noise keeps T[0...0] = 1 and scales every other component by v.
        double constant = t_[0];
        for (int i = 0; i < n_; ++i)
            constant *= w[i][0];
        return visibility * cur[0] + (1.0 - visibility) * constant;
    }

  private:
    int n_ = 0;
    std::vector<double> t_;
};

/// A measurement configuration: each party measures cos(phi) X + sin(phi) Y,
/// tilted to sin(t)(cos(phi) X + sin(phi) Y) + cos(t) Z when polar angles t
/// are given; the +1 eigenspace is outcome 0.
struct QuantumSetup {
    ComplexMatrix state;
    std::vector<std::vector<double>> angles; // angles[party][setting]
    double visibility = 1.0;
    std::vector<std::vector<double>> polar;  // empty: x-y plane

    int parties() const { return static_cast<int>(angles.size()); }
    int settings() const { return angles.empty() ? 0 : static_cast<int>(angles.front().size()); }
    Scenario scenario(Model model = Model::Local) const { return {parties(), settings(), 2, model}; }
};

/// Numerical correlations in full-probability order.
struct NumericCorrelation {
    Scenario scenario;
    std::vector<double> full;

    std::vector<double> no_signalling() const { return full_to_no_signalling<double>(scenario, full); }
    std::vector<double> correlators() const {
        return no_signalling_to_correlator<double>(scenario, no_signalling());
    }
    std::vector<double> full_correlators() const { return full_to_full_correlators<double>(scenario, full); }
};

inline NumericCorrelation correlations(const PauliTensor &t, const std::vector<std::vector<double>> &angles,
                                       double visibility = 1.0,
                                       const std::vector<std::vector<double>> &polar = {}) {
    const int n = static_cast<int>(angles.size());
    if (n != t.qubits())
        throw DimensionMismatchError("angle table does not match the number of qubits");
    if (visibility < 0 || visibility > 1)
        throw PreconditionError("visibility must lie in [0, 1]");
    const int m = n == 0 ? 0 : static_cast<int>(angles.front().size());
    for (const auto &row : angles)
        if (static_cast<int>(row.size()) != m)
            throw DimensionMismatchError("every party needs the same number of settings");
    if (!polar.empty() && (polar.size() != angles.size() ||
                           std::any_of(polar.begin(), polar.end(), [&](const auto &r) {
                               return static_cast<int>(r.size()) != m;
                           })))
        throw DimensionMismatchError("polar angle table does not match the azimuthal one");
    Scenario s{n, m, 2, Model::Local};
    auto fi = full_index(s);
    NumericCorrelation out{s, std::vector<double>(fi.size())};
    std::vector<std::array<double, 4>> w(n);
    for (std::size_t si = 0; si < fi.settings_count(); ++si) {
        auto settings = FullIndex::tuple_of(si, n, m);
        for (std::size_t ri = 0; ri < fi.outcomes_count(); ++ri) {
            auto outcomes = FullIndex::tuple_of(ri, n, 2);
            for (int i = 0; i < n; ++i) {
                const double phi = angles[i][settings[i]];
                const double sign = outcomes[i] == 0 ? 0.5 : -0.5;
                const double t = polar.empty() ? std::numbers::pi / 2 : polar[i][settings[i]];
                w[i] = {0.5, sign * std::sin(t) * std::cos(phi), sign * std::sin(t) * std::sin(phi),
                        sign * std::cos(t)};
            }
            out.full[si * fi.outcomes_count() + ri] = t.contract(w, visibility);
        }
    }
    return out;
}

inline NumericCorrelation correlations(const QuantumSetup &setup) {
    return correlations(PauliTensor(setup.state), setup.angles, setup.visibility, setup.polar);
}

/// h . p - h0 on numerical correlations (positive means violation).
inline double evaluate(const Inequality &ineq, const NumericCorrelation &p) {
    if (ineq.symmetric_basis)
        throw PreconditionError("extend class-basis inequalities before evaluating");
    std::vector<double> x;
    switch (ineq.param) {
    case Param::FullProbability: x = p.full; break;
    case Param::NoSignalling: x = p.no_signalling(); break;
    case Param::Correlator: x = p.correlators(); break;
    case Param::FullCorrelatorOnly: x = p.full_correlators(); break;
    }
    if (x.size() != ineq.coeffs.size())
        throw DimensionMismatchError("inequality and correlations belong to different scenarios");
    double v = -ineq.bound.get_d();
    for (std::size_t i = 0; i < x.size(); ++i)
        if (sgn(ineq.coeffs[i]) != 0)
            v += ineq.coeffs[i].get_d() * x[i];
    return v;
}

/// Correlator-form value sum c E (to be compared with c(0)).
inline double evaluate(const CorrelatorForm &cf, const NumericCorrelation &p) {
    if (!(cf.scenario.parties == p.scenario.parties && cf.scenario.settings == p.scenario.settings &&
          cf.scenario.outcomes == p.scenario.outcomes))
        throw DimensionMismatchError("form and correlations belong to different scenarios");
    auto ns = p.no_signalling();
    auto e = all_outcome_correlators<double>(cf.scenario, ns);
    double v = 0;
    for (std::size_t i = 0; i < e.size(); ++i)
        if (sgn(cf.coeffs[i]) != 0)
            v += cf.coeffs[i].get_d() * e[i];
    return v;
}

/// Smallest visibility with a violation, by bisection to `tol`. The value is
/// only assumed to be nonpositive at v = 0 and positive at v = 1.
inline double visibility_threshold(const Inequality &ineq, const QuantumSetup &setup, double tol = 1e-9) {
    PauliTensor t(setup.state);
    auto value = [&](double v) { return evaluate(ineq, correlations(t, setup.angles, v, setup.polar)); };
    if (value(1.0) <= 0)
        throw NoViolationError("the setup does not violate the inequality at full visibility");
    if (value(0.0) > 0)
        throw PreconditionError("white noise violates the inequality; it is not a valid Bell inequality");
    double lo = 0, hi = 1;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (value(mid) > 0)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

struct AngleSearch {
    std::vector<double> parameters; // angles shared by all parties
    double value = 0;
};

/// Maximizes `objective` over symmetric settings (party-independent angle per
/// setting) for m = 2: a regular grid on [-pi, pi]^2, then alternating
/// golden-section refinement around the best cell.
inline AngleSearch optimize_symmetric_angles(const std::function<double(double, double)> &objective,
                                             int grid = 721, int sweeps = 30) {
    if (grid < 2)
        throw PreconditionError("grid needs at least two points per angle");
    const double pi = std::numbers::pi;
    const double step = 2 * pi / (grid - 1);
    AngleSearch best{{0, 0}, -std::numeric_limits<double>::infinity()};
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            double a = -pi + i * step, b = -pi + j * step;
            double v = objective(a, b);
            if (v > best.value)
                best = {{a, b}, v};
        }
    const double phi = (std::sqrt(5.0) - 1) / 2;
    auto golden = [&](const std::function<double(double)> &f, double lo, double hi) {
        double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
        double f1 = f(x1), f2 = f(x2);
        for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = f(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = f(x1);
            }
        }
        return 0.5 * (lo + hi);
    };
    for (int sw = 0; sw < sweeps; ++sw) {
        double a = golden([&](double x) { return objective(x, best.parameters[1]); }, best.parameters[0] - step,
                          best.parameters[0] + step);
        double va = objective(a, best.parameters[1]);
        if (va >= best.value)
            best = {{a, best.parameters[1]}, va};
        double b = golden([&](double y) { return objective(best.parameters[0], y); }, best.parameters[1] - step,
                          best.parameters[1] + step);
        double vb = objective(best.parameters[0], b);
        if (vb >= best.value)
            best = {{best.parameters[0], b}, vb};
    }
    return best;
}

/// Best symmetric two-setting x-y measurements for an inequality on a state.
inline AngleSearch optimize_symmetric_angles(const Inequality &ineq, const ComplexMatrix &state, int grid = 721) {
    PauliTensor t(state);
    const int n = t.qubits();
    return optimize_symmetric_angles(
        [&](double a, double b) {
            std::vector<std::vector<double>> angles(n, std::vector<double>{a, b});
            return evaluate(ineq, correlations(t, angles));
        },
        grid);
}

/// Symmetric Bloch-vector measurements for `settings` settings: parameters
/// hold the azimuths then the polar angles. Multistart compass search from a
/// fixed seed, so repeated calls agree.
inline AngleSearch optimize_symmetric_bloch(const Inequality &ineq, const ComplexMatrix &state, int settings = 2,
                                            int starts = 200, unsigned seed = 1) {
    PauliTensor t(state);
    const int n = t.qubits();
    const std::size_t dim = 2 * static_cast<std::size_t>(settings);
    auto f = [&](const std::vector<double> &x) {
        std::vector<double> az(x.begin(), x.begin() + settings), po(x.begin() + settings, x.end());
        return evaluate(ineq, correlations(t, std::vector<std::vector<double>>(n, az), 1.0,
                                           std::vector<std::vector<double>>(n, po)));
    };
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    AngleSearch best{std::vector<double>(dim, 0.0), -std::numeric_limits<double>::infinity()};
    for (int r = 0; r < starts; ++r) {
        std::vector<double> x(dim);
        for (auto &c : x)
            c = angle(rng);
        double v = f(x);
        for (double step = 0.5; step > 1e-8;) {
            bool moved = false;
            for (std::size_t i = 0; i < dim; ++i)
                for (double d : {step, -step}) {
                    auto y = x;
                    y[i] += d;
                    double w = f(y);
                    if (w > v) {
                        v = w;
                        x = std::move(y);
                        moved = true;
                    }
                }
            if (!moved)
                step /= 2;
        }
        if (v > best.value)
            best = {x, v};
    }
    return best;
}

} // namespace bellscope
