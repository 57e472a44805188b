#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "numeric.hpp"
#include "scenario.hpp"

namespace bellscope {

/// A point of correlation space in a declared parametrization.
struct CorrelationVector {
    Scenario scenario;
    Param param = Param::FullProbability;
    RationalVector coords;

    friend bool operator==(const CorrelationVector &, const CorrelationVector &) = default;
};

namespace detail {

// Calls f(outcomes) for every outcome tuple of length `len` over 0..k-1.
inline void for_each_tuple(int len, int radix, const std::function<void(const std::vector<int> &)> &f) {
    std::vector<int> t(len, 0);
    while (true) {
        f(t);
        int i = len - 1;
        while (i >= 0 && ++t[i] == radix)
            t[i--] = 0;
        if (i < 0)
            return;
    }
}

inline int popcount(unsigned x) { return __builtin_popcount(x); }

} // namespace detail

/// Marginal p(a_I|x_I) of a full distribution, with the absent parties'
/// settings fixed to `completion` (entries of present parties are ignored).
template <class T>
T marginal(const Scenario &s, std::span<const T> full, std::span<const int> states, int range,
           std::span<const int> completion) {
    const int n = s.parties, k = s.outcomes;
    auto fi = full_index(s);
    std::vector<int> settings(n), outcomes(n);
    std::vector<int> absent;
    for (int i = 0; i < n; ++i) {
        if (states[i] < 0) {
            settings[i] = completion[i];
            absent.push_back(i);
        } else {
            settings[i] = states[i] / range;
            outcomes[i] = states[i] % range;
        }
    }
    T sum = T(0);
    detail::for_each_tuple(static_cast<int>(absent.size()), k, [&](const std::vector<int> &r) {
        for (std::size_t j = 0; j < absent.size(); ++j)
            outcomes[absent[j]] = r[j];
        sum += full[fi.index(settings, outcomes)];
    });
    return sum;
}

/// Collins-Gisin coordinates of a full distribution; absent parties use
/// setting 0 (exact for no-signalling input).
template <class T>
std::vector<T> full_to_no_signalling(const Scenario &s, std::span<const T> full) {
    const auto &idx = collins_gisin_index(s);
    std::vector<int> zeros(s.parties, 0);
    std::vector<T> out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        auto st = idx.states(i);
        out[i] = marginal<T>(s, full, st, s.outcomes - 1, zeros);
    }
    return out;
}

/// Expands p(r|s) into Collins-Gisin terms: calls f(coefficient, cg_index)
/// with cg_index == npos for the constant term.
inline void expand_full_probability(const Scenario &s, const MarginalIndex &cg,
                                    std::span<const int> settings, std::span<const int> outcomes,
                                    const std::function<void(int, std::size_t)> &f) {
    const int n = s.parties, k = s.outcomes;
    std::vector<int> st(n, -1);
    std::function<void(int, int)> rec = [&](int party, int sign) {
        if (party == n) {
            f(sign, cg.index_of_states(st));
            return;
        }
        int r = outcomes[party];
        if (r < k - 1) {
            st[party] = settings[party] * (k - 1) + r;
            rec(party + 1, sign);
        } else {
            st[party] = -1;
            rec(party + 1, sign);
            for (int a = 0; a < k - 1; ++a) {
                st[party] = settings[party] * (k - 1) + a;
                rec(party + 1, -sign);
            }
        }
        st[party] = -1;
    };
    rec(0, 1);
}

template <class T>
std::vector<T> no_signalling_to_full(const Scenario &s, std::span<const T> ns) {
    const auto &cg = collins_gisin_index(s);
    auto fi = full_index(s);
    std::vector<T> full(fi.size(), T(0));
    for (std::size_t si = 0; si < fi.settings_count(); ++si) {
        auto settings = FullIndex::tuple_of(si, s.parties, s.settings);
        for (std::size_t ri = 0; ri < fi.outcomes_count(); ++ri) {
            auto outcomes = FullIndex::tuple_of(ri, s.parties, s.outcomes);
            T v = T(0);
            expand_full_probability(s, cg, settings, outcomes, [&](int sign, std::size_t j) {
                const T term = j == MarginalIndex::npos ? T(1) : ns[j];
                if (sign > 0)
                    v += term;
                else
                    v -= term;
            });
            full[si * fi.outcomes_count() + ri] = v;
        }
    }
    return full;
}

/// Restricts per-party states to the parties in `mask`.
inline std::vector<int> restrict_states(std::span<const int> st, const std::vector<int> &present,
                                        unsigned mask) {
    std::vector<int> out(st.size(), -1);
    for (std::size_t j = 0; j < present.size(); ++j)
        if (mask & (1u << j))
            out[present[j]] = st[present[j]];
    return out;
}

/// E(a_I|x_I) = sum_{J subset I} (-1)^{|I|-|J|} k^{|J|} p(a_J|x_J).
template <class T>
std::vector<T> no_signalling_to_correlator(const Scenario &s, std::span<const T> ns) {
    const auto &cg = collins_gisin_index(s);
    std::vector<T> out(cg.size(), T(0));
    const T k = T(s.outcomes);
    for (std::size_t i = 0; i < cg.size(); ++i) {
        auto st = cg.states(i);
        const auto &present = cg.term(i).parties;
        const int size = static_cast<int>(present.size());
        T e = T(0);
        for (unsigned mask = 0; mask < (1u << size); ++mask) {
            int sub = detail::popcount(mask);
            T w = T(1);
            for (int j = 0; j < sub; ++j)
                w *= k;
            T q = mask == 0 ? T(1) : ns[cg.index_of_states(restrict_states(st, present, mask))];
            if ((size - sub) % 2 == 0)
                e += w * q;
            else
                e -= w * q;
        }
        out[i] = e;
    }
    return out;
}

/// p(a_I|x_I) = k^{-|I|} sum_{J subset I} E(a_J|x_J), with E of the empty set = 1.
template <class T>
std::vector<T> correlator_to_no_signalling(const Scenario &s, std::span<const T> corr) {
    const auto &cg = collins_gisin_index(s);
    std::vector<T> out(cg.size(), T(0));
    for (std::size_t i = 0; i < cg.size(); ++i) {
        auto st = cg.states(i);
        const auto &present = cg.term(i).parties;
        const int size = static_cast<int>(present.size());
        T q = T(0);
        for (unsigned mask = 0; mask < (1u << size); ++mask)
            q += mask == 0 ? T(1) : corr[cg.index_of_states(restrict_states(st, present, mask))];
        T kk = T(1);
        for (int j = 0; j < size; ++j)
            kk *= T(s.outcomes);
        out[i] = q / kk;
    }
    return out;
}

/// Full n-party correlators <A_x B_y ...> for binary outcomes (outcome 0 is +1).
template <class T>
std::vector<T> full_to_full_correlators(const Scenario &s, std::span<const T> full) {
    if (s.outcomes != 2)
        throw UnsupportedError("full correlators require k = 2");
    auto fi = full_index(s);
    std::vector<T> out(fi.settings_count(), T(0));
    for (std::size_t si = 0; si < fi.settings_count(); ++si)
        for (std::size_t ri = 0; ri < fi.outcomes_count(); ++ri) {
            const T &p = full[si * fi.outcomes_count() + ri];
            if (__builtin_popcountll(ri) % 2 == 0)
                out[si] += p;
            else
                out[si] -= p;
        }
    return out;
}

/// Checks the exact no-signalling equalities of a full distribution and
/// throws SignallingError naming the first marginal that depends on the
/// settings of absent parties.
inline void require_no_signalling(const Scenario &s, std::span<const Rational> full) {
    const auto &cg = collins_gisin_index(s);
    std::vector<int> zeros(s.parties, 0);
    for (std::size_t i = 0; i < cg.size(); ++i) {
        auto st = cg.states(i);
        const int absent = s.parties - static_cast<int>(cg.term(i).order());
        if (absent == 0)
            continue;
        Rational ref = marginal<Rational>(s, full, st, s.outcomes - 1, zeros);
        detail::for_each_tuple(s.parties, s.settings, [&](const std::vector<int> &completion) {
            for (int p = 0; p < s.parties; ++p)
                if (st[p] >= 0 && completion[p] != 0)
                    return;
            Rational v = marginal<Rational>(s, full, st, s.outcomes - 1, completion);
            if (v != ref) {
                std::string msg = "marginal " + describe(cg.term(i)) +
                                  " depends on the settings of other parties (residual " +
                                  to_string(Rational(v - ref)) + ")";
                throw SignallingError(msg);
            }
        });
    }
}

inline CorrelationVector convert(const CorrelationVector &p, Param target) {
    const auto &s = p.scenario;
    if (p.coords.size() != space_dimension(s, p.param))
        throw DimensionMismatchError("correlation vector has " + std::to_string(p.coords.size()) +
                                     " coordinates, expected " +
                                     std::to_string(space_dimension(s, p.param)));
    if (p.param == target)
        return p;
    if (target == Param::FullCorrelatorOnly) {
        if (p.param == Param::FullProbability)
            return {s, target, full_to_full_correlators<Rational>(s, p.coords)};
        auto full = convert(p, Param::FullProbability);
        return {s, target, full_to_full_correlators<Rational>(s, full.coords)};
    }
    if (p.param == Param::FullCorrelatorOnly)
        throw UnsupportedError("full-correlator coordinates do not determine a distribution");

    RationalVector ns;
    switch (p.param) {
    case Param::FullProbability:
        require_no_signalling(s, p.coords);
        ns = full_to_no_signalling<Rational>(s, p.coords);
        break;
    case Param::NoSignalling: ns = p.coords; break;
    case Param::Correlator: ns = correlator_to_no_signalling<Rational>(s, p.coords); break;
    default: break;
    }
    switch (target) {
    case Param::FullProbability: return {s, target, no_signalling_to_full<Rational>(s, ns)};
    case Param::NoSignalling: return {s, target, std::move(ns)};
    case Param::Correlator: return {s, target, no_signalling_to_correlator<Rational>(s, ns)};
    default: break;
    }
    throw UnsupportedError("unsupported conversion");
}

struct NormalizationFailure {
    std::vector<int> settings;
    Rational residual; // sum of probabilities minus one
};

struct NegativityFailure {
    std::size_t full_index;
    Rational value;
};

struct SignallingFailure {
    int varied_party;           // party whose setting changes the marginal
    std::vector<int> settings;  // settings of the remaining parties (varied_party entry = 1..m-1)
    std::vector<int> outcomes;  // outcomes of the remaining parties (varied_party entry unused)
    Rational residual;          // marginal at this setting minus marginal at setting 0
};

/// Diagnostic report: exact residuals for every failed check.
struct ValidationReport {
    std::vector<NormalizationFailure> normalization;
    std::vector<NegativityFailure> negativity;
    std::vector<SignallingFailure> signalling;

    bool normalized() const { return normalization.empty(); }
    bool nonnegative() const { return negativity.empty(); }
    bool no_signalling() const { return signalling.empty(); }
    bool ok() const { return normalized() && nonnegative() && no_signalling(); }
};

inline ValidationReport validate_distribution(const CorrelationVector &p) {
    ValidationReport rep;
    const auto &s = p.scenario;
    if (p.param == Param::FullCorrelatorOnly) {
        for (std::size_t i = 0; i < p.coords.size(); ++i)
            if (abs(p.coords[i]) > 1)
                rep.negativity.push_back({i, p.coords[i]});
        return rep;
    }
    RationalVector full = p.param == Param::FullProbability
                              ? p.coords
                              : convert(p, Param::FullProbability).coords;
    auto fi = full_index(s);
    const int n = s.parties, k = s.outcomes;
    for (std::size_t i = 0; i < full.size(); ++i)
        if (sgn(full[i]) < 0)
            rep.negativity.push_back({i, full[i]});
    for (std::size_t si = 0; si < fi.settings_count(); ++si) {
        Rational sum = 0;
        for (std::size_t ri = 0; ri < fi.outcomes_count(); ++ri)
            sum += full[si * fi.outcomes_count() + ri];
        if (sum != 1)
            rep.normalization.push_back({FullIndex::tuple_of(si, n, s.settings), sum - 1});
    }
    // For each party: summing out its outcome must not depend on its setting.
    for (int party = 0; party < n; ++party) {
        for (std::size_t si = 0; si < fi.settings_count(); ++si) {
            auto settings = FullIndex::tuple_of(si, n, s.settings);
            if (settings[party] == 0)
                continue;
            auto ref_settings = settings;
            ref_settings[party] = 0;
            for (std::size_t ri = 0; ri < fi.outcomes_count(); ++ri) {
                auto outcomes = FullIndex::tuple_of(ri, n, k);
                if (outcomes[party] != 0)
                    continue;
                Rational here = 0, ref = 0;
                for (int r = 0; r < k; ++r) {
                    outcomes[party] = r;
                    here += full[fi.index(settings, outcomes)];
                    ref += full[fi.index(ref_settings, outcomes)];
                }
                outcomes[party] = 0;
                if (here != ref)
                    rep.signalling.push_back({party, settings, outcomes, here - ref});
            }
        }
    }
    return rep;
}

} // namespace bellscope
