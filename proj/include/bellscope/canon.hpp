#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "correlation.hpp"
#include "polytope.hpp"
#include "scenario.hpp"

namespace bellscope {

/// Inequality sum c(a_I,x_I) E(a_I|x_I) <= c(0) over the overcomplete
/// correlator basis (all outcomes 0..k-1), indexed by correlator_basis_index.
struct CorrelatorForm {
    Scenario scenario;
    RationalVector coeffs;
    Rational bound = 0;
    bool normalized = false;

    friend bool operator==(const CorrelatorForm &, const CorrelatorForm &) = default;
};

namespace detail {

inline int cg_state_to_basis(int st, int k) { return st < 0 ? -1 : (st / (k - 1)) * k + st % (k - 1); }

/// Expands p(a_J|x_J) (outcomes in 0..k-1, absent parties = -1 in `states`)
/// into Collins-Gisin coordinates; f(sign, cg_index) with npos = constant 1.
inline void expand_marginal(const Scenario &s, const MarginalIndex &cg, std::span<const int> states,
                            const std::function<void(int, std::size_t)> &f) {
    const int n = s.parties, k = s.outcomes;
    std::vector<int> st(n, -1);
    std::function<void(int, int)> rec = [&](int party, int sign) {
        if (party == n) {
            f(sign, cg.index_of_states(st));
            return;
        }
        if (states[party] < 0) {
            rec(party + 1, sign);
            return;
        }
        int x = states[party] / k, a = states[party] % k;
        if (a < k - 1) {
            st[party] = x * (k - 1) + a;
            rec(party + 1, sign);
        } else {
            st[party] = -1;
            rec(party + 1, sign);
            for (int b = 0; b < k - 1; ++b) {
                st[party] = x * (k - 1) + b;
                rec(party + 1, -sign);
            }
        }
        st[party] = -1;
    };
    rec(0, 1);
}

} // namespace detail

/// Correlators E(a_I|x_I) for every outcome 0..k-1, from Collins-Gisin coordinates.
template <class T>
std::vector<T> all_outcome_correlators(const Scenario &s, std::span<const T> ns) {
    const auto &cg = collins_gisin_index(s);
    const auto &basis = correlator_basis_index(s);
    const int k = s.outcomes;
    auto prob = [&](const std::vector<int> &states) {
        T v = T(0);
        detail::expand_marginal(s, cg, states, [&](int sign, std::size_t j) {
            const T term = j == MarginalIndex::npos ? T(1) : ns[j];
            if (sign > 0)
                v += term;
            else
                v -= term;
        });
        return v;
    };
    std::vector<T> out(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        auto st = basis.states(i);
        const auto &present = basis.term(i).parties;
        const int size = static_cast<int>(present.size());
        T e = T(0);
        for (unsigned mask = 0; mask < (1u << size); ++mask) {
            int sub = detail::popcount(mask);
            T w = T(1);
            for (int j = 0; j < sub; ++j)
                w *= T(k);
            T q = mask == 0 ? T(1) : prob(restrict_states(st, present, mask));
            if ((size - sub) % 2 == 0)
                e += w * q;
            else
                e -= w * q;
        }
        out[i] = e;
    }
    return out;
}

/// Rewrites an inequality in Collins-Gisin coordinates. Full-probability
/// inequalities are read on the no-signalling subspace (their signalling
/// component is dropped).
inline Inequality to_no_signalling(const Inequality &ineq, const Scenario &s) {
    if (ineq.symmetric_basis)
        throw PreconditionError("extend class-basis inequalities to the full space first");
    Inequality out;
    out.param = Param::NoSignalling;
    out.provenance = ineq.provenance;
    const auto &cg = collins_gisin_index(s);
    out.coeffs.assign(cg.size(), Rational(0));
    Rational constant = 0;
    switch (ineq.param) {
    case Param::NoSignalling: return ineq;
    case Param::FullProbability: {
        auto fi = full_index(s);
        for (std::size_t j = 0; j < ineq.coeffs.size(); ++j) {
            if (sgn(ineq.coeffs[j]) == 0)
                continue;
            auto settings = FullIndex::tuple_of(j / fi.outcomes_count(), s.parties, s.settings);
            auto outcomes = FullIndex::tuple_of(j % fi.outcomes_count(), s.parties, s.outcomes);
            expand_full_probability(s, cg, settings, outcomes, [&](int sign, std::size_t t) {
                Rational &dst = t == MarginalIndex::npos ? constant : out.coeffs[t];
                if (sign > 0)
                    dst += ineq.coeffs[j];
                else
                    dst -= ineq.coeffs[j];
            });
        }
        break;
    }
    case Param::Correlator: {
        // E(t) = sum_{J subset I} (-1)^{|I|-|J|} k^{|J|} p(t_J)
        for (std::size_t i = 0; i < cg.size(); ++i) {
            if (sgn(ineq.coeffs[i]) == 0)
                continue;
            auto st = cg.states(i);
            const auto &present = cg.term(i).parties;
            const int size = static_cast<int>(present.size());
            for (unsigned mask = 0; mask < (1u << size); ++mask) {
                int sub = detail::popcount(mask);
                Rational w = ineq.coeffs[i];
                for (int q = 0; q < sub; ++q)
                    w *= s.outcomes;
                if ((size - sub) % 2)
                    w = -w;
                if (mask == 0)
                    constant += w;
                else
                    out.coeffs[cg.index_of_states(restrict_states(st, present, mask))] += w;
            }
        }
        break;
    }
    case Param::FullCorrelatorOnly: {
        if (s.outcomes != 2)
            throw UnsupportedError("full correlators require k = 2");
        Inequality corr;
        corr.param = Param::Correlator;
        corr.coeffs.assign(cg.size(), Rational(0));
        corr.bound = ineq.bound;
        std::vector<int> st(s.parties);
        for (std::size_t si = 0; si < ineq.coeffs.size(); ++si) {
            auto settings = FullIndex::tuple_of(si, s.parties, s.settings);
            for (int p = 0; p < s.parties; ++p)
                st[p] = settings[p];
            corr.coeffs[cg.index_of_states(st)] = ineq.coeffs[si];
        }
        auto res = to_no_signalling(corr, s);
        res.provenance = ineq.provenance;
        return res;
    }
    }
    out.bound = ineq.bound - constant;
    return out;
}

inline CorrelatorForm to_correlator_form(const Inequality &ineq, const Scenario &s) {
    auto ns = ineq.param == Param::NoSignalling ? ineq : to_no_signalling(ineq, s);
    const auto &cg = collins_gisin_index(s);
    const auto &basis = correlator_basis_index(s);
    const int k = s.outcomes;
    CorrelatorForm cf{s, RationalVector(basis.size()), 0, false};
    Rational constant = 0;
    std::vector<int> bst(s.parties);
    // p(t) = k^{-|I|} sum_{J subset I} E(t_J)
    for (std::size_t i = 0; i < cg.size(); ++i) {
        if (sgn(ns.coeffs[i]) == 0)
            continue;
        auto st = cg.states(i);
        const auto &present = cg.term(i).parties;
        const int size = static_cast<int>(present.size());
        Rational w = ns.coeffs[i];
        for (int q = 0; q < size; ++q)
            w /= k;
        for (unsigned mask = 0; mask < (1u << size); ++mask) {
            if (mask == 0) {
                constant += w;
                continue;
            }
            auto sub = restrict_states(st, present, mask);
            for (int p = 0; p < s.parties; ++p)
                bst[p] = detail::cg_state_to_basis(sub[p], k);
            cf.coeffs[basis.index_of_states(bst)] += w;
        }
    }
    cf.bound = ns.bound - constant;
    return cf;
}

/// c' = [prod_i (Id - (1/k) sum_{a_i})] c, applied on every block (I, x_I).
inline CorrelatorForm normalize(CorrelatorForm cf) {
    const auto &s = cf.scenario;
    const auto &basis = correlator_basis_index(s);
    const int k = s.outcomes;
    std::vector<std::size_t> line(k);
    for (int party = 0; party < s.parties; ++party) {
        for (std::size_t j = 0; j < basis.size(); ++j) {
            auto st = basis.states(j);
            if (st[party] < 0 || st[party] % k != 0)
                continue;
            Rational mean = 0;
            for (int a = 0; a < k; ++a) {
                st[party] = (st[party] / k) * k + a;
                line[a] = basis.index_of_states(st);
                mean += cf.coeffs[line[a]];
            }
            if (sgn(mean) == 0)
                continue;
            mean /= k;
            for (int a = 0; a < k; ++a)
                cf.coeffs[line[a]] -= mean;
        }
    }
    cf.normalized = true;
    return cf;
}

/// Positive rescaling making (c, c0) a primitive integer vector.
inline CorrelatorForm scale_fixed(CorrelatorForm cf) {
    RationalVector all(cf.coeffs);
    all.push_back(cf.bound);
    Rational sc = primitive_scale(all);
    for (auto &c : cf.coeffs)
        c *= sc;
    cf.bound *= sc;
    return cf;
}

/// Normalized, scale-fixed correlator form: the unique representative used
/// for invariants and equivalence tests.
inline CorrelatorForm canonical_correlator_form(const Inequality &ineq, const Scenario &s) {
    return scale_fixed(normalize(to_correlator_form(ineq, s)));
}

/// sum c E evaluated on a no-signalling point.
inline Rational form_value(const CorrelatorForm &cf, std::span<const Rational> ns) {
    auto e = all_outcome_correlators<Rational>(cf.scenario, ns);
    return dot(cf.coeffs, e);
}

/// Sorted coefficient lists per interaction order |I| = 1..n, plus the bound.
struct EquivalenceKey {
    Rational bound = 0;
    std::vector<RationalVector> orders;

    friend bool operator==(const EquivalenceKey &a, const EquivalenceKey &b) {
        return a.bound == b.bound && a.orders == b.orders;
    }
    friend bool operator<(const EquivalenceKey &a, const EquivalenceKey &b) {
        if (a.bound != b.bound)
            return a.bound < b.bound;
        return a.orders < b.orders;
    }
};

inline EquivalenceKey invariants(const CorrelatorForm &cf) {
    if (!cf.normalized)
        throw PreconditionError("invariants are defined on normalized forms");
    auto fixed = scale_fixed(cf);
    const auto &basis = correlator_basis_index(cf.scenario);
    EquivalenceKey key;
    key.bound = fixed.bound;
    key.orders.assign(cf.scenario.parties, {});
    for (std::size_t j = 0; j < basis.size(); ++j)
        key.orders[basis.term(j).order() - 1].push_back(fixed.coeffs[j]);
    for (auto &o : key.orders)
        std::sort(o.begin(), o.end());
    return key;
}

/// Relabeling of parties, of settings per party, and of outcomes per party
/// and setting. party[i] is the image of party i; setting[i][x] the image of
/// setting x of party i; outcome[i][x][a] the image of outcome a.
struct Relabeling {
    std::vector<int> party;
    std::vector<std::vector<int>> setting;
    std::vector<std::vector<std::vector<int>>> outcome;

    static Relabeling identity(const Scenario &s) {
        Relabeling g;
        g.party.resize(s.parties);
        std::iota(g.party.begin(), g.party.end(), 0);
        std::vector<int> ms(s.settings), ks(s.outcomes);
        std::iota(ms.begin(), ms.end(), 0);
        std::iota(ks.begin(), ks.end(), 0);
        g.setting.assign(s.parties, ms);
        g.outcome.assign(s.parties, std::vector<std::vector<int>>(s.settings, ks));
        return g;
    }
};

/// Image of a correlator form: coefficient of (I,x,a) moves to its relabeled index.
inline CorrelatorForm relabel(const CorrelatorForm &cf, const Relabeling &g) {
    const auto &s = cf.scenario;
    const auto &basis = correlator_basis_index(s);
    const int k = s.outcomes;
    CorrelatorForm out = cf;
    std::vector<int> img(s.parties);
    for (std::size_t j = 0; j < basis.size(); ++j) {
        auto st = basis.states(j);
        std::fill(img.begin(), img.end(), -1);
        for (int p = 0; p < s.parties; ++p) {
            if (st[p] < 0)
                continue;
            int x = st[p] / k, a = st[p] % k;
            img[g.party[p]] = g.setting[p][x] * k + g.outcome[p][x][a];
        }
        out.coeffs[basis.index_of_states(img)] = cf.coeffs[j];
    }
    return out;
}

/// Relabels an inequality given in Collins-Gisin coordinates (through its
/// correlator form; the result is expressed back in Collins-Gisin form).
Inequality from_correlator_form(const CorrelatorForm &cf);

enum class Equivalence { Equivalent, Inequivalent, Undecided };

struct EquivalenceResult {
    Equivalence verdict = Equivalence::Undecided;
    std::optional<Relabeling> witness;
    std::size_t nodes = 0;
};

namespace detail {

/// Backtracking search for a relabeling mapping form `a` onto form `b`,
/// party by party and setting by setting, checking every coefficient as
/// soon as all of its parties are assigned.
class RelabelingSearch {
  public:
    RelabelingSearch(const CorrelatorForm &a, const CorrelatorForm &b, std::size_t budget)
        : a_(a), b_(b), s_(a.scenario), basis_(correlator_basis_index(a.scenario)), budget_(budget) {
        const int n = s_.parties, m = s_.settings;
        const int k = s_.outcomes;
        terms_.assign(n, std::vector<std::vector<std::size_t>>(m));
        states_.reserve(basis_.size());
        for (std::size_t j = 0; j < basis_.size(); ++j) {
            const auto &t = basis_.term(j);
            states_.push_back(basis_.states(j));
            int last = t.parties.back();
            terms_[last][t.settings.back()].push_back(j);
        }
        g_ = Relabeling::identity(s_);
        used_party_.assign(n, false);
        used_setting_.assign(n, std::vector<bool>(m, false));
        perms_.clear();
        std::vector<int> p(k);
        std::iota(p.begin(), p.end(), 0);
        do {
            perms_.push_back(p);
        } while (std::next_permutation(p.begin(), p.end()));
        img_.resize(n);
    }

    EquivalenceResult run() {
        EquivalenceResult r;
        if (a_.bound != b_.bound) {
            r.verdict = Equivalence::Inequivalent;
            return r;
        }
        bool found = party(0);
        r.nodes = nodes_;
        if (found) {
            r.verdict = Equivalence::Equivalent;
            r.witness = g_;
        } else {
            r.verdict = aborted_ ? Equivalence::Undecided : Equivalence::Inequivalent;
        }
        return r;
    }

  private:
    bool party(int i) {
        if (i == s_.parties)
            return true;
        for (int t = 0; t < s_.parties; ++t) {
            if (used_party_[t])
                continue;
            used_party_[t] = true;
            g_.party[i] = t;
            std::fill(used_setting_[i].begin(), used_setting_[i].end(), false);
            if (setting(i, 0))
                return true;
            used_party_[t] = false;
            if (aborted_)
                return false;
        }
        return false;
    }

    bool setting(int i, int x) {
        if (x == s_.settings)
            return party(i + 1);
        for (int y = 0; y < s_.settings; ++y) {
            if (used_setting_[i][y])
                continue;
            used_setting_[i][y] = true;
            g_.setting[i][x] = y;
            for (const auto &perm : perms_) {
                if (++nodes_ > budget_) {
                    aborted_ = true;
                    return false;
                }
                g_.outcome[i][x] = perm;
                if (consistent(i, x) && setting(i, x + 1))
                    return true;
                if (aborted_)
                    return false;
            }
            used_setting_[i][y] = false;
        }
        return false;
    }

    bool consistent(int i, int x) {
        const int k = s_.outcomes;
        for (auto j : terms_[i][x]) {
            const auto &st = states_[j];
            std::fill(img_.begin(), img_.end(), -1);
            for (int p = 0; p <= i; ++p) {
                if (st[p] < 0)
                    continue;
                int sx = st[p] / k, sa = st[p] % k;
                img_[g_.party[p]] = g_.setting[p][sx] * k + g_.outcome[p][sx][sa];
            }
            if (a_.coeffs[j] != b_.coeffs[basis_.index_of_states(img_)])
                return false;
        }
        return true;
    }

    const CorrelatorForm &a_;
    const CorrelatorForm &b_;
    Scenario s_;
    const MarginalIndex &basis_;
    std::vector<std::vector<int>> states_;
    std::size_t budget_;
    std::size_t nodes_ = 0;
    bool aborted_ = false;
    // terms_[i][x]: basis indices whose last party is i, at setting x.
    std::vector<std::vector<std::vector<std::size_t>>> terms_;
    Relabeling g_;
    std::vector<bool> used_party_;
    std::vector<std::vector<bool>> used_setting_;
    std::vector<std::vector<int>> perms_;
    std::vector<int> img_;
};

} // namespace detail

inline constexpr std::size_t default_search_budget = 20'000'000;

/// Decides equivalence of two canonical (normalized, scale-fixed) forms.
inline EquivalenceResult are_equivalent_forms(const CorrelatorForm &a, const CorrelatorForm &b,
                                              std::size_t budget = default_search_budget) {
    if (!(a.scenario == b.scenario))
        throw PreconditionError("forms over different scenarios");
    if (!(invariants(a) == invariants(b)))
        return {Equivalence::Inequivalent, std::nullopt, 0};
    return detail::RelabelingSearch(a, b, budget).run();
}

inline EquivalenceResult are_equivalent(const Inequality &a, const Inequality &b, const Scenario &s,
                                        std::size_t budget = default_search_budget) {
    return are_equivalent_forms(canonical_correlator_form(a, s), canonical_correlator_form(b, s), budget);
}

/// Lifting analysis of a normalized form.
struct LiftingInfo {
    bool genuine = true;
    std::vector<std::string> details;
};

inline LiftingInfo detect_lifting(const CorrelatorForm &cf) {
    if (!cf.normalized)
        throw PreconditionError("detect_lifting needs a normalized form");
    const auto &s = cf.scenario;
    const auto &basis = correlator_basis_index(s);
    const int k = s.outcomes;
    LiftingInfo info;
    for (int p = 0; p < s.parties; ++p) {
        for (int x = 0; x < s.settings; ++x) {
            bool unused = true;
            for (std::size_t j = 0; j < basis.size() && unused; ++j) {
                auto st = basis.states(j);
                if (st[p] >= 0 && st[p] / k == x && sgn(cf.coeffs[j]) != 0)
                    unused = false;
            }
            if (unused) {
                info.genuine = false;
                info.details.push_back("setting lifting: party " + std::to_string(p) + " setting " +
                                       std::to_string(x) + " unused");
                continue;
            }
            for (int a1 = 0; a1 < k; ++a1)
                for (int a2 = a1 + 1; a2 < k; ++a2) {
                    bool merged = true;
                    for (std::size_t j = 0; j < basis.size() && merged; ++j) {
                        auto st = basis.states(j);
                        if (st[p] != x * k + a1)
                            continue;
                        st[p] = x * k + a2;
                        merged = cf.coeffs[j] == cf.coeffs[basis.index_of_states(st)];
                    }
                    if (merged) {
                        info.genuine = false;
                        info.details.push_back("outcome lifting: party " + std::to_string(p) + " setting " +
                                               std::to_string(x) + " outcomes " + std::to_string(a1) +
                                               "," + std::to_string(a2) + " merged");
                    }
                }
        }
    }
    return info;
}

/// Critical visibility c(0) / value for white-noise mixing.
inline Rational noise_resistance(const CorrelatorForm &cf, const Rational &violation_value) {
    if (violation_value <= cf.bound)
        throw NoViolationError("value " + to_string(violation_value) + " does not exceed the bound " +
                               to_string(cf.bound));
    return cf.bound / violation_value;
}

inline double noise_resistance(const CorrelatorForm &cf, double violation_value) {
    double bound = cf.bound.get_d();
    if (violation_value <= bound)
        throw NoViolationError("value does not exceed the local bound");
    return bound / violation_value;
}

/// Collins-Gisin form of a correlator-form inequality.
inline Inequality from_correlator_form(const CorrelatorForm &cf) {
    const auto &s = cf.scenario;
    const auto &cg = collins_gisin_index(s);
    const auto &basis = correlator_basis_index(s);
    const int k = s.outcomes;
    Inequality out;
    out.param = Param::NoSignalling;
    out.coeffs.assign(cg.size(), Rational(0));
    Rational constant = 0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (sgn(cf.coeffs[i]) == 0)
            continue;
        auto st = basis.states(i);
        const auto &present = basis.term(i).parties;
        const int size = static_cast<int>(present.size());
        for (unsigned mask = 0; mask < (1u << size); ++mask) {
            int sub = detail::popcount(mask);
            Rational w = cf.coeffs[i];
            for (int q = 0; q < sub; ++q)
                w *= k;
            if ((size - sub) % 2)
                w = -w;
            if (mask == 0) {
                constant += w;
                continue;
            }
            detail::expand_marginal(s, cg, restrict_states(st, present, mask), [&](int sign, std::size_t t) {
                Rational &dst = t == MarginalIndex::npos ? constant : out.coeffs[t];
                if (sign > 0)
                    dst += w;
                else
                    dst -= w;
            });
        }
    }
    out.bound = cf.bound - constant;
    return normalized(std::move(out));
}

/// One equivalence class of a classified list.
struct InequalityClass {
    CorrelatorForm form; // canonical form of the representative
    EquivalenceKey key;
    std::size_t representative = 0;
    std::vector<std::size_t> members;
    bool decided = true; // false if some comparison hit the search budget
};

/// Groups inequalities into relabeling classes. Keys separate classes
/// quickly; equal keys are resolved by the exact search. Deterministic:
/// classes appear in order of their first member.
inline std::vector<InequalityClass> classify(const std::vector<Inequality> &ineqs, const Scenario &s,
                                             std::size_t budget = default_search_budget) {
    std::vector<InequalityClass> classes;
    std::map<EquivalenceKey, std::vector<std::size_t>> by_key;
    std::map<RationalVector, std::size_t> seen_forms;
    for (std::size_t i = 0; i < ineqs.size(); ++i) {
        auto form = canonical_correlator_form(ineqs[i], s);
        RationalVector fingerprint(form.coeffs);
        fingerprint.push_back(form.bound);
        if (auto it = seen_forms.find(fingerprint); it != seen_forms.end()) {
            classes[it->second].members.push_back(i);
            continue;
        }
        auto key = invariants(form);
        auto &bucket = by_key[key];
        std::optional<std::size_t> match;
        bool undecided = false;
        for (auto c : bucket) {
            auto r = detail::RelabelingSearch(form, classes[c].form, budget).run();
            if (r.verdict == Equivalence::Equivalent) {
                match = c;
                break;
            }
            if (r.verdict == Equivalence::Undecided)
                undecided = true;
        }
        if (!match) {
            classes.push_back({form, key, i, {}, !undecided});
            match = classes.size() - 1;
            bucket.push_back(*match);
        }
        classes[*match].members.push_back(i);
        seen_forms.emplace(std::move(fingerprint), *match);
    }
    return classes;
}

} // namespace bellscope
