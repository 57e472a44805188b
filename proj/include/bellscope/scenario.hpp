#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"

namespace bellscope {

enum class Model { Local, Svetlichny, FullCorrelator };

enum class Param { FullProbability, NoSignalling, Correlator, FullCorrelatorOnly };

inline std::string to_string(Model m) {
    switch (m) {
    case Model::Local: return "local";
    case Model::Svetlichny: return "svetlichny";
    case Model::FullCorrelator: return "fullcorr";
    }
    return "?";
}

inline Model parse_model(const std::string &s) {
    if (s == "local") return Model::Local;
    if (s == "svetlichny") return Model::Svetlichny;
    if (s == "fullcorr") return Model::FullCorrelator;
    throw ParseError("unknown model '" + s + "'");
}

inline std::string to_string(Param p) {
    switch (p) {
    case Param::FullProbability: return "FullProbability";
    case Param::NoSignalling: return "NoSignalling";
    case Param::Correlator: return "Correlator";
    case Param::FullCorrelatorOnly: return "FullCorrelatorOnly";
    }
    return "?";
}

inline Param parse_param(const std::string &s) {
    if (s == "FullProbability") return Param::FullProbability;
    if (s == "NoSignalling") return Param::NoSignalling;
    if (s == "Correlator") return Param::Correlator;
    if (s == "FullCorrelatorOnly") return Param::FullCorrelatorOnly;
    throw ParseError("unknown parametrization '" + s + "'");
}

/// A Bell scenario: `parties` parties, each choosing among `settings`
/// measurements with `outcomes` results, plus the correlation model.
struct Scenario {
    int parties = 2;
    int settings = 2;
    int outcomes = 2;
    Model model = Model::Local;

    void validate() const {
        if (parties < 1 || settings < 1 || outcomes < 2)
            throw InvalidScenarioError("scenario needs n >= 1, m >= 1, k >= 2");
        if (model == Model::Svetlichny && parties != 3)
            throw InvalidScenarioError("the Svetlichny model is defined for n = 3 only");
        if (model == Model::FullCorrelator && outcomes != 2)
            throw InvalidScenarioError("the full-correlator model requires k = 2");
    }

    friend bool operator==(const Scenario &, const Scenario &) = default;

    std::string label() const {
        return "(" + std::to_string(parties) + "," + std::to_string(settings) + "," +
               std::to_string(outcomes) + ")";
    }
};

namespace detail {

inline std::size_t checked_pow(std::size_t base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (base != 0 && r > std::numeric_limits<std::size_t>::max() / base)
            throw TooLargeError("dimension overflows size_t");
        r *= base;
    }
    return r;
}

} // namespace detail

inline std::size_t space_dimension(const Scenario &s, Param p) {
    s.validate();
    auto n = s.parties;
    auto m = static_cast<std::size_t>(s.settings);
    auto k = static_cast<std::size_t>(s.outcomes);
    switch (p) {
    case Param::FullProbability: return detail::checked_pow(m * k, n);
    case Param::NoSignalling:
    case Param::Correlator: return detail::checked_pow(m * (k - 1) + 1, n) - 1;
    case Param::FullCorrelatorOnly:
        if (k != 2)
            throw UnsupportedError("FullCorrelatorOnly parametrization requires k = 2");
        return detail::checked_pow(m, n);
    }
    return 0;
}

/// A marginal event (a_I | x_I): per party either absent (-1) or a
/// (setting, outcome) pair.
struct MarginalTerm {
    std::vector<int> parties;
    std::vector<int> settings;
    std::vector<int> outcomes;

    std::size_t order() const { return parties.size(); }
    friend bool operator==(const MarginalTerm &, const MarginalTerm &) = default;
};

/// Canonical indexing of marginal events with outcomes restricted to
/// 0..outcome_range-1. With outcome_range = k-1 these are the
/// Collins-Gisin coordinates of the no-signalling space; with
/// outcome_range = k they index the overcomplete correlator basis.
///
/// Order: subsets by size, then lexicographically by party list; inside a
/// subset, settings tuples lexicographically, then outcome tuples.
class MarginalIndex {
  public:
    MarginalIndex() = default;
    MarginalIndex(int parties, int settings, int outcome_range)
        : n_(parties), m_(settings), range_(outcome_range) {
        base_ = static_cast<std::size_t>(m_ * range_ + 1);
        std::size_t codes = detail::checked_pow(base_, n_);
        if (codes > (std::size_t{1} << 26))
            throw TooLargeError("marginal index with " + std::to_string(codes) + " codes");
        std::vector<std::size_t> code_list;
        code_list.reserve(codes - 1);
        for (std::size_t c = 1; c < codes; ++c)
            code_list.push_back(c);
        auto key = [&](std::size_t code) {
            auto t = decode(code);
            return std::make_tuple(t.order(), t.parties, t.settings, t.outcomes);
        };
        std::vector<decltype(key(1))> keys(codes);
        for (auto c : code_list)
            keys[c] = key(c);
        std::sort(code_list.begin(), code_list.end(),
                  [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
        position_.assign(codes, npos);
        terms_.reserve(code_list.size());
        codes_ = code_list;
        for (std::size_t i = 0; i < code_list.size(); ++i) {
            position_[code_list[i]] = i;
            terms_.push_back(decode(code_list[i]));
        }
    }

    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    std::size_t size() const { return terms_.size(); }
    int parties() const { return n_; }
    int settings() const { return m_; }
    int outcome_range() const { return range_; }
    const MarginalTerm &term(std::size_t i) const { return terms_[i]; }
    const std::vector<MarginalTerm> &terms() const { return terms_; }
    std::size_t code(std::size_t i) const { return codes_[i]; }

    /// Per-party state: -1 when the party is absent, else setting*range + outcome.
    std::vector<int> states(std::size_t i) const {
        std::vector<int> st(n_, -1);
        const auto &t = terms_[i];
        for (std::size_t j = 0; j < t.parties.size(); ++j)
            st[t.parties[j]] = t.settings[j] * range_ + t.outcomes[j];
        return st;
    }

    std::size_t index_of_states(std::span<const int> st) const {
        std::size_t code = 0, mult = 1;
        for (int i = 0; i < n_; ++i) {
            code += static_cast<std::size_t>(st[i] + 1) * mult;
            mult *= base_;
        }
        return code == 0 ? npos : position_[code];
    }

    std::size_t index_of(const MarginalTerm &t) const {
        std::vector<int> st(n_, -1);
        for (std::size_t j = 0; j < t.parties.size(); ++j) {
            if (t.outcomes[j] < 0 || t.outcomes[j] >= range_ || t.settings[j] < 0 ||
                t.settings[j] >= m_)
                return npos;
            st[t.parties[j]] = t.settings[j] * range_ + t.outcomes[j];
        }
        return index_of_states(st);
    }

  private:
    MarginalTerm decode(std::size_t code) const {
        MarginalTerm t;
        for (int i = 0; i < n_; ++i) {
            auto s = static_cast<int>(code % base_);
            code /= base_;
            if (s == 0)
                continue;
            t.parties.push_back(i);
            t.settings.push_back((s - 1) / range_);
            t.outcomes.push_back((s - 1) % range_);
        }
        return t;
    }

    int n_ = 0, m_ = 0, range_ = 0;
    std::size_t base_ = 1;
    std::vector<MarginalTerm> terms_;
    std::vector<std::size_t> codes_;
    std::vector<std::size_t> position_;
};

/// Indexing of full joint probabilities p(r|s): settings tuple major,
/// outcome tuple minor, both lexicographic with party 0 most significant.
struct FullIndex {
    int n, m, k;

    std::size_t settings_count() const { return detail::checked_pow(m, n); }
    std::size_t outcomes_count() const { return detail::checked_pow(k, n); }
    std::size_t size() const { return settings_count() * outcomes_count(); }

    std::size_t index(std::span<const int> settings, std::span<const int> outcomes) const {
        return tuple_index(settings, m) * outcomes_count() + tuple_index(outcomes, k);
    }

    static std::size_t tuple_index(std::span<const int> t, int radix) {
        std::size_t i = 0;
        for (int v : t)
            i = i * radix + static_cast<std::size_t>(v);
        return i;
    }

    static std::vector<int> tuple_of(std::size_t idx, int len, int radix) {
        std::vector<int> t(len);
        for (int i = len - 1; i >= 0; --i) {
            t[i] = static_cast<int>(idx % radix);
            idx /= radix;
        }
        return t;
    }
};

inline FullIndex full_index(const Scenario &s) { return {s.parties, s.settings, s.outcomes}; }

namespace detail {

// Indices are immutable once built; share one instance per shape.
inline const MarginalIndex &shared_marginal_index(int n, int m, int range) {
    static std::mutex mutex;
    static std::map<std::tuple<int, int, int>, std::unique_ptr<const MarginalIndex>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto &slot = cache[{n, m, range}];
    if (!slot)
        slot = std::make_unique<const MarginalIndex>(n, m, range);
    return *slot;
}

} // namespace detail

inline const MarginalIndex &collins_gisin_index(const Scenario &s) {
    return detail::shared_marginal_index(s.parties, s.settings, s.outcomes - 1);
}

/// Index of the overcomplete correlator basis E(a_I|x_I), a in 0..k-1.
inline const MarginalIndex &correlator_basis_index(const Scenario &s) {
    return detail::shared_marginal_index(s.parties, s.settings, s.outcomes);
}

/// Human-readable label of a marginal event, e.g. "p(a0=1,b1=0)" reads
/// party a with setting 0 outcome 1 and party b with setting 1 outcome 0.
inline std::string describe(const MarginalTerm &t, const char *symbol = "p") {
    std::string out = std::string(symbol) + "(";
    for (std::size_t j = 0; j < t.parties.size(); ++j) {
        if (j)
            out += ",";
        out += static_cast<char>('a' + t.parties[j]);
        out += std::to_string(t.settings[j]) + "=" + std::to_string(t.outcomes[j]);
    }
    return out + ")";
}

} // namespace bellscope
