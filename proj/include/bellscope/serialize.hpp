#pragma once

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "canon.hpp"
#include "correlation.hpp"
#include "polytope.hpp"
#include "scenario.hpp"
#include "symmetry.hpp"

namespace bellscope {

using Json = nlohmann::ordered_json;

// ---- rationals and vectors -------------------------------------------------

inline Json rational_to_json(const Rational &r) {
    return Json::array({r.get_num().get_str(10), r.get_den().get_str(10)});
}

/// Accepts ["num","den"], "num/den", "num" or a JSON integer.
inline Rational rational_from_json(const Json &j) {
    if (j.is_array()) {
        if (j.size() != 2 || !j[0].is_string() || !j[1].is_string())
            throw ParseError("rational must be [\"num\",\"den\"]");
        return parse_rational(j[0].get<std::string>(), j[1].get<std::string>());
    }
    if (j.is_string())
        return parse_rational(j.get<std::string>());
    if (j.is_number_integer())
        return Rational(j.get<long>());
    throw ParseError("cannot read a rational from " + j.dump());
}

inline Json vector_to_json(std::span<const Rational> v) {
    Json a = Json::array();
    for (const auto &x : v)
        a.push_back(rational_to_json(x));
    return a;
}

inline RationalVector vector_from_json(const Json &j) {
    if (!j.is_array())
        throw ParseError("expected an array of rationals");
    RationalVector v;
    v.reserve(j.size());
    for (const auto &x : j)
        v.push_back(rational_from_json(x));
    return v;
}

inline Json scenario_to_json(const Scenario &s) {
    return Json{{"parties", s.parties}, {"settings", s.settings}, {"outcomes", s.outcomes},
                {"model", to_string(s.model)}};
}

inline Scenario scenario_from_json(const Json &j) {
    Scenario s;
    if (j.is_array() && j.size() == 3) {
        s = {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), Model::Local};
    } else {
        s.parties = j.at("parties").get<int>();
        s.settings = j.at("settings").get<int>();
        s.outcomes = j.at("outcomes").get<int>();
        s.model = parse_model(j.value("model", std::string("local")));
    }
    s.validate();
    return s;
}

/// "n,m,k" as used on the command line.
inline Scenario parse_scenario(const std::string &text, Model model = Model::Local) {
    Scenario s;
    s.model = model;
    if (std::sscanf(text.c_str(), "%d,%d,%d", &s.parties, &s.settings, &s.outcomes) != 3)
        throw ParseError("scenario must read n,m,k (got '" + text + "')");
    s.validate();
    return s;
}

// ---- files -----------------------------------------------------------------

inline Json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw ParseError(path + ": " + e.what());
    }
}

/// Writes to a temporary sibling and renames it over the target.
inline void write_json_file(const std::string &path, const Json &j) {
    std::filesystem::path target(path);
    auto tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out)
            throw Error("cannot write " + tmp.string());
        out << j.dump(1) << '\n';
        if (!out)
            throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

// ---- correlation vectors and polytopes -------------------------------------

inline Json to_json(const CorrelationVector &p) {
    return Json{{"format", "bellscope-point-1"},
                {"scenario", scenario_to_json(p.scenario)},
                {"param", to_string(p.param)},
                {"coords", vector_to_json(p.coords)}};
}

inline CorrelationVector correlation_from_json(const Json &j) {
    CorrelationVector p{scenario_from_json(j.at("scenario")), parse_param(j.at("param").get<std::string>()),
                        vector_from_json(j.at("coords"))};
    if (p.coords.size() != space_dimension(p.scenario, p.param))
        throw DimensionMismatchError("point length does not match its parametrization");
    return p;
}

inline Json to_json(const Polytope &poly, const SymmetricSubspace *sub = nullptr) {
    Json verts = Json::array();
    for (const auto &v : poly.vertices())
        verts.push_back(vector_to_json(v));
    Json j{{"format", "bellscope-vertices-1"},
           {"scenario", scenario_to_json(poly.scenario())},
           {"param", to_string(poly.param())},
           {"symmetric_basis", poly.symmetric_basis()},
           {"ambient_dimension", poly.ambient_dimension()},
           {"count", poly.size()},
           {"vertices", std::move(verts)}};
    if (sub) {
        Json classes = Json::array();
        for (const auto &c : sub->classes())
            classes.push_back(c);
        j["subspace"] = Json{{"dimension", sub->dimension()},
                             {"ambient_dimension", sub->ambient_dimension()},
                             {"classes", std::move(classes)}};
    }
    return j;
}

inline Polytope polytope_from_json(const Json &j) {
    std::vector<RationalVector> verts;
    for (const auto &v : j.at("vertices"))
        verts.push_back(vector_from_json(v));
    return Polytope(scenario_from_json(j.at("scenario")), parse_param(j.at("param").get<std::string>()),
                    std::move(verts), j.value("symmetric_basis", false));
}

// ---- inequalities ----------------------------------------------------------

/// An inequality together with the scenario it lives in.
struct ScenarioInequality {
    std::string name;
    Scenario scenario;
    Inequality inequality;
};

inline Json to_json(const Inequality &ineq, const Scenario &s, const std::string &name = {}) {
    Json j{{"format", "bellscope-inequality-1"}};
    if (!name.empty())
        j["name"] = name;
    j["scenario"] = scenario_to_json(s);
    j["param"] = to_string(ineq.param);
    j["symmetric_basis"] = ineq.symmetric_basis;
    j["coeffs"] = vector_to_json(ineq.coeffs);
    j["bound"] = rational_to_json(ineq.bound);
    if (!ineq.provenance.empty())
        j["provenance"] = ineq.provenance;
    return j;
}

namespace detail {

/// Collins-Gisin table of a bipartite inequality. Row 0 holds the corner
/// constant and Bob's marginals, column 0 Alice's marginals; setting blocks
/// list outcomes 0..k_x-2. Short blocks (k_x < k) are lifted by giving the
/// added outcomes zero coefficients.
inline Inequality inequality_from_cg_table(const Scenario &s, const Json &table, const Rational &rhs,
                                           const std::vector<int> &block_outcomes) {
    if (s.parties != 2)
        throw ParseError("Collins-Gisin tables describe bipartite inequalities");
    const int m = s.settings, k = s.outcomes;
    std::vector<int> kx = block_outcomes.empty() ? std::vector<int>(m, k) : block_outcomes;
    if (static_cast<int>(kx.size()) != m)
        throw ParseError("outcomes_per_setting needs one entry per setting");
    // Line l of the table -> (setting, outcome).
    std::vector<std::pair<int, int>> lines;
    for (int x = 0; x < m; ++x) {
        if (kx[x] < 2 || kx[x] > k)
            throw ParseError("outcomes_per_setting entries must lie in 2..k");
        for (int a = 0; a + 1 < kx[x]; ++a)
            lines.emplace_back(x, a);
    }
    const std::size_t size = lines.size() + 1;
    if (!table.is_array() || table.size() != size)
        throw ParseError("Collins-Gisin table needs " + std::to_string(size) + " rows");
    const auto &cg = collins_gisin_index(s);
    Inequality ineq;
    ineq.param = Param::NoSignalling;
    ineq.coeffs.assign(cg.size(), Rational(0));
    Rational corner = 0;
    auto cell = [&](std::size_t r, std::size_t c) {
        if (!table[r].is_array() || table[r].size() != size)
            throw ParseError("Collins-Gisin table row " + std::to_string(r) + " has the wrong length");
        return rational_from_json(table[r][c]);
    };
    for (std::size_t r = 0; r < size; ++r)
        for (std::size_t c = 0; c < size; ++c) {
            Rational v = cell(r, c);
            if (r == 0 && c == 0) {
                corner = v;
                continue;
            }
            std::vector<int> st(2, -1);
            if (r > 0)
                st[0] = lines[r - 1].first * (k - 1) + lines[r - 1].second;
            if (c > 0)
                st[1] = lines[c - 1].first * (k - 1) + lines[c - 1].second;
            ineq.coeffs[cg.index_of_states(st)] = v;
        }
    ineq.bound = rhs - corner;
    return ineq;
}

/// Parses "a1b2" (probability of the first outcome) or "a1[2]b1" (explicit
/// 0-based outcome); uppercase letters denote correlators. Settings are 1-based.
inline std::pair<bool, std::vector<int>> parse_term(const std::string &text, const Scenario &s, int range) {
    std::vector<int> st(s.parties, -1);
    bool upper = false, lower = false;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (!std::isalpha(static_cast<unsigned char>(c)))
            throw ParseError("bad term '" + text + "'");
        bool up = std::isupper(static_cast<unsigned char>(c));
        (up ? upper : lower) = true;
        int party = std::tolower(static_cast<unsigned char>(c)) - 'a';
        ++i;
        std::size_t j = i;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
            ++j;
        if (j == i)
            throw ParseError("missing setting in term '" + text + "'");
        int setting = std::stoi(text.substr(i, j - i)) - 1;
        int outcome = 0;
        i = j;
        if (i < text.size() && text[i] == '[') {
            auto close = text.find(']', i);
            if (close == std::string::npos)
                throw ParseError("unterminated outcome in '" + text + "'");
            outcome = std::stoi(text.substr(i + 1, close - i - 1));
            i = close + 1;
        }
        if (party < 0 || party >= s.parties || setting < 0 || setting >= s.settings || outcome < 0 ||
            outcome >= range)
            throw ParseError("term '" + text + "' does not fit the scenario " + s.label());
        if (st[party] >= 0)
            throw ParseError("party repeated in term '" + text + "'");
        st[party] = setting * range + outcome;
    }
    if (upper && lower)
        throw ParseError("term '" + text + "' mixes probabilities and correlators");
    return {upper, st};
}

/// Terms {"coeff", "term"} with an optional orbit completion ("+sym"): each
/// distinct party-permuted image of a listed term receives its coefficient.
inline Inequality inequality_from_terms(const Scenario &s, const Json &terms, const Rational &rhs, bool sym) {
    const auto &cg = collins_gisin_index(s);
    Inequality ineq;
    ineq.coeffs.assign(cg.size(), Rational(0));
    ineq.bound = rhs;
    std::optional<bool> correlators;
    auto perms = sym ? all_permutations(s.parties) : std::vector<PartyPermutation>{identity_permutation(s.parties)};
    for (const auto &t : terms) {
        Rational c = rational_from_json(t.at("coeff"));
        auto [upper, st] = parse_term(t.at("term").get<std::string>(), s, s.outcomes - 1);
        if (correlators && *correlators != upper)
            throw ParseError("terms mix probabilities and correlators");
        correlators = upper;
        std::set<std::size_t> orbit;
        std::vector<int> img(s.parties);
        for (const auto &pi : perms) {
            for (int i = 0; i < s.parties; ++i)
                img[pi[i]] = st[i];
            orbit.insert(cg.index_of_states(img));
        }
        for (auto idx : orbit)
            ineq.coeffs[idx] += c;
    }
    ineq.param = correlators.value_or(false) ? Param::Correlator : Param::NoSignalling;
    return ineq;
}

} // namespace detail

/// Reads an inequality in any of the accepted encodings: explicit
/// coordinates ("coeffs"), a bipartite Collins-Gisin table ("cg_table"), or
/// a list of terms ("terms", optionally completed by party symmetry).
inline ScenarioInequality inequality_from_json(const Json &j) {
    ScenarioInequality out;
    out.name = j.value("name", std::string());
    out.scenario = scenario_from_json(j.at("scenario"));
    Rational rhs = j.contains("bound") ? rational_from_json(j.at("bound")) : Rational(0);
    if (j.contains("coeffs")) {
        auto &ineq = out.inequality;
        ineq.param = parse_param(j.value("param", std::string("NoSignalling")));
        ineq.symmetric_basis = j.value("symmetric_basis", false);
        ineq.coeffs = vector_from_json(j.at("coeffs"));
        ineq.bound = rhs;
        if (!ineq.symmetric_basis && ineq.coeffs.size() != space_dimension(out.scenario, ineq.param))
            throw DimensionMismatchError("coefficient vector does not match the scenario");
    } else if (j.contains("cg_table")) {
        std::vector<int> blocks;
        if (j.contains("outcomes_per_setting"))
            blocks = j.at("outcomes_per_setting").get<std::vector<int>>();
        out.inequality = detail::inequality_from_cg_table(out.scenario, j.at("cg_table"), rhs, blocks);
    } else if (j.contains("terms")) {
        out.inequality = detail::inequality_from_terms(out.scenario, j.at("terms"), rhs, j.value("sym", false));
    } else {
        throw ParseError("inequality needs coeffs, cg_table or terms");
    }
    out.inequality.provenance = j.value("provenance", out.name);
    return out;
}

inline ScenarioInequality load_inequality(const std::string &path) { return inequality_from_json(read_json_file(path)); }

inline std::vector<ScenarioInequality> inequalities_from_json(const Json &j) {
    std::vector<ScenarioInequality> out;
    if (j.is_array()) {
        for (const auto &e : j)
            out.push_back(inequality_from_json(e));
    } else if (j.contains("inequalities")) {
        for (const auto &e : j.at("inequalities"))
            out.push_back(inequality_from_json(e));
    } else {
        out.push_back(inequality_from_json(j));
    }
    return out;
}

inline Json inequalities_to_json(const std::vector<Inequality> &list, const Scenario &s, const std::string &format) {
    Json arr = Json::array();
    for (const auto &f : list)
        arr.push_back(to_json(f, s));
    return Json{{"format", format}, {"scenario", scenario_to_json(s)}, {"count", list.size()}, {"inequalities", arr}};
}

// ---- correlator forms ------------------------------------------------------

inline Json to_json(const CorrelatorForm &cf) {
    return Json{{"scenario", scenario_to_json(cf.scenario)},
                {"normalized", cf.normalized},
                {"coeffs", vector_to_json(cf.coeffs)},
                {"bound", rational_to_json(cf.bound)}};
}

inline CorrelatorForm correlator_form_from_json(const Json &j) {
    CorrelatorForm cf{scenario_from_json(j.at("scenario")), vector_from_json(j.at("coeffs")),
                      rational_from_json(j.at("bound")), j.value("normalized", false)};
    if (cf.coeffs.size() != correlator_basis_index(cf.scenario).size())
        throw DimensionMismatchError("correlator form does not match the scenario");
    return cf;
}

inline Json to_json(const EquivalenceKey &key) {
    Json orders = Json::array();
    for (const auto &o : key.orders)
        orders.push_back(vector_to_json(o));
    return Json{{"bound", rational_to_json(key.bound)}, {"orders", std::move(orders)}};
}

inline EquivalenceKey key_from_json(const Json &j) {
    EquivalenceKey key;
    key.bound = rational_from_json(j.at("bound"));
    for (const auto &o : j.at("orders"))
        key.orders.push_back(vector_from_json(o));
    return key;
}

} // namespace bellscope
