#pragma once

#include <cstddef>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "canon.hpp"
#include "double_description.hpp"
#include "lift.hpp"
#include "polytope.hpp"
#include "render.hpp"
#include "serialize.hpp"
#include "symmetry.hpp"
#include "vertices.hpp"

namespace bellscope {

inline constexpr const char *tool_version = "bellscope 1.0.0";

/// BELLSCOPE_BUDGET_SECS when set and positive, otherwise `fallback`.
inline double budget_from_env(double fallback) {
    if (const char *env = std::getenv("BELLSCOPE_BUDGET_SECS")) {
        char *end = nullptr;
        double v = std::strtod(env, &end);
        if (end != env && v > 0)
            return v;
    }
    return fallback;
}

/// Classes are formed on no-signalling forms. For the Svetlichny model the
/// members of one class can differ by signalling components, so facet-hood
/// of the class needs a reading.
enum class FacetReading {
    AnyMember, // a class is a facet class if one member is a facet
    AllMembers,
};

struct PipelineOptions {
    DDOptions dd;
    std::size_t search_budget = default_search_budget;
    std::size_t vertex_cap = default_vertex_cap;
    FacetReading reading = FacetReading::AnyMember;
    bool lift = false; // lift non-facet classes and append the new facet classes
};

struct ClassRecord {
    CorrelatorForm form;
    EquivalenceKey key;
    Inequality representative; // model coordinates; a facet member when one exists
    std::size_t members = 0;
    std::size_t facet_members = 0;
    bool facet = false;       // facet of the reference polytope under the chosen reading
    bool model_facet = false; // facet of the polytope that was symmetrized
    bool genuine = true;
    std::vector<std::string> lifting;
    bool decided = true;
    bool supplementary = false; // found by lifting, not by the symmetric enumeration
    std::string cg_table;
};

struct CatalogCounts {
    std::size_t classes = 0, facet_classes = 0, facet_classes_all_members = 0, model_facet_classes = 0,
                genuine_classes = 0, genuine_facet_classes = 0, supplementary_classes = 0,
                supplementary_facet_classes = 0;
};

struct Catalog {
    std::string version = tool_version;
    Scenario scenario;
    Param param = Param::NoSignalling;
    FacetReading reading = FacetReading::AnyMember;
    double budget_seconds = 0;
    bool complete = true;
    std::string checkpoint;
    std::size_t strategies = 0; // deterministic strategies before deduplication
    std::size_t vertices = 0, ambient_dimension = 0, hull_dimension = 0;
    std::size_t symmetric_classes = 0, symmetric_dimension = 0, symmetric_vertices = 0, symmetric_facets = 0;
    std::size_t trivial_dropped = 0;
    std::vector<ClassRecord> classes;

    CatalogCounts counts() const {
        CatalogCounts c;
        for (const auto &r : classes) {
            if (r.supplementary) {
                ++c.supplementary_classes;
                c.supplementary_facet_classes += r.facet;
                continue;
            }
            ++c.classes;
            c.facet_classes += r.facet;
            c.facet_classes_all_members += r.facet && r.facet_members == r.members;
            c.model_facet_classes += r.model_facet;
            c.genuine_classes += r.genuine;
            c.genuine_facet_classes += r.genuine && r.facet;
        }
        return c;
    }
};

/// Polytope against which facet flags are judged: the model polytope itself,
/// except for full-correlator inequalities, which are judged on the full local
/// polytope in Collins-Gisin coordinates.
inline Polytope reference_polytope(const Scenario &s, std::size_t cap = default_vertex_cap) {
    if (s.model != Model::FullCorrelator)
        return model_vertices(s, cap);
    Scenario loc = s;
    loc.model = Model::Local;
    return enumerate_local_vertices(loc, Param::NoSignalling, cap);
}

/// An inequality in model coordinates, rewritten for the reference polytope.
inline Inequality to_reference(const Inequality &ineq, const Scenario &s) {
    return s.model == Model::FullCorrelator ? to_no_signalling(ineq, s) : ineq;
}

namespace detail {

inline ClassRecord make_record(const CorrelatorForm &form, const EquivalenceKey &key,
                               const std::vector<const Inequality *> &members, bool decided, const Polytope &model,
                               const Polytope &reference, const Scenario &s, FacetReading reading) {
    ClassRecord r;
    r.form = form;
    r.key = key;
    r.members = members.size();
    r.decided = decided;
    // Relabelings preserve facet-hood, so one check suffices unless members
    // may differ outside the no-signalling space.
    const bool per_member = s.model == Model::Svetlichny;
    std::optional<std::size_t> first_facet;
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (!per_member && i > 0)
            break;
        if (is_facet(to_reference(*members[i], s), reference)) {
            ++r.facet_members;
            if (!first_facet)
                first_facet = i;
        }
    }
    if (!per_member && r.facet_members)
        r.facet_members = r.members;
    r.facet = reading == FacetReading::AnyMember ? r.facet_members > 0 : r.facet_members == r.members;
    r.representative = *members[first_facet.value_or(0)];
    if (first_facet.value_or(0) != 0)
        r.form = canonical_correlator_form(r.representative, s);
    r.model_facet = &model == &reference ? r.facet_members > 0 : is_facet(r.representative, model);
    auto lifting = detect_lifting(r.form);
    r.genuine = lifting.genuine;
    r.lifting = lifting.details;
    r.cg_table = render_cg_table(r.form);
    return r;
}

inline bool zero_form(const CorrelatorForm &cf) {
    for (const auto &c : cf.coeffs)
        if (sgn(c) != 0)
            return false;
    return true;
}

} // namespace detail

/// Classifies full-space inequalities of a model polytope into class records.
inline std::vector<ClassRecord> classify_records(const std::vector<Inequality> &ineqs, const Polytope &model,
                                                 const Polytope &reference, const Scenario &s,
                                                 const PipelineOptions &opts, std::size_t *trivial = nullptr) {
    std::vector<ClassRecord> out;
    for (const auto &c : classify(ineqs, s, opts.search_budget)) {
        if (detail::zero_form(c.form)) {
            if (trivial)
                ++*trivial;
            continue;
        }
        std::vector<const Inequality *> members;
        for (auto m : c.members)
            members.push_back(&ineqs[m]);
        out.push_back(detail::make_record(c.form, c.key, members, c.decided, model, reference, s, opts.reading));
    }
    return out;
}

/// Facets of the non-facet classes' faces, minus everything equivalent to an
/// existing class, grouped into new supplementary records.
inline std::vector<ClassRecord> supplementary_records(const std::vector<ClassRecord> &known, const Polytope &model,
                                                      const Polytope &reference, const Scenario &s,
                                                      const PipelineOptions &opts) {
    std::vector<Inequality> lifted;
    for (const auto &r : known) {
        if (r.facet)
            continue;
        for (auto &f : lift_to_facets(r.representative, model, LiftMethod::Complete, opts.dd))
            lifted.push_back(std::move(f));
    }
    std::sort(lifted.begin(), lifted.end());
    lifted.erase(std::unique(lifted.begin(), lifted.end(),
                             [](const Inequality &a, const Inequality &b) { return a.same_halfspace(b); }),
                 lifted.end());
    std::vector<Inequality> fresh;
    for (auto &f : lifted) {
        auto form = canonical_correlator_form(f, s);
        auto key = invariants(form);
        bool old = false;
        for (const auto &r : known)
            if (r.key == key && are_equivalent_forms(form, r.form, opts.search_budget).verdict ==
                                    Equivalence::Equivalent) {
                old = true;
                break;
            }
        if (!old)
            fresh.push_back(std::move(f));
    }
    auto recs = classify_records(fresh, model, reference, s, opts);
    for (auto &r : recs)
        r.supplementary = true;
    return recs;
}

/// vertices -> symmetrize -> facets -> extend -> facet test -> classify.
/// Budget exhaustion returns an incomplete catalog that names the checkpoint.
inline Catalog run_pipeline(const Scenario &s, const PipelineOptions &opts = {}) {
    s.validate();
    Catalog cat;
    cat.scenario = s;
    cat.reading = opts.reading;
    cat.budget_seconds = opts.dd.budget_seconds;

    auto model = model_vertices(s, opts.vertex_cap);
    cat.param = model.param();
    cat.vertices = model.size();
    if (s.model == Model::Svetlichny) {
        cat.strategies = model.size();
    } else {
        Scenario loc = s;
        loc.model = Model::Local;
        cat.strategies = local_strategy_count(loc, opts.vertex_cap);
    }
    cat.ambient_dimension = model.ambient_dimension();
    cat.hull_dimension = model.dimension();
    SymmetricSubspace sub(s, model.param());
    auto ps = project_vertices_symmetric(model, sub);
    cat.symmetric_classes = sub.dimension();
    cat.symmetric_vertices = ps.size();
    cat.symmetric_dimension = ps.dimension();

    FacetEnumeration fe;
    try {
        fe = facet_enumeration(ps, opts.dd);
    } catch (const BudgetExhaustedError &e) {
        cat.complete = false;
        cat.checkpoint = e.checkpoint_path();
        return cat;
    }
    cat.symmetric_facets = fe.facets.size();
    std::vector<Inequality> extended;
    extended.reserve(fe.facets.size());
    for (const auto &f : fe.facets)
        extended.push_back(sub.extend(f));

    std::optional<Polytope> ref;
    if (s.model == Model::FullCorrelator)
        ref = reference_polytope(s, opts.vertex_cap);
    const Polytope &reference = ref ? *ref : model;
    cat.classes = classify_records(extended, model, reference, s, opts, &cat.trivial_dropped);
    if (opts.lift) {
        auto extra = supplementary_records(cat.classes, model, reference, s, opts);
        cat.classes.insert(cat.classes.end(), extra.begin(), extra.end());
    }
    return cat;
}

// ---- persistence -------------------------------------------------------------

inline std::string to_string(FacetReading r) { return r == FacetReading::AnyMember ? "any-member" : "all-members"; }

inline FacetReading parse_reading(const std::string &s) {
    if (s == "any-member")
        return FacetReading::AnyMember;
    if (s == "all-members")
        return FacetReading::AllMembers;
    throw ParseError("unknown facet reading '" + s + "'");
}

inline Json to_json(const ClassRecord &r, const Scenario &s) {
    Json j;
    j["form"] = to_json(r.form);
    j["key"] = to_json(r.key);
    j["members"] = r.members;
    j["facet_members"] = r.facet_members;
    j["facet"] = r.facet;
    j["model_facet"] = r.model_facet;
    j["genuine"] = r.genuine;
    j["lifting"] = r.lifting;
    j["decided"] = r.decided;
    j["supplementary"] = r.supplementary;
    j["representative"] = to_json(r.representative, s);
    j["cg_table"] = r.cg_table;
    return j;
}

inline ClassRecord class_record_from_json(const Json &j) {
    ClassRecord r;
    r.form = correlator_form_from_json(j.at("form"));
    r.key = key_from_json(j.at("key"));
    r.members = j.at("members").get<std::size_t>();
    r.facet_members = j.at("facet_members").get<std::size_t>();
    r.facet = j.at("facet").get<bool>();
    r.model_facet = j.at("model_facet").get<bool>();
    r.genuine = j.at("genuine").get<bool>();
    r.lifting = j.at("lifting").get<std::vector<std::string>>();
    r.decided = j.at("decided").get<bool>();
    r.supplementary = j.value("supplementary", false);
    r.representative = inequality_from_json(j.at("representative")).inequality;
    r.cg_table = j.at("cg_table").get<std::string>();
    return r;
}

inline Json to_json(const Catalog &c) {
    auto counts = c.counts();
    Json j{{"format", "bellscope-catalog-1"}, {"tool_version", c.version}};
    j["scenario"] = scenario_to_json(c.scenario);
    j["model"] = to_string(c.scenario.model);
    j["param"] = to_string(c.param);
    j["facet_reading"] = to_string(c.reading);
    j["budget_seconds"] = c.budget_seconds;
    j["complete"] = c.complete;
    if (!c.checkpoint.empty())
        j["checkpoint"] = c.checkpoint;
    j["stats"] = Json{{"strategies", c.strategies},
                      {"vertices", c.vertices},
                      {"ambient_dimension", c.ambient_dimension},
                      {"hull_dimension", c.hull_dimension},
                      {"symmetric_classes", c.symmetric_classes},
                      {"symmetric_dimension", c.symmetric_dimension},
                      {"symmetric_vertices", c.symmetric_vertices},
                      {"symmetric_facets", c.symmetric_facets},
                      {"trivial_dropped", c.trivial_dropped}};
    j["counts"] = Json{{"classes", counts.classes},
                       {"facet_classes", counts.facet_classes},
                       {"facet_classes_all_members", counts.facet_classes_all_members},
                       {"model_facet_classes", counts.model_facet_classes},
                       {"genuine_classes", counts.genuine_classes},
                       {"genuine_facet_classes", counts.genuine_facet_classes},
                       {"supplementary_classes", counts.supplementary_classes},
                       {"supplementary_facet_classes", counts.supplementary_facet_classes}};
    Json arr = Json::array();
    for (const auto &r : c.classes)
        arr.push_back(to_json(r, c.scenario));
    j["classes"] = std::move(arr);
    return j;
}

inline Catalog catalog_from_json(const Json &j) {
    if (j.value("format", std::string()) != "bellscope-catalog-1")
        throw ParseError("not a bellscope catalog");
    Catalog c;
    c.version = j.at("tool_version").get<std::string>();
    c.scenario = scenario_from_json(j.at("scenario"));
    c.param = parse_param(j.at("param").get<std::string>());
    c.reading = parse_reading(j.at("facet_reading").get<std::string>());
    c.budget_seconds = j.at("budget_seconds").get<double>();
    c.complete = j.at("complete").get<bool>();
    c.checkpoint = j.value("checkpoint", std::string());
    const auto &st = j.at("stats");
    c.strategies = st.at("strategies");
    c.vertices = st.at("vertices");
    c.ambient_dimension = st.at("ambient_dimension");
    c.hull_dimension = st.at("hull_dimension");
    c.symmetric_classes = st.at("symmetric_classes");
    c.symmetric_dimension = st.at("symmetric_dimension");
    c.symmetric_vertices = st.at("symmetric_vertices");
    c.symmetric_facets = st.at("symmetric_facets");
    c.trivial_dropped = st.at("trivial_dropped");
    for (const auto &r : j.at("classes"))
        c.classes.push_back(class_record_from_json(r));
    return c;
}

inline void write_catalog(const std::string &path, const Catalog &c) { write_json_file(path, to_json(c)); }
inline Catalog read_catalog(const std::string &path) { return catalog_from_json(read_json_file(path)); }

// ---- verification --------------------------------------------------------------

struct VerifyReport {
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

/// Re-derives every stored class record: canonical form and key from the
/// representative, validity on the model polytope, facet and genuine flags.
/// Facet flags are checked on the representative only; for the any-member
/// reading the representative is the facet witness.
inline VerifyReport verify_catalog(const Catalog &c, std::size_t cap = default_vertex_cap) {
    VerifyReport rep;
    const auto &s = c.scenario;
    auto model = model_vertices(s, cap);
    std::optional<Polytope> ref;
    if (s.model == Model::FullCorrelator)
        ref = reference_polytope(s, cap);
    const Polytope &reference = ref ? *ref : model;
    for (std::size_t i = 0; i < c.classes.size(); ++i) {
        const auto &r = c.classes[i];
        auto fail = [&](const std::string &what) { rep.failures.push_back("class " + std::to_string(i) + ": " + what); };
        if (r.representative.param != model.param() ||
            r.representative.coeffs.size() != model.ambient_dimension()) {
            fail("representative is not in the model's coordinates");
            continue;
        }
        if (!is_valid(r.representative, model))
            fail("representative is not valid");
        auto form = canonical_correlator_form(r.representative, s);
        if (form.coeffs != r.form.coeffs || form.bound != r.form.bound)
            fail("stored form differs from the representative's canonical form");
        if (!(invariants(r.form) == r.key))
            fail("stored key differs from the form's invariants");
        bool facet = is_facet(to_reference(r.representative, s), reference);
        bool expect = c.reading == FacetReading::AnyMember ? r.facet : r.facet_members > 0;
        if (facet != expect)
            fail("facet flag does not re-verify");
        bool model_facet = ref ? is_facet(r.representative, model) : facet;
        if (model_facet != r.model_facet)
            fail("model facet flag does not re-verify");
        if (detect_lifting(r.form).genuine != r.genuine)
            fail("genuine flag does not re-verify");
        if (render_cg_table(r.form) != r.cg_table)
            fail("stored rendering differs");
    }
    return rep;
}

} // namespace bellscope
