#include <bellscope/bellscope.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

using namespace bellscope;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_error = 1;
constexpr int exit_verification = 2;
constexpr int exit_budget = 3;

constexpr double default_budget_seconds = 6 * 3600.0;

void emit(const Json &j, const std::string &out) {
    if (out.empty() || out == "-")
        std::cout << j.dump(2) << "\n";
    else
        write_json_file(out, j);
}

struct DDFlags {
    std::optional<double> budget;
    std::string checkpoint, resume;
    unsigned threads = 1;
    bool reverse = false;

    void add(CLI::App *cmd) {
        cmd->add_option("--budget", budget, "time budget in seconds (default 6 h or BELLSCOPE_BUDGET_SECS)");
        cmd->add_option("--checkpoint", checkpoint, "state file written when the budget runs out");
        cmd->add_option("--resume", resume, "checkpoint to resume from");
        cmd->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
        cmd->add_flag("--reverse", reverse, "insert constraints in reverse order");
    }
    DDOptions options() const {
        DDOptions o;
        o.budget_seconds = budget ? *budget : budget_from_env(default_budget_seconds);
        o.checkpoint_path = checkpoint;
        o.resume_path = resume;
        o.threads = threads;
        o.reverse_insertion = reverse;
        return o;
    }
};

/// Reads an inequality list and brings each one into the polytope's frame.
std::vector<ScenarioInequality> load_for(const std::string &path, const Polytope &poly) {
    auto list = inequalities_from_json(read_json_file(path));
    for (auto &si : list) {
        auto &f = si.inequality;
        if (f.param == poly.param() && f.symmetric_basis == poly.symmetric_basis())
            continue;
        if (poly.symmetric_basis()) {
            SymmetricSubspace sub(poly.scenario(), poly.param());
            if (f.param != poly.param())
                throw PreconditionError("inequality and symmetric polytope use different parametrizations");
            f = sub.restrict(f);
        } else if (poly.param() == Param::NoSignalling && !f.symmetric_basis) {
            f = to_no_signalling(f, si.scenario);
        } else {
            throw PreconditionError("cannot bring a " + to_string(f.param) + " inequality into " +
                                    to_string(poly.param()) + " coordinates");
        }
    }
    return list;
}

ComplexMatrix parse_state(const std::string &text, int parties) {
    auto colon = text.find(':');
    std::string head = text.substr(0, colon);
    auto qubits = [&](std::size_t pos) {
        return pos < head.size() ? std::stoi(head.substr(pos)) : parties;
    };
    if (head.rfind("ghz", 0) == 0) {
        double theta = colon == std::string::npos ? std::numbers::pi / 4 : std::stod(text.substr(colon + 1));
        return ghz_state(qubits(3), theta);
    }
    if (head.rfind("w", 0) == 0 && colon == std::string::npos)
        return w_state(qubits(1));
    throw ParseError("state must be wN or ghz[N]:THETA");
}

std::vector<std::vector<double>> read_table(const Json &j) {
    std::vector<std::vector<double>> out;
    for (const auto &row : j) {
        std::vector<double> r;
        for (const auto &v : row)
            r.push_back(v.is_string() ? std::stod(v.get<std::string>()) : v.get<double>());
        out.push_back(std::move(r));
    }
    return out;
}

Json summary(const Catalog &c) {
    auto j = to_json(c);
    return Json{{"scenario", j["scenario"]}, {"model", j["model"]},   {"complete", j["complete"]},
                {"stats", j["stats"]},       {"counts", j["counts"]}};
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Symmetric Bell inequality enumeration and evaluation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);

    // vertices
    std::string scen, model_name = "local", out, in, param_name;
    auto *c_vertices = app.add_subcommand("vertices", "enumerate the vertices of a correlation polytope");
    c_vertices->add_option("--scenario", scen, "n,m,k")->required();
    c_vertices->add_option("--model", model_name, "local | svetlichny | fullcorr");
    c_vertices->add_option("--param", param_name, "coordinates for local vertices (FullProbability, NoSignalling, ...)");
    c_vertices->add_option("--out", out, "output file (stdout if omitted)");

    // symmetrize
    auto *c_sym = app.add_subcommand("symmetrize", "project vertices onto the party-symmetric subspace");
    c_sym->add_option("--in", in, "vertex file")->required();
    c_sym->add_option("--out", out, "output file");

    // facets
    DDFlags dd;
    auto *c_facets = app.add_subcommand("facets", "facet enumeration by double description");
    c_facets->add_option("--in", in, "vertex file")->required();
    c_facets->add_option("--out", out, "output file");
    dd.add(c_facets);

    // extend
    auto *c_extend = app.add_subcommand("extend", "symmetric extension of class-basis inequalities");
    c_extend->add_option("--in", in, "inequality list in the class basis")->required();
    c_extend->add_option("--out", out, "output file");

    // check
    std::string ineq_path, vertices_path;
    bool require_facet = false;
    auto *c_check = app.add_subcommand("check", "validity and facet test of inequalities on a polytope");
    c_check->add_option("--ineq", ineq_path, "inequality file")->required();
    c_check->add_option("--vertices", vertices_path, "vertex file")->required();
    c_check->add_flag("--require-facet", require_facet, "exit 2 unless every inequality is a facet");

    // classify
    std::size_t search_nodes = default_search_budget;
    std::string reading_name = "any-member";
    auto *c_classify = app.add_subcommand("classify", "group inequalities into relabeling classes");
    c_classify->add_option("--in", in, "inequality list in full coordinates")->required();
    c_classify->add_option("--out", out, "output file");
    c_classify->add_option("--search-nodes", search_nodes, "node budget of one equivalence search");
    c_classify->add_option("--ns-project", reading_name, "facet reading after no-signalling projection")
        ->check(CLI::IsMember({"any-member", "all-members"}));

    // lift
    std::string method_name = "complete";
    auto *c_lift = app.add_subcommand("lift", "facets containing the face of a valid inequality");
    c_lift->add_option("--ineq", ineq_path, "inequality file")->required();
    c_lift->add_option("--vertices", vertices_path, "vertex file")->required();
    c_lift->add_option("--method", method_name, "complete | recursive")
        ->check(CLI::IsMember({"complete", "recursive"}));
    c_lift->add_option("--out", out, "output file");

    // local-test
    std::string point_path;
    auto *c_local = app.add_subcommand("local-test", "exact LP membership test with certificate");
    c_local->add_option("--point", point_path, "correlation point file")->required();
    c_local->add_option("--vertices", vertices_path, "vertex file")->required();
    c_local->add_option("--out", out, "output file");

    // quantum
    std::string state_name, angles_path, optimize;
    double visibility = 1.0;
    bool scan = false;
    auto *c_quantum = app.add_subcommand("quantum", "evaluate an inequality on qubit correlations");
    c_quantum->add_option("--state", state_name, "wN | ghz[N]:THETA")->required();
    c_quantum->add_option("--ineq", ineq_path, "inequality file")->required();
    c_quantum->add_option("--angles", angles_path, "JSON with \"angles\" (and optional \"polar\") per party");
    c_quantum->add_option("--optimize", optimize, "search symmetric measurements: xy | bloch")
        ->check(CLI::IsMember({"xy", "bloch"}));
    c_quantum->add_option("--visibility", visibility, "mixing with white noise")->check(CLI::Range(0.0, 1.0));
    c_quantum->add_flag("--visibility-scan", scan, "also report the threshold visibility");
    c_quantum->add_option("--out", out, "output file");

    // pipeline
    DDFlags pdd;
    bool lift = false;
    std::string verify_path;
    auto *c_pipe = app.add_subcommand("pipeline", "end-to-end enumeration into a catalog");
    c_pipe->add_option("--scenario", scen, "n,m,k");
    c_pipe->add_option("--model", model_name, "local | svetlichny | fullcorr");
    c_pipe->add_option("--out", out, "catalog file");
    c_pipe->add_option("--search-nodes", search_nodes, "node budget of one equivalence search");
    c_pipe->add_option("--ns-project", reading_name, "facet reading after no-signalling projection")
        ->check(CLI::IsMember({"any-member", "all-members"}));
    c_pipe->add_flag("--lift", lift, "lift non-facet classes and add the new facet classes");
    c_pipe->add_option("--verify", verify_path, "re-verify an existing catalog instead of running");
    pdd.add(c_pipe);

    // render
    std::string catalog_path;
    auto *c_render = app.add_subcommand("render", "Collins-Gisin tables of inequalities or catalog classes");
    c_render->add_option("--ineq", ineq_path, "inequality file");
    c_render->add_option("--catalog", catalog_path, "catalog file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*c_vertices) {
            auto s = parse_scenario(scen, parse_model(model_name));
            Polytope p = !param_name.empty() && s.model == Model::Local
                             ? enumerate_local_vertices(s, parse_param(param_name))
                             : model_vertices(s);
            emit(to_json(p), out);
        } else if (*c_sym) {
            auto p = polytope_from_json(read_json_file(in));
            SymmetricSubspace sub(p.scenario(), p.param());
            emit(to_json(project_vertices_symmetric(p, sub), &sub), out);
        } else if (*c_facets) {
            auto p = polytope_from_json(read_json_file(in));
            FacetEnumeration fe;
            try {
                fe = facet_enumeration(p, dd.options());
            } catch (const BudgetExhaustedError &e) {
                std::cerr << "budget exhausted; checkpoint: "
                          << (e.checkpoint_path().empty() ? "(none)" : e.checkpoint_path()) << "\n";
                return exit_budget;
            }
            auto j = inequalities_to_json(fe.facets, p.scenario(), "bellscope-facets-1");
            j["symmetric_basis"] = p.symmetric_basis();
            j["hull_dimension"] = fe.hull_dimension;
            emit(j, out);
        } else if (*c_extend) {
            auto list = inequalities_from_json(read_json_file(in));
            if (list.empty())
                throw ParseError("no inequalities in " + in);
            const auto s = list.front().scenario;
            SymmetricSubspace sub(s, list.front().inequality.param);
            std::vector<Inequality> ext;
            for (const auto &si : list) {
                if (!si.inequality.symmetric_basis)
                    throw PreconditionError("extend expects class-basis inequalities");
                ext.push_back(sub.extend(si.inequality));
            }
            emit(inequalities_to_json(ext, s, "bellscope-inequalities-1"), out);
        } else if (*c_check) {
            auto p = polytope_from_json(read_json_file(vertices_path));
            bool failed = false;
            for (const auto &si : load_for(ineq_path, p)) {
                bool valid = is_valid(si.inequality, p);
                auto face = face_of(si.inequality, p);
                bool facet = valid && face.rank == p.dimension();
                std::cout << (si.name.empty() ? "inequality" : si.name) << ": " << (valid ? "valid" : "INVALID")
                          << ", " << (facet ? "facet" : "not a facet") << ", saturating " << face.saturating.size()
                          << ", saturating rank " << face.rank << " of " << p.dimension() << "\n";
                failed |= !valid || (require_facet && !facet);
            }
            if (failed)
                return exit_verification;
        } else if (*c_classify) {
            auto list = inequalities_from_json(read_json_file(in));
            if (list.empty())
                throw ParseError("no inequalities in " + in);
            const auto s = list.front().scenario;
            PipelineOptions opts;
            opts.search_budget = search_nodes;
            opts.reading = parse_reading(reading_name);
            auto model = model_vertices(s);
            std::optional<Polytope> ref;
            if (s.model == Model::FullCorrelator)
                ref = reference_polytope(s);
            std::vector<Inequality> ineqs;
            for (const auto &si : list) {
                if (si.inequality.param != model.param() || si.inequality.symmetric_basis)
                    throw PreconditionError("classify expects full-space inequalities in the model's coordinates");
                ineqs.push_back(si.inequality);
            }
            Catalog cat;
            cat.scenario = s;
            cat.param = model.param();
            cat.reading = opts.reading;
            cat.classes = classify_records(ineqs, model, ref ? *ref : model, s, opts, &cat.trivial_dropped);
            auto j = to_json(cat);
            emit(Json{{"format", "bellscope-classes-1"},
                      {"scenario", j["scenario"]},
                      {"model", j["model"]},
                      {"facet_reading", j["facet_reading"]},
                      {"trivial_dropped", cat.trivial_dropped},
                      {"counts", j["counts"]},
                      {"classes", j["classes"]}},
                 out);
        } else if (*c_lift) {
            auto p = polytope_from_json(read_json_file(vertices_path));
            auto method = method_name == "recursive" ? LiftMethod::Recursive : LiftMethod::Complete;
            std::vector<Inequality> all;
            for (const auto &si : load_for(ineq_path, p))
                for (auto &f : lift_to_facets(si.inequality, p, method))
                    all.push_back(std::move(f));
            std::sort(all.begin(), all.end());
            all.erase(std::unique(all.begin(), all.end(),
                                  [](const Inequality &a, const Inequality &b) { return a.same_halfspace(b); }),
                      all.end());
            emit(inequalities_to_json(all, p.scenario(), "bellscope-lifted-1"), out);
        } else if (*c_local) {
            auto p = polytope_from_json(read_json_file(vertices_path));
            auto pt = correlation_from_json(read_json_file(point_path));
            if (pt.param != p.param())
                pt = convert(pt, p.param());
            RationalVector x = pt.coords;
            if (p.symmetric_basis())
                x = SymmetricSubspace(p.scenario(), p.param()).project(x);
            auto r = is_local_lp(x, p);
            bool ok = verify_locality(r, x, p);
            Json j{{"local", r.inside}, {"certificate_verified", ok}};
            if (r.inside)
                j["weights"] = vector_to_json(r.weights);
            else
                j["separator"] = to_json(r.separator, p.scenario(), "separator");
            emit(j, out);
            if (!ok)
                return exit_verification;
        } else if (*c_quantum) {
            auto si = load_inequality(ineq_path);
            const auto s = si.scenario;
            if (s.outcomes != 2)
                throw UnsupportedError("qubit measurements need k = 2");
            QuantumSetup setup{parse_state(state_name, s.parties), {}, visibility, {}};
            Json report;
            if (!angles_path.empty()) {
                auto j = read_json_file(angles_path);
                setup.angles = read_table(j.at("angles"));
                if (j.contains("polar"))
                    setup.polar = read_table(j.at("polar"));
            } else if (!optimize.empty()) {
                if (optimize == "xy") {
                    if (s.settings != 2)
                        throw UnsupportedError("the planar search handles two settings");
                    auto best = optimize_symmetric_angles(si.inequality, setup.state);
                    setup.angles.assign(s.parties, best.parameters);
                } else {
                    auto best = optimize_symmetric_bloch(si.inequality, setup.state, s.settings);
                    std::vector<double> az(best.parameters.begin(), best.parameters.begin() + s.settings);
                    std::vector<double> po(best.parameters.begin() + s.settings, best.parameters.end());
                    setup.angles.assign(s.parties, az);
                    setup.polar.assign(s.parties, po);
                }
            } else {
                throw ParseError("quantum needs --angles or --optimize");
            }
            double excess = evaluate(si.inequality, correlations(setup));
            double bound = si.inequality.bound.get_d();
            report["value"] = excess + bound;
            report["bound"] = bound;
            report["excess"] = excess;
            report["violation"] = excess > 0;
            report["visibility"] = setup.visibility;
            report["angles"] = setup.angles;
            if (!setup.polar.empty())
                report["polar"] = setup.polar;
            if (scan) {
                try {
                    report["threshold"] = visibility_threshold(si.inequality, setup);
                } catch (const NoViolationError &) {
                    report["threshold"] = nullptr;
                }
            }
            emit(report, out);
        } else if (*c_pipe) {
            if (!verify_path.empty()) {
                auto cat = read_catalog(verify_path);
                auto rep = verify_catalog(cat);
                for (const auto &f : rep.failures)
                    std::cerr << f << "\n";
                std::cout << (rep.ok() ? "catalog verified: " : "catalog FAILED verification: ")
                          << cat.classes.size() << " classes\n";
                return rep.ok() ? exit_ok : exit_verification;
            }
            if (scen.empty())
                throw ParseError("pipeline needs --scenario (or --verify)");
            auto s = parse_scenario(scen, parse_model(model_name));
            PipelineOptions opts;
            opts.dd = pdd.options();
            opts.search_budget = search_nodes;
            opts.reading = parse_reading(reading_name);
            opts.lift = lift;
            auto cat = run_pipeline(s, opts);
            if (!out.empty())
                write_catalog(out, cat);
            std::cout << summary(cat).dump(2) << "\n";
            if (!cat.complete)
                return exit_budget;
        } else if (*c_render) {
            if (!catalog_path.empty()) {
                auto cat = read_catalog(catalog_path);
                for (std::size_t i = 0; i < cat.classes.size(); ++i) {
                    const auto &r = cat.classes[i];
                    std::cout << "# class " << i << (r.facet ? " facet" : "") << (r.genuine ? " genuine" : " lifting")
                              << (r.supplementary ? " supplementary" : "") << "\n"
                              << r.cg_table << "\n";
                }
            } else if (!ineq_path.empty()) {
                for (const auto &si : inequalities_from_json(read_json_file(ineq_path))) {
                    if (!si.name.empty())
                        std::cout << "# " << si.name << "\n";
                    auto f = si.inequality;
                    if (f.symmetric_basis)
                        f = SymmetricSubspace(si.scenario, f.param).extend(f);
                    std::cout << render_cg_table(to_no_signalling(f, si.scenario), si.scenario) << "\n";
                }
            } else {
                throw ParseError("render needs --ineq or --catalog");
            }
        }
    } catch (const BudgetExhaustedError &e) {
        std::cerr << "budget exhausted: " << e.what() << "\n";
        return exit_budget;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_error;
    }
    return exit_ok;
}
