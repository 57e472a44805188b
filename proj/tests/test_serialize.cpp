#include "oracles.hpp"

#include <filesystem>
#include <gtest/gtest.h>
#include <random>

using namespace bellscope;

namespace {

ScenarioInequality data(const std::string &name) {
    return load_inequality(std::string(BELLSCOPE_DATA_DIR) + "/" + name + ".json");
}

} // namespace

TEST(Render, ChTable) {
    auto ch = data("CH");
    const std::string expect = "   || -1  0\n"
                               "===++======\n"
                               " -1||  1  1\n"
                               "  0||  1 -1\n"
                               "<= 0\n";
    EXPECT_EQ(render_cg_table(ch.inequality, ch.scenario), expect);
}

TEST(Render, S51Table) {
    auto s51 = data("S51_242");
    const std::string expect = "   || -1 -2 -2 -2\n"
                               "===++============\n"
                               " -1|| -3  3  2  2\n"
                               " -2||  3  2 -1 -1\n"
                               " -2||  2 -1 -1  3\n"
                               " -2||  2 -1  3  0\n"
                               "<= 0\n";
    EXPECT_EQ(render_cg_table(s51.inequality, s51.scenario), expect);
}

TEST(Render, ZeroTable) {
    Inequality z;
    z.coeffs.assign(8, 0);
    const std::string expect = "  || 0 0\n"
                               "==++====\n"
                               " 0|| 0 0\n"
                               " 0|| 0 0\n"
                               "<= 0\n";
    EXPECT_EQ(render_cg_table(z, Scenario{2, 2, 2}), expect);
}

TEST(Render, BlocksSeparatedForMoreOutcomes) {
    auto s1 = data("S1_224");
    auto text = render_cg_table(s1.inequality, s1.scenario);
    EXPECT_NE(text.find('|', text.find("||") + 2), std::string::npos);
    EXPECT_NE(text.find("---++"), std::string::npos);
    EXPECT_EQ(text.substr(text.size() - 5), "<= 0\n");
}

TEST(Render, RejectsSymmetricBasis) {
    auto ch = data("CH").inequality;
    ch.symmetric_basis = true;
    EXPECT_THROW(render_cg_table(ch, Scenario{2, 2, 2}), PreconditionError);
}

TEST(Render, TableParsesBack) {
    // cg_table input written from the rendering of S51.
    auto s51 = data("S51_242");
    Json j = Json::parse(R"({"name":"x","scenario":[2,4,2],"bound":"0","cg_table":[
        ["0","-1","-2","-2","-2"],["-1","-3","3","2","2"],["-2","3","2","-1","-1"],
        ["-2","2","-1","-1","3"],["-2","2","-1","3","0"]]})");
    auto back = inequality_from_json(j);
    EXPECT_TRUE(normalized(back.inequality).same_halfspace(normalized(s51.inequality)));
}

TEST(Serialize, RationalsAreDecimalStrings) {
    Rational r(-123456789, 1000);
    r.canonicalize();
    auto j = rational_to_json(r);
    EXPECT_EQ(j.dump(), R"(["-123456789","1000"])");
    EXPECT_EQ(rational_from_json(j), r);
    EXPECT_EQ(rational_from_json(Json("7/21")), Rational(1, 3));
    EXPECT_EQ(rational_from_json(Json(5)), Rational(5));
    Rational huge("123456789012345678901234567891/7");
    huge.canonicalize();
    EXPECT_EQ(rational_from_json(rational_to_json(huge)), huge);
    EXPECT_THROW(rational_from_json(Json("1/0")), ParseError);
    EXPECT_THROW(rational_from_json(Json("x")), ParseError);
    EXPECT_THROW(rational_from_json(Json(1.5)), ParseError);
}

TEST(Serialize, InequalityRoundTrip) {
    auto ch = data("CH");
    auto j = to_json(ch.inequality, ch.scenario, "CH");
    auto back = inequality_from_json(j);
    EXPECT_EQ(back.name, "CH");
    EXPECT_EQ(back.scenario, ch.scenario);
    EXPECT_TRUE(back.inequality.same_halfspace(ch.inequality));
    EXPECT_EQ(to_json(back.inequality, back.scenario, "CH").dump(), j.dump());
}

TEST(Serialize, CorrelationAndPolytopeRoundTrip) {
    Scenario s{2, 2, 3};
    auto poly = model_vertices(s);
    auto back = polytope_from_json(to_json(poly));
    EXPECT_EQ(back.vertices(), poly.vertices());
    EXPECT_EQ(back.param(), poly.param());
    CorrelationVector p{s, Param::NoSignalling, poly.vertices()[10]};
    EXPECT_EQ(correlation_from_json(to_json(p)), p);
}

TEST(Serialize, CorrelatorFormAndKeyRoundTrip) {
    auto s1 = data("S1_224");
    auto cf = canonical_correlator_form(s1.inequality, s1.scenario);
    EXPECT_EQ(correlator_form_from_json(to_json(cf)), cf);
    auto key = invariants(cf);
    EXPECT_EQ(key_from_json(to_json(key)), key);
}

TEST(Serialize, TermParsing) {
    Scenario s{3, 2, 2};
    Json terms = Json::parse(R"([{"coeff":"1","term":"a1b2"},{"coeff":"-2","term":"c2"}])");
    auto f = detail::inequality_from_terms(s, terms, 0, false);
    const auto &cg = collins_gisin_index(s);
    MarginalTerm ab{{0, 1}, {0, 1}, {0, 0}}, c{{2}, {1}, {0}};
    EXPECT_EQ(f.coeffs[cg.index_of(ab)], 1);
    EXPECT_EQ(f.coeffs[cg.index_of(c)], -2);
    // Symmetrized terms spread over the orbit.
    auto sym = detail::inequality_from_terms(s, Json::parse(R"([{"coeff":"1","term":"a1b2"}])"), 0, true);
    EXPECT_TRUE(is_symmetric(sym, s));
    EXPECT_THROW(detail::inequality_from_terms(s, Json::parse(R"([{"coeff":"1","term":"a3"}])"), 0, false), ParseError);
    EXPECT_THROW(detail::inequality_from_terms(s, Json::parse(R"([{"coeff":"1","term":"a1a2"}])"), 0, false), ParseError);
    EXPECT_THROW(detail::inequality_from_terms(s, Json::parse(R"([{"coeff":"1","term":"d1"}])"), 0, false), ParseError);
}

TEST(Serialize, ScenarioParsing) {
    auto s = parse_scenario("3,2,2", Model::Svetlichny);
    EXPECT_EQ(s.parties, 3);
    EXPECT_EQ(s.model, Model::Svetlichny);
    EXPECT_THROW(parse_scenario("3,2"), ParseError);
    EXPECT_THROW(parse_scenario("a,b,c"), ParseError);
    EXPECT_EQ(parse_model("fullcorr"), Model::FullCorrelator);
    EXPECT_ANY_THROW(parse_model("quantum"));
}

TEST(Serialize, AtomicFileWrite) {
    auto path = std::filesystem::temp_directory_path() / "bellscope_test_write.json";
    write_json_file(path.string(), Json{{"a", 1}});
    EXPECT_EQ(read_json_file(path.string()).at("a"), 1);
    std::filesystem::remove(path);
    EXPECT_ANY_THROW(read_json_file(path.string()));
}
