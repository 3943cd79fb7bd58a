#include "doctest.h"

#include "helpers.hpp"
#include "psym/errors.hpp"
#include "psym/symmetry.hpp"

using namespace psym;

namespace {

RationalFunction expr(const ModelDef& m, const std::string& text) { return parse_expression(text, *m.table); }

Generator make_generator(const ModelDef& m, const std::map<std::string, std::string>& entries) {
    Generator g;
    for (SymbolId s : m.states) g.eta[s] = RationalFunction();
    for (SymbolId p : m.params) g.chi[p] = RationalFunction();
    for (const auto& [name, text] : entries) {
        const SymbolId s = m.symbol(name);
        (m.is_state(s) ? g.eta[s] : g.chi[s]) = expr(m, text);
    }
    return g;
}

PolyVector flat(const Generator& g, const ModelDef& m) { return clear_denominators(flatten(g, m)); }

}  // namespace

TEST_CASE("total derivative on shell") {
    const ModelDef decay = load_fixture(FixtureId::Decay);
    CHECK(total_derivative_on_shell(expr(decay, "u"), decay) == expr(decay, "kappa1 - lambda*u"));
    CHECK(total_derivative_on_shell(expr(decay, "lambda"), decay).is_zero());
    CHECK(prolong_eta(expr(decay, "3/2"), decay).is_zero());

    const ModelDef sei = load_fixture(FixtureId::Sei);
    const RationalFunction e = expr(sei, "E*I");
    RationalFunction oracle;
    for (SymbolId s : sei.states) oracle += sei.rhs(s) * differentiate(e, s);
    CHECK(total_derivative_on_shell(e, sei) == oracle);
    CHECK(total_derivative_on_shell(e, sei) ==
          expr(sei, "(beta*I*S*(1 - upsilon) - delta*E - mu_E*E)*I + E*(beta*upsilon*I*S + delta*E - mu_I*I)"));
}

TEST_CASE("formal eta is differentiated formally") {
    const ModelDef decay = load_fixture(FixtureId::Decay);
    formal_symbols(decay);
    CHECK(prolong_eta(expr(decay, "eta_u"), decay) == expr(decay, "Deta_u"));
    CHECK(prolong_eta(expr(decay, "u*eta_u"), decay) == expr(decay, "(kappa1 - lambda*u)*eta_u + u*Deta_u"));
}

TEST_CASE("output conditions") {
    const ModelDef decay = load_fixture(FixtureId::Decay);
    auto c = build_output_conditions(decay);
    REQUIRE(c.size() == 1);
    CHECK(c[0] == expr(decay, "eta_u + eta_v"));

    const ModelDef glu = load_fixture(FixtureId::Glucose);
    c = build_output_conditions(glu);
    REQUIRE(c.size() == 1);
    CHECK(c[0] == expr(glu, "eta_x1/V_p - chi_V_p*x1/V_p^2"));

    const ModelDef sei = load_fixture(FixtureId::Sei);
    c = build_output_conditions(sei);
    REQUIRE(c.size() == 2);
    CHECK(c[0] == expr(sei, "k_E*eta_E + E*chi_k_E"));
    CHECK(c[1] == expr(sei, "k_I*eta_I + I*chi_k_I"));
}

TEST_CASE("linearised symmetry conditions") {
    const ModelDef decay = load_fixture(FixtureId::Decay);
    auto c = build_linsym_conditions(decay);
    REQUIRE(c.size() == 2);
    CHECK(c[0] == expr(decay, "Deta_u + lambda*eta_u - chi_kappa1 + chi_lambda*u"));
    CHECK(c[1] == expr(decay, "Deta_v + lambda*eta_v - chi_kappa2 + chi_lambda*v"));

    Bindings solved;
    solved[decay.symbol("eta_u")] = expr(decay, "-eta_v");
    c = build_linsym_conditions(decay, solved);
    CHECK(c[0] == expr(decay, "-Deta_v - lambda*eta_v - chi_kappa1 + chi_lambda*u"));

    const ModelDef still = parse_model("model still\nstates x, w\nparams p\ndx/dt = 0\ndw/dt = 0\noutput y = p*x\n");
    c = build_linsym_conditions(still);
    CHECK(c[0] == expr(still, "Deta_x"));
    CHECK(c[1] == expr(still, "Deta_w"));
}

TEST_CASE("check_generator") {
    const ModelDef decay = load_fixture(FixtureId::Decay);
    CHECK_FALSE(check_generator(make_generator(decay, {{"lambda", "1"}}), decay));
    CHECK(check_generator(make_generator(decay, {}), decay));
    CHECK(check_generator(make_generator(decay, {{"u", "1"}, {"v", "-1"}, {"kappa1", "lambda"}, {"kappa2", "-lambda"}}),
                          decay));

    const ModelDef glu = load_fixture(FixtureId::Glucose);
    CHECK(check_generator(make_generator(glu, {{"p2", "p2"}, {"p4", "-p4"}, {"x2", "-x2"}}), glu));
    CHECK_FALSE(check_generator(make_generator(glu, {{"p2", "p2"}, {"p4", "p4"}, {"x2", "-x2"}}), glu));
}

TEST_CASE("decay basis and free slot") {
    const ModelDef m = load_fixture(FixtureId::Decay);
    const GeneratorBasis b = eliminate(m);
    REQUIRE(b.generators.size() == 1);
    const Generator& g = b.generators[0];
    CHECK(g.component(m.symbol("lambda")).is_zero());
    CHECK(g.component(m.symbol("kappa1")) == -g.component(m.symbol("kappa2")));
    CHECK_FALSE(g.component(m.symbol("kappa1")).is_zero());

    REQUIRE(b.free_slots.size() == 1);
    const FreeSlot& slot = b.free_slots[0];
    CHECK(slot.support == std::vector<SymbolId>{m.symbol("u"), m.symbol("v")});
    CHECK(slot.relations.at(m.symbol("u")) == expr(m, "-eta_v"));

    REQUIRE(b.synthetic.size() == 1);
    const Generator& s = b.synthetic[0];
    CHECK(s.synthetic);
    for (SymbolId p : m.params) CHECK(s.component(p).is_zero());
    CHECK(s.component(m.symbol("u")) == -s.component(m.symbol("v")));
    CHECK(s.slot_rate == expr(m, "-lambda"));
    CHECK(check_generator(s, m));
    CHECK(generator_rank(b.all(), m, 1) == 2);
}

TEST_CASE("glucose basis") {
    const ModelDef m = load_fixture(FixtureId::Glucose);
    const GeneratorBasis b = eliminate(m);
    REQUIRE(b.generators.size() == 1);
    CHECK(b.free_slots.empty());
    for (const auto& g : b.generators) {
        for (const char* p : {"p1", "p3", "V_p"}) CHECK(g.component(m.symbol(p)).is_zero());
        CHECK(g.component(m.symbol("x1")).is_zero());
        CHECK(check_generator(g, m));
    }
    const Generator expected = make_generator(m, {{"p2", "p2"}, {"p4", "-p4"}, {"x2", "-x2"}});
    CHECK(same_span({flat(b.generators[0], m)}, {flat(expected, m)}, m.coordinates().size()));
}

TEST_CASE("linear basis") {
    const ModelDef m = load_fixture(FixtureId::Linear);
    const GeneratorBasis b = eliminate(m);
    REQUIRE(b.generators.size() == 1);
    const Generator expected = make_generator(m, {{"b", "b"}, {"z", "-z"}});
    CHECK(same_span({flat(b.generators[0], m)}, {flat(expected, m)}, m.coordinates().size()));
}

TEST_CASE("SEI basis") {
    const ModelDef m = load_fixture(FixtureId::Sei);
    const GeneratorBasis b = eliminate(m);
    CHECK(b.generators.size() == 2);
    CHECK(b.synthetic.empty());
    CHECK(generator_rank(b.all(), m, 7) == 2);
    for (const auto& g : b.generators) {
        CHECK(g.component(m.symbol("mu_S")).is_zero());
        CHECK(g.component(m.symbol("mu_I")).is_zero());
        CHECK(check_generator(g, m));
        CHECK(g.normalized);
    }
    // alpha_1 = 1, alpha_2 = 0 and the reverse
    const Generator a1 = make_generator(m, {{"S", "-S"},
                                            {"E", "-E"},
                                            {"I", "-I"},
                                            {"c", "-c"},
                                            {"beta", "beta"},
                                            {"k_E", "k_E"},
                                            {"k_I", "k_I"}});
    const Generator a2 = make_generator(m, {{"S", "-upsilon*S"},
                                            {"I", "-I"},
                                            {"c", "-c*upsilon"},
                                            {"beta", "beta"},
                                            {"mu_E", "delta"},
                                            {"delta", "-delta"},
                                            {"upsilon", "upsilon*(upsilon - 1)"},
                                            {"k_I", "k_I"}});
    CHECK(check_generator(a1, m));
    CHECK(check_generator(a2, m));
    const std::size_t dim = m.coordinates().size();
    CHECK(same_span({flat(b.generators[0], m), flat(b.generators[1], m)}, {flat(a1, m), flat(a2, m)}, dim));
}

TEST_CASE("SEI stage nullspace") {
    const ModelDef m = load_fixture(FixtureId::Sei);
    const GeneratorBasis b = eliminate(m);
    std::vector<SymbolId> cols;
    for (const char* p : {"upsilon", "k_I", "k_E", "mu_E", "mu_I", "delta"})
        cols.push_back(m.symbol(std::string("chi_") + p));
    std::vector<PolyVector> expected;
    for (const auto& v : std::vector<std::vector<std::string>>{{"0", "k_I/k_E", "1", "0", "0", "0"},
                                                               {"upsilon^2/delta", "k_I*upsilon/(delta*upsilon - delta)",
                                                                "0", "1", "0", "0"},
                                                               {"upsilon/delta", "k_I/(delta*upsilon - delta)", "0",
                                                                "0", "0", "1"}}) {
        std::vector<RationalFunction> row;
        for (const auto& s : v) row.push_back(expr(m, s));
        expected.push_back(clear_denominators(row));
    }
    bool found = false;
    for (const auto& ls : b.stages) {
        bool has_all = true;
        for (SymbolId c : cols)
            if (std::find(ls.unknowns.begin(), ls.unknowns.end(), c) == ls.unknowns.end()) has_all = false;
        if (!has_all) continue;
        const auto n = nullspace(ls.restricted(cols), cols.size());
        if (n.size() == 3 && same_span(n, expected, cols.size())) found = true;
    }
    CHECK(found);
}

TEST_CASE("nullspace of the SEI coefficient matrix") {
    testing::Scope s({"upsilon", "k_I", "k_E", "delta", "beta"});
    auto P = [&](const std::string& t) { return s(t).num(); };
    const PolyMatrix M = {
        {P("0"), P("0"), P("0"), P("0"), P("-k_E*k_I*upsilon + k_E*k_I"), P("0")},
        {P("0"), P("delta*k_E*upsilon - delta*k_E"), P("-delta*k_I*upsilon + delta*k_I"), P("-k_E*k_I*upsilon"), P("0"),
         P("-k_E*k_I")},
        {P("-beta*k_E*k_I"), P("beta*k_E*upsilon^2 - beta*k_E*upsilon"), P("-beta*k_I*upsilon^2 + beta*k_I*upsilon"),
         P("0"), P("0"), P("0")}};
    const auto n = nullspace(M, 6);
    REQUIRE(n.size() == 3);
    for (const auto& v : n)
        for (const auto& row : M) {
            SparsePoly acc;
            for (std::size_t j = 0; j < 6; ++j) acc += row[j] * v[j];
            CHECK(acc.is_zero());
        }
    std::vector<PolyVector> expected;
    for (const auto& v : std::vector<std::vector<std::string>>{
             {"0", "k_I/k_E", "1", "0", "0", "0"},
             {"upsilon^2/delta", "k_I*upsilon/(delta*upsilon - delta)", "0", "1", "0", "0"},
             {"upsilon/delta", "k_I/(delta*upsilon - delta)", "0", "0", "0", "1"}}) {
        std::vector<RationalFunction> row;
        for (const auto& e : v) row.push_back(s(e));
        expected.push_back(clear_denominators(row));
    }
    CHECK(same_span(n, expected, 6));
    for (const auto& v : expected) CHECK(in_span(v, n, 6));

    const PolyMatrix zero(2, PolyVector(3));
    CHECK(nullspace(zero, 3).size() == 3);
}

TEST_CASE("scaling a generator keeps it a symmetry") {
    const ModelDef m = load_fixture(FixtureId::Glucose);
    const GeneratorBasis b = eliminate(m);
    Generator g = b.generators[0];
    const RationalFunction factor = expr(m, "p1^2 + 3*V_p");
    for (auto& [s, e] : g.eta) e = e * factor;
    for (auto& [s, e] : g.chi) e = e * factor;
    CHECK(check_generator(g, m));
    const Generator n = normalize_generator(g, m);
    CHECK(n.component(m.symbol("x2")) == b.generators[0].component(m.symbol("x2")));
}

TEST_CASE("constant outputs carry no information") {
    const ModelDef m = parse_model("model flat\nstates x\nparams a\ndx/dt = a*x\noutput y = 3\n");
    CHECK_THROWS_AS(eliminate(m), PipelineError);
}

TEST_CASE("a silent state is a free slot") {
    const ModelDef m = parse_model("model idle\nstates x, w\nparams a\ndx/dt = -a*x\ndw/dt = 0\noutput y = x\n");
    const GeneratorBasis b = eliminate(m);
    bool w_slot = false;
    for (const auto& s : b.free_slots)
        if (s.support == std::vector<SymbolId>{m.symbol("w")}) w_slot = true;
    CHECK(w_slot);
    for (const auto& g : b.all()) CHECK(check_generator(g, m));
}
