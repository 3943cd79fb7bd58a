#include "doctest.h"

#include "helpers.hpp"
#include "psym/errors.hpp"
#include "psym/invariants.hpp"

using namespace psym;

namespace {

RationalFunction expr(const ModelDef& m, const std::string& text) { return parse_expression(text, *m.table); }

std::vector<RationalFunction> exprs(const ModelDef& m, const std::vector<std::string>& texts) {
    std::vector<RationalFunction> out;
    for (const auto& t : texts) out.push_back(expr(m, t));
    return out;
}

std::vector<RationalFunction> found(const InvariantSet& s) {
    std::vector<RationalFunction> out;
    for (const auto& i : s.invariants) out.push_back(i.expr);
    return out;
}

struct Run {
    ModelDef m;
    GeneratorBasis basis;
    InvariantSet inv;
    AnalysisVerdicts verdicts;
};

Run run(FixtureId id) {
    Run r{load_fixture(id), {}, {}, {}};
    r.basis = eliminate(r.m);
    r.inv = find_invariants(r.basis, r.m);
    r.verdicts = classify(r.inv, r.basis, r.m);
    return r;
}

bool verdict(const std::vector<Verdict>& list, SymbolId s) {
    for (const auto& v : list)
        if (v.symbol == s) return v.positive;
    FAIL("no verdict");
    return false;
}

void check_exact(const Run& r) {
    for (const auto& i : r.inv.invariants) {
        for (const auto& g : r.basis.all()) CHECK(apply_generator(g, i.expr).is_zero());
        CHECK(i.kind == kind_of(i.expr, r.m));
    }
}

}  // namespace

TEST_CASE("apply_generator") {
    const ModelDef m = load_fixture(FixtureId::Decay);
    const GeneratorBasis b = eliminate(m);
    Generator rep;
    for (SymbolId s : m.states) rep.eta[s] = RationalFunction();
    for (SymbolId p : m.params) rep.chi[p] = RationalFunction();
    rep.eta[m.symbol("u")] = expr(m, "-1");
    rep.eta[m.symbol("v")] = expr(m, "1");
    rep.chi[m.symbol("kappa1")] = expr(m, "lambda");
    rep.chi[m.symbol("kappa2")] = expr(m, "-lambda");
    const RationalFunction spurious = expr(m, "lambda*u + kappa1");
    CHECK(apply_generator(rep, spurious).is_zero());
    REQUIRE(b.synthetic.size() == 1);
    const RationalFunction slot = apply_generator(b.synthetic[0], spurious);
    CHECK((slot == expr(m, "lambda") || slot == expr(m, "-lambda")));
    CHECK(apply_generator(rep, expr(m, "7/3")).is_zero());
}

TEST_CASE("SEI generators annihilate delta*(1 - upsilon)/upsilon") {
    const ModelDef m = load_fixture(FixtureId::Sei);
    const GeneratorBasis b = eliminate(m);
    for (const auto& g : b.generators) CHECK(apply_generator(g, expr(m, "delta*(1 - upsilon)/upsilon")).is_zero());
}

TEST_CASE("decay invariants") {
    const Run r = run(FixtureId::Decay);
    CHECK(r.inv.invariants.size() == 3);
    CHECK(r.inv.generic_rank == 2);
    CHECK(functional_equivalence(found(r.inv), exprs(r.m, {"lambda", "kappa1 + kappa2", "u + v"})));
    CHECK(verdict(r.verdicts.parameters, r.m.symbol("lambda")));
    CHECK_FALSE(verdict(r.verdicts.parameters, r.m.symbol("kappa1")));
    CHECK_FALSE(verdict(r.verdicts.parameters, r.m.symbol("kappa2")));
    CHECK_FALSE(verdict(r.verdicts.states, r.m.symbol("u")));
    CHECK_FALSE(verdict(r.verdicts.states, r.m.symbol("v")));
    check_exact(r);
}

TEST_CASE("linear invariants") {
    const Run r = run(FixtureId::Linear);
    CHECK(r.inv.invariants.size() == 4);
    CHECK(functional_equivalence(found(r.inv), exprs(r.m, {"a", "c", "x", "b*z"})));
    CHECK(verdict(r.verdicts.parameters, r.m.symbol("a")));
    CHECK(verdict(r.verdicts.parameters, r.m.symbol("c")));
    CHECK(verdict(r.verdicts.states, r.m.symbol("x")));
    CHECK_FALSE(verdict(r.verdicts.states, r.m.symbol("z")));
    check_exact(r);
}

TEST_CASE("glucose invariants") {
    const Run r = run(FixtureId::Glucose);
    CHECK(r.inv.invariants.size() == 6);
    CHECK(functional_equivalence(found(r.inv), exprs(r.m, {"p1", "p3", "V_p", "p2*p4", "x1", "p2*x2"})));
    CHECK(verdict(r.verdicts.states, r.m.symbol("x1")));
    for (const char* p : {"p1", "p3", "V_p"}) CHECK(verdict(r.verdicts.parameters, r.m.symbol(p)));
    check_exact(r);
}

TEST_CASE("SEI invariants") {
    const Run r = run(FixtureId::Sei);
    CHECK(r.inv.invariants.size() == 10);
    CHECK(r.inv.expected_count == 10);
    CHECK(functional_equivalence(found(r.inv),
                                 exprs(r.m, {"S/c", "k_E*E", "k_I*I", "mu_S", "mu_I", "mu_E + delta", "k_I/beta",
                                             "delta*(1 - upsilon)/upsilon", "beta*c*upsilon", "beta*delta/k_E"})));
    CHECK(verdict(r.verdicts.parameters, r.m.symbol("mu_S")));
    CHECK(verdict(r.verdicts.parameters, r.m.symbol("mu_I")));

    std::vector<RationalFunction> params, observed;
    for (const auto& i : r.inv.invariants) (i.kind == InvariantKind::Parameter ? params : observed).push_back(i.expr);
    CHECK(params.size() == 7);
    CHECK(functional_equivalence(params, exprs(r.m, {"mu_S", "mu_I", "mu_E + delta", "k_I/beta",
                                                     "delta*(1 - upsilon)/upsilon", "beta*c*upsilon",
                                                     "beta*delta/k_E"})));
    CHECK(functional_equivalence(observed, exprs(r.m, {"S/c", "k_E*E", "k_I*I"})));
    for (const char* p : {"beta", "delta", "upsilon", "k_E", "k_I"})
        CHECK_FALSE(verdict(r.verdicts.parameters, r.m.symbol(p)));
    check_exact(r);
}

TEST_CASE("classification agrees with singleton invariants") {
    for (FixtureId id : {FixtureId::Decay, FixtureId::Linear, FixtureId::Glucose, FixtureId::Sei}) {
        const Run r = run(id);
        for (const auto& v : r.verdicts.parameters) {
            const RationalFunction x = RationalFunction::var(v.symbol);
            CHECK(v.positive == functional_equivalence(found(r.inv), [&] {
                      auto with = found(r.inv);
                      with.push_back(x);
                      return with;
                  }()));
        }
    }
}

TEST_CASE("count identity") {
    const std::vector<std::tuple<FixtureId, std::size_t, std::size_t, std::size_t>> expected = {
        {FixtureId::Decay, 5, 2, 3},
        {FixtureId::Linear, 5, 1, 4},
        {FixtureId::Glucose, 7, 1, 6},
        {FixtureId::Sei, 12, 2, 10}};
    for (const auto& [id, dim, r, count] : expected) {
        const Run run_ = run(id);
        CHECK(run_.m.coordinates().size() == dim);
        CHECK(generator_rank(run_.basis.all(), run_.m, kDefaultSeed) == r);
        CHECK(run_.inv.invariants.size() == count);
    }
}

TEST_CASE("empty basis makes every coordinate invariant") {
    const ModelDef m = parse_model("model full\nstates x\nparams a\ndx/dt = -a*x\noutput y = x\n");
    const GeneratorBasis b = eliminate(m);
    CHECK(b.all().empty());
    const InvariantSet inv = find_invariants(b, m);
    CHECK(inv.invariants.size() == 2);
    const AnalysisVerdicts v = classify(inv, b, m);
    CHECK(v.parameters[0].positive);
    CHECK(v.states[0].positive);
}

TEST_CASE("functional equivalence") {
    testing::Scope s({"u", "v", "p2", "p4", "beta", "c", "upsilon"});
    CHECK(functional_equivalence({s("u + v")}, {s("2*u + 2*v")}));
    CHECK_FALSE(functional_equivalence({s("p2*p4")}, {s("p2 + p4")}));
    CHECK(functional_equivalence({s("beta*c*upsilon"), s("c/beta")}, {s("beta*c*upsilon"), s("c^2*upsilon")}));
    CHECK_FALSE(functional_equivalence({s("u")}, {s("u"), s("v")}));

    const std::vector<std::vector<RationalFunction>> sets = {
        {s("u*v"), s("p2")}, {s("(u*v)^2 + 1"), s("3*p2")}, {s("p2*u*v"), s("p2^2")}, {s("u"), s("p2")}};
    for (const auto& a : sets) {
        CHECK(functional_equivalence(a, a));
        for (const auto& b : sets) {
            CHECK(functional_equivalence(a, b) == functional_equivalence(b, a));
            for (const auto& c : sets)
                if (functional_equivalence(a, b) && functional_equivalence(b, c)) CHECK(functional_equivalence(a, c));
        }
    }
}

TEST_CASE("scaled generators give the same invariants") {
    ModelDef m = load_fixture(FixtureId::Linear);
    GeneratorBasis b = eliminate(m);
    const InvariantSet before = find_invariants(b, m);
    for (auto& g : b.generators) {
        for (auto& [k, e] : g.eta) e = e * expr(m, "a + c^2");
        for (auto& [k, e] : g.chi) e = e * expr(m, "a + c^2");
    }
    const InvariantSet after = find_invariants(b, m);
    CHECK(functional_equivalence(found(before), found(after)));
}

TEST_CASE("invariants are deterministic") {
    const Run a = run(FixtureId::Glucose), b = run(FixtureId::Glucose);
    REQUIRE(a.inv.invariants.size() == b.inv.invariants.size());
    for (std::size_t i = 0; i < a.inv.invariants.size(); ++i)
        CHECK(to_string(a.inv.invariants[i].expr, *a.m.table) == to_string(b.inv.invariants[i].expr, *b.m.table));
}
