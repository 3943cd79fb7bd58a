#include "doctest.h"

#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "psym/errors.hpp"

using namespace psym;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ParseError parse_error_of(const std::string& text) {
    try {
        parse_model(text);
    } catch (const ParseError& e) {
        return e;
    }
    FAIL("expected a parse error for:\n" << text);
    return ParseError("", 0, 0, "");
}

// Random valid model: up to 4 states, 6 params, polynomial degree 3.
std::string random_model_text(std::mt19937& rng, int index) {
    std::uniform_int_distribution<int> ns(1, 4), np(0, 6), ni(0, 1), nout(1, 2);
    const int n = ns(rng), p = np(rng), q = ni(rng);
    SymbolTable t;
    std::vector<SymbolId> all;
    std::ostringstream os;
    os << "model random" << index << '\n' << "states ";
    for (int i = 0; i < n; ++i) {
        os << (i ? ", " : "") << "x" << i;
        all.push_back(t.add("x" + std::to_string(i), SymbolKind::State));
    }
    os << '\n';
    if (p) {
        os << "params ";
        for (int i = 0; i < p; ++i) {
            os << (i ? ", " : "") << "k" << i;
            all.push_back(t.add("k" + std::to_string(i), SymbolKind::Param));
        }
        os << '\n';
    }
    if (q) {
        os << "inputs w\n";
        all.push_back(t.add("w", SymbolKind::Input));
    }
    for (int i = 0; i < n; ++i)
        os << "dx" << i << "/dt = " << to_string(testing::random_poly(rng, all, 3, 5), t) << '\n';
    const int m = nout(rng);
    for (int j = 0; j < m; ++j) {
        RationalFunction h(testing::random_nonzero_poly(rng, all, 3, 3));
        if (j == 1) h = h / RationalFunction(testing::random_nonzero_poly(rng, all, 2, 2));
        os << "output y" << j << " = " << to_string(h, t) << '\n';
    }
    return os.str();
}

}  // namespace

TEST_CASE("fixture declarations") {
    ModelDef sei = load_fixture(FixtureId::Sei);
    CHECK(sei.states.size() == 3);
    CHECK(sei.params.size() == 9);
    CHECK(sei.outputs.size() == 2);

    ModelDef glu = load_fixture(FixtureId::Glucose);
    REQUIRE(glu.inputs.size() == 1);
    CHECK(glu.symbols().name(glu.inputs[0]) == "u");
    CHECK(glu.outputs[0].expr == parse_expression("x1/V_p", glu.symbols()));

    ModelDef decay = load_fixture(FixtureId::Decay);
    auto doc = export_model(decay);
    CHECK(doc["states"] == nlohmann::ordered_json({"u", "v"}));
    CHECK(doc["params"] == nlohmann::ordered_json({"kappa1", "kappa2", "lambda"}));
}

TEST_CASE("symbol ids follow declaration order") {
    ModelDef m = parse_model("model m\ninputs w\nparams k\nstates b, a\nda/dt = k*w\ndb/dt = a\noutput y = b\n");
    CHECK(m.time == 0);
    CHECK(m.symbols().name(1) == "b");
    CHECK(m.symbols().name(2) == "a");
    CHECK(m.symbols().name(3) == "k");
    CHECK(m.symbols().name(4) == "w");
}

TEST_CASE("bundled files match the embedded fixtures") {
    for (const auto& f : fixture_list()) {
        const std::string path = fixture_directory() + "/" + std::string(f.filename);
        CHECK(read_file(path) == std::string(fixture_text(f.id)));
        CHECK(load_model_file(path) == load_fixture(f.id));
    }
}

TEST_CASE("fixture round-trips") {
    for (const auto& f : fixture_list()) {
        ModelDef m = load_fixture(f.id);
        CHECK(parse_model(print_model(m)) == m);
        CHECK(import_model(export_model(m)) == m);
        CHECK(print_model(parse_model(print_model(m))) == print_model(m));
    }
}

TEST_CASE("random model round-trips") {
    std::mt19937 rng(31337);
    for (int i = 0; i < 100; ++i) {
        const std::string text = random_model_text(rng, i);
        ModelDef m = parse_model(text);
        CHECK(parse_model(print_model(m)) == m);
        CHECK(import_model(nlohmann::ordered_json::parse(export_model(m).dump())) == m);
    }
}

TEST_CASE("parse errors name the offending token") {
    auto e = parse_error_of("model m\nstates z\ndx/dt = a*x\ndz/dt = z\noutput y = z\n");
    CHECK(e.token() == "x");
    CHECK(e.line() == 3);

    e = parse_error_of("model m\nstates x\nparams a\ndx/dt = a*q\noutput y = x\n");
    CHECK(e.token() == "q");
    CHECK(std::string(e.what()).find("undeclared") != std::string::npos);

    e = parse_error_of("model m\nstates x, z\ndx/dt = x\noutput y = x\n");
    CHECK(e.token() == "z");
    CHECK(std::string(e.what()).find("missing dynamics") != std::string::npos);

    e = parse_error_of("model m\nstates x\ndx/dt = exp(x)\noutput y = x\n");
    CHECK(e.token() == "exp");

    e = parse_error_of("model m\nstates x\ndx/dt = x^0.5\noutput y = x\n");
    CHECK(e.token() == "0.5");

    e = parse_error_of("model m\nstates x\nparams x\ndx/dt = x\noutput y = x\n");
    CHECK(e.token() == "x");
    CHECK(e.line() == 3);

    e = parse_error_of("model m\nstates x\ndx/dt = x*t\noutput y = x\n");
    CHECK(e.token() == "t");

    e = parse_error_of("model m\nstates x\ndx/dt = (x + 1\noutput y = x\n");
    CHECK(e.line() == 3);
    CHECK(e.column() == 15);

    e = parse_error_of("model m\nstates x\ndx/dt = x\n");
    CHECK(std::string(e.what()).find("output") != std::string::npos);

    e = parse_error_of("model m\nstates x\ndx/dt = x / (x - x)\noutput y = x\n");
    CHECK(std::string(e.what()).find("division by zero") != std::string::npos);
}

TEST_CASE("decimal literals are exact") {
    ModelDef m = parse_model("model m\nstates x\ndx/dt = 0.25*x + 1.5e-1\noutput y = x\n");
    CHECK(m.rhs(m.states[0]) == parse_expression("x/4 + 3/20", m.symbols()));
}

TEST_CASE("removing any declared name from a fixture is rejected") {
    for (const auto& f : fixture_list()) {
        const std::string text(fixture_text(f.id));
        std::istringstream in(text);
        std::vector<std::string> lines;
        for (std::string l; std::getline(in, l);) lines.push_back(l);
        for (std::size_t li = 0; li < lines.size(); ++li) {
            const std::string& l = lines[li];
            std::string kw;
            if (l.rfind("states ", 0) == 0) kw = "states ";
            else if (l.rfind("params ", 0) == 0) kw = "params ";
            else if (l.rfind("inputs ", 0) == 0) kw = "inputs ";
            else continue;
            std::vector<std::string> ids;
            std::stringstream ls(l.substr(kw.size()));
            for (std::string id; std::getline(ls, id, ',');) {
                id.erase(0, id.find_first_not_of(' '));
                ids.push_back(id);
            }
            for (std::size_t drop = 0; drop < ids.size(); ++drop) {
                std::string mutated;
                for (std::size_t k = 0; k < lines.size(); ++k) {
                    if (k != li) {
                        mutated += lines[k] + '\n';
                        continue;
                    }
                    std::string decl;
                    for (std::size_t j = 0; j < ids.size(); ++j)
                        if (j != drop) decl += (decl.empty() ? "" : ", ") + ids[j];
                    if (!decl.empty()) mutated += kw + decl + '\n';
                }
                CAPTURE(mutated);
                CHECK_THROWS_AS(parse_model(mutated), ParseError);
            }
        }
    }
}
