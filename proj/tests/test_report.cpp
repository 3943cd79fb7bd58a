#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "psym/report.hpp"

using namespace psym;
using nlohmann::ordered_json;

namespace {

struct Result {
    int code;
    std::string out;
};

Result cli(const std::string& args) {
    const std::string cmd = std::string(PSYM_CLI) + " " + args + " 2>&1";
    Result r{-1, ""};
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("report document") {
    const Analysis a = analyze(load_fixture(FixtureId::Decay));
    const VerifyOptions vopts;
    const VerifyReport rep = verify_all(a.model, a.basis, a.invariants, vopts);
    const ordered_json doc = report_json(a, {}, vopts, rep);
    CHECK(doc["model"]["name"] == "decay");
    CHECK(doc["invariants"]["count"] == 3);
    CHECK(doc["invariants"]["degree_bounds"]["numerator"] == 3);
    CHECK(doc["verdicts"]["parameters"]["lambda"] == "identifiable");
    CHECK(doc["verdicts"]["states"]["u"] == "unobservable");
    CHECK(doc["generator_basis"]["free_slots"].size() == 1);
    CHECK(doc["generator_basis"]["free_slots"][0]["notice"].get<std::string>().find("slot assumption") == 0);
    CHECK(doc["verification"]["passed"] == true);
    CHECK(doc["config"]["seed"] == kDefaultSeed);
    CHECK(doc.dump() == report_json(a, {}, vopts, rep).dump());

    // every expression string parses back in the model's symbols
    for (const auto& i : doc["invariants"]["invariants"])
        CHECK(to_string(parse_expression(i["expr"].get<std::string>(), *a.model.table), *a.model.table) ==
              i["expr"].get<std::string>());
    for (const auto& [k, v] : doc["generator_basis"]["generators"][0]["chi"].items())
        CHECK_NOTHROW(parse_expression(v.get<std::string>(), *a.model.table));

    const std::string text = report_text(a, {}, vopts, rep);
    CHECK(text.find("slot assumption") != std::string::npos);
    CHECK(text.find("kappa1 + kappa2") != std::string::npos);
    CHECK(text.find("timing") == std::string::npos);
}

TEST_CASE("generator rendering") {
    const ModelDef m = load_fixture(FixtureId::Linear);
    Generator g;
    for (SymbolId s : m.states) g.eta[s] = RationalFunction();
    for (SymbolId p : m.params) g.chi[p] = RationalFunction();
    CHECK(generator_text(g, m) == "0");
    g.eta[m.symbol("z")] = parse_expression("-z", *m.table);
    g.chi[m.symbol("b")] = parse_expression("b + a", *m.table);
    CHECK(generator_text(g, m) == "-z*d/dz + (a + b)*d/db");
}

TEST_CASE("cli fixtures") {
    const Result r = cli("fixtures");
    CHECK(r.code == 0);
    std::istringstream in(r.out);
    std::string key, path;
    std::vector<std::string> keys;
    while (in >> key >> path) {
        keys.push_back(key);
        CHECK_NOTHROW(load_model_file(path));
    }
    CHECK(keys == std::vector<std::string>{"decay", "linear", "glucose", "sei"});
    CHECK(cli("fixtures").out == r.out);
}

TEST_CASE("cli analyze") {
    const Result r = cli("analyze " + fixture_directory() + "/sei.psm --json psym_sei_report.json");
    CHECK(r.code == 0);
    CHECK(r.out.find("invariants (10 of 10") != std::string::npos);
    const ordered_json doc = ordered_json::parse(slurp("psym_sei_report.json"));
    CHECK(doc["invariants"]["count"] == 10);
    CHECK(doc["verdicts"]["parameters"]["mu_S"] == "identifiable");
    CHECK(doc["verdicts"]["parameters"]["mu_I"] == "identifiable");
    std::remove("psym_sei_report.json");

    const Result d = cli("analyze decay");
    CHECK(d.code == 0);
    CHECK(d.out.find("slot assumption") != std::string::npos);
    CHECK(d.out.find("{u, v}") != std::string::npos);
}

TEST_CASE("cli exit codes") {
    {
        std::ofstream out("psym_broken.psm");
        out << "model broken\nstates x\nparams a\ndx/dt = a*q\noutput y = x\n";
    }
    Result r = cli("analyze psym_broken.psm --json psym_broken.json");
    CHECK(r.code == 2);
    CHECK(r.out.find("'q'") != std::string::npos);
    CHECK_FALSE(std::ifstream("psym_broken.json").good());
    std::remove("psym_broken.psm");

    CHECK(cli("analyze no_such_model.psm").code == 2);
    CHECK(cli("verify glucose --input nonsense").code == 2);
    CHECK(cli("analyze").code == 2);
    CHECK(cli("frobnicate").code == 2);

    {
        std::ofstream out("psym_flat.psm");
        out << "model flat\nstates x\nparams a\ndx/dt = a*x\noutput y = 2\n";
    }
    CHECK(cli("analyze psym_flat.psm").code == 3);
    std::remove("psym_flat.psm");
}

TEST_CASE("cli verify") {
    const Result g = cli("verify glucose --input sin");
    CHECK(g.code == 0);
    CHECK(g.out.find(" 0 failures") != std::string::npos);

    const Result c = cli("verify sei --corrupt 0");
    CHECK(c.code == 1);
    CHECK(c.out.find("verification failures") != std::string::npos);

    const Result z = cli("verify decay --eps 0 --json psym_eps0.json");
    CHECK(z.code == 0);
    const ordered_json doc = ordered_json::parse(slurp("psym_eps0.json"));
    for (const auto& e : doc["verification"]["entries"]) {
        CHECK(e["output_deviation"] == 0.0);
        CHECK(e["invariant_drift"] == 0.0);
    }
    std::remove("psym_eps0.json");
}

TEST_CASE("cli options are echoed") {
    const Result r =
        cli("analyze linear --num-degree 2 --den-degree 1 --seed 7 --eps -0.2,0.2 --tol-output 1e-5 --json psym_opts.json");
    CHECK(r.code == 0);
    const ordered_json doc = ordered_json::parse(slurp("psym_opts.json"));
    CHECK(doc["config"]["num_degree"] == 2);
    CHECK(doc["config"]["den_degree"] == 1);
    CHECK(doc["config"]["seed"] == 7);
    CHECK(doc["config"]["eps"].size() == 2);
    CHECK(doc["config"]["tolerances"]["output"] == 1e-5);
    CHECK(doc["invariants"]["count"] == 4);
    std::remove("psym_opts.json");
}
