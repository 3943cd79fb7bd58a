#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "psym/errors.hpp"
#include "psym/report.hpp"

using namespace psym;

namespace {

enum Exit { Ok = 0, VerifyFailed = 1, Invalid = 2, Pipeline = 3 };

ModelDef load(const std::string& path) {
    if (!std::filesystem::exists(path)) {
        std::string key = std::filesystem::path(path).stem().string();
        if (auto id = fixture_from_key(key)) return load_fixture(*id);
    }
    return load_model_file(path);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Options {
    std::string path;
    std::string json_path;
    AnalysisOptions analysis;
    VerifyOptions verify;
    long corrupt = -1;
};

int run(const Options& o, bool verify_mode) {
    VerifyOptions vopts = o.verify;
    vopts.seed = o.analysis.invariants.seed;
    if (o.corrupt >= 0) vopts.corrupt = static_cast<std::size_t>(o.corrupt);
    make_input(vopts.input);  // reject bad input specs before any work

    ModelDef m = load(o.path);
    auto t0 = std::chrono::steady_clock::now();
    Analysis a = analyze(std::move(m), o.analysis);
    Timing timing;
    timing.analysis_seconds = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    std::optional<VerifyReport> rep = verify_all(a.model, a.basis, a.invariants, vopts);
    timing.verification_seconds = seconds_since(t0);

    const std::string text = report_text(a, o.analysis, vopts, rep, timing);
    if (!o.json_path.empty()) {
        std::ofstream out(o.json_path, std::ios::binary);
        if (!out) throw Error("cli", "cannot write '" + o.json_path + "'");
        out << report_json(a, o.analysis, vopts, rep).dump(2) << "\n";
    }
    std::cout << text;
    if (verify_mode && !rep->failures.empty()) {
        std::cout << rep->failures.size() << " verification failures\n";
        return VerifyFailed;
    }
    return Ok;
}

int list_fixtures() {
    const std::filesystem::path dir = fixture_directory();
    for (const auto& f : fixture_list()) {
        const auto path = dir / std::string(f.filename);
        std::cout << f.key << "  " << path.string() << "\n";
    }
    return Ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parameter-state symmetries, invariants and identifiability of ODE models"};
    app.require_subcommand(1);

    Options o;
    auto add_common = [&o](CLI::App* sub) {
        sub->add_option("model", o.path, "model file (.psm or .json) or fixture name")->required();
        sub->add_option("--num-degree", o.analysis.invariants.num_degree, "invariant numerator degree bound")
            ->capture_default_str();
        sub->add_option("--den-degree", o.analysis.invariants.den_degree, "invariant denominator degree bound")
            ->capture_default_str();
        sub->add_option("--eta-state-degree", o.analysis.ansatz.eta_state_degree,
                        "state degree of the fallback eta ansatz")
            ->capture_default_str();
        sub->add_option("--eta-param-degree", o.analysis.ansatz.eta_param_degree,
                        "parameter degree of the fallback eta ansatz")
            ->capture_default_str();
        sub->add_option("--eps", o.verify.eps, "flow parameters")->delimiter(',')->capture_default_str();
        sub->add_option("--tol-output", o.verify.tol_output, "output deviation tolerance")->capture_default_str();
        sub->add_option("--tol-invariant", o.verify.tol_invariant, "invariant drift tolerance")
            ->capture_default_str();
        sub->add_option("--seed", o.analysis.invariants.seed, "random seed")->capture_default_str();
        sub->add_option("--json", o.json_path, "write the structured report here");
        sub->add_option("--input", o.verify.input, "zero, one, sin, step(t0) or a (t, value) table file")
            ->capture_default_str();
    };

    auto* analyze_cmd = app.add_subcommand("analyze", "symmetries, invariants, verdicts and verification");
    add_common(analyze_cmd);
    auto* verify_cmd = app.add_subcommand("verify", "numerical verification; exit 1 on any failure");
    add_common(verify_cmd);
    verify_cmd->add_option("--corrupt", o.corrupt, "flip one component of this generator (test hook)");
    auto* fixtures_cmd = app.add_subcommand("fixtures", "list the bundled models");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Ok : Invalid;
    }

    try {
        if (fixtures_cmd->parsed()) return list_fixtures();
        return run(o, verify_cmd->parsed());
    } catch (const ParseError& e) {
        std::cerr << "error [" << e.module() << "]: " << e.what() << "\n";
        return Invalid;
    } catch (const PipelineError& e) {
        std::cerr << "error [" << e.module() << "]: " << e.what() << "\n";
        return Pipeline;
    } catch (const AlgebraError& e) {
        std::cerr << "error [" << e.module() << "]: " << e.what() << "\n";
        return Pipeline;
    } catch (const Error& e) {
        std::cerr << "error [" << e.module() << "]: " << e.what() << "\n";
        return Invalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Pipeline;
    }
}
