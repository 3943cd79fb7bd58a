#include "psym/report.hpp"

#include <iomanip>
#include <sstream>

namespace psym {

using nlohmann::ordered_json;

Analysis analyze(ModelDef m, const AnalysisOptions& opts) {
    Analysis a;
    a.basis = eliminate(m, opts.ansatz);
    a.invariants = find_invariants(a.basis, m, opts.invariants);
    a.verdicts = classify(a.invariants, a.basis, m);
    a.model = std::move(m);
    return a;
}

namespace {

std::string str(const RationalFunction& e, const ModelDef& m) { return to_string(e, *m.table); }

std::string name(SymbolId s, const ModelDef& m) { return m.table->name(s); }

bool needs_parens(const std::string& s) {
    int depth = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (depth == 0 && i > 0 && (c == '+' || c == '-' || c == '/')) return true;
    }
    return false;
}

std::string slot_notice(const FreeSlot& slot, const ModelDef& m) {
    std::string names;
    for (SymbolId s : slot.support) names += (names.empty() ? "" : ", ") + name(s, m);
    return "slot assumption: a nonzero solution of the slot equation is assumed to exist along {" + names +
           "}; the states in it are reported unobservable";
}

ordered_json generator_json(const Generator& g, const ModelDef& m) {
    ordered_json j;
    j["label"] = g.label;
    j["synthetic"] = g.synthetic;
    j["normalized"] = g.normalized;
    j["field"] = generator_text(g, m);
    ordered_json eta = ordered_json::object(), chi = ordered_json::object();
    for (SymbolId s : m.states)
        if (!g.component(s).is_zero()) eta[name(s, m)] = str(g.component(s), m);
    for (SymbolId p : m.params)
        if (!g.component(p).is_zero()) chi[name(p, m)] = str(g.component(p), m);
    j["eta"] = eta;
    j["chi"] = chi;
    if (g.synthetic) j["slot_rate"] = str(g.slot_rate, m);
    return j;
}

ordered_json stage_json(const LinearSystem& ls, const ModelDef& m) {
    ordered_json j;
    j["label"] = ls.label;
    ordered_json unknowns = ordered_json::array();
    for (SymbolId u : ls.unknowns) unknowns.push_back(name(u, m));
    j["unknowns"] = unknowns;
    ordered_json rows = ordered_json::array();
    for (const auto& r : ls.rows) {
        ordered_json row;
        row["source"] = r.source;
        row["key"] = r.key;
        ordered_json coeffs = ordered_json::array();
        for (const auto& c : r.coeffs) coeffs.push_back(str(c, m));
        row["coefficients"] = coeffs;
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j;
}

std::string role_of(InvariantKind k) {
    switch (k) {
        case InvariantKind::Parameter: return "identifiable parameter combination";
        case InvariantKind::State: return "observable state combination";
        case InvariantKind::ParameterState: return "observable parameter-state combination";
    }
    return "";
}

std::vector<std::string> standing_notes(const Analysis& a) {
    std::vector<std::string> notes = a.basis.notes;
    notes.push_back("invariants are complete up to degree (" + std::to_string(a.invariants.num_degree) + ", " +
                    std::to_string(a.invariants.den_degree) + ") with monomial denominators");
    notes.push_back("invariants depending on derivatives of the states or on t are not searched");
    notes.push_back("verification seed points are a pragmatic stand-in for the neighbourhoods where local "
                    "identifiability holds");
    return notes;
}

ordered_json tolerances_json(const VerifyOptions& v) {
    ordered_json j;
    j["output"] = v.tol_output;
    j["invariant"] = v.tol_invariant;
    j["closed_form"] = v.tol_closed_form;
    j["structure"] = v.tol_structure;
    j["finite_difference"] = v.tol_fd;
    return j;
}

std::string fixed(double v) {
    std::ostringstream os;
    os << std::setprecision(3) << std::scientific << v;
    return os.str();
}

}  // namespace

std::string generator_text(const Generator& g, const ModelDef& m) {
    std::string out;
    for (SymbolId s : m.coordinates()) {
        const RationalFunction& c = g.component(s);
        if (c.is_zero()) continue;
        std::string term;
        if (c == RationalFunction(Rational(1)))
            term = "d/d" + name(s, m);
        else if (c == RationalFunction(Rational(-1)))
            term = "-d/d" + name(s, m);
        else {
            std::string e = str(c, m);
            term = (needs_parens(e) ? "(" + e + ")" : e) + "*d/d" + name(s, m);
        }
        if (out.empty())
            out = term;
        else if (term[0] == '-')
            out += " - " + term.substr(1);
        else
            out += " + " + term;
    }
    return out.empty() ? "0" : out;
}

ordered_json report_json(const Analysis& a, const AnalysisOptions& aopts, const VerifyOptions& vopts,
                         const std::optional<VerifyReport>& verify) {
    const ModelDef& m = a.model;
    ordered_json doc;

    ordered_json model = export_model(m);
    model["state_count"] = m.states.size();
    model["parameter_count"] = m.params.size();
    doc["model"] = model;

    ordered_json basis;
    basis["rank"] = a.invariants.generic_rank;
    ordered_json gens = ordered_json::array();
    for (const auto& g : a.basis.generators) gens.push_back(generator_json(g, m));
    basis["generators"] = gens;
    ordered_json synth = ordered_json::array();
    for (const auto& g : a.basis.synthetic) synth.push_back(generator_json(g, m));
    basis["slot_generators"] = synth;
    ordered_json slots = ordered_json::array();
    for (const auto& s : a.basis.free_slots) {
        ordered_json j;
        j["state"] = name(s.state, m);
        ordered_json support = ordered_json::array();
        for (SymbolId x : s.support) support.push_back(name(x, m));
        j["support"] = support;
        ordered_json rel = ordered_json::object();
        for (const auto& [x, e] : s.relations) rel[name(x, m)] = str(e, m);
        j["relations"] = rel;
        j["coupling"] = str(s.coupling, m);
        j["notice"] = slot_notice(s, m);
        slots.push_back(j);
    }
    basis["free_slots"] = slots;
    basis["ansatz_used"] = a.basis.ansatz_used;
    ordered_json stages = ordered_json::array();
    for (const auto& ls : a.basis.stages) stages.push_back(stage_json(ls, m));
    basis["stages"] = stages;
    doc["generator_basis"] = basis;

    ordered_json inv;
    inv["count"] = a.invariants.invariants.size();
    inv["expected_count"] = a.invariants.expected_count;
    inv["degree_bounds"] = {{"numerator", a.invariants.num_degree}, {"denominator", a.invariants.den_degree}};
    inv["candidates"] = a.invariants.candidates;
    ordered_json list = ordered_json::array();
    for (const auto& i : a.invariants.invariants) {
        ordered_json j;
        j["expr"] = str(i.expr, m);
        j["kind"] = std::string(to_string(i.kind));
        j["role"] = role_of(i.kind);
        j["numerator_degree"] = i.num_degree;
        j["denominator_degree"] = i.den_degree;
        list.push_back(j);
    }
    inv["invariants"] = list;
    doc["invariants"] = inv;

    ordered_json ident = ordered_json::array(), obs = ordered_json::array();
    for (const auto& i : a.invariants.invariants)
        (i.kind == InvariantKind::Parameter ? ident : obs).push_back(str(i.expr, m));
    ordered_json verdicts;
    verdicts["identifiable_combinations"] = ident;
    verdicts["observable_combinations"] = obs;
    ordered_json params = ordered_json::object(), states = ordered_json::object();
    for (const auto& v : a.verdicts.parameters)
        params[name(v.symbol, m)] = v.positive ? "identifiable" : "unidentifiable";
    for (const auto& v : a.verdicts.states) states[name(v.symbol, m)] = v.positive ? "observable" : "unobservable";
    verdicts["parameters"] = params;
    verdicts["states"] = states;
    doc["verdicts"] = verdicts;

    if (verify) {
        ordered_json v;
        v["checks"] = verify->entries.size();
        v["failure_count"] = verify->failures.size();
        v["passed"] = verify->failures.empty();
        ordered_json seed = ordered_json::object();
        for (SymbolId s : m.coordinates()) seed[name(s, m)] = verify->seed_point[s];
        v["seed_point"] = seed;
        ordered_json entries = ordered_json::array();
        for (const auto& e : verify->entries) {
            ordered_json j;
            j["generator"] = e.generator;
            j["epsilon"] = e.epsilon;
            j["output_deviation"] = e.output_deviation;
            j["invariant_drift"] = e.invariant_drift;
            j["structure_residual"] = e.structure_residual ? ordered_json(*e.structure_residual) : ordered_json();
            j["closed_form_error"] = e.closed_form_error ? ordered_json(*e.closed_form_error) : ordered_json();
            entries.push_back(j);
        }
        v["entries"] = entries;
        v["finite_difference_residuals"] = verify->fd_residuals;
        v["failures"] = verify->failures;
        doc["verification"] = v;
    }

    ordered_json cfg;
    cfg["num_degree"] = aopts.invariants.num_degree;
    cfg["den_degree"] = aopts.invariants.den_degree;
    cfg["eta_state_degree"] = aopts.ansatz.eta_state_degree;
    cfg["eta_param_degree"] = aopts.ansatz.eta_param_degree;
    cfg["seed"] = aopts.invariants.seed;
    cfg["sample_points"] = aopts.invariants.points;
    cfg["eps"] = vopts.eps;
    cfg["tolerances"] = tolerances_json(vopts);
    cfg["input"] = vopts.input;
    cfg["verification_seed"] = vopts.seed;
    doc["config"] = cfg;

    doc["notes"] = standing_notes(a);
    return doc;
}

std::string report_text(const Analysis& a, const AnalysisOptions& aopts, const VerifyOptions& vopts,
                        const std::optional<VerifyReport>& verify, const std::optional<Timing>& timing) {
    const ModelDef& m = a.model;
    std::ostringstream os;
    os << "model " << m.name << ": " << m.states.size() << " states, " << m.params.size() << " parameters, "
       << m.inputs.size() << " inputs, " << m.outputs.size() << " outputs\n";

    os << "\ngenerators (rank " << a.invariants.generic_rank << ")\n";
    if (a.basis.generators.empty() && a.basis.synthetic.empty()) os << "  none\n";
    for (const auto& g : a.basis.generators) os << "  " << g.label << " = " << generator_text(g, m) << "\n";
    for (std::size_t k = 0; k < a.basis.synthetic.size(); ++k) {
        const Generator& g = a.basis.synthetic[k];
        os << "  " << g.label << " = phi*(" << generator_text(g, m) << "), D_t phi = (" << str(g.slot_rate, m)
           << ")*phi\n";
    }
    for (const auto& s : a.basis.free_slots) os << "  " << slot_notice(s, m) << "\n";

    os << "\ninvariants (" << a.invariants.invariants.size() << " of " << a.invariants.expected_count
       << ", up to degree (" << a.invariants.num_degree << ", " << a.invariants.den_degree << "))\n";
    for (const auto& i : a.invariants.invariants) os << "  " << str(i.expr, m) << "  [" << role_of(i.kind) << "]\n";

    os << "\nparameters\n";
    for (const auto& v : a.verdicts.parameters)
        os << "  " << name(v.symbol, m) << ": " << (v.positive ? "identifiable" : "unidentifiable") << "\n";
    os << "states\n";
    for (const auto& v : a.verdicts.states)
        os << "  " << name(v.symbol, m) << ": " << (v.positive ? "observable" : "unobservable") << "\n";

    if (verify) {
        os << "\nverification (seed " << vopts.seed << ", input " << vopts.input << "): " << verify->entries.size()
           << " checks, " << verify->failures.size() << " failures\n";
        for (const auto& e : verify->entries) {
            os << "  " << e.generator << " eps=" << e.epsilon << "  deviation " << fixed(e.output_deviation)
               << "  drift " << fixed(e.invariant_drift);
            if (e.structure_residual) os << "  structure " << fixed(*e.structure_residual);
            if (e.closed_form_error) os << "  closed form " << fixed(*e.closed_form_error);
            os << "\n";
        }
        for (const auto& f : verify->failures) os << "  FAILED " << f << "\n";
    }

    os << "\nconfig: num_degree " << aopts.invariants.num_degree << ", den_degree " << aopts.invariants.den_degree
       << ", eta_state_degree " << aopts.ansatz.eta_state_degree << ", eta_param_degree "
       << aopts.ansatz.eta_param_degree << ", seed " << aopts.invariants.seed << "\n";
    os << "notes\n";
    for (const auto& n : standing_notes(a)) os << "  " << n << "\n";
    if (timing) {
        os << "timing: analysis " << std::fixed << std::setprecision(3) << timing->analysis_seconds << " s";
        if (verify) os << ", verification " << timing->verification_seconds << " s";
        os << "\n";
    }
    return os.str();
}

}  // namespace psym
