#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "psym/calculus.hpp"
#include "psym/linalg.hpp"
#include "psym/model.hpp"

namespace psym {

// X = sum_i eta_i d/dx_i + sum_l chi_l d/dtheta_l  (no time component).
struct Generator {
    std::string label;
    std::map<SymbolId, RationalFunction> eta;  // every state
    std::map<SymbolId, RationalFunction> chi;  // every parameter, theta only
    bool normalized = false;

    // Synthetic slot directions carry a unit representative: the actual
    // field is phi * (eta, 0) where phi solves D_t phi = slot_rate * phi.
    bool synthetic = false;
    RationalFunction slot_rate;

    bool is_zero() const;
    // eta or chi entry for a state or parameter symbol.
    const RationalFunction& component(SymbolId s) const;
};

// An eta left undetermined up to one scalar first-order constraint.
struct FreeSlot {
    SymbolId state = 0;                   // the free eta
    std::vector<SymbolId> support;        // state plus the etas forced by it
    // eta_j in terms of the formal eta of `state` (and chi unknowns).
    std::map<SymbolId, RationalFunction> relations;
    // Residual constraint in eta/Deta of `state` and chi unknowns.
    RationalFunction coupling;
};

struct LinearSystemRow {
    std::vector<RationalFunction> coeffs;  // one per unknown
    std::string key;                       // monomial the row was collected at
    std::string source;                    // equation it came from
};

// Homogeneous system sum_j coeffs[j] * unknowns[j] = 0.
struct LinearSystem {
    std::string label;
    std::vector<SymbolId> unknowns;
    std::vector<LinearSystemRow> rows;

    PolyMatrix matrix() const;
    // Columns restricted to the given unknowns (in that order).
    PolyMatrix restricted(const std::vector<SymbolId>& cols) const;
};

struct AnsatzConfig {
    unsigned eta_state_degree = 1;
    unsigned eta_param_degree = 2;
};

struct GeneratorBasis {
    std::vector<Generator> generators;
    std::vector<FreeSlot> free_slots;
    std::vector<Generator> synthetic;
    AnsatzConfig ansatz;
    bool ansatz_used = false;
    std::vector<LinearSystem> stages;
    std::vector<std::string> notes;

    // generators followed by synthetic ones
    std::vector<Generator> all() const;
};

// Formal unknowns used while the conditions are still symbolic.
struct FormalSymbols {
    std::vector<SymbolId> eta;   // per state, "eta_<x>"
    std::vector<SymbolId> deta;  // per state, "Deta_<x>"
    std::vector<SymbolId> chi;   // per parameter, "chi_<p>"
};

FormalSymbols formal_symbols(const ModelDef& m);

// sum_i f_i de/dx_i, plus Deta_k de/deta_k for formal eta symbols. Inputs
// and chi unknowns are constants.
RationalFunction total_derivative_on_shell(const RationalFunction& e, const ModelDef& m);
RationalFunction prolong_eta(const RationalFunction& eta, const ModelDef& m);

// X(h_j) for each output with formal eta/chi.
std::vector<RationalFunction> build_output_conditions(const ModelDef& m);

// D_t eta_i - sum_k eta_k df_i/dx_k - sum_l chi_l df_i/dtheta_l per state,
// with the given etas substituted and their derivatives expanded on-shell.
std::vector<RationalFunction> build_linsym_conditions(const ModelDef& m, const Bindings& current = {});

GeneratorBasis eliminate(const ModelDef& m, const AnsatzConfig& opts = {});

// Both condition sets vanish identically.
bool check_generator(const Generator& g, const ModelDef& m);

// Flattened (eta, chi) vector of a generator over states then params.
std::vector<RationalFunction> flatten(const Generator& g, const ModelDef& m);

// Rank of the generators' flattened vectors at sample points; raises
// PipelineError("degenerate sampling") when points keep disagreeing.
std::size_t generator_rank(const std::vector<Generator>& gens, const ModelDef& m, std::uint64_t seed,
                           int points = 5);

// Clears theta denominators, removes the theta content and fixes the sign.
Generator normalize_generator(Generator g, const ModelDef& m);

}  // namespace psym
