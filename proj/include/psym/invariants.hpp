#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psym/symmetry.hpp"

namespace psym {

inline constexpr std::uint64_t kDefaultSeed = 20240917;

enum class InvariantKind { Parameter, State, ParameterState };
std::string_view to_string(InvariantKind k);

struct Invariant {
    RationalFunction expr;
    InvariantKind kind = InvariantKind::Parameter;
    unsigned num_degree = 0;
    unsigned den_degree = 0;
};

struct InvariantOptions {
    unsigned num_degree = 3;
    unsigned den_degree = 2;
    std::uint64_t seed = kDefaultSeed;
    int points = 5;
};

struct InvariantSet {
    std::vector<Invariant> invariants;
    std::size_t generic_rank = 0;
    std::size_t expected_count = 0;
    unsigned num_degree = 0;
    unsigned den_degree = 0;
    std::size_t candidates = 0;  // distinct candidates seen before selection
};

// X(e) = sum_i eta_i de/dx_i + sum_l chi_l de/dtheta_l (unit representative
// for synthetic generators).
RationalFunction apply_generator(const Generator& g, const RationalFunction& e);

// Rational invariants P/m with monomial m, up to the configured degrees,
// reduced to a functionally independent set.
InvariantSet find_invariants(const GeneratorBasis& basis, const ModelDef& m, const InvariantOptions& opts = {});

InvariantKind kind_of(const RationalFunction& e, const ModelDef& m);

struct Verdict {
    SymbolId symbol;
    bool positive;  // identifiable / observable
};

struct AnalysisVerdicts {
    std::vector<Verdict> parameters;  // identifiable iff chi == 0 in every generator
    std::vector<Verdict> states;      // observable iff eta == 0 everywhere and in no slot
    std::vector<std::string> roles;   // one per invariant
};

AnalysisVerdicts classify(const InvariantSet& inv, const GeneratorBasis& basis, const ModelDef& m);

// Gradient spans agree at sample points.
bool functional_equivalence(const std::vector<RationalFunction>& a, const std::vector<RationalFunction>& b,
                            std::uint64_t seed = kDefaultSeed, int points = 5);

}  // namespace psym
