#pragma once

#include <optional>
#include <string>

#include "json.hpp"

#include "psym/numverify.hpp"

namespace psym {

struct AnalysisOptions {
    InvariantOptions invariants;
    AnsatzConfig ansatz;
};

struct Analysis {
    ModelDef model;
    GeneratorBasis basis;
    InvariantSet invariants;
    AnalysisVerdicts verdicts;
};

// eliminate -> find_invariants -> classify.
Analysis analyze(ModelDef m, const AnalysisOptions& opts = {});

struct Timing {
    double analysis_seconds = 0;
    double verification_seconds = 0;
};

// Structured report. Depends only on the inputs; timing is never included.
nlohmann::ordered_json report_json(const Analysis& a, const AnalysisOptions& aopts, const VerifyOptions& vopts,
                                   const std::optional<VerifyReport>& verify);

std::string report_text(const Analysis& a, const AnalysisOptions& aopts, const VerifyOptions& vopts,
                        const std::optional<VerifyReport>& verify, const std::optional<Timing>& timing = {});

// "expr*d/dx + ..." over nonzero components.
std::string generator_text(const Generator& g, const ModelDef& m);

}  // namespace psym
