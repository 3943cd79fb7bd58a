#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "psym/invariants.hpp"

namespace psym {

using InputFn = std::function<double(double)>;

// "zero", "one", "sin", "step(t0)", or a path to a two-column (t, value)
// text file interpolated linearly. Throws Error on anything else.
InputFn make_input(const std::string& spec);

// Values indexed by SymbolId.
using Point = std::vector<double>;

struct SimConfig {
    double t_end = 10.0;
    int n_samples = 101;
    double rk4_step = 1e-3;
    std::map<SymbolId, InputFn> inputs;  // one per declared input
};

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;   // per sample, per state
    std::vector<std::vector<double>> outputs;  // per sample, per output
};

// Fixed-step RK4; throws PipelineError("blow-up at t=...") on non-finite state.
Trajectory simulate(const ModelDef& m, const Point& point, const SimConfig& cfg);

struct FlowRequest {
    Generator generator;
    std::vector<double> epsilon_values;
    Point seed_point;
};

// RK4 in epsilon (step 1e-3) along the generator's field; throws
// PipelineError("flow singularity ...") when an entry denominator vanishes.
std::map<double, Point> integrate_flow(const ModelDef& m, const FlowRequest& req, double step = 1e-3);
Point flow_point(const ModelDef& m, const Generator& g, const Point& start, double eps, double step = 1e-3);

// Exact flow when every nonzero entry is a translation or a scaling whose
// rate only involves coordinates the field leaves fixed.
std::optional<Point> closed_form_flow(const ModelDef& m, const Generator& g, const Point& start, double eps);

// Central difference of every output along the flow at `point` (inputs at t = 0).
std::vector<double> fd_output_derivative(const ModelDef& m, const Generator& g, const Point& point, double h,
                                         const SimConfig& cfg);
double fd_output_invariance(const ModelDef& m, const Generator& g, const Point& point, double h,
                            const SimConfig& cfg);

struct VerifyEntry {
    std::string generator;
    bool synthetic = false;
    double epsilon = 0;
    double output_deviation = 0;
    double invariant_drift = 0;
    std::optional<double> structure_residual;  // not defined for slot directions
    std::optional<double> closed_form_error;
};

std::vector<VerifyEntry> verify_symmetry(const ModelDef& m, const Generator& g, const SimConfig& cfg,
                                         const FlowRequest& req, const std::vector<Invariant>& invariants);

struct VerifyOptions {
    std::vector<double> eps = {-0.5, -0.1, 0.1, 0.5};
    double tol_output = 1e-6;
    double tol_invariant = 1e-8;
    double tol_closed_form = 1e-9;
    double tol_structure = 1e-4;
    double tol_fd = 1e-6;
    std::uint64_t seed = kDefaultSeed;
    std::string input = "sin";
    std::optional<std::size_t> corrupt;  // flip the first nonzero chi of this generator
};

struct VerifyReport {
    Point seed_point;
    std::vector<VerifyEntry> entries;
    std::vector<double> fd_residuals;  // per generator, h = 1e-4
    std::vector<std::string> failures;
};

// Seed point: states and parameters uniform in [0.5, 2], redrawn while any
// model, generator or invariant denominator is within 1e-3 of zero.
Point default_seed_point(const ModelDef& m, const std::vector<Generator>& gens,
                         const std::vector<Invariant>& invariants, std::uint64_t seed);

Generator corrupted(const Generator& g, const ModelDef& m);

VerifyReport verify_all(const ModelDef& m, const GeneratorBasis& basis, const InvariantSet& inv,
                        const VerifyOptions& opts);

}  // namespace psym
