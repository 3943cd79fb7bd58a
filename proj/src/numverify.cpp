#include "psym/numverify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include "psym/errors.hpp"
#include "psym/sampling.hpp"

namespace psym {

InputFn make_input(const std::string& spec) {
    if (spec == "zero") return [](double) { return 0.0; };
    if (spec == "one") return [](double) { return 1.0; };
    if (spec == "sin") return [](double t) { return std::sin(t); };
    if (spec.rfind("step(", 0) == 0 && spec.back() == ')') {
        const std::string arg = spec.substr(5, spec.size() - 6);
        std::size_t used = 0;
        double t0 = 0;
        try {
            t0 = std::stod(arg, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != arg.size()) throw Error("numverify", "bad step input '" + spec + "'");
        return [t0](double t) { return t >= t0 ? 1.0 : 0.0; };
    }
    std::ifstream in(spec);
    if (!in) throw Error("numverify", "unknown input function or unreadable file '" + spec + "'");
    std::vector<std::pair<double, double>> table;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double t, v;
        if (!(ls >> t)) continue;
        if (!(ls >> v)) throw Error("numverify", "input table row needs two columns: '" + line + "'");
        table.emplace_back(t, v);
    }
    if (table.empty()) throw Error("numverify", "empty input table '" + spec + "'");
    std::sort(table.begin(), table.end());
    return [table](double t) {
        if (t <= table.front().first) return table.front().second;
        if (t >= table.back().first) return table.back().second;
        auto hi = std::upper_bound(table.begin(), table.end(), std::make_pair(t, -HUGE_VAL));
        auto lo = hi - 1;
        const double w = (t - lo->first) / (hi->first - lo->first);
        return lo->second + w * (hi->second - lo->second);
    };
}

namespace {

double eval(const RationalFunction& e, const Point& p) { return e.evaluate(std::span<const double>(p)); }

void set_inputs(const ModelDef& m, const SimConfig& cfg, Point& p, double t) {
    for (SymbolId u : m.inputs) {
        auto it = cfg.inputs.find(u);
        if (it == cfg.inputs.end())
            throw Error("numverify", "no numeric function for input '" + m.table->name(u) + "'");
        p[u] = it->second(t);
    }
}

std::vector<double> rhs_at(const ModelDef& m, const SimConfig& cfg, Point p, const std::vector<double>& x, double t) {
    for (std::size_t i = 0; i < m.states.size(); ++i) p[m.states[i]] = x[i];
    set_inputs(m, cfg, p, t);
    std::vector<double> d(m.states.size());
    for (std::size_t i = 0; i < m.states.size(); ++i) d[i] = eval(m.rhs(m.states[i]), p);
    return d;
}

std::vector<double> rk4_step(const ModelDef& m, const SimConfig& cfg, const Point& base, const std::vector<double>& x,
                             double t, double h) {
    const std::size_t n = x.size();
    auto axpy = [n](const std::vector<double>& a, const std::vector<double>& b, double s) {
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = a[i] + s * b[i];
        return r;
    };
    const auto k1 = rhs_at(m, cfg, base, x, t);
    const auto k2 = rhs_at(m, cfg, base, axpy(x, k1, h / 2), t + h / 2);
    const auto k3 = rhs_at(m, cfg, base, axpy(x, k2, h / 2), t + h / 2);
    const auto k4 = rhs_at(m, cfg, base, axpy(x, k3, h), t + h);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    return out;
}

std::vector<double> outputs_at(const ModelDef& m, const SimConfig& cfg, Point p, const std::vector<double>& x,
                               double t) {
    for (std::size_t i = 0; i < m.states.size(); ++i) p[m.states[i]] = x[i];
    set_inputs(m, cfg, p, t);
    std::vector<double> y;
    for (const auto& o : m.outputs) y.push_back(eval(o.expr, p));
    return y;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

}  // namespace

Trajectory simulate(const ModelDef& m, const Point& point, const SimConfig& cfg) {
    if (cfg.n_samples < 2) throw Error("numverify", "need at least two samples");
    Trajectory tr;
    std::vector<double> x;
    for (SymbolId s : m.states) x.push_back(point.at(s));
    const double dt = cfg.t_end / (cfg.n_samples - 1);
    const int sub = std::max(1, int(std::ceil(dt / cfg.rk4_step - 1e-9)));
    const double h = dt / sub;
    double t = 0;
    for (int k = 0; k < cfg.n_samples; ++k) {
        if (k > 0)
            for (int s = 0; s < sub; ++s) {
                x = rk4_step(m, cfg, point, x, t, h);
                t = (k - 1) * dt + (s + 1) * h;
                for (double v : x)
                    if (!std::isfinite(v)) throw PipelineError("numverify", "blow-up at t=" + fmt(t));
            }
        t = k * dt;
        tr.times.push_back(t);
        tr.states.push_back(x);
        tr.outputs.push_back(outputs_at(m, cfg, point, x, t));
    }
    return tr;
}

namespace {

struct Field {
    std::vector<SymbolId> coords;
    std::vector<RationalFunction> entries;
    std::vector<std::size_t> rational;  // entries with a non-constant denominator
};

Field field_of(const ModelDef& m, const Generator& g) {
    Field f;
    f.coords = m.coordinates();
    f.entries = flatten(g, m);
    for (std::size_t i = 0; i < f.entries.size(); ++i)
        if (!f.entries[i].is_zero() && !f.entries[i].den().is_constant()) f.rational.push_back(i);
    return f;
}

void check_denominators(const Field& f, const Point& p, const std::vector<int>& signs, double eps) {
    for (std::size_t k = 0; k < f.rational.size(); ++k) {
        const double d = f.entries[f.rational[k]].den().evaluate(std::span<const double>(p));
        if (!std::isfinite(d) || std::abs(d) < 1e-12 || (d > 0 ? 1 : -1) != signs[k])
            throw PipelineError("numverify", "flow singularity at eps=" + fmt(eps));
    }
}

std::vector<double> field_at(const Field& f, const Point& p) {
    std::vector<double> v(f.entries.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!f.entries[i].is_zero()) v[i] = eval(f.entries[i], p);
    return v;
}

Point flow(const Field& f, const Point& start, double eps, double step) {
    Point p = start;
    if (eps == 0) return p;
    std::vector<int> signs;
    for (auto i : f.rational) signs.push_back(f.entries[i].den().evaluate(std::span<const double>(start)) > 0 ? 1 : -1);
    const int n = std::max(1, int(std::ceil(std::abs(eps) / step - 1e-9)));
    const double h = eps / n;
    auto shifted = [&](const Point& base, const std::vector<double>& k, double s) {
        Point q = base;
        for (std::size_t i = 0; i < f.coords.size(); ++i) q[f.coords[i]] += s * k[i];
        return q;
    };
    for (int s = 0; s < n; ++s) {
        check_denominators(f, p, signs, h * s);
        const auto k1 = field_at(f, p);
        const Point p2 = shifted(p, k1, h / 2);
        check_denominators(f, p2, signs, h * (s + 0.5));
        const auto k2 = field_at(f, p2);
        const Point p3 = shifted(p, k2, h / 2);
        check_denominators(f, p3, signs, h * (s + 0.5));
        const auto k3 = field_at(f, p3);
        const Point p4 = shifted(p, k3, h);
        check_denominators(f, p4, signs, h * (s + 1));
        const auto k4 = field_at(f, p4);
        for (std::size_t i = 0; i < f.coords.size(); ++i)
            p[f.coords[i]] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
    check_denominators(f, p, signs, eps);
    return p;
}

}  // namespace

Point flow_point(const ModelDef& m, const Generator& g, const Point& start, double eps, double step) {
    return flow(field_of(m, g), start, eps, step);
}

std::map<double, Point> integrate_flow(const ModelDef& m, const FlowRequest& req, double step) {
    const Field f = field_of(m, req.generator);
    std::map<double, Point> out;
    for (double eps : req.epsilon_values) out[eps] = flow(f, req.seed_point, eps, step);
    return out;
}

std::optional<Point> closed_form_flow(const ModelDef& m, const Generator& g, const Point& start, double eps) {
    const Field f = field_of(m, g);
    std::set<SymbolId> moving;
    for (std::size_t i = 0; i < f.coords.size(); ++i)
        if (!f.entries[i].is_zero()) moving.insert(f.coords[i]);
    auto fixed_only = [&](const RationalFunction& e) {
        for (SymbolId s : e.symbols())
            if (moving.count(s)) return false;
        return true;
    };
    Point p = start;
    for (std::size_t i = 0; i < f.coords.size(); ++i) {
        const RationalFunction& e = f.entries[i];
        if (e.is_zero()) continue;
        const SymbolId z = f.coords[i];
        if (fixed_only(e)) {
            p[z] = start[z] + eps * eval(e, start);
            continue;
        }
        const RationalFunction rate = e / RationalFunction::var(z);
        if (fixed_only(rate)) {
            p[z] = start[z] * std::exp(eps * eval(rate, start));
            continue;
        }
        return std::nullopt;
    }
    return p;
}

std::vector<double> fd_output_derivative(const ModelDef& m, const Generator& g, const Point& point, double h,
                                         const SimConfig& cfg) {
    const Field f = field_of(m, g);
    const double step = std::min(1e-3, h);
    Point plus = flow(f, point, h, step), minus = flow(f, point, -h, step);
    set_inputs(m, cfg, plus, 0);
    set_inputs(m, cfg, minus, 0);
    std::vector<double> out;
    for (const auto& o : m.outputs) out.push_back((eval(o.expr, plus) - eval(o.expr, minus)) / (2 * h));
    return out;
}

double fd_output_invariance(const ModelDef& m, const Generator& g, const Point& point, double h,
                            const SimConfig& cfg) {
    double r = 0;
    for (double v : fd_output_derivative(m, g, point, h, cfg)) r = std::max(r, std::abs(v));
    return r;
}

std::vector<VerifyEntry> verify_symmetry(const ModelDef& m, const Generator& g, const SimConfig& cfg,
                                         const FlowRequest& req, const std::vector<Invariant>& invariants) {
    const Field f = field_of(m, g);
    const Trajectory base = simulate(m, req.seed_point, cfg);
    std::vector<VerifyEntry> out;
    for (double eps : req.epsilon_values) {
        VerifyEntry e;
        e.generator = g.label;
        e.synthetic = g.synthetic;
        e.epsilon = eps;
        const Point moved = flow(f, req.seed_point, eps, 1e-3);
        if (auto exact = closed_form_flow(m, g, req.seed_point, eps)) {
            double err = 0;
            for (SymbolId z : f.coords)
                err = std::max(err, std::abs(moved[z] - (*exact)[z]) / std::max(1.0, std::abs((*exact)[z])));
            e.closed_form_error = err;
        }
        const Trajectory tr = simulate(m, moved, cfg);
        for (std::size_t k = 0; k < tr.outputs.size(); ++k)
            for (std::size_t j = 0; j < tr.outputs[k].size(); ++j) {
                const double y = base.outputs[k][j], yh = tr.outputs[k][j];
                e.output_deviation = std::max(e.output_deviation, std::abs(y - yh) / (1 + std::abs(y)));
            }
        for (const auto& inv : invariants) {
            const double a = eval(inv.expr, req.seed_point), b = eval(inv.expr, moved);
            e.invariant_drift = std::max(e.invariant_drift, std::abs(a - b) / (1 + std::abs(a)));
        }
        if (!g.synthetic) {
            // transformed solutions must solve the transformed system
            const double d = cfg.rk4_step;
            double res = 0;
            for (std::size_t k = 10; k + 10 < base.times.size(); k += 10) {
                const double t = base.times[k];
                const std::vector<double>& x = base.states[k];
                auto at = [&](const std::vector<double>& xs) {
                    Point p = req.seed_point;
                    for (std::size_t i = 0; i < m.states.size(); ++i) p[m.states[i]] = xs[i];
                    return flow(f, p, eps, 1e-3);
                };
                const Point mid = at(x);
                const Point fwd = at(rk4_step(m, cfg, req.seed_point, x, t, d));
                const Point bwd = at(rk4_step(m, cfg, req.seed_point, x, t, -d));
                std::vector<double> xm;
                for (SymbolId s : m.states) xm.push_back(mid[s]);
                const auto fm = rhs_at(m, cfg, mid, xm, t);
                for (std::size_t i = 0; i < m.states.size(); ++i) {
                    const SymbolId s = m.states[i];
                    const double fd = (fwd[s] - bwd[s]) / (2 * d);
                    res = std::max(res, std::abs(fd - fm[i]) / (1 + std::abs(fm[i])));
                }
            }
            e.structure_residual = res;
        }
        out.push_back(e);
    }
    return out;
}

Point default_seed_point(const ModelDef& m, const std::vector<Generator>& gens,
                         const std::vector<Invariant>& invariants, std::uint64_t seed) {
    std::vector<const RationalFunction*> dens;
    for (SymbolId s : m.states) dens.push_back(&m.rhs(s));
    for (const auto& o : m.outputs) dens.push_back(&o.expr);
    for (const auto& g : gens) {
        for (const auto& [s, e] : g.eta) dens.push_back(&e);
        for (const auto& [s, e] : g.chi) dens.push_back(&e);
    }
    for (const auto& i : invariants) dens.push_back(&i.expr);

    SampleRng rng(seed);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Point p(m.table->size(), 0.0);
        for (SymbolId s : m.states) p[s] = rng.uniform(0.5, 2.0);
        for (SymbolId s : m.params) p[s] = rng.uniform(0.5, 2.0);
        bool ok = true;
        for (const auto* e : dens)
            if (!e->den().is_constant() && std::abs(e->den().evaluate(std::span<const double>(p))) < 1e-3) ok = false;
        if (ok) return p;
    }
    throw PipelineError("numverify", "no admissible seed point");
}

Generator corrupted(const Generator& g, const ModelDef& m) {
    Generator c = g;
    c.label = g.label + " (corrupted)";
    for (SymbolId p : m.params)
        if (!c.chi[p].is_zero()) {
            c.chi[p] = -c.chi[p];
            return c;
        }
    for (SymbolId s : m.states)
        if (!c.eta[s].is_zero()) {
            c.eta[s] = -c.eta[s];
            return c;
        }
    return c;
}

VerifyReport verify_all(const ModelDef& m, const GeneratorBasis& basis, const InvariantSet& inv,
                        const VerifyOptions& opts) {
    std::vector<Generator> gens = basis.generators;
    if (opts.corrupt) {
        if (*opts.corrupt >= gens.size())
            throw Error("numverify", "no generator with index " + std::to_string(*opts.corrupt) + " to corrupt");
        gens[*opts.corrupt] = corrupted(gens[*opts.corrupt], m);
    }
    gens.insert(gens.end(), basis.synthetic.begin(), basis.synthetic.end());

    SimConfig cfg;
    for (SymbolId u : m.inputs) cfg.inputs[u] = make_input(opts.input);

    VerifyReport rep;
    rep.seed_point = default_seed_point(m, gens, inv.invariants, opts.seed);

    struct Job {
        std::vector<VerifyEntry> entries;
        double fd = 0;
    };
    std::vector<std::future<Job>> jobs;
    for (const auto& g : gens)
        jobs.push_back(std::async(std::launch::async, [&m, &g, &cfg, &inv, &opts, &rep] {
            FlowRequest req{g, opts.eps, rep.seed_point};
            return Job{verify_symmetry(m, g, cfg, req, inv.invariants),
                       fd_output_invariance(m, g, rep.seed_point, 1e-4, cfg)};
        }));
    for (std::size_t k = 0; k < gens.size(); ++k) {
        Job job = jobs[k].get();
        for (auto& e : job.entries) {
            const std::string tag = e.generator + " eps=" + fmt(e.epsilon) + ": ";
            if (e.output_deviation > opts.tol_output)
                rep.failures.push_back(tag + "output deviation " + fmt(e.output_deviation));
            if (e.invariant_drift > opts.tol_invariant)
                rep.failures.push_back(tag + "invariant drift " + fmt(e.invariant_drift));
            if (e.structure_residual && *e.structure_residual > opts.tol_structure)
                rep.failures.push_back(tag + "structure residual " + fmt(*e.structure_residual));
            if (e.closed_form_error && *e.closed_form_error > opts.tol_closed_form)
                rep.failures.push_back(tag + "closed form mismatch " + fmt(*e.closed_form_error));
            rep.entries.push_back(std::move(e));
        }
        rep.fd_residuals.push_back(job.fd);
        if (job.fd > opts.tol_fd)
            rep.failures.push_back(gens[k].label + ": finite-difference output residual " + fmt(job.fd));
    }
    return rep;
}

}  // namespace psym
