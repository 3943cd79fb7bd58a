#include "psym/symmetry.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "psym/errors.hpp"
#include "psym/sampling.hpp"

namespace psym {

bool Generator::is_zero() const {
    for (const auto& [s, e] : eta)
        if (!e.is_zero()) return false;
    for (const auto& [s, e] : chi)
        if (!e.is_zero()) return false;
    return true;
}

const RationalFunction& Generator::component(SymbolId s) const {
    static const RationalFunction zero;
    if (auto it = eta.find(s); it != eta.end()) return it->second;
    if (auto it = chi.find(s); it != chi.end()) return it->second;
    return zero;
}

std::vector<Generator> GeneratorBasis::all() const {
    std::vector<Generator> out = generators;
    out.insert(out.end(), synthetic.begin(), synthetic.end());
    return out;
}

PolyMatrix LinearSystem::matrix() const {
    PolyMatrix out;
    for (const auto& r : rows) out.push_back(clear_denominators(r.coeffs));
    return out;
}

PolyMatrix LinearSystem::restricted(const std::vector<SymbolId>& cols) const {
    std::vector<std::size_t> idx;
    for (SymbolId c : cols) {
        auto it = std::find(unknowns.begin(), unknowns.end(), c);
        if (it == unknowns.end()) throw Error("symmetry", "unknown not in system");
        idx.push_back(std::size_t(it - unknowns.begin()));
    }
    PolyMatrix out;
    for (const auto& r : rows) {
        std::vector<RationalFunction> sub;
        for (auto j : idx) sub.push_back(r.coeffs[j]);
        out.push_back(clear_denominators(sub));
    }
    return out;
}

FormalSymbols formal_symbols(const ModelDef& m) {
    FormalSymbols fs;
    SymbolTable& t = *m.table;
    for (auto s : m.states) {
        fs.eta.push_back(t.intern("eta_" + t.name(s), SymbolKind::Unknown));
        fs.deta.push_back(t.intern("Deta_" + t.name(s), SymbolKind::Unknown));
    }
    for (auto p : m.params) fs.chi.push_back(t.intern("chi_" + t.name(p), SymbolKind::Unknown));
    return fs;
}

namespace {

// Coefficient of `u` in an expression linear in `u`.
RationalFunction linear_coeff(const RationalFunction& e, SymbolId u) {
    if (!e.contains(u)) return RationalFunction();
    if (!e.den().contains(u)) return RationalFunction(e.num().derivative(u), e.den());
    return differentiate(e, u);
}

std::optional<SymbolId> formal_lookup(const SymbolTable& t, const std::string& name) {
    auto id = t.find(name);
    if (id && t.kind(*id) == SymbolKind::Unknown) return id;
    return std::nullopt;
}

}  // namespace

RationalFunction total_derivative_on_shell(const RationalFunction& e, const ModelDef& m) {
    const SymbolTable& t = *m.table;
    RationalFunction acc;
    for (auto s : m.states) {
        if (e.contains(s)) acc += m.rhs(s) * differentiate(e, s);
        auto eta = formal_lookup(t, "eta_" + t.name(s));
        if (eta && e.contains(*eta)) {
            auto deta = formal_lookup(t, "Deta_" + t.name(s));
            if (!deta) throw Error("symmetry", "missing formal derivative symbol");
            acc += differentiate(e, *eta) * RationalFunction::var(*deta);
        }
    }
    return acc;
}

RationalFunction prolong_eta(const RationalFunction& eta, const ModelDef& m) {
    return total_derivative_on_shell(eta, m);
}

std::vector<RationalFunction> build_output_conditions(const ModelDef& m) {
    const FormalSymbols fs = formal_symbols(m);
    std::vector<RationalFunction> out;
    for (const auto& o : m.outputs) {
        RationalFunction c;
        for (std::size_t i = 0; i < m.states.size(); ++i)
            if (o.expr.contains(m.states[i]))
                c += RationalFunction::var(fs.eta[i]) * differentiate(o.expr, m.states[i]);
        for (std::size_t l = 0; l < m.params.size(); ++l)
            if (o.expr.contains(m.params[l]))
                c += RationalFunction::var(fs.chi[l]) * differentiate(o.expr, m.params[l]);
        out.push_back(std::move(c));
    }
    return out;
}

namespace {

Bindings with_derivatives(const ModelDef& m, const FormalSymbols& fs, const Bindings& current) {
    Bindings full = current;
    for (std::size_t i = 0; i < fs.eta.size(); ++i) {
        auto it = current.find(fs.eta[i]);
        if (it != current.end()) full[fs.deta[i]] = total_derivative_on_shell(it->second, m);
    }
    return full;
}

}  // namespace

std::vector<RationalFunction> build_linsym_conditions(const ModelDef& m, const Bindings& current) {
    const FormalSymbols fs = formal_symbols(m);
    const Bindings full = with_derivatives(m, fs, current);
    std::vector<RationalFunction> out;
    for (std::size_t i = 0; i < m.states.size(); ++i) {
        const RationalFunction& f = m.rhs(m.states[i]);
        RationalFunction c = RationalFunction::var(fs.deta[i]);
        for (std::size_t k = 0; k < m.states.size(); ++k)
            if (f.contains(m.states[k])) c -= RationalFunction::var(fs.eta[k]) * differentiate(f, m.states[k]);
        for (std::size_t l = 0; l < m.params.size(); ++l)
            if (f.contains(m.params[l])) c -= RationalFunction::var(fs.chi[l]) * differentiate(f, m.params[l]);
        out.push_back(full.empty() ? c : substitute(c, full));
    }
    return out;
}

std::vector<RationalFunction> flatten(const Generator& g, const ModelDef& m) {
    std::vector<RationalFunction> v;
    for (auto s : m.states) v.push_back(g.component(s));
    for (auto p : m.params) v.push_back(g.component(p));
    return v;
}

bool check_generator(const Generator& g, const ModelDef& m) {
    for (const auto& [p, c] : g.chi)
        for (SymbolId s : c.symbols())
            if (!m.is_param(s)) return false;
    for (const auto& [s, e] : g.eta)
        for (SymbolId x : e.symbols())
            if (!m.is_state(x) && !m.is_param(x)) return false;

    auto apply = [&](const RationalFunction& e) {
        RationalFunction acc;
        for (auto s : m.states)
            if (e.contains(s) && !g.component(s).is_zero()) acc += g.component(s) * differentiate(e, s);
        for (auto p : m.params)
            if (e.contains(p) && !g.component(p).is_zero()) acc += g.component(p) * differentiate(e, p);
        return acc;
    };
    for (const auto& o : m.outputs)
        if (!apply(o.expr).is_zero()) return false;
    for (auto s : m.states) {
        const RationalFunction& eta = g.component(s);
        RationalFunction lhs = total_derivative_on_shell(eta, m);
        if (g.synthetic) lhs += g.slot_rate * eta;
        if (!(lhs - apply(m.rhs(s))).is_zero()) return false;
    }
    return true;
}

namespace {

// gcd of the coefficients of p viewed as a polynomial in `along`.
SparsePoly content_outside(const SparsePoly& p, const std::set<SymbolId>& along) {
    SparsePoly g;
    for (const auto& [mono, c] : collect(p, along)) {
        g = gcd(g, c);
        if (g.is_constant()) break;
    }
    return g;
}

}  // namespace

Generator normalize_generator(Generator g, const ModelDef& m) {
    std::set<SymbolId> xs(m.states.begin(), m.states.end());
    xs.insert(m.inputs.begin(), m.inputs.end());
    std::vector<RationalFunction*> entries;
    for (auto s : m.states) entries.push_back(&g.eta[s]);
    for (auto p : m.params) entries.push_back(&g.chi[p]);

    SparsePoly l(1);
    for (auto* e : entries)
        if (!e->is_zero()) l = lcm(l, content_outside(e->den(), xs));
    SparsePoly c;
    for (auto* e : entries)
        if (!e->is_zero()) {
            *e *= RationalFunction(l);
            c = gcd(c, content_outside(e->num(), xs));
        }
    if (!c.is_zero() && !c.is_constant())
        for (auto* e : entries)
            if (!e->is_zero()) *e /= RationalFunction(c);

    Rational ic = 0;
    for (auto* e : entries)
        if (!e->is_zero()) ic = rational_gcd(ic, e->num().integer_content());
    if (ic != 0 && ic != 1)
        for (auto* e : entries) *e *= RationalFunction(Rational(1 / ic));

    const RationalFunction* lead = nullptr;
    for (auto p : m.params)
        if (!g.chi[p].is_zero()) {
            lead = &g.chi[p];
            break;
        }
    if (!lead)
        for (auto s : m.states)
            if (!g.eta[s].is_zero()) {
                lead = &g.eta[s];
                break;
            }
    if (lead && lead->num().leading_coefficient() < 0)
        for (auto* e : entries) *e = -*e;

    g.normalized = std::all_of(entries.begin(), entries.end(), [](auto* e) { return e->is_polynomial(); });
    return g;
}

std::size_t generator_rank(const std::vector<Generator>& gens, const ModelDef& m, std::uint64_t seed, int points) {
    if (gens.empty()) return 0;
    const std::size_t dim = m.states.size() + m.params.size();
    std::vector<std::vector<RationalFunction>> flat;
    for (const auto& g : gens) flat.push_back(flatten(g, m));
    SampleRng rng(seed);
    for (int attempt = 0; attempt < 10; ++attempt) {
        std::vector<std::size_t> ranks;
        while (int(ranks.size()) < points) {
            std::vector<Rational> pt(m.table->size(), Rational(1));
            for (auto& v : pt) v = rng.uniform_rational(1, 10);
            bool ok = true;
            RankTracker t(dim);
            for (const auto& row : flat) {
                RationalVector v;
                for (const auto& e : row) {
                    if (e.is_zero()) {
                        v.push_back(0);
                        continue;
                    }
                    if (e.den().evaluate(std::span<const Rational>(pt)) == 0) {
                        ok = false;
                        break;
                    }
                    v.push_back(e.evaluate(std::span<const Rational>(pt)));
                }
                if (!ok) break;
                t.insert(std::move(v));
            }
            if (ok) ranks.push_back(t.rank());
        }
        if (std::adjacent_find(ranks.begin(), ranks.end(), std::not_equal_to<>()) == ranks.end()) return ranks.front();
    }
    throw PipelineError("symmetry", "degenerate sampling");
}

namespace {

struct Condition {
    RationalFunction expr;
    std::string source;
};

class Eliminator {
public:
    Eliminator(const ModelDef& m, const AnsatzConfig& opts) : m_(m), opts_(opts), fs_(formal_symbols(m)) {
        for (std::size_t i = 0; i < m.states.size(); ++i) {
            eta_index_[fs_.eta[i]] = i;
            deta_index_[fs_.deta[i]] = i;
        }
        along_.insert(m.states.begin(), m.states.end());
        along_.insert(m.inputs.begin(), m.inputs.end());
        inputs_.insert(m.inputs.begin(), m.inputs.end());
        for (auto c : fs_.chi) coords_.push_back(c);
    }

    GeneratorBasis run();

private:
    // eta and Deta indices present in an expression
    std::set<std::size_t> etas_in(const RationalFunction& e) const {
        std::set<std::size_t> out;
        for (SymbolId s : e.symbols())
            if (auto it = eta_index_.find(s); it != eta_index_.end()) out.insert(it->second);
        return out;
    }
    std::set<std::size_t> detas_in(const RationalFunction& e) const {
        std::set<std::size_t> out;
        for (SymbolId s : e.symbols())
            if (auto it = deta_index_.find(s); it != deta_index_.end()) out.insert(it->second);
        return out;
    }

    void add(Condition c, std::vector<Condition>& algebraic);
    void solve(std::size_t k, const Condition& c);
    void assign(std::size_t k, const RationalFunction& value);
    bool worklist();
    bool eliminate_derivatives();
    void detect_slots_or_ansatz();
    void stages(GeneratorBasis& out);
    std::optional<RationalFunction> particular(const FreeSlot& slot, const Bindings& coords) const;
    void materialize(GeneratorBasis& out);
    std::string key_string(const Monomial& mono) const { return to_string(mono, *m_.table); }

    const ModelDef& m_;
    AnsatzConfig opts_;
    FormalSymbols fs_;
    std::map<SymbolId, std::size_t> eta_index_, deta_index_;
    std::set<SymbolId> along_, inputs_;

    std::map<std::size_t, RationalFunction> solved_;
    std::vector<Condition> pending_;    // hold some eta or Deta
    std::vector<Condition> residuals_;  // only chi and ansatz coefficients
    std::vector<SymbolId> coords_;      // chi unknowns then ansatz coefficients
    std::vector<FreeSlot> slots_;
    bool ansatz_used_ = false;

    PolyMatrix basis_;  // coords x k
    std::vector<std::string> notes_;
};

void Eliminator::add(Condition c, std::vector<Condition>& dst) {
    if (c.expr.is_zero()) return;
    if (!detas_in(c.expr).empty()) {
        dst.push_back(std::move(c));
        return;
    }
    // eta depends on states and parameters only, so each input power product
    // gives its own condition
    std::vector<Condition> parts;
    if (!inputs_.empty() && std::any_of(inputs_.begin(), inputs_.end(), [&](SymbolId u) { return c.expr.num().contains(u); })) {
        for (auto& [mono, coeff] : collect(c.expr.num(), inputs_)) {
            std::string src = c.source;
            if (!mono.is_one()) src += " [" + key_string(mono) + "]";
            parts.push_back({RationalFunction(coeff, c.expr.den()), src});
        }
    } else {
        parts.push_back(std::move(c));
    }
    for (auto& p : parts) {
        if (p.expr.is_zero()) continue;
        if (etas_in(p.expr).empty())
            residuals_.push_back(std::move(p));
        else
            dst.push_back(std::move(p));
    }
}

void Eliminator::assign(std::size_t k, const RationalFunction& value) {
    Bindings b{{fs_.eta[k], value}};
    for (auto& [j, e] : solved_)
        if (e.contains(fs_.eta[k])) e = substitute(e, b);
    solved_[k] = value;
    b[fs_.deta[k]] = total_derivative_on_shell(value, m_);
    std::vector<Condition> old = std::move(pending_);
    pending_.clear();
    for (auto& c : old) {
        if (c.expr.contains(fs_.eta[k]) || c.expr.contains(fs_.deta[k]))
            add({substitute(c.expr, b), c.source}, pending_);
        else
            pending_.push_back(std::move(c));
    }
}

void Eliminator::solve(std::size_t k, const Condition& c) {
    const RationalFunction a = linear_coeff(c.expr, fs_.eta[k]);
    const RationalFunction rest = c.expr - a * RationalFunction::var(fs_.eta[k]);
    assign(k, -rest / a);
}

bool Eliminator::worklist() {
    bool progress = false;
    for (;;) {
        std::optional<std::size_t> best;
        std::size_t best_count = 0, best_pivot = 0;
        for (std::size_t i = 0; i < pending_.size(); ++i) {
            if (!detas_in(pending_[i].expr).empty()) continue;
            auto etas = etas_in(pending_[i].expr);
            if (etas.empty()) continue;
            const std::size_t pivot = *etas.begin();
            if (!best || etas.size() < best_count || (etas.size() == best_count && pivot < best_pivot)) {
                best = i;
                best_count = etas.size();
                best_pivot = pivot;
            }
        }
        if (!best) return progress;
        Condition c = pending_[*best];
        pending_.erase(pending_.begin() + std::ptrdiff_t(*best));
        solve(best_pivot, c);
        progress = true;
    }
}

bool Eliminator::eliminate_derivatives() {
    std::vector<bool> is_pivot(pending_.size(), false);
    bool changed = false;
    for (std::size_t j = 0; j < m_.states.size(); ++j) {
        const SymbolId d = fs_.deta[j];
        std::optional<std::size_t> p;
        for (std::size_t i = 0; i < pending_.size(); ++i)
            if (!is_pivot[i] && pending_[i].expr.contains(d)) {
                p = i;
                break;
            }
        if (!p) continue;
        is_pivot[*p] = true;
        const RationalFunction ap = linear_coeff(pending_[*p].expr, d);
        for (std::size_t i = 0; i < pending_.size(); ++i) {
            if (is_pivot[i] || !pending_[i].expr.contains(d)) continue;
            const RationalFunction ai = linear_coeff(pending_[i].expr, d);
            pending_[i].expr -= (ai / ap) * pending_[*p].expr;
            changed = true;
        }
    }
    if (!changed) return false;
    std::vector<Condition> old = std::move(pending_);
    pending_.clear();
    const std::size_t before = residuals_.size();
    for (auto& c : old) add(std::move(c), pending_);
    bool released = residuals_.size() != before;
    for (const auto& c : pending_)
        if (detas_in(c.expr).empty()) released = true;
    return released;
}

void Eliminator::detect_slots_or_ansatz() {
    std::vector<Condition> rest;
    std::vector<std::set<std::size_t>> unknowns;
    for (const auto& c : pending_) {
        auto u = etas_in(c.expr);
        auto d = detas_in(c.expr);
        u.insert(d.begin(), d.end());
        unknowns.push_back(u);
    }
    for (std::size_t i = 0; i < pending_.size(); ++i) {
        const auto& c = pending_[i];
        auto d = detas_in(c.expr);
        bool slot = unknowns[i].size() == 1 && d.size() == 1;
        if (slot) {
            const std::size_t k = *d.begin();
            for (std::size_t j = 0; j < pending_.size(); ++j)
                if (j != i && unknowns[j].count(k)) slot = false;
            for (const auto& s : slots_)
                if (s.state == m_.states[k]) slot = false;
            if (slot) {
                FreeSlot fsl;
                fsl.state = m_.states[k];
                fsl.support.push_back(m_.states[k]);
                for (const auto& [j, e] : solved_)
                    if (e.contains(fs_.eta[k])) {
                        fsl.support.push_back(m_.states[j]);
                        fsl.relations[m_.states[j]] = e;
                    }
                std::sort(fsl.support.begin(), fsl.support.end());
                fsl.coupling = c.expr;
                slots_.push_back(std::move(fsl));
                continue;
            }
        }
        rest.push_back(c);
    }
    pending_ = std::move(rest);
    if (pending_.empty()) return;

    // fall back to a polynomial ansatz in the states
    std::set<std::size_t> open;
    for (const auto& c : pending_) {
        auto u = etas_in(c.expr);
        auto d = detas_in(c.expr);
        open.insert(u.begin(), u.end());
        open.insert(d.begin(), d.end());
    }
    ansatz_used_ = true;
    const auto monos = monomials_up_to(std::vector<SymbolId>(m_.states.begin(), m_.states.end()), opts_.eta_state_degree);
    for (std::size_t k : open) {
        RationalFunction value;
        for (std::size_t j = 0; j < monos.size(); ++j) {
            const SymbolId a = m_.table->fresh("a_" + m_.table->name(m_.states[k]) + "_" + std::to_string(j),
                                               SymbolKind::Unknown);
            coords_.push_back(a);
            value += RationalFunction(SparsePoly(monos[j]) * SparsePoly::var(a));
        }
        notes_.push_back("eta of " + m_.table->name(m_.states[k]) + " replaced by a polynomial ansatz of degree " +
                         std::to_string(opts_.eta_state_degree));
        assign(k, value);
    }
    for (auto& c : pending_) residuals_.push_back(std::move(c));
    pending_.clear();
}

void Eliminator::stages(GeneratorBasis& out) {
    const std::size_t n = coords_.size();
    std::map<SymbolId, std::size_t> coord_index;
    for (std::size_t j = 0; j < n; ++j) coord_index[coords_[j]] = j;

    struct Stage {
        PolyMatrix rows;
        std::vector<std::string> keys;
        std::string source;
        std::size_t active;
    };
    std::vector<Stage> list;
    for (const auto& r : residuals_) {
        Stage st;
        st.source = r.source;
        std::set<SymbolId> active;
        for (SymbolId s : r.expr.symbols())
            if (coord_index.count(s)) active.insert(s);
        st.active = active.size();
        for (const auto& [mono, coeff] : collect(r.expr.num(), along_)) {
            PolyVector row(n);
            for (SymbolId s : active) row[coord_index[s]] = coeff.derivative(s);
            st.rows.push_back(std::move(row));
            st.keys.push_back(key_string(mono));
        }
        list.push_back(std::move(st));
    }
    std::stable_sort(list.begin(), list.end(), [](const Stage& a, const Stage& b) { return a.active < b.active; });

    basis_.assign(n, PolyVector(n));
    for (std::size_t j = 0; j < n; ++j) basis_[j][j] = SparsePoly(1);
    std::vector<SymbolId> names = coords_;
    int alpha = 0;

    for (const auto& st : list) {
        const std::size_t k = names.size();
        if (k == 0) break;
        PolyMatrix mat;
        std::vector<std::string> keys;
        for (std::size_t r = 0; r < st.rows.size(); ++r) {
            PolyVector row(k);
            bool nonzero = false;
            for (std::size_t c = 0; c < k; ++c) {
                SparsePoly acc;
                for (std::size_t j = 0; j < n; ++j)
                    if (!st.rows[r][j].is_zero() && !basis_[j][c].is_zero()) acc += st.rows[r][j] * basis_[j][c];
                nonzero = nonzero || !acc.is_zero();
                row[c] = std::move(acc);
            }
            if (nonzero) {
                mat.push_back(std::move(row));
                keys.push_back(st.keys[r]);
            }
        }
        if (mat.empty()) continue;

        LinearSystem ls;
        ls.label = "stage " + std::to_string(out.stages.size() + 1);
        ls.unknowns = names;
        for (std::size_t r = 0; r < mat.size(); ++r) {
            LinearSystemRow row;
            for (const auto& e : mat[r]) row.coeffs.emplace_back(e);
            row.key = keys[r];
            row.source = st.source;
            ls.rows.push_back(std::move(row));
        }
        out.stages.push_back(std::move(ls));

        const auto ns = nullspace(mat, k);
        PolyMatrix next(n, PolyVector(ns.size()));
        std::vector<SymbolId> next_names;
        for (std::size_t c = 0; c < ns.size(); ++c) {
            std::optional<std::size_t> unit;
            std::size_t nz = 0;
            for (std::size_t j = 0; j < k; ++j)
                if (!ns[c][j].is_zero()) {
                    ++nz;
                    unit = j;
                }
            for (std::size_t i = 0; i < n; ++i) {
                SparsePoly acc;
                for (std::size_t j = 0; j < k; ++j)
                    if (!basis_[i][j].is_zero() && !ns[c][j].is_zero()) acc += basis_[i][j] * ns[c][j];
                next[i][c] = std::move(acc);
            }
            // drop the common factor of the new column
            SparsePoly g;
            for (std::size_t i = 0; i < n; ++i) g = gcd(g, next[i][c]);
            if (!g.is_zero() && !g.is_constant())
                for (std::size_t i = 0; i < n; ++i)
                    if (!next[i][c].is_zero()) next[i][c] = *divide_exact(next[i][c], g);
            Rational ic = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (!next[i][c].is_zero()) ic = rational_gcd(ic, next[i][c].integer_content());
            if (ic != 0 && ic != 1)
                for (std::size_t i = 0; i < n; ++i) next[i][c] *= Rational(1 / ic);

            if (nz == 1 && ns[c][*unit].is_constant()) {
                next_names.push_back(names[*unit]);
            } else {
                std::optional<std::size_t> coord_unit;
                std::size_t cnz = 0;
                for (std::size_t i = 0; i < n; ++i)
                    if (!next[i][c].is_zero()) {
                        ++cnz;
                        coord_unit = i;
                    }
                if (cnz == 1)
                    next_names.push_back(coords_[*coord_unit]);
                else
                    next_names.push_back(m_.table->intern("alpha" + std::to_string(++alpha), SymbolKind::Unknown));
            }
        }
        basis_ = std::move(next);
        names = std::move(next_names);
    }
}

std::optional<RationalFunction> Eliminator::particular(const FreeSlot& slot, const Bindings& coords) const {
    const std::size_t k = m_.state_index(slot.state);
    const SymbolId eta = fs_.eta[k], deta = fs_.deta[k];
    const RationalFunction c = substitute(slot.coupling, coords);
    const RationalFunction a = linear_coeff(c, deta);
    const RationalFunction b = linear_coeff(c, eta);
    const RationalFunction g = c - a * RationalFunction::var(deta) - b * RationalFunction::var(eta);
    if (g.is_zero()) return RationalFunction();

    const std::vector<SymbolId> xs(m_.states.begin(), m_.states.end());
    for (unsigned d = 0; d <= opts_.eta_state_degree; ++d) {
        const auto monos = monomials_up_to(xs, d);
        std::vector<SymbolId> unk;
        RationalFunction trial;
        for (std::size_t j = 0; j < monos.size(); ++j) {
            unk.push_back(m_.table->intern("q_" + std::to_string(j), SymbolKind::Unknown));
            trial += RationalFunction(SparsePoly(monos[j]) * SparsePoly::var(unk.back()));
        }
        const RationalFunction e = a * total_derivative_on_shell(trial, m_) + b * trial + g;
        // rows over (unk..., 1)
        PolyMatrix rows;
        for (const auto& [mono, coeff] : collect(e.num(), along_)) {
            PolyVector row(unk.size() + 1);
            SparsePoly rest = coeff;
            for (std::size_t j = 0; j < unk.size(); ++j) {
                row[j] = coeff.derivative(unk[j]);
                rest -= row[j] * SparsePoly::var(unk[j]);
            }
            row.back() = rest;
            rows.push_back(std::move(row));
        }
        for (const auto& v : nullspace(rows, unk.size() + 1)) {
            if (v.back().is_zero()) continue;
            RationalFunction sol;
            for (std::size_t j = 0; j < unk.size(); ++j)
                if (!v[j].is_zero()) sol += RationalFunction(v[j], v.back()) * RationalFunction(SparsePoly(monos[j]));
            return sol;
        }
    }
    return std::nullopt;
}

void Eliminator::materialize(GeneratorBasis& out) {
    const std::size_t n = coords_.size();
    const std::size_t kcols = basis_.empty() ? 0 : basis_.front().size();
    for (std::size_t c = 0; c < kcols; ++c) {
        Bindings coords;
        for (std::size_t i = 0; i < n; ++i) coords[coords_[i]] = RationalFunction(basis_[i][c]);
        Bindings slot_values;
        bool ok = true;
        for (const auto& s : slots_) {
            auto p = particular(s, coords);
            if (!p) {
                ok = false;
                break;
            }
            slot_values[fs_.eta[m_.state_index(s.state)]] = *p;
        }
        if (!ok) {
            notes_.push_back("nullspace direction " + std::to_string(c + 1) +
                             " dropped: no polynomial particular solution for a free slot up to degree " +
                             std::to_string(opts_.eta_state_degree));
            continue;
        }
        Bindings all = coords;
        all.insert(slot_values.begin(), slot_values.end());
        Generator g;
        g.label = "G" + std::to_string(out.generators.size() + 1);
        for (std::size_t l = 0; l < m_.params.size(); ++l) g.chi[m_.params[l]] = coords[fs_.chi[l]];
        for (std::size_t i = 0; i < m_.states.size(); ++i) {
            const SymbolId s = m_.states[i];
            if (auto it = solved_.find(i); it != solved_.end())
                g.eta[s] = substitute(it->second, all);
            else if (auto sv = slot_values.find(fs_.eta[i]); sv != slot_values.end())
                g.eta[s] = sv->second;
            else
                g.eta[s] = RationalFunction();
        }
        g = normalize_generator(std::move(g), m_);
        if (g.is_zero()) continue;
        out.generators.push_back(std::move(g));
    }

    for (std::size_t si = 0; si < slots_.size(); ++si) {
        const FreeSlot& s = slots_[si];
        const std::size_t k = m_.state_index(s.state);
        Bindings zero;
        for (SymbolId u : coords_) zero[u] = RationalFunction();
        Bindings unit = zero;
        unit[fs_.eta[k]] = RationalFunction(1);
        Generator g;
        g.label = "S" + std::to_string(si + 1);
        g.synthetic = true;
        for (auto p : m_.params) g.chi[p] = RationalFunction();
        for (auto x : m_.states) g.eta[x] = RationalFunction();
        g.eta[s.state] = RationalFunction(1);
        for (const auto& [x, rel] : s.relations) g.eta[x] = substitute(rel, unit);
        const RationalFunction coupling = substitute(s.coupling, zero);
        const RationalFunction a = linear_coeff(coupling, fs_.deta[k]);
        const RationalFunction b = linear_coeff(coupling, fs_.eta[k]);
        g.slot_rate = -b / a;
        g = normalize_generator(std::move(g), m_);
        out.synthetic.push_back(std::move(g));
    }
}

GeneratorBasis Eliminator::run() {
    GeneratorBasis out;
    out.ansatz = opts_;

    bool informative = false;
    for (const auto& o : m_.outputs)
        for (SymbolId s : o.expr.symbols())
            if (m_.is_state(s) || m_.is_param(s)) informative = true;
    if (!informative) throw PipelineError("symmetry", "no information: every output is constant in states and parameters");

    // output conditions, pivoting on the lowest-index state
    const auto outputs = build_output_conditions(m_);
    for (std::size_t j = 0; j < outputs.size(); ++j) {
        std::vector<Condition> parts;
        add({outputs[j], "output " + m_.outputs[j].name}, parts);
        for (auto& p : parts) {
            Bindings b;
            for (const auto& [i, e] : solved_) b[fs_.eta[i]] = e;
            if (!b.empty()) p.expr = substitute(p.expr, b);
            auto etas = etas_in(p.expr);
            if (etas.empty()) {
                if (!p.expr.is_zero()) residuals_.push_back(std::move(p));
                continue;
            }
            solve(*etas.begin(), p);
        }
    }

    Bindings current;
    for (const auto& [i, e] : solved_) current[fs_.eta[i]] = e;
    const auto linsym = build_linsym_conditions(m_, current);
    for (std::size_t i = 0; i < linsym.size(); ++i)
        add({linsym[i], "state " + m_.table->name(m_.states[i])}, pending_);

    for (;;) {
        worklist();
        if (pending_.empty()) break;
        if (!eliminate_derivatives()) break;
    }
    detect_slots_or_ansatz();
    out.ansatz_used = ansatz_used_;
    stages(out);
    materialize(out);
    out.free_slots = slots_;
    out.notes = notes_;
    return out;
}

}  // namespace

GeneratorBasis eliminate(const ModelDef& m, const AnsatzConfig& opts) {
    return Eliminator(m, opts).run();
}

}  // namespace psym
