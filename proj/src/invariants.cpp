#include "psym/invariants.hpp"

#include <algorithm>
#include <set>

#include "psym/errors.hpp"
#include "psym/sampling.hpp"

namespace psym {

std::string_view to_string(InvariantKind k) {
    switch (k) {
        case InvariantKind::Parameter: return "parameter";
        case InvariantKind::State: return "state";
        case InvariantKind::ParameterState: return "parameter-state";
    }
    return "?";
}

RationalFunction apply_generator(const Generator& g, const RationalFunction& e) {
    RationalFunction acc;
    for (SymbolId s : e.symbols()) {
        const RationalFunction& c = g.component(s);
        if (!c.is_zero()) acc += c * differentiate(e, s);
    }
    return acc;
}

InvariantKind kind_of(const RationalFunction& e, const ModelDef& m) {
    bool has_state = false, has_param = false;
    for (SymbolId s : e.symbols()) {
        has_state = has_state || m.is_state(s);
        has_param = has_param || m.is_param(s);
    }
    if (has_state && has_param) return InvariantKind::ParameterState;
    return has_state ? InvariantKind::State : InvariantKind::Parameter;
}

namespace {

// Integer-primitive numerator with positive leading coefficient.
RationalFunction canonical(const RationalFunction& e) {
    if (e.is_zero()) return e;
    const Rational c = e.num().integer_content();
    SparsePoly n = e.num() * Rational(1 / c);
    if (n.leading_coefficient() < 0) n = -n;
    return RationalFunction(n, e.den());
}

struct CanonicalLess {
    bool operator()(const RationalFunction& a, const RationalFunction& b) const { return canonical_less(a, b); }
};

struct Candidate {
    RationalFunction expr;
    unsigned num_deg, den_deg;
    std::size_t terms;
    bool parameter_only;
};

// Parameter-only candidates first, so identifiable combinations span as much as they can.
bool simpler(const Candidate& a, const Candidate& b) {
    if (a.parameter_only != b.parameter_only) return a.parameter_only;
    const unsigned da = a.num_deg + a.den_deg, db = b.num_deg + b.den_deg;
    if (da != db) return da < db;
    if (a.terms != b.terms) return a.terms < b.terms;
    if (a.den_deg != b.den_deg) return a.den_deg < b.den_deg;
    return canonical_less(a.expr, b.expr);
}

SparsePoly apply_poly(const PolyVector& field, const std::vector<SymbolId>& coords, const Monomial& mono) {
    SparsePoly acc;
    for (std::size_t z = 0; z < coords.size(); ++z) {
        if (field[z].is_zero()) continue;
        const unsigned e = mono.exponent(coords[z]);
        if (e == 0) continue;
        auto rest = mono.divide(Monomial::var(coords[z]));
        acc += field[z].mul_monomial(*rest, Rational(e));
    }
    return acc;
}

std::vector<Rational> sample_point(SampleRng& rng, std::size_t size) {
    std::vector<Rational> pt(size);
    for (auto& v : pt) v = rng.uniform_rational(1, 10);
    return pt;
}

RationalVector gradient_at(const RationalFunction& e, const std::vector<SymbolId>& coords,
                           const std::vector<Rational>& pt) {
    RationalVector g(coords.size());
    for (std::size_t z = 0; z < coords.size(); ++z)
        if (e.contains(coords[z])) g[z] = differentiate(e, coords[z]).evaluate(std::span<const Rational>(pt));
    return g;
}

bool nonsingular_at(const RationalFunction& e, const std::vector<Rational>& pt) {
    return e.den().evaluate(std::span<const Rational>(pt)) != 0;
}

}  // namespace

InvariantSet find_invariants(const GeneratorBasis& basis, const ModelDef& m, const InvariantOptions& opts) {
    InvariantSet out;
    out.num_degree = opts.num_degree;
    out.den_degree = opts.den_degree;
    const std::vector<SymbolId> coords = m.coordinates();
    const std::vector<Generator> gens = basis.all();
    out.generic_rank = generator_rank(gens, m, opts.seed, opts.points);
    out.expected_count = coords.size() - out.generic_rank;

    if (out.generic_rank == 0) {
        for (SymbolId z : coords) {
            RationalFunction e = RationalFunction::var(z);
            out.invariants.push_back({e, kind_of(e, m), 1, 0});
        }
        return out;
    }

    std::vector<PolyVector> fields;
    std::set<Monomial> hints;
    for (const auto& g : gens) {
        auto flat = flatten(g, m);
        for (const auto& e : flat)
            if (!e.is_zero() && !e.is_polynomial()) {
                Monomial h = e.den().monomial_content();
                if (!h.is_one()) hints.insert(h);
            }
        PolyVector f = clear_denominators(flat);
        if (std::any_of(f.begin(), f.end(), [](const SparsePoly& p) { return !p.is_zero(); })) fields.push_back(f);
    }

    std::vector<Monomial> dens = monomials_up_to(coords, opts.den_degree);
    for (const auto& h : hints)
        if (std::find(dens.begin(), dens.end(), h) == dens.end()) dens.push_back(h);
    const std::vector<Monomial> nums = monomials_up_to(coords, opts.num_degree);

    // X(mu) for each field and numerator monomial
    std::vector<std::vector<SparsePoly>> xnum(fields.size());
    for (std::size_t g = 0; g < fields.size(); ++g)
        for (const auto& mu : nums) xnum[g].push_back(apply_poly(fields[g], coords, mu));

    std::set<RationalFunction, CanonicalLess> seen;
    std::vector<Candidate> candidates;
    for (const auto& den : dens) {
        std::vector<SparsePoly> xden;
        for (const auto& f : fields) xden.push_back(apply_poly(f, coords, den));
        // den * X(P) - P * X(den) = 0, row per (field, monomial)
        std::map<std::pair<std::size_t, Monomial>, std::vector<std::pair<std::size_t, Rational>>> rows;
        for (std::size_t j = 0; j < nums.size(); ++j)
            for (std::size_t g = 0; g < fields.size(); ++g) {
                SparsePoly q = xnum[g][j].mul_monomial(den) - xden[g].mul_monomial(nums[j]);
                for (const auto& [mono, c] : q.terms()) rows[{g, mono}].emplace_back(j, c);
            }
        SparseRationalSystem sys(nums.size());
        for (auto& [key, row] : rows) sys.add_row(std::move(row));
        for (const auto& v : sys.kernel()) {
            SparsePoly p;
            for (const auto& [j, c] : v) p += SparsePoly(nums[j], c);
            RationalFunction e = canonical(RationalFunction(p, SparsePoly(den)));
            if (e.is_constant()) continue;
            if (!seen.insert(e).second) continue;
            candidates.push_back({e, e.num().total_degree(), e.den().total_degree(),
                                  e.num().size() + e.den().size() - 1, kind_of(e, m) == InvariantKind::Parameter});
        }
    }
    out.candidates = candidates.size();
    std::sort(candidates.begin(), candidates.end(), simpler);

    SampleRng rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
    for (int attempt = 0; attempt < 10; ++attempt) {
        std::vector<std::vector<Rational>> pts;
        for (int i = 0; i < opts.points; ++i) pts.push_back(sample_point(rng, m.table->size()));
        std::vector<RankTracker> trackers(pts.size(), RankTracker(coords.size()));
        std::vector<Invariant> kept;
        bool degenerate = false;
        for (const auto& c : candidates) {
            if (kept.size() >= out.expected_count) break;
            std::vector<RationalVector> grads;
            bool singular = false;
            for (const auto& pt : pts) {
                if (!nonsingular_at(c.expr, pt)) {
                    singular = true;
                    break;
                }
                grads.push_back(gradient_at(c.expr, coords, pt));
            }
            if (singular) {
                degenerate = true;
                break;
            }
            std::size_t independent = 0;
            for (std::size_t i = 0; i < pts.size(); ++i) independent += trackers[i].independent(grads[i]) ? 1 : 0;
            if (independent == 0) continue;
            if (independent != pts.size()) {
                degenerate = true;
                break;
            }
            for (std::size_t i = 0; i < pts.size(); ++i) trackers[i].insert(std::move(grads[i]));
            kept.push_back({c.expr, kind_of(c.expr, m), c.num_deg, c.den_deg});
        }
        if (degenerate) continue;
        out.invariants = std::move(kept);
        return out;
    }
    throw PipelineError("invariants", "degenerate sampling");
}

AnalysisVerdicts classify(const InvariantSet& inv, const GeneratorBasis& basis, const ModelDef& m) {
    AnalysisVerdicts v;
    const auto gens = basis.all();
    for (SymbolId p : m.params) {
        bool ident = true;
        for (const auto& g : gens)
            if (!g.component(p).is_zero()) ident = false;
        v.parameters.push_back({p, ident});
    }
    for (SymbolId s : m.states) {
        bool obs = true;
        for (const auto& g : gens)
            if (!g.component(s).is_zero()) obs = false;
        for (const auto& slot : basis.free_slots)
            if (std::find(slot.support.begin(), slot.support.end(), s) != slot.support.end()) obs = false;
        v.states.push_back({s, obs});
    }
    for (const auto& i : inv.invariants) {
        switch (i.kind) {
            case InvariantKind::Parameter: v.roles.emplace_back("identifiable parameter combination"); break;
            case InvariantKind::State: v.roles.emplace_back("observable state combination"); break;
            case InvariantKind::ParameterState: v.roles.emplace_back("observable parameter-state combination"); break;
        }
    }
    return v;
}

bool functional_equivalence(const std::vector<RationalFunction>& a, const std::vector<RationalFunction>& b,
                            std::uint64_t seed, int points) {
    std::set<SymbolId> syms;
    for (const auto* list : {&a, &b})
        for (const auto& e : *list)
            for (SymbolId s : e.symbols()) syms.insert(s);
    const std::vector<SymbolId> coords(syms.begin(), syms.end());
    const std::size_t size = coords.empty() ? 1 : coords.back() + 1;
    SampleRng rng(seed ^ 0x51ed270b27a1f5c3ULL);

    auto rank_of = [&](const std::vector<const RationalFunction*>& list, const std::vector<Rational>& pt) {
        RankTracker t(coords.size());
        for (const auto* e : list) t.insert(gradient_at(*e, coords, pt));
        return t.rank();
    };
    std::vector<const RationalFunction*> pa, pb, pab;
    for (const auto& e : a) pa.push_back(&e);
    for (const auto& e : b) pb.push_back(&e);
    pab = pa;
    pab.insert(pab.end(), pb.begin(), pb.end());

    for (int attempt = 0; attempt < 10; ++attempt) {
        std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;
        int used = 0;
        while (used < points) {
            auto pt = sample_point(rng, size);
            bool ok = true;
            for (const auto* e : pab)
                if (!nonsingular_at(*e, pt)) ok = false;
            if (!ok) continue;
            seen.insert({rank_of(pa, pt), rank_of(pb, pt), rank_of(pab, pt)});
            ++used;
        }
        if (seen.size() == 1) {
            auto [ra, rb, rab] = *seen.begin();
            return ra == rb && rb == rab;
        }
    }
    throw PipelineError("invariants", "degenerate sampling");
}

}  // namespace psym
