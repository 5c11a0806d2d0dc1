#include "wwlab/history.hpp"

#include <cmath>
#include <stdexcept>

#include "wwlab/norms.hpp"

namespace ww {

using sym::Atom;
using sym::Base;
using sym::Term;
using sym::TermList;

EvalContext::EvalContext(const LagrangianMap& map, const Field& v, const Field& h,
                         EosPtr eos)
    : map_(&map), grid_(map.grid), v_(v), h_(h), eos_(std::move(eos)) {}

EvalContext::EvalContext(const LagrangianMap& map, const Field& v0,
                         std::vector<Field> h_k, EosPtr eos)
    : map_(&map), grid_(map.grid), v_(v0), h_(h_k.at(0)), data_h_(std::move(h_k)),
      eos_(std::move(eos)), data_mode_(true) {}

const Field& EvalContext::atom_field(Base b, int sp, int mt) {
    auto key = std::make_tuple(static_cast<int>(b), sp, mt);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;

    Field base;
    switch (b) {
        case Base::EN: {
            base = Field(*grid_, 1);
            for (int n = 0; n < grid_->nnodes(); ++n)
                base.at(grid_->dim - 1, n) = 1.0;
            break;
        }
        case Base::V: {
            if (mt == 0)
                base = v_;
            else
                base = evaluate(sym::history_v(mt, mode()), *this);
            break;
        }
        case Base::H: {
            if (mt == 0) {
                base = h_;
            } else if (data_mode_) {
                if (mt >= static_cast<int>(data_h_.size()))
                    throw std::runtime_error("EvalContext: missing history depth Dt^" +
                                             std::to_string(mt) + " h");
                base = data_h_[mt];
            } else {
                base = evaluate(sym::history_h(mt), *this);
            }
            break;
        }
        case Base::F: {
            // generic target defaults to the enthalpy
            return atom_field(Base::H, sp, mt);
        }
    }
    Field out = (sp == 0) ? std::move(base) : euler_derivative_n(base, *map_, sp);
    return cache_.emplace(key, std::move(out)).first->second;
}

double EvalContext::eos_value(const sym::EosFactor& f, int node) const {
    if (f.trivial()) return 1.0;
    double h = h_.at(0, node);
    double acc = 1.0;
    for (auto& [m, p] : f.ed) {
        double e = eos_->e_deriv(m, h);
        for (int i = 0; i < p; ++i) acc *= e;
    }
    if (f.inv > 0) {
        double ep = eos_->e_prime(h);
        for (int i = 0; i < f.inv; ++i) acc /= ep;
    }
    return acc;
}

Field evaluate(const TermList& terms, EvalContext& ctx) {
    const StripGrid& g = ctx.grid();
    const int d = g.dim;
    if (terms.empty()) return Field(g, 0);

    // common free-slot count
    int F = terms.front().free_count();
    bool free_is_deriv = true;
    for (const Term& t : terms) {
        if (t.free_count() != F)
            throw std::logic_error("evaluate: inconsistent free slot counts");
    }
    Field out(g, F);

    for (const Term& t : terms) {
        // factor fields and per-slot wiring tables
        const int nf = static_cast<int>(t.atoms.size());
        std::vector<const Field*> ff(nf);
        int npair = 0;
        for (int f = 0; f < nf; ++f) {
            ff[f] = &ctx.atom_field(t.atoms[f].base, t.atoms[f].sp, t.atoms[f].mt);
            for (size_t s = 0; s < t.wires[f].size(); ++s) {
                int l = t.wires[f][s];
                if (l >= 0) npair = std::max(npair, l + 1);
                if (l <= sym::FREE_LABEL && static_cast<int>(s) >= t.atoms[f].sp)
                    free_is_deriv = false;
            }
        }
        const double sign = t.coeff.value();
        const int nn = g.nnodes();
        int total_pair = 1;
        for (int i = 0; i < npair; ++i) total_pair *= d;
        int total_free = 1;
        for (int i = 0; i < F; ++i) total_free *= d;

        // precompute component index per factor for each (free, pair) combo
        // layout: comp[f] = sum over slots of idx * d^(pos)
        std::vector<std::vector<int>> comp_table(static_cast<size_t>(total_free) * total_pair);
        for (int fa = 0; fa < total_free; ++fa) {
            std::vector<int> fi(F);
            int x = fa;
            for (int k = F - 1; k >= 0; --k) {
                fi[k] = x % d;
                x /= d;
            }
            for (int pa = 0; pa < total_pair; ++pa) {
                std::vector<int> pi(npair);
                int y = pa;
                for (int k = npair - 1; k >= 0; --k) {
                    pi[k] = y % d;
                    y /= d;
                }
                std::vector<int>& comps = comp_table[fa * total_pair + pa];
                comps.resize(nf);
                for (int f = 0; f < nf; ++f) {
                    int c = 0;
                    for (size_t s = 0; s < t.wires[f].size(); ++s) {
                        int l = t.wires[f][s];
                        int v = (l >= 0) ? pi[l] : fi[sym::FREE_LABEL - l];
                        c = c * d + v;
                    }
                    comps[f] = c;
                }
            }
        }
        for (int n = 0; n < nn; ++n) {
            double w = sign * ctx.eos_value(t.eos, n);
            if (w == 0.0) continue;
            for (int fa = 0; fa < total_free; ++fa) {
                double acc = 0;
                for (int pa = 0; pa < total_pair; ++pa) {
                    const std::vector<int>& comps = comp_table[fa * total_pair + pa];
                    double prod = 1.0;
                    for (int f = 0; f < nf; ++f) prod *= ff[f]->at(comps[f], n);
                    acc += prod;
                }
                out.at(fa, n) += w * acc;
            }
        }
    }
    if (F >= 2 && free_is_deriv) out = symmetrize_slots(out, F);
    return out;
}

Field material_history_h(EvalContext& ctx, int k) {
    return ctx.atom_field(Base::H, 0, k);
}
Field material_history_v(EvalContext& ctx, int k) {
    return ctx.atom_field(Base::V, 0, k);
}

SourceAssembly assemble_sources(int r, EvalContext& ctx, const WeightSpec* w) {
    if (r < 1 || r > 6)
        throw std::invalid_argument("assemble_sources: r must be in [1,6]");
    SourceAssembly out;
    out.r = r;
    out.f = evaluate(sym::source_f(r, ctx.mode()), ctx);
    out.g = evaluate(sym::source_g(r), ctx);
    out.f_l2 = norm(out.f, NormSpace::L2);
    out.g_l2 = norm(out.g, NormSpace::L2);
    WeightSpec def;
    const WeightSpec& ws = w ? *w : def;
    Field pos = ctx.map().positions();
    out.f_l2w = norm(out.f, NormSpace::L2w, 0, &ws, &pos);
    out.g_l2w = norm(out.g, NormSpace::L2w, 0, &ws, &pos);
    return out;
}

} // namespace ww
