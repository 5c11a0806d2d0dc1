#include "wwlab/norms.hpp"

#include <functional>
#include <stdexcept>

#include "wwlab/spectral.hpp"

namespace ww {

Field weight_field(const StripGrid& g, const WeightSpec& w, const Field* positions) {
    Field out(g, 0);
    for (int n = 0; n < g.nnodes(); ++n) {
        double x[3];
        if (positions) {
            for (int k = 0; k < g.dim; ++k) x[k] = positions->at(k, n);
        } else {
            auto y = g.y(n);
            for (int k = 0; k < g.dim; ++k) x[k] = y[k];
        }
        out.at(0, n) = w(x, g.dim);
    }
    return out;
}

namespace {

// d/dy_dir^order of every component, spectral horizontally, FD vertically.
Field multi_derivative(const Field& f, const std::vector<int>& alpha) {
    const StripGrid& g = *f.grid;
    Field cur = f;
    for (int dir = 0; dir < g.dim; ++dir) {
        int o = alpha[dir];
        if (o == 0) continue;
        Field next(g, cur.rank);
        if (dir < g.dim - 1) {
            for (int c = 0; c < cur.ncomp(); ++c)
                horizontal_derivative(g, cur.comp(c), next.comp(c), dir, o);
        } else {
            for (int c = 0; c < cur.ncomp(); ++c) {
                std::vector<double> tmp(cur.comp(c), cur.comp(c) + g.nnodes());
                std::vector<double> out(g.nnodes());
                int rem = o;
                while (rem >= 2) {
                    vertical_derivative(g, tmp.data(), out.data(), 2);
                    tmp.swap(out);
                    rem -= 2;
                }
                if (rem == 1) {
                    vertical_derivative(g, tmp.data(), out.data(), 1);
                    tmp.swap(out);
                }
                std::copy(tmp.begin(), tmp.end(), next.comp(c));
            }
        }
        cur = std::move(next);
    }
    return cur;
}

void enumerate_alphas(int dim, int s, std::vector<std::vector<int>>& out) {
    std::vector<int> a(dim, 0);
    // all multi-indices with |a| <= s
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == dim - 1) {
            for (int k = 0; k <= left; ++k) {
                a[pos] = k;
                out.push_back(a);
            }
            return;
        }
        for (int k = 0; k <= left; ++k) {
            a[pos] = k;
            rec(pos + 1, left - k);
        }
    };
    rec(0, s);
}

double l2_sq(const Field& f, Region region, const Field* measure) {
    Field m2 = magnitude2(f);
    return integrate(m2, region, measure);
}

} // namespace

Field magnitude2(const Field& f) {
    Field out(*f.grid, 0);
    for (int c = 0; c < f.ncomp(); ++c) {
        const double* p = f.comp(c);
        double* o = out.comp(0);
        for (int n = 0; n < f.nnodes(); ++n) o[n] += p[n] * p[n];
    }
    return out;
}

BoundaryField restrict_to_boundary(const Field& f) {
    if (f.rank > 1)
        throw std::invalid_argument("restrict_to_boundary: rank 0 or 1 expected");
    const StripGrid& g = *f.grid;
    BoundaryField out(g, f.rank);
    for (int c = 0; c < f.ncomp(); ++c)
        for (int b = 0; b < g.nbdy(); ++b)
            out.at(c, b) = f.at(c, g.top_node(b));
    return out;
}

double norm(const Field& f, NormSpace space, int s, const WeightSpec* w,
            const Field* positions) {
    const StripGrid& g = *f.grid;
    const bool weighted =
        space == NormSpace::L2w || space == NormSpace::Hsw || space == NormSpace::BdyL2w;
    const bool sobolev = space == NormSpace::Hs || space == NormSpace::Hsw;
    const bool boundary = space == NormSpace::BdyL2 || space == NormSpace::BdyL2w;

    if (sobolev && s > 6)
        throw std::invalid_argument("norm: differentiation order capped at s <= 6");
    if (!sobolev) s = 0;

    std::optional<Field> mf;
    if (weighted) {
        WeightSpec def;
        mf = weight_field(g, w ? *w : def, positions);
    }
    const Field* measure = mf ? &*mf : nullptr;

    if (boundary) return std::sqrt(l2_sq(f, Region::TopBoundary, measure));
    if (!sobolev) return std::sqrt(l2_sq(f, Region::Interior, measure));

    std::vector<std::vector<int>> alphas;
    enumerate_alphas(g.dim, s, alphas);
    double acc = 0;
    for (const auto& a : alphas)
        acc += l2_sq(multi_derivative(f, a), Region::Interior, measure);
    return std::sqrt(acc);
}

} // namespace ww
