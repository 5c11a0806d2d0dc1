#include "wwlab/map.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "wwlab/spectral.hpp"

namespace ww {

namespace {
// in-place inverse of a d x d matrix given column-major scratch
void small_inverse(int d, const double* m, double* inv, double& det) {
    if (d == 2) {
        det = m[0] * m[3] - m[1] * m[2];
        inv[0] = m[3] / det;
        inv[1] = -m[1] / det;
        inv[2] = -m[2] / det;
        inv[3] = m[0] / det;
    } else {
        double c00 = m[4] * m[8] - m[5] * m[7];
        double c01 = m[5] * m[6] - m[3] * m[8];
        double c02 = m[3] * m[7] - m[4] * m[6];
        det = m[0] * c00 + m[1] * c01 + m[2] * c02;
        inv[0] = c00 / det;
        inv[3] = c01 / det;
        inv[6] = c02 / det;
        inv[1] = (m[2] * m[7] - m[1] * m[8]) / det;
        inv[4] = (m[0] * m[8] - m[2] * m[6]) / det;
        inv[7] = (m[1] * m[6] - m[0] * m[7]) / det;
        inv[2] = (m[1] * m[5] - m[2] * m[4]) / det;
        inv[5] = (m[2] * m[3] - m[0] * m[5]) / det;
        inv[8] = (m[0] * m[4] - m[1] * m[3]) / det;
    }
}
} // namespace

LagrangianMap::LagrangianMap(const StripGrid& g)
    : grid(&g), displacement(g, 1) {
    rebuild();
}

LagrangianMap::LagrangianMap(const StripGrid& g, const Field& displacement_)
    : grid(&g), displacement(displacement_) {
    rebuild();
}

void LagrangianMap::rebuild() {
    const StripGrid& g = *grid;
    const int d = g.dim;
    jacobian = Field(g, 2);
    inv_jacobian = Field(g, 2);
    det_jac = Field(g, 0);

    std::vector<Field> du(d);
    for (int a = 0; a < d; ++a) du[a] = grid_derivative(displacement, a);

    min_det = 1e300;
    int worst = -1;
    for (int n = 0; n < g.nnodes(); ++n) {
        double J[9], Ji[9], det;
        for (int i = 0; i < d; ++i)
            for (int a = 0; a < d; ++a)
                J[i * d + a] = (i == a ? 1.0 : 0.0) + du[a].at(i, n);
        small_inverse(d, J, Ji, det);
        if (det < min_det) {
            min_det = det;
            worst = n;
        }
        det_jac.at(0, n) = det;
        for (int i = 0; i < d; ++i)
            for (int a = 0; a < d; ++a) {
                jacobian.at(i * d + a, n) = J[i * d + a];
                inv_jacobian.at(a * d + i, n) = Ji[a * d + i];
            }
    }
    if (!(min_det > 0))
        throw std::runtime_error("LagrangianMap: non-positive jacobian at node " +
                                 std::to_string(worst) + " (det=" + std::to_string(min_det) + ")");
}

Field LagrangianMap::positions() const {
    const StripGrid& g = *grid;
    Field x = displacement;
    for (int n = 0; n < g.nnodes(); ++n) {
        auto y = g.y(n);
        for (int k = 0; k < g.dim; ++k) x.at(k, n) += y[k];
    }
    return x;
}

bool LagrangianMap::is_identity() const {
    for (double v : displacement.data)
        if (v != 0.0) return false;
    return true;
}

LagrangianMap map_from_function(const StripGrid& g,
                                const std::function<std::array<double, 3>(std::array<double, 3>)>& x_of_y) {
    Field u(g, 1);
    for (int n = 0; n < g.nnodes(); ++n) {
        auto y = g.y(n);
        auto x = x_of_y(y);
        for (int k = 0; k < g.dim; ++k) u.at(k, n) = x[k] - y[k];
    }
    return LagrangianMap(g, u);
}

Metric metric_from_map(const LagrangianMap& map) {
    const StripGrid& g = *map.grid;
    const int d = g.dim;
    Metric m;
    m.g = Field(g, 2);
    m.g_inv = Field(g, 2);
    m.sqrt_det = map.det_jac;
    m.flat = map.is_identity();
    for (int n = 0; n < g.nnodes(); ++n) {
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                double acc = 0, acc_inv = 0;
                for (int i = 0; i < d; ++i) {
                    acc += map.jacobian.at(i * d + a, n) * map.jacobian.at(i * d + b, n);
                    acc_inv += map.inv_jacobian.at(a * d + i, n) * map.inv_jacobian.at(b * d + i, n);
                }
                m.g.at(a * d + b, n) = acc;
                m.g_inv.at(a * d + b, n) = acc_inv;
            }
    }
    return m;
}

Field euler_derivative(const Field& f, const LagrangianMap& map) {
    const StripGrid& g = *f.grid;
    const int d = g.dim;
    Field out(g, f.rank + 1);
    std::vector<Field> df(d);
    for (int a = 0; a < d; ++a) df[a] = grid_derivative(f, a);
    const bool ident = map.is_identity();
    for (int c = 0; c < f.ncomp(); ++c) {
        for (int i = 0; i < d; ++i) {
            double* o = out.comp(i * f.ncomp() + c);
            if (ident) {
                const double* s = df[i].comp(c);
                std::copy(s, s + g.nnodes(), o);
            } else {
                for (int n = 0; n < g.nnodes(); ++n) {
                    double acc = 0;
                    for (int a = 0; a < d; ++a)
                        acc += map.inv_jacobian.at(a * d + i, n) * df[a].at(c, n);
                    o[n] = acc;
                }
            }
        }
    }
    return out;
}

Field symmetrize_slots(const Field& f, int nslots) {
    if (nslots <= 1) return f;
    const int d = f.dim();
    Field out(*f.grid, f.rank);
    std::vector<int> idx(f.rank), perm(nslots);
    const int nc = f.ncomp();
    std::vector<int> srcmap; // for each comp, list of source comps to average
    std::vector<double> fact;
    // Precompute permutation-averaged source component for each target comp.
    std::vector<std::vector<int>> sources(nc);
    for (int c = 0; c < nc; ++c) {
        int t = c;
        for (int k = f.rank - 1; k >= 0; --k) {
            idx[k] = t % d;
            t /= d;
        }
        std::iota(perm.begin(), perm.end(), 0);
        std::vector<int> pidx = idx;
        do {
            for (int k = 0; k < nslots; ++k) pidx[k] = idx[perm[k]];
            sources[c].push_back(out.cidx(pidx.data()));
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    const int nn = f.nnodes();
    for (int c = 0; c < nc; ++c) {
        double* o = out.comp(c);
        const double w = 1.0 / sources[c].size();
        for (int s : sources[c]) {
            const double* src = f.comp(s);
            for (int n = 0; n < nn; ++n) o[n] += w * src[n];
        }
    }
    return out;
}

Field euler_derivative_n(const Field& f, const LagrangianMap& map, int order) {
    Field cur = f;
    for (int k = 0; k < order; ++k) cur = euler_derivative(cur, map);
    return symmetrize_slots(cur, order);
}

Field divergence(const Field& v, const LagrangianMap& map) {
    if (v.rank != 1) throw std::invalid_argument("divergence: rank-1 field expected");
    const StripGrid& g = *v.grid;
    const int d = g.dim;
    Field dv = euler_derivative(v, map);
    Field out(g, 0);
    for (int i = 0; i < d; ++i) {
        const double* p = dv.comp(i * d + i);
        for (int n = 0; n < g.nnodes(); ++n) out.at(0, n) += p[n];
    }
    return out;
}

Field curl(const Field& v, const LagrangianMap& map) {
    if (v.rank != 1) throw std::invalid_argument("curl: rank-1 field expected");
    const StripGrid& g = *v.grid;
    const int d = g.dim;
    Field dv = euler_derivative(v, map);
    Field out(g, 2);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double* o = out.comp(i * d + j);
            const double* a = dv.comp(i * d + j);
            const double* b = dv.comp(j * d + i);
            for (int n = 0; n < g.nnodes(); ++n) o[n] = a[n] - b[n];
        }
    return out;
}

} // namespace ww
