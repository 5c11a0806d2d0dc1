#include "wwlab/energy.hpp"

#include <cmath>
#include <stdexcept>

#include "wwlab/norms.hpp"
#include "wwlab/quadrature.hpp"
#include "wwlab/spectral.hpp"

namespace ww {

const Metric& FlowState::metric() const {
    if (!metric_) metric_ = metric_from_map(map);
    return *metric_;
}
const BoundaryGeometry& FlowState::bdy() const {
    if (!bdy_) bdy_ = boundary_geometry(map, metric());
    return *bdy_;
}
const NormalExtension& FlowState::qform() const {
    if (!qform_) qform_ = q_form(map, bdy(), bdy().l0_proxy / 4.0);
    return *qform_;
}
EvalContext& FlowState::ctx() const {
    if (!ctx_) ctx_ = std::make_unique<EvalContext>(map, v, h, eos);
    return *ctx_;
}
Field FlowState::rho() const {
    Field r(grid(), 0);
    for (int n = 0; n < grid().nnodes(); ++n)
        r.at(0, n) = eos ? eos->rho(h.at(0, n)) : 1.0;
    return r;
}
void FlowState::invalidate() {
    metric_.reset();
    bdy_.reset();
    qform_.reset();
    ctx_.reset();
}

FlowState hydrostatic_state(const StripGrid& g, EosPtr eos) {
    LagrangianMap map(g);
    Field v(g, 1);
    Field h(g, 0);
    for (int n = 0; n < g.nnodes(); ++n) h.at(0, n) = -g.y(n)[g.dim - 1];
    return FlowState(std::move(map), std::move(v), std::move(h), std::move(eos));
}

namespace {

// integral over the flow image: integrand * det(dx/dy), optional weight w(x)
double image_integral(const FlowState& st, const Field& integrand, const Field* w) {
    Field m = st.map.det_jac;
    if (w)
        for (int n = 0; n < st.grid().nnodes(); ++n) m.at(0, n) *= w->at(0, n);
    return integrate(integrand, Region::Interior, &m);
}

double l2_sq_image(const FlowState& st, const Field& f, const Field* w) {
    return image_integral(st, magnitude2(f), w);
}

// surface potential relative to the flat rest level: (1/2) oint x_n^2 dX
double surface_potential(const FlowState& st) {
    const StripGrid& g = st.grid();
    const BoundaryGeometry& bg = st.bdy();
    const int d = g.dim;
    std::vector<double> vals(g.nbdy());
    if (d == 2) {
        // X'(y1) = 1 + d(displacement_x)/dy1 on the top row
        std::vector<double> ux(g.nbdy());
        for (int b = 0; b < g.nbdy(); ++b)
            ux[b] = st.map.displacement.at(0, g.top_node(b));
        // spectral derivative along the boundary
        Field tmp(g, 0);
        for (int b = 0; b < g.nbdy(); ++b) tmp.at(0, g.top_node(b)) = ux[b];
        Field der = grid_derivative(tmp, 0);
        for (int b = 0; b < g.nbdy(); ++b) {
            double z = bg.positions.at(1, b);
            vals[b] = 0.5 * z * z * (1.0 + der.at(0, g.top_node(b)));
        }
    } else {
        // (1/2) int x_n^2 det(horizontal surface jacobian)
        Field ux(g, 1);
        for (int i = 0; i < d; ++i)
            for (int n = 0; n < g.nnodes(); ++n) ux.at(i, n) = st.map.displacement.at(i, n);
        Field d1 = grid_derivative(ux, 0), d2 = grid_derivative(ux, 1);
        for (int b = 0; b < g.nbdy(); ++b) {
            int tn = g.top_node(b);
            double j11 = 1 + d1.at(0, tn), j12 = d2.at(0, tn);
            double j21 = d1.at(1, tn), j22 = 1 + d2.at(1, tn);
            double z = bg.positions.at(2, b);
            vals[b] = 0.5 * z * z * (j11 * j22 - j12 * j21);
        }
    }
    return integrate_boundary(g, vals.data());
}

Field weight_on_image(const FlowState& st, double mu) {
    WeightSpec w{mu};
    Field pos = st.map.positions();
    return weight_field(st.grid(), w, &pos);
}

// -grad_N h on the boundary
std::vector<double> neg_grad_N_h(const FlowState& st) {
    const StripGrid& g = st.grid();
    Field gh = euler_derivative(st.h, st.map);
    const BoundaryGeometry& bg = st.bdy();
    std::vector<double> out(g.nbdy());
    for (int b = 0; b < g.nbdy(); ++b) {
        double acc = 0;
        for (int i = 0; i < g.dim; ++i)
            acc += gh.at(i, g.top_node(b)) * bg.n_euler.at(i, b);
        out[b] = -acc;
    }
    return out;
}

} // namespace

double energy_E0(const FlowState& st) {
    const StripGrid& g = st.grid();
    Field rho = st.rho();
    Field kin(g, 0), pot(g, 0), grav(g, 0);
    for (int n = 0; n < g.nnodes(); ++n) {
        double v2 = 0;
        for (int i = 0; i < g.dim; ++i) v2 += st.v.at(i, n) * st.v.at(i, n);
        double r = rho.at(0, n);
        kin.at(0, n) = 0.5 * r * v2;
        pot.at(0, n) = st.eos ? r * st.eos->Q(r) : 0.0;
        double xn = g.y(n)[g.dim - 1] + st.map.displacement.at(g.dim - 1, n);
        grav.at(0, n) = (r - 1.0) * xn;
    }
    return image_integral(st, kin, nullptr) + image_integral(st, pot, nullptr) +
           surface_potential(st) + image_integral(st, grav, nullptr);
}

namespace {

struct EnergyWork {
    const FlowState* st;
    Field rho;
    Field w;       // weight on image (Weighted variant), else empty
    const Field* wptr = nullptr;
    std::vector<double> nu;      // 1/(-grad_N h) on boundary
    std::vector<double> rho_bdy; // rho at top nodes
    Field xvert;                 // vertical Eulerian position (deviation histories)
};

// Dt^k of the deviation offset x_n: k = 0 -> x_n, k >= 1 -> vertical V_{k-1}
Field deviation_history(const FlowState& st, int k) {
    const StripGrid& g = st.grid();
    Field out(g, 0);
    if (k == 0) {
        for (int n = 0; n < g.nnodes(); ++n)
            out.at(0, n) = g.y(n)[g.dim - 1] + st.map.displacement.at(g.dim - 1, n);
    } else {
        const Field& vk = st.ctx().atom_field(sym::Base::V, 0, k - 1);
        for (int n = 0; n < g.nnodes(); ++n) out.at(0, n) = vk.at(g.dim - 1, n);
    }
    return out;
}

Field h_history(const FlowState& st, int k, bool deviation) {
    Field hk = st.ctx().atom_field(sym::Base::H, 0, k);
    if (deviation) hk += deviation_history(st, k);
    return hk;
}

} // namespace

EnergyBreakdown energy_Er(const FlowState& st, int r, EnergyVariant variant,
                          double mu, bool deviation) {
    if (!st.eos) throw std::invalid_argument("energy_Er: state carries no EOS");
    const StripGrid& g = st.grid();
    EnergyBreakdown out;
    out.r = r;
    out.variant = variant;
    out.deviation = deviation;
    out.mu = mu;
    out.E0 = energy_E0(st);

    EnergyWork wk;
    wk.st = &st;
    wk.rho = st.rho();
    if (variant == EnergyVariant::Weighted) {
        wk.w = weight_on_image(st, mu);
        wk.wptr = &wk.w;
    }
    // boundary coefficient nu = (-grad_N h)^{-1}
    auto ngnh = neg_grad_N_h(st);
    wk.nu.resize(g.nbdy());
    wk.rho_bdy.resize(g.nbdy());
    for (int b = 0; b < g.nbdy(); ++b) {
        if (ngnh[b] < 1e-6)
            throw std::runtime_error("energy_Er: sign condition violated at boundary node " +
                                     std::to_string(b) + " (-grad_N h = " +
                                     std::to_string(ngnh[b]) + ")");
        wk.nu[b] = 1.0 / ngnh[b];
        wk.rho_bdy[b] = wk.rho.at(0, g.top_node(b));
    }

    const NormalExtension& Q = st.qform();
    EvalContext& ctx = st.ctx();
    Field eprime(g, 0);
    for (int n = 0; n < g.nnodes(); ++n) eprime.at(0, n) = st.eos->e_prime(st.h.at(0, n));

    // E_{s,k} for all s+k = r' <= r
    for (int rp = 1; rp <= r; ++rp) {
        double Erp = 0;
        for (int s = 0; s <= rp; ++s) {
            int k = rp - s;
            const Field& Tv = ctx.atom_field(sym::Base::V, s, k);
            Field Th_store;
            const Field* Th;
            if (deviation) {
                Field hk = h_history(st, k, true);
                Th_store = (s == 0) ? std::move(hk) : euler_derivative_n(hk, st.map, s);
                Th = &Th_store;
            } else {
                Th = &ctx.atom_field(sym::Base::H, s, k);
            }
            Field integrand(g, 0);
            for (int n = 0; n < g.nnodes(); ++n) {
                double qv = q_contract_node(Q.q, Tv, Tv, s, n); // delta on the vector slot
                double qh = q_contract_node(Q.q, *Th, *Th, s, n);
                integrand.at(0, n) =
                    0.5 * wk.rho.at(0, n) * (qv + eprime.at(0, n) * qh);
            }
            double interior = image_integral(st, integrand, wk.wptr);
            // boundary part
            std::vector<double> bvals(g.nbdy());
            for (int b = 0; b < g.nbdy(); ++b) {
                int tn = g.top_node(b);
                double qh = q_contract_node(Q.q, *Th, *Th, s, tn);
                double wv = wk.wptr ? wk.wptr->at(0, tn) : 1.0;
                bvals[b] = 0.5 * wk.rho_bdy[b] * qh * wk.nu[b] * wv *
                           st.bdy().sqrt_gamma.at(0, b);
            }
            double boundary = integrate_boundary(g, bvals.data());
            out.E_sk[{s, k}] = interior + boundary;
            Erp += interior + boundary;
        }
        // K_{r'} = int rho |d^{r'-1} curl v|^2
        Field cv = curl(st.v, st.map);
        Field dcv = euler_derivative_n(cv, st.map, rp - 1);
        Field m2 = magnitude2(dcv);
        for (int n = 0; n < g.nnodes(); ++n) m2.at(0, n) *= wk.rho.at(0, n);
        double Krp = image_integral(st, m2, wk.wptr);
        out.K[rp] = Krp;
        Erp += Krp;
        out.E[rp] = Erp; // W_j^2 terms appended below once per r'
    }
    // W_j (and tilde variant)
    const bool tilde = variant == EnergyVariant::Tilde;
    for (int j = 1; j <= r + 1; ++j) {
        Field hj = h_history(st, j, deviation);
        Field hjm = h_history(st, j - 1, deviation);
        Field ghjm = euler_derivative(hjm, st.map);
        Field a(g, 0), b(g, 0);
        for (int n = 0; n < g.nnodes(); ++n) {
            double ep = eprime.at(0, n);
            double ca = tilde ? ep : std::sqrt(ep);
            a.at(0, n) = ca * hj.at(0, n);
        }
        for (int c = 0; c < g.dim; ++c)
            for (int n = 0; n < g.nnodes(); ++n) {
                double cb = tilde ? std::sqrt(eprime.at(0, n)) : 1.0;
                b.at(0, n) += cb * cb * ghjm.at(c, n) * ghjm.at(c, n);
            }
        double na = std::sqrt(l2_sq_image(st, a, wk.wptr));
        double nb = std::sqrt(image_integral(st, b, wk.wptr));
        out.W[j] = 0.5 * na + 0.5 * nb;
    }
    for (int rp = 1; rp <= r; ++rp) {
        for (int j = 1; j <= rp + 1; ++j) out.E[rp] += out.W[j] * out.W[j];
    }
    out.Er = out.E[r];
    out.Er_star = out.E0;
    for (int rp = 1; rp <= r; ++rp) out.Er_star += out.E[rp];
    return out;
}

AprioriMonitor apriori_monitor(const FlowState& st) {
    const StripGrid& g = st.grid();
    AprioriMonitor m;
    m.K = st.bdy().K_monitor;
    m.c0 = st.eos ? st.eos->c0() : 0.0;

    auto ngnh = neg_grad_N_h(st);
    m.eps = 1e300;
    double max_inv = 0;
    for (int b = 0; b < g.nbdy(); ++b) {
        if (ngnh[b] < m.eps) {
            m.eps = ngnh[b];
            m.eps_argmin = b;
        }
        max_inv = std::max(max_inv, 1.0 / std::abs(ngnh[b]));
    }
    m.calE = max_inv;

    auto linf = [&](const Field& f) {
        double v = 0;
        for (double x : f.data) v = std::max(v, std::abs(x));
        return v;
    };
    Field rho = st.rho();
    m.rho_max = linf(rho);
    EvalContext& ctx = st.ctx();
    m.dv_max = linf(ctx.atom_field(sym::Base::V, 1, 0));
    m.dh_max = linf(ctx.atom_field(sym::Base::H, 1, 0));
    m.d2h_max = linf(ctx.atom_field(sym::Base::H, 2, 0));
    if (st.eos) {
        m.ddth_max = linf(ctx.atom_field(sym::Base::H, 1, 1));
        Field h1 = ctx.atom_field(sym::Base::H, 0, 1);
        Field h2 = ctx.atom_field(sym::Base::H, 0, 2);
        double a = 0, b = 0;
        for (int n = 0; n < g.nnodes(); ++n) {
            double ep = st.eos->e_prime(st.h.at(0, n));
            a = std::max(a, std::abs(ep * h1.at(0, n)));
            b = std::max(b, std::abs(ep * h2.at(0, n)));
        }
        m.ep_dth_max = a;
        m.ep_dtth_max = b;
    }
    // (div curl)_j = d_i curl_{ij}
    Field cv = curl(st.v, st.map);
    Field dcv = euler_derivative(cv, st.map);
    Field dc(g, 1);
    const int d = g.dim;
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) {
            const double* p = dcv.comp(i * d * d + i * d + j);
            for (int n = 0; n < g.nnodes(); ++n) dc.at(j, n) += p[n];
        }
    m.divcurl_max = linf(dc);

    m.M = std::max({m.rho_max, m.dv_max, m.dh_max, m.d2h_max, m.ddth_max,
                    m.ep_dth_max, m.ep_dtth_max, m.divcurl_max});
    return m;
}

} // namespace ww
