#include "wwlab/initdata.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "wwlab/norms.hpp"
#include "wwlab/quadrature.hpp"
#include "wwlab/spectral.hpp"

namespace ww {

namespace {

Field vertical_coordinate(const StripGrid& g) {
    Field x(g, 0);
    for (int n = 0; n < g.nnodes(); ++n) x.at(0, n) = g.y(n)[g.dim - 1];
    return x;
}

Field full_from_dev(const Field& dev) {
    Field full = dev;
    const StripGrid& g = *dev.grid;
    for (int n = 0; n < g.nnodes(); ++n) full.at(0, n) -= g.y(n)[g.dim - 1];
    return full;
}

double hw_norm(const Field& f, int s, double mu) {
    WeightSpec w{mu};
    return norm(f, NormSpace::Hsw, s, &w);
}

} // namespace

std::string IterationTrace::csv() const {
    std::ostringstream os;
    os << "# wwlab-initdata-trace v1\nnu";
    if (!rows.empty())
        for (size_t k = 0; k < rows.front().m_k.size(); ++k) os << ",m_" << k;
    os << ",m_star,diff,ratio\n";
    os.precision(12);
    for (const auto& r : rows) {
        os << r.nu;
        for (double m : r.m_k) os << "," << m;
        os << "," << r.m_star << "," << r.diff << "," << r.ratio << "\n";
    }
    return os.str();
}

FlowState CompatibleData::state(EosPtr eos) const {
    const StripGrid& g = *v0.grid;
    return FlowState(LagrangianMap(g), v0, h[0], std::move(eos));
}

Field pressure_from_velocity(const Field& u0) {
    const StripGrid& g = *u0.grid;
    LagrangianMap map(g);
    Field du = euler_derivative(u0, map);
    const int d = g.dim;
    EllipticProblem p;
    p.map = &map;
    p.rhs = Field(g, 0);
    for (int n = 0; n < g.nnodes(); ++n) {
        double acc = 0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) acc += du.at(i * d + j, n) * du.at(j * d + i, n);
        p.rhs.at(0, n) = -acc;
    }
    p.top.assign(g.nbdy(), 0.0);
    p.bottom.assign(g.nbdy(), 0.0);
    p.bottom_bc = BottomBc::Neumann;
    return solve_dirichlet(p);
}

CompatibleData construct_compatible_data(const InitialDataProblem& prob) {
    const StripGrid& g = *prob.u0.grid;
    LagrangianMap map(g);
    const int r = prob.r;
    const int s = r + 1;
    if (s > 6)
        throw std::invalid_argument("construct_compatible_data: r too large for the norm cap");
    {
        Field divu = divergence(prob.u0, map);
        double nd = norm(divu, NormSpace::L2);
        double nu0 = std::max(norm(prob.u0, NormSpace::Hs, 1), 1e-30);
        if (nd > 1e-6 * nu0)
            throw std::invalid_argument("construct_compatible_data: u0 is not divergence-free "
                                        "(|div u0| = " + std::to_string(nd) + ")");
    }
    std::vector<double> zeros(g.nbdy(), 0.0);
    // deviation solves carry a homogeneous Neumann bottom: d_z(h + x_n) = 0 is
    // the static balance consistent with the impermeable wall
    auto solve_dev = [&](const Field& rhs) {
        EllipticProblem p;
        p.map = &map;
        p.rhs = rhs;
        p.top = zeros;
        p.bottom = zeros;
        p.bottom_bc = BottomBc::Neumann;
        return solve_dirichlet(p);
    };

    // data-mode evaluation of F_k = f_{k+1}|_{t=0} and G_k = g_{k+1}|_{t=0};
    // F_k touches h_j only for j <= k-1
    auto eval_F = [&](int k, const Field& v0, const std::vector<Field>& hk) {
        std::vector<Field> hist(hk.begin(), hk.begin() + std::max(k, 1));
        EvalContext ctx(map, v0, hist, prob.eos);
        return evaluate(sym::source_f(k + 1, sym::Mode::Data), ctx);
    };
    auto eval_G = [&](int k, const Field& v0, const std::vector<Field>& hk) {
        EvalContext ctx(map, v0, hk, prob.eos);
        return evaluate(sym::source_g(k + 1), ctx);
    };

    // state: full h-histories h[0..r+1] (h[r] = h[r+1] = 0), deviation at 0
    std::vector<Field> h(r + 2, Field(g, 0));
    Field h0_dev(g, 0);
    Field v0 = prob.u0;
    Field phi(g, 0);

    // base iterate: Lap h_k^0 = -F_k(u0, h^0_{<k})
    for (int k = 0; k <= r - 1; ++k) {
        Field Fk = eval_F(k, v0, h);
        Fk *= -1.0;
        if (k == 0) {
            h0_dev = solve_dev(Fk);
            h[0] = full_from_dev(h0_dev);
        } else {
            h[k] = solve_dev(Fk);
        }
    }

    IterationTrace trace;
    std::vector<Field> h_prev;
    Field h0_dev_prev;
    int bad_streak = 0;
    bool converged = false;
    for (int nu = 1; nu <= prob.max_iter; ++nu) {
        h_prev = h;
        h0_dev_prev = h0_dev;
        try {
        Field eprime(g, 0);
        for (int n = 0; n < g.nnodes(); ++n)
            eprime.at(0, n) = prob.eos->e_prime(h_prev[0].at(0, n));

        // v_0^nu = u_0 + grad(phi), Lap phi = -e'(h0) h1 (previous iterate),
        // Neumann bottom keeps u.N = 0 at the wall
        {
            EllipticProblem p;
            p.map = &map;
            p.rhs = Field(g, 0);
            for (int n = 0; n < g.nnodes(); ++n)
                p.rhs.at(0, n) = -eprime.at(0, n) * h_prev[1].at(0, n);
            p.top = zeros;
            p.bottom = zeros;
            p.bottom_bc = BottomBc::Neumann;
            phi = solve_dirichlet(p);
            Field gphi = euler_derivative(phi, map);
            v0 = prob.u0;
            v0 += gphi;
        }
        // h_k^nu, sequentially in k (F uses current-nu h's, G previous-nu)
        for (int k = 0; k <= r - 1; ++k) {
            Field rhs = eval_F(k, v0, h);
            rhs *= -1.0;
            Field Gk = eval_G(k, v0, h_prev);
            rhs -= Gk;
            if (k <= r - 3) {
                for (int n = 0; n < g.nnodes(); ++n)
                    rhs.at(0, n) += eprime.at(0, n) * h_prev[k + 2].at(0, n);
            }
            if (k == 0) {
                h0_dev = solve_dev(rhs);
                h[0] = full_from_dev(h0_dev);
            } else {
                h[k] = solve_dev(rhs);
            }
        }
        } catch (const InitDataError&) {
            throw;
        } catch (const std::exception& e) {
            throw InitDataError(std::string("construct_compatible_data: iteration "
                                            "diverging, kappa too small (") + e.what() + ")",
                                trace);
        }
        bool finite = v0.finite() && h0_dev.finite();
        for (int k = 1; k <= r - 1 && finite; ++k) finite = h[k].finite();
        if (!finite)
            throw InitDataError("construct_compatible_data: iteration diverging, "
                                "kappa too small (non-finite iterate)", trace);
        // trace row
        IterationTrace::Row row;
        row.nu = nu;
        row.m_star = 0;
        for (int k = 0; k <= r - 1; ++k) {
            const Field& fk = (k == 0) ? h0_dev : h[k];
            row.m_k.push_back(hw_norm(fk, s - k, prob.mu));
            row.m_star += row.m_k.back();
        }
        row.m_star += hw_norm(v0, s, prob.mu);
        WeightSpec w{prob.mu};
        double diff = norm(h0_dev - h0_dev_prev, NormSpace::Hsw, 2, &w);
        for (int k = 1; k <= r - 1; ++k) diff += norm(h[k] - h_prev[k], NormSpace::Hsw, 2, &w);
        row.diff = diff;
        row.ratio = (trace.rows.empty() || trace.rows.back().diff == 0)
                        ? 0.0
                        : diff / trace.rows.back().diff;
        trace.rows.push_back(row);

        if (nu >= 2 && row.ratio >= 1.0 && row.diff > 1e-12 * std::max(row.m_star, 1e-30)) {
            if (++bad_streak >= 3)
                throw InitDataError("construct_compatible_data: iteration diverging, "
                                    "kappa too small (contraction ratio >= 1 for 3 "
                                    "consecutive steps)", trace);
        } else {
            bad_streak = 0;
        }
        if (diff <= prob.tol * std::max(row.m_star, 1e-30)) {
            // full-norm confirmation
            double fdiff = hw_norm(h0_dev - h0_dev_prev, s, prob.mu);
            for (int k = 1; k <= r - 1; ++k)
                fdiff += hw_norm(h[k] - h_prev[k], s - k, prob.mu);
            if (fdiff <= 100 * prob.tol * std::max(row.m_star, 1e-30)) {
                converged = true;
                break;
            }
        }
    }
    if (!converged && !trace.rows.empty() &&
        trace.rows.back().diff > 1e-6 * std::max(trace.rows.back().m_star, 1e-30))
        throw InitDataError("construct_compatible_data: no convergence within max_iter",
                            trace);

    CompatibleData out;
    out.r = r;
    out.v0 = v0;
    out.phi = phi;
    out.h0_dev = h0_dev;
    out.h = h; // h[r], h[r+1] stay identically zero
    out.trace = std::move(trace);
    return out;
}

CompatibilityReport verify_compatibility(const CompatibleData& data, EosPtr eos,
                                         int k_max) {
    const StripGrid& g = *data.v0.grid;
    LagrangianMap map(g);
    CompatibilityReport rep;
    for (int j = 0; j <= k_max; ++j) {
        double sup = 0;
        if (j < static_cast<int>(data.h.size()))
            for (int b = 0; b < g.nbdy(); ++b)
                sup = std::max(sup, std::abs(data.h[j].at(0, g.top_node(b))));
        rep.boundary_sup.push_back(sup);
    }
    // wave-system residuals, interior L2
    for (int k = 0; k <= std::min(k_max, data.r - 1); ++k) {
        std::vector<Field> hist(data.h.begin(), data.h.begin() + std::max(k, 1));
        EvalContext fctx(map, data.v0, hist, eos);
        Field Fk = evaluate(sym::source_f(k + 1, sym::Mode::Data), fctx);
        EvalContext gctx(map, data.v0, data.h, eos);
        Field Gk = evaluate(sym::source_g(k + 1), gctx);
        Field lap = apply_laplacian(k == 0 ? data.h0_dev : data.h[k], map);
        Field res(g, 0);
        for (int n = 0; n < g.nnodes(); ++n) {
            int j = g.j_of(n);
            if (j == 0 || j == g.nv - 1) continue;
            double ep = eos->e_prime(data.h[0].at(0, n));
            res.at(0, n) = ep * data.h[k + 2].at(0, n) - lap.at(0, n) - Fk.at(0, n) -
                           Gk.at(0, n);
        }
        rep.wave_residual.push_back(norm(res, NormSpace::L2));
    }
    // closure-route reconstruction from (v0, h0): 1/e' amplified diagnostic
    EvalContext cctx(map, data.v0, data.h[0], std::move(eos));
    for (int j = 0; j <= k_max; ++j) {
        const Field& hj = cctx.atom_field(sym::Base::H, 0, j);
        double sup = 0;
        for (int b = 0; b < g.nbdy(); ++b)
            sup = std::max(sup, std::abs(hj.at(0, g.top_node(b))));
        rep.closure_sup.push_back(sup);
    }
    return rep;
}

SignConditionReport check_sign_condition(const CompatibleData& data, EosPtr eos,
                                         double probe_depth) {
    const StripGrid& g = *data.v0.grid;
    LagrangianMap map(g);
    SignConditionReport rep;
    {
        Field cu = curl(data.v0, map);
        double c = 0, scale = 0;
        for (double x : cu.data) c = std::max(c, std::abs(x));
        for (double x : data.v0.data) scale = std::max(scale, std::abs(x));
        // the superharmonicity branch needs irrotational data; grad(phi)
        // corrections keep curl at solver tolerance
        if (c > 1e-6 * std::max(1.0, scale))
            throw std::invalid_argument("check_sign_condition: rotational u0 passed to the "
                                        "superharmonicity check (|curl| = " + std::to_string(c) + ")");
    }
    // (i) -Lap(h0 + x_n) > 0 on interior nodes
    Field lap = apply_laplacian(data.h0_dev, map);
    double mn = 1e300, scale = 0;
    for (int n = 0; n < g.nnodes(); ++n) {
        int j = g.j_of(n);
        if (j == 0 || j == g.nv - 1) continue;
        mn = std::min(mn, -lap.at(0, n));
        scale = std::max(scale, std::abs(lap.at(0, n)));
    }
    rep.min_neg_lap = mn;
    rep.degenerate = (std::abs(mn) < 1e-9 && scale < 1e-9);
    rep.superharmonic_ok = rep.degenerate || mn > 0;

    // (ii) boundary minimum of -grad_N h0
    FlowState st(map, data.v0, data.h[0], std::move(eos));
    Field gh = euler_derivative(st.h, st.map);
    rep.eps = 1e300;
    for (int b = 0; b < g.nbdy(); ++b) {
        double acc = 0;
        for (int i = 0; i < g.dim; ++i)
            acc += gh.at(i, g.top_node(b)) * st.bdy().n_euler.at(i, b);
        rep.eps = std::min(rep.eps, -acc);
    }
    rep.eps_ok = rep.eps > 0;

    // (iii) Green's-function lower bound: u_b solves Lap u_b = -delta_{x_n=b},
    // u_b = 0 top and bottom; the bound is -grad_N u_b at the surface. The
    // stencil operator handles the point-source right-hand side.
    int jb = static_cast<int>(std::lround((probe_depth + g.depth) / g.dz()));
    jb = std::clamp(jb, 1, g.nv - 2);
    Field rhs(g, 0);
    const auto& wz = vertical_weights(g);
    for (int b = 0; b < g.nbdy(); ++b)
        rhs.at(0, g.node(g.i1_of(b), g.i2_of(b), jb)) = -1.0 / wz[jb];
    std::vector<double> zero(g.nbdy(), 0.0);
    FlatPoissonSolver green(g, BottomBc::Dirichlet, VerticalOp::Stencil);
    Field ub = green.solve(rhs, zero, zero);
    Field gub = euler_derivative(ub, map);
    rep.green_bound_min = 1e300;
    rep.green_bound_max = -1e300;
    rep.green_margin = 1e300;
    for (int b = 0; b < g.nbdy(); ++b) {
        double bound = 0, ngh = 0;
        for (int i = 0; i < g.dim; ++i) {
            bound -= gub.at(i, g.top_node(b)) * st.bdy().n_euler.at(i, b);
            ngh -= gh.at(i, g.top_node(b)) * st.bdy().n_euler.at(i, b);
        }
        rep.green_bound_min = std::min(rep.green_bound_min, bound);
        rep.green_bound_max = std::max(rep.green_bound_max, bound);
        rep.green_margin = std::min(rep.green_margin, ngh - bound);
    }
    rep.green_ok = rep.green_margin > -1e-2;
    return rep;
}

Field preset_velocity(const StripGrid& g, const std::string& name, double amplitude,
                      int modes, uint64_t seed) {
    Field u(g, 1);
    const double H = g.depth;
    if (name == "hydrostatic") return u;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2 * M_PI);
    if (name == "swirl") {
        // u = (-psi_z, psi_x), psi = A sin(m y1 + p)(1 + y/H)^2: wall-safe
        std::vector<double> ph(modes + 1);
        for (int m = 1; m <= modes; ++m) ph[m] = phase(rng);
        for (int n = 0; n < g.nnodes(); ++n) {
            auto y = g.y(n);
            double z = y[g.dim - 1];
            double q = (1 + z / H) * (1 + z / H);
            double qp = 2.0 / H * (1 + z / H);
            for (int m = 1; m <= modes; ++m) {
                double a = amplitude / m;
                u.at(0, n) += -a * std::sin(m * y[0] + ph[m]) * qp;
                u.at(1, n) += a * m * std::cos(m * y[0] + ph[m]) * q;
            }
        }
        return u;
    }
    if (name == "irrotational-bump") {
        // u = grad(chi), chi = sum a_m cos(m y1 + p) cosh(m(z+H))/cosh(mH)
        std::vector<double> ph(modes + 1);
        for (int m = 1; m <= modes; ++m) ph[m] = phase(rng);
        for (int n = 0; n < g.nnodes(); ++n) {
            auto y = g.y(n);
            double z = y[g.dim - 1];
            for (int m = 1; m <= modes; ++m) {
                double a = amplitude / (m * m);
                double ch = std::cosh(m * (z + H)) / std::cosh(m * H);
                double sh = std::sinh(m * (z + H)) / std::cosh(m * H);
                u.at(0, n) += -a * m * std::sin(m * y[0] + ph[m]) * ch;
                u.at(1, n) += a * m * std::cos(m * y[0] + ph[m]) * sh;
            }
        }
        return u;
    }
    throw std::invalid_argument("preset_velocity: unknown preset '" + name + "'");
}

} // namespace ww
