#include "wwlab/boundary.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "wwlab/spectral.hpp"
#include "wwlab/quadrature.hpp"

namespace ww {

namespace {

// horizontal derivative of a boundary array along boundary direction alpha
std::vector<double> bdy_derivative(const StripGrid& g, const std::vector<double>& vals,
                                   int alpha, int order) {
    // embed in a one-layer grid trick: operate line-by-line directly
    const int n = (alpha == 0) ? g.n1 : g.n2;
    std::vector<double> out(vals.size());
    const int nh = g.n1 * g.n2;
    std::vector<double> line(n);
    std::vector<std::complex<double>> sp(n / 2 + 1);
    auto apply = [&](int stride, int count, int base_step) {
        for (int c = 0; c < count; ++c) {
            for (int k = 0; k < n; ++k) line[k] = vals[c * base_step + k * stride];
            dft::forward(n, line.data(), sp.data());
            const std::complex<double> I(0, 1);
            for (int k = 0; k < static_cast<int>(sp.size()); ++k) {
                std::complex<double> f(1, 0);
                for (int o = 0; o < order; ++o) f *= I * static_cast<double>(k);
                sp[k] *= f;
            }
            if (order % 2 == 1) sp[n / 2] = 0.0;
            dft::inverse(n, sp.data(), line.data());
            for (int k = 0; k < n; ++k) out[c * base_step + k * stride] = line[k];
        }
    };
    (void)nh;
    if (alpha == 0)
        apply(1, g.n2, g.n1);
    else
        apply(g.n1, g.n1, 1);
    return out;
}

void small_inverse_sym(int d, const double* m, double* inv) {
    if (d == 1) {
        inv[0] = 1.0 / m[0];
    } else {
        double det = m[0] * m[3] - m[1] * m[2];
        inv[0] = m[3] / det;
        inv[1] = -m[1] / det;
        inv[2] = -m[2] / det;
        inv[3] = m[0] / det;
    }
}

} // namespace

BoundaryGeometry boundary_geometry(const LagrangianMap& map, const Metric& metric) {
    const StripGrid& g = *map.grid;
    const int d = g.dim;
    const int nb = g.nbdy();
    const int hd = d - 1; // number of boundary (horizontal) directions

    BoundaryGeometry bg;
    bg.n_euler = BoundaryField(g, 1);
    bg.N_up = BoundaryField(g, 1);
    bg.N_dn = BoundaryField(g, 1);
    bg.gamma_dn = BoundaryField(g, 2);
    bg.gamma_mixed = BoundaryField(g, 2);
    bg.theta = BoundaryField(g, 2);
    bg.sigma = BoundaryField(g, 0);
    bg.sqrt_gamma = BoundaryField(g, 0);
    bg.positions = BoundaryField(g, 1);

    Field pos = map.positions();
    for (int i = 0; i < d; ++i)
        for (int b = 0; b < nb; ++b) bg.positions.at(i, b) = pos.at(i, g.top_node(b));

    // surface tangents x_alpha and second derivatives x_alphabeta from the
    // periodic displacement (identity part contributes delta to x_alpha only)
    std::vector<std::vector<double>> xa(hd * d), xab(hd * hd * d);
    for (int i = 0; i < d; ++i) {
        std::vector<double> ui(nb);
        for (int b = 0; b < nb; ++b) ui[b] = map.displacement.at(i, g.top_node(b));
        for (int al = 0; al < hd; ++al) {
            auto der = bdy_derivative(g, ui, al, 1);
            for (int b = 0; b < nb; ++b) der[b] += (i == al ? 1.0 : 0.0);
            xa[al * d + i] = der;
            for (int be = 0; be < hd; ++be) {
                std::vector<double> u1 = bdy_derivative(g, ui, al, 1);
                xab[(al * hd + be) * d + i] = bdy_derivative(g, u1, be, 1);
            }
        }
    }

    double theta_sup = 0;
    for (int b = 0; b < nb; ++b) {
        const int tn = g.top_node(b);
        // first fundamental form (== horizontal block of g at the boundary)
        double a[4], ainv[4];
        for (int al = 0; al < hd; ++al)
            for (int be = 0; be < hd; ++be) {
                double acc = 0;
                for (int i = 0; i < d; ++i) acc += xa[al * d + i][b] * xa[be * d + i][b];
                a[al * hd + be] = acc;
            }
        small_inverse_sym(hd, a, ainv);
        double deta = (hd == 1) ? a[0] : a[0] * a[3] - a[1] * a[2];
        bg.sqrt_gamma.at(0, b) = std::sqrt(deta);

        // Lagrangian unit normal/co-normal
        double gvv_up = metric.g_inv.at(d * d - 1, tn); // g^{vv}
        double s = 1.0 / std::sqrt(gvv_up);
        for (int aa = 0; aa < d; ++aa) {
            bg.N_dn.at(aa, b) = (aa == d - 1) ? s : 0.0;
            bg.N_up.at(aa, b) = metric.g_inv.at(aa * d + (d - 1), tn) * s;
        }
        // Eulerian unit normal n = J N_up
        for (int i = 0; i < d; ++i) {
            double acc = 0;
            for (int aa = 0; aa < d; ++aa)
                acc += map.jacobian.at(i * d + aa, tn) * bg.N_up.at(aa, b);
            bg.n_euler.at(i, b) = acc;
        }
        // projections
        for (int aa = 0; aa < d; ++aa)
            for (int bb = 0; bb < d; ++bb) {
                bg.gamma_dn.at(aa * d + bb, b) =
                    metric.g.at(aa * d + bb, tn) - bg.N_dn.at(aa, b) * bg.N_dn.at(bb, b);
                bg.gamma_mixed.at(aa * d + bb, b) =
                    (aa == bb ? 1.0 : 0.0) - bg.N_dn.at(aa, b) * bg.N_up.at(bb, b);
            }
        // second fundamental form: II_ab = -n . x_ab, sigma = a^{ab} II_ab
        double II[4];
        double sig = 0;
        for (int al = 0; al < hd; ++al)
            for (int be = 0; be < hd; ++be) {
                double acc = 0;
                for (int i = 0; i < d; ++i) acc += bg.n_euler.at(i, b) * xab[(al * hd + be) * d + i][b];
                II[al * hd + be] = -acc;
                sig += ainv[al * hd + be] * II[al * hd + be];
            }
        bg.sigma.at(0, b) = sig;
        // theta_ab = II_albe B^al_a B^be_b with B^al_a = a^{albe} g_{a be}(top)
        double B[2][3];
        for (int al = 0; al < hd; ++al)
            for (int aa = 0; aa < d; ++aa) {
                double acc = 0;
                for (int be = 0; be < hd; ++be)
                    acc += ainv[al * hd + be] * metric.g.at(aa * d + be, tn);
                B[al][aa] = acc;
            }
        for (int aa = 0; aa < d; ++aa)
            for (int bb = 0; bb < d; ++bb) {
                double acc = 0;
                for (int al = 0; al < hd; ++al)
                    for (int be = 0; be < hd; ++be)
                        acc += II[al * hd + be] * B[al][aa] * B[be][bb];
                bg.theta.at(aa * d + bb, b) = acc;
            }
        // |theta|_g^2 = g^{ac} g^{bd} theta_ab theta_cd
        double t2 = 0;
        for (int aa = 0; aa < d; ++aa)
            for (int bb = 0; bb < d; ++bb)
                for (int cc = 0; cc < d; ++cc)
                    for (int dd = 0; dd < d; ++dd)
                        t2 += metric.g_inv.at(aa * d + cc, tn) * metric.g_inv.at(bb * d + dd, tn) *
                              bg.theta.at(aa * d + bb, b) * bg.theta.at(cc * d + dd, b);
        theta_sup = std::max(theta_sup, std::sqrt(std::max(0.0, t2)));
    }
    bg.theta_sup = theta_sup;

    // l1 proxy: min over boundary node pairs of distance/angle(normals),
    // horizontal period shifts included
    double l1 = 1e300;
    std::vector<double> shifts1{0.0, 2 * M_PI, -2 * M_PI};
    std::vector<double> shifts2 = (d == 3) ? shifts1 : std::vector<double>{0.0};
    for (int b1 = 0; b1 < nb; ++b1)
        for (int b2 = b1 + 1; b2 < nb; ++b2) {
            double dot = 0;
            for (int i = 0; i < d; ++i) dot += bg.n_euler.at(i, b1) * bg.n_euler.at(i, b2);
            double ang = std::acos(std::clamp(dot, -1.0, 1.0));
            if (ang < 1e-9) continue;
            double best = 1e300;
            for (double s1 : shifts1)
                for (double s2 : shifts2) {
                    double r2 = 0;
                    for (int i = 0; i < d; ++i) {
                        double di = bg.positions.at(i, b1) - bg.positions.at(i, b2);
                        if (i == 0) di += s1;
                        if (i == 1 && d == 3) di += s2;
                        r2 += di * di;
                    }
                    best = std::min(best, r2);
                }
            l1 = std::min(l1, std::sqrt(best) / ang);
        }
    bg.l1_proxy = l1;
    if (bg.l1_proxy < g.min_spacing())
        throw std::runtime_error("boundary_geometry: surface self-intersection "
                                 "(l1 proxy below grid spacing)");
    double inv_theta = (theta_sup > 0) ? 1.0 / theta_sup : 1e300;
    bg.l0_proxy = std::min({bg.l1_proxy / 2.0, inv_theta, g.depth});
    bg.K_monitor = bg.theta_sup + 1.0 / bg.l0_proxy;
    return bg;
}

std::string geometry_report_json(const BoundaryGeometry& bg, const LagrangianMap& map) {
    double smin = 1e300, smax = -1e300;
    for (int b = 0; b < map.grid->nbdy(); ++b) {
        smin = std::min(smin, bg.sigma.at(0, b));
        smax = std::max(smax, bg.sigma.at(0, b));
    }
    std::ostringstream os;
    os.precision(12);
    os << "{\"K_monitor\":" << bg.K_monitor
       << ",\"min_det_jacobian\":" << map.min_det
       << ",\"sigma_range\":[" << smin << "," << smax << "]"
       << ",\"l0_proxy\":" << bg.l0_proxy << "}";
    return os.str();
}

namespace {
double smoothstep5(double t) {
    if (t <= 0) return 0;
    if (t >= 1) return 1;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}
} // namespace

NormalExtension q_form(const LagrangianMap& map, const BoundaryGeometry& bg, double d0) {
    const StripGrid& g = *map.grid;
    const int d = g.dim;
    if (!(d0 >= bg.l0_proxy / 16.0 && d0 <= bg.l0_proxy / 2.0))
        throw std::invalid_argument("q_form: d0 outside [l0/16, l0/2] (l0=" +
                                    std::to_string(bg.l0_proxy) + ")");
    NormalExtension ext;
    ext.d0 = d0;
    ext.d = Field(g, 0);
    ext.eta = Field(g, 0);
    ext.normal = Field(g, 1);
    ext.q = Field(g, 2);

    Metric m = metric_from_map(map);
    const int nh = g.n1 * g.n2;
    // vertical geodesic distance to the top, column by column
    for (int b = 0; b < nh; ++b) {
        double acc = 0;
        ext.d.at(0, b + nh * (g.nv - 1)) = 0;
        for (int j = g.nv - 2; j >= 0; --j) {
            double gv1 = m.g.at(d * d - 1, b + nh * (j + 1));
            double gv0 = m.g.at(d * d - 1, b + nh * j);
            acc += 0.5 * (std::sqrt(gv1) + std::sqrt(gv0)) * g.dz();
            ext.d.at(0, b + nh * j) = acc;
        }
    }
    for (int n = 0; n < g.nnodes(); ++n) {
        // extended normal: Eulerian unit normal of the level set of the
        // vertical coordinate (equals the boundary normal on the surface)
        double nn = 0, comp[3];
        for (int i = 0; i < d; ++i) {
            comp[i] = map.inv_jacobian.at((d - 1) * d + i, n);
            nn += comp[i] * comp[i];
        }
        nn = std::sqrt(nn);
        for (int i = 0; i < d; ++i) ext.normal.at(i, n) = comp[i] / nn;
        double dist = ext.d.at(0, n);
        double eta = 1.0 - smoothstep5((dist - d0 / 4.0) / (d0 / 4.0));
        ext.eta.at(0, n) = eta;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                ext.q.at(i * d + j, n) =
                    (i == j ? 1.0 : 0.0) - eta * eta * ext.normal.at(i, n) * ext.normal.at(j, n);
    }
    return ext;
}

double q_contract_node(const Field& q, const Field& alpha, const Field& beta,
                       int nq, int node) {
    const int d = alpha.dim();
    const int nc = alpha.ncomp();
    std::vector<double> cur(nc), nxt(nc);
    for (int c = 0; c < nc; ++c) cur[c] = alpha.at(c, node);
    // apply q to each of the first nq slots in turn
    int slot_stride = nc / d; // stride of slot 0
    for (int s = 0; s < nq; ++s) {
        std::fill(nxt.begin(), nxt.end(), 0.0);
        for (int c = 0; c < nc; ++c) {
            int is = (c / slot_stride) % d;
            int base = c - is * slot_stride;
            double acc = 0;
            for (int jj = 0; jj < d; ++jj)
                acc += q.at(is * d + jj, node) * cur[base + jj * slot_stride];
            nxt[c] = acc;
        }
        cur.swap(nxt);
        slot_stride /= d;
    }
    double acc = 0;
    for (int c = 0; c < nc; ++c) acc += cur[c] * beta.at(c, node);
    return acc;
}

namespace {

LagrangianMap flow_map(const LagrangianMap& map,
                       const std::function<std::array<double, 3>(std::array<double, 3>)>& v,
                       double dt, int nsteps) {
    const StripGrid& g = *map.grid;
    Field u = map.displacement;
    auto vel = [&](const Field& disp, int n) {
        auto y = g.y(n);
        std::array<double, 3> x{0, 0, 0};
        for (int k = 0; k < g.dim; ++k) x[k] = y[k] + disp.at(k, n);
        return v(x);
    };
    double h = dt / nsteps;
    for (int s = 0; s < nsteps; ++s) {
        Field k1(g, 1), k2(g, 1), k3(g, 1), k4(g, 1), tmp(g, 1);
        for (int n = 0; n < g.nnodes(); ++n) {
            auto a = vel(u, n);
            for (int k = 0; k < g.dim; ++k) k1.at(k, n) = a[k];
        }
        tmp = u; tmp += 0.5 * h * k1;
        for (int n = 0; n < g.nnodes(); ++n) {
            auto a = vel(tmp, n);
            for (int k = 0; k < g.dim; ++k) k2.at(k, n) = a[k];
        }
        tmp = u; tmp += 0.5 * h * k2;
        for (int n = 0; n < g.nnodes(); ++n) {
            auto a = vel(tmp, n);
            for (int k = 0; k < g.dim; ++k) k3.at(k, n) = a[k];
        }
        tmp = u; tmp += h * k3;
        for (int n = 0; n < g.nnodes(); ++n) {
            auto a = vel(tmp, n);
            for (int k = 0; k < g.dim; ++k) k4.at(k, n) = a[k];
        }
        for (int n = 0; n < g.nnodes(); ++n)
            for (int k = 0; k < g.dim; ++k)
                u.at(k, n) += h / 6.0 * (k1.at(k, n) + 2 * k2.at(k, n) + 2 * k3.at(k, n) + k4.at(k, n));
    }
    return LagrangianMap(g, u);
}

std::array<double, 5> kinematic_residuals(const LagrangianMap& map,
                                          const std::function<std::array<double, 3>(std::array<double, 3>)>& v,
                                          double dt) {
    const StripGrid& g = *map.grid;
    const int d = g.dim;
    LagrangianMap mp = flow_map(map, v, dt, 4);
    LagrangianMap mm = flow_map(map, v, -dt, 4);
    Metric Gp = metric_from_map(mp), Gm = metric_from_map(mm), G0 = metric_from_map(map);
    BoundaryGeometry bgp = boundary_geometry(mp, Gp);
    BoundaryGeometry bgm = boundary_geometry(mm, Gm);
    BoundaryGeometry bg0 = boundary_geometry(map, G0);

    // Eulerian gradient of v by tight central differences of the callable
    auto grad_v = [&](const std::array<double, 3>& x, double dv[3][3]) {
        const double h = 1e-5;
        for (int j = 0; j < d; ++j) {
            auto xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            auto vp = v(xp), vm = v(xm);
            for (int i = 0; i < d; ++i) dv[i][j] = (vp[i] - vm[i]) / (2 * h);
        }
    };

    std::array<double, 5> res{0, 0, 0, 0, 0};
    Field pos = map.positions();
    for (int n = 0; n < g.nnodes(); ++n) {
        std::array<double, 3> x{0, 0, 0};
        for (int k = 0; k < d; ++k) x[k] = pos.at(k, n);
        double dv[3][3];
        grad_v(x, dv);
        double divv = 0;
        for (int i = 0; i < d; ++i) divv += dv[i][i];
        // Dt g_ab = pullback of (d_i v_j + d_j v_i)
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                double sym = 0;
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j)
                        sym += map.jacobian.at(i * d + a, n) * map.jacobian.at(j * d + b, n) *
                               (dv[i][j] + dv[j][i]);
                double lhs = (Gp.g.at(a * d + b, n) - Gm.g.at(a * d + b, n)) / (2 * dt);
                res[0] = std::max(res[0], std::abs(lhs - sym));
                double lhs_inv = (Gp.g_inv.at(a * d + b, n) - Gm.g_inv.at(a * d + b, n)) / (2 * dt);
                double rhs_inv = 0;
                for (int c = 0; c < d; ++c)
                    for (int e = 0; e < d; ++e) {
                        double dtg = 0;
                        for (int i = 0; i < d; ++i)
                            for (int j = 0; j < d; ++j)
                                dtg += map.jacobian.at(i * d + c, n) * map.jacobian.at(j * d + e, n) *
                                       (dv[i][j] + dv[j][i]);
                        rhs_inv -= G0.g_inv.at(a * d + c, n) * G0.g_inv.at(b * d + e, n) * dtg;
                    }
                res[1] = std::max(res[1], std::abs(lhs_inv - rhs_inv));
            }
        // Dt dmu_g = div v dmu_g
        double lhs_mu = (mp.det_jac.at(0, n) - mm.det_jac.at(0, n)) / (2 * dt);
        res[3] = std::max(res[3], std::abs(lhs_mu - divv * map.det_jac.at(0, n)));
    }
    // Dt N_a = -1/2 N_a (Dt g^{cd}) N_c N_d on the boundary
    for (int b = 0; b < g.nbdy(); ++b) {
        int tn = g.top_node(b);
        std::array<double, 3> x{0, 0, 0};
        for (int k = 0; k < d; ++k) x[k] = pos.at(k, tn);
        double dv[3][3];
        grad_v(x, dv);
        double dtg_upNN = 0;
        for (int c = 0; c < d; ++c)
            for (int e = 0; e < d; ++e) {
                double rhs_inv = 0;
                for (int cc = 0; cc < d; ++cc)
                    for (int ee = 0; ee < d; ++ee) {
                        double dtg = 0;
                        for (int i = 0; i < d; ++i)
                            for (int j = 0; j < d; ++j)
                                dtg += map.jacobian.at(i * d + cc, tn) * map.jacobian.at(j * d + ee, tn) *
                                       (dv[i][j] + dv[j][i]);
                        rhs_inv -= G0.g_inv.at(c * d + cc, tn) * G0.g_inv.at(e * d + ee, tn) * dtg;
                    }
                dtg_upNN += rhs_inv * bg0.N_dn.at(c, b) * bg0.N_dn.at(e, b);
            }
        for (int a = 0; a < d; ++a) {
            double lhs = (bgp.N_dn.at(a, b) - bgm.N_dn.at(a, b)) / (2 * dt);
            double rhs = -0.5 * bg0.N_dn.at(a, b) * dtg_upNN;
            res[2] = std::max(res[2], std::abs(lhs - rhs));
        }
    }
    // integrated Dt dmu_gamma = (sigma v.N) dmu_gamma over the closed top loop
    auto total_area = [&](const BoundaryGeometry& bgx) {
        std::vector<double> ones(g.nbdy(), 1.0);
        return integrate_boundary(g, ones.data(), &bgx.sqrt_gamma.at(0, 0));
    };
    double lhs5 = (total_area(bgp) - total_area(bgm)) / (2 * dt);
    double rhs5 = 0;
    {
        std::vector<double> integrand(g.nbdy());
        for (int b = 0; b < g.nbdy(); ++b) {
            std::array<double, 3> x{0, 0, 0};
            for (int k = 0; k < d; ++k) x[k] = bg0.positions.at(k, b);
            auto vv = v(x);
            double vN = 0;
            for (int i = 0; i < d; ++i) vN += vv[i] * bg0.n_euler.at(i, b);
            integrand[b] = bg0.sigma.at(0, b) * vN;
        }
        rhs5 = integrate_boundary(g, integrand.data(), &bg0.sqrt_gamma.at(0, 0));
    }
    res[4] = std::abs(lhs5 - rhs5);
    return res;
}

} // namespace

KinematicsReport kinematics_check(const LagrangianMap& map,
                                  const std::function<std::array<double, 3>(std::array<double, 3>)>& v,
                                  double dt) {
    KinematicsReport rep;
    rep.residual_dt = kinematic_residuals(map, v, dt);
    rep.residual_half = kinematic_residuals(map, v, dt / 2);
    for (int k = 0; k < 5; ++k)
        rep.ratio[k] = (rep.residual_half[k] > 0) ? rep.residual_dt[k] / rep.residual_half[k] : 0.0;
    return rep;
}

} // namespace ww
