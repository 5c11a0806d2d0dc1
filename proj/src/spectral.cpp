#include "wwlab/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace ww {

namespace dft {

namespace {
std::mutex plan_mutex;

struct Plans {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
};

Plans& plans_for(int n) {
    static std::map<int, Plans> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    Plans p;
    std::vector<double> re(n);
    std::vector<std::complex<double>> cx(n / 2 + 1);
    p.fwd = fftw_plan_dft_r2c_1d(n, re.data(),
                                 reinterpret_cast<fftw_complex*>(cx.data()),
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.inv = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(cx.data()),
                                 re.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    return cache.emplace(n, p).first->second;
}
} // namespace

void forward(int n, const double* in, std::complex<double>* out) {
    std::lock_guard<std::mutex> lk(plan_mutex);
    Plans& p = plans_for(n);
    fftw_execute_dft_r2c(p.fwd, const_cast<double*>(in),
                         reinterpret_cast<fftw_complex*>(out));
}

void inverse(int n, const std::complex<double>* in, double* out) {
    std::lock_guard<std::mutex> lk(plan_mutex);
    Plans& p = plans_for(n);
    fftw_execute_dft_c2r(p.inv,
                         reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                         out);
    for (int i = 0; i < n; ++i) out[i] /= n;
}

} // namespace dft

namespace {

// Apply op(k, spectrum) on every horizontal line along `dir`.
template <class Op>
void for_each_line(const StripGrid& g, const double* in, double* out, int dir, Op op) {
    const int n = (dir == 0) ? g.n1 : g.n2;
    const int nh = n / 2 + 1;
    std::vector<double> line(n);
    std::vector<std::complex<double>> sp(nh);
    if (dir == 0) {
        for (int j = 0; j < g.nv; ++j)
            for (int i2 = 0; i2 < g.n2; ++i2) {
                for (int i1 = 0; i1 < g.n1; ++i1) line[i1] = in[g.node(i1, i2, j)];
                dft::forward(n, line.data(), sp.data());
                op(sp);
                dft::inverse(n, sp.data(), line.data());
                for (int i1 = 0; i1 < g.n1; ++i1) out[g.node(i1, i2, j)] = line[i1];
            }
    } else {
        for (int j = 0; j < g.nv; ++j)
            for (int i1 = 0; i1 < g.n1; ++i1) {
                for (int i2 = 0; i2 < g.n2; ++i2) line[i2] = in[g.node(i1, i2, j)];
                dft::forward(n, line.data(), sp.data());
                op(sp);
                dft::inverse(n, sp.data(), line.data());
                for (int i2 = 0; i2 < g.n2; ++i2) out[g.node(i1, i2, j)] = line[i2];
            }
    }
}

} // namespace

void horizontal_derivative(const StripGrid& g, const double* in, double* out,
                           int dir, int order) {
    if (dir < 0 || dir > 1 || (dir == 1 && g.dim == 2))
        throw std::invalid_argument("horizontal_derivative: bad direction");
    const int n = (dir == 0) ? g.n1 : g.n2;
    for_each_line(g, in, out, dir, [&](std::vector<std::complex<double>>& sp) {
        const std::complex<double> I(0, 1);
        for (int k = 0; k < static_cast<int>(sp.size()); ++k) {
            std::complex<double> f(1, 0);
            for (int o = 0; o < order; ++o) f *= I * static_cast<double>(k);
            sp[k] *= f;
        }
        // Nyquist mode of odd derivatives has no consistent real counterpart.
        if (order % 2 == 1) sp[n / 2] = 0.0;
    });
}

void horizontal_filter(const StripGrid& g, double* vals, double fraction,
                       double strength) {
    if (strength <= 0.0 || fraction <= 0.0) return;
    auto damp = [&](int n, std::vector<std::complex<double>>& sp) {
        int kcut = static_cast<int>((1.0 - fraction) * (n / 2));
        for (int k = 0; k < static_cast<int>(sp.size()); ++k)
            if (k > kcut) sp[k] *= (1.0 - strength);
    };
    for_each_line(g, vals, vals, 0,
                  [&](std::vector<std::complex<double>>& sp) { damp(g.n1, sp); });
    if (g.dim == 3)
        for_each_line(g, vals, vals, 1,
                      [&](std::vector<std::complex<double>>& sp) { damp(g.n2, sp); });
}

std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int m) {
    // Fornberg (1988). c[k][j]: weight of node j for derivative k.
    const int n = static_cast<int>(nodes.size()) - 1;
    std::vector<std::vector<double>> c(m + 1, std::vector<double>(n + 1, 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        int mn = std::min(i, m);
        double c2 = 1.0;
        double c5 = c4;
        c4 = nodes[i] - x0;
        for (int j = 0; j < i; ++j) {
            double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c[m];
}

VerticalStencils::VerticalStencils(int nv_, double dz) : nv(nv_) {
    width = std::min(nv, 6);
    const int w1_width = std::min(nv, 5);
    start.resize(nv);
    w1.assign(static_cast<size_t>(nv) * width, 0.0);
    w2.assign(static_cast<size_t>(nv) * width, 0.0);
    for (int j = 0; j < nv; ++j) {
        auto window = [&](int w) {
            int s = j - w / 2;
            if (s < 0) s = 0;
            if (s + w > nv) s = nv - w;
            return s;
        };
        // 2nd derivative needs 6 points one-sided for order 4; keep one start
        // per row (the wider window) and embed the 5-point weights in it.
        int s2 = window(width);
        start[j] = s2;
        std::vector<double> nodes2(width);
        for (int q = 0; q < width; ++q) nodes2[q] = (s2 + q) * dz;
        auto ww2 = fd_weights(j * dz, nodes2, 2);
        for (int q = 0; q < width; ++q) w2[j * width + q] = ww2[q];

        int s1 = window(w1_width);
        std::vector<double> nodes1(w1_width);
        for (int q = 0; q < w1_width; ++q) nodes1[q] = (s1 + q) * dz;
        auto ww1 = fd_weights(j * dz, nodes1, 1);
        for (int q = 0; q < w1_width; ++q) w1[j * width + (s1 - s2 + q)] += ww1[q];
    }
}

const VerticalStencils& vertical_stencils(const StripGrid& g) {
    static std::mutex m;
    static std::map<std::pair<int, long long>, VerticalStencils> cache;
    std::lock_guard<std::mutex> lk(m);
    auto key = std::make_pair(g.nv, static_cast<long long>(g.dz() * 1e15));
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, VerticalStencils(g.nv, g.dz())).first;
    return it->second;
}

void vertical_derivative(const StripGrid& g, const double* in, double* out, int der) {
    const VerticalStencils& st = vertical_stencils(g);
    const std::vector<double>& w = (der == 1) ? st.w1 : st.w2;
    const int nh = g.n1 * g.n2;
    for (int j = 0; j < g.nv; ++j) {
        const double* wr = &w[static_cast<size_t>(j) * st.width];
        const int s = st.start[j];
        for (int b = 0; b < nh; ++b) {
            double acc = 0;
            for (int q = 0; q < st.width; ++q) acc += wr[q] * in[b + nh * (s + q)];
            out[b + nh * j] = acc;
        }
    }
}

Field grid_derivative(const Field& f, int a) {
    const StripGrid& g = *f.grid;
    Field out(g, f.rank);
    for (int c = 0; c < f.ncomp(); ++c) {
        if (a == g.dim - 1)
            vertical_derivative(g, f.comp(c), out.comp(c), 1);
        else
            horizontal_derivative(g, f.comp(c), out.comp(c), a, 1);
    }
    return out;
}

} // namespace ww
