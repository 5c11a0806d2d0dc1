#include "wwlab/quadrature.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace ww {

const std::vector<double>& vertical_weights(const StripGrid& g) {
    static std::mutex m;
    static std::map<std::pair<int, long long>, std::vector<double>> cache;
    std::lock_guard<std::mutex> lk(m);
    auto key = std::make_pair(g.nv, static_cast<long long>(g.dz() * 1e15));
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::vector<double> w(g.nv, 1.0);
    if (g.nv >= 8) {
        // Gregory correction of order 3: exact for cubics.
        const double c[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
        for (int q = 0; q < 3; ++q) {
            w[q] = c[q];
            w[g.nv - 1 - q] = c[q];
        }
    } else {
        w[0] = 0.5;
        w[g.nv - 1] = 0.5;
    }
    for (double& x : w) x *= g.dz();
    return cache.emplace(key, std::move(w)).first->second;
}

double integrate(const Field& f, Region region, const Field* measure) {
    if (f.rank != 0) throw std::invalid_argument("integrate: rank-0 field expected");
    const StripGrid& g = *f.grid;
    if (region == Region::TopBoundary) {
        std::vector<double> vals(g.nbdy()), meas;
        for (int b = 0; b < g.nbdy(); ++b) vals[b] = f.at(0, g.top_node(b));
        if (measure) {
            meas.resize(g.nbdy());
            for (int b = 0; b < g.nbdy(); ++b) meas[b] = measure->at(0, g.top_node(b));
        }
        return integrate_boundary(g, vals.data(), measure ? meas.data() : nullptr);
    }
    const std::vector<double>& wz = vertical_weights(g);
    const double wh = g.dx1() * (g.dim == 3 ? g.dx2() : 1.0);
    double acc = 0;
    for (int n = 0; n < g.nnodes(); ++n) {
        double v = f.at(0, n);
        if (measure) v *= measure->at(0, n);
        if (!std::isfinite(v))
            throw std::runtime_error("integrate: non-finite integrand at node " +
                                     std::to_string(n));
        acc += v * wz[g.j_of(n)];
    }
    return acc * wh;
}

double integrate_boundary(const StripGrid& g, const double* vals,
                          const double* measure) {
    const double wh = g.dx1() * (g.dim == 3 ? g.dx2() : 1.0);
    double acc = 0;
    for (int b = 0; b < g.nbdy(); ++b) {
        double v = vals[b];
        if (measure) v *= measure[b];
        if (!std::isfinite(v))
            throw std::runtime_error("integrate_boundary: non-finite value at node " +
                                     std::to_string(b));
        acc += v;
    }
    return acc * wh;
}

} // namespace ww
