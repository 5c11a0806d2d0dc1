#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ww {

// Reference strip: periodic [0,2pi) in each horizontal direction, [-depth,0]
// vertical. dim=2 uses one horizontal direction (n2==1), dim=3 uses two.
// Vertical node j=0 sits at the artificial bottom, j=nv-1 at the free surface.
struct StripGrid {
    int n1 = 0;       // horizontal nodes, first periodic direction
    int n2 = 1;       // horizontal nodes, second periodic direction (1 in 2-D)
    int nv = 0;       // vertical nodes, both endpoints included
    double depth = 1.0;
    int dim = 2;

    StripGrid() = default;
    StripGrid(int n1_, int nv_, double depth_)
        : n1(n1_), n2(1), nv(nv_), depth(depth_), dim(2) { validate(); }
    StripGrid(int n1_, int n2_, int nv_, double depth_)
        : n1(n1_), n2(n2_), nv(nv_), depth(depth_), dim(3) { validate(); }

    void validate() const {
        if (n1 < 8 || n1 % 2 != 0)
            throw std::invalid_argument("StripGrid: n1 must be even and >= 8");
        if (dim == 3 && (n2 < 8 || n2 % 2 != 0))
            throw std::invalid_argument("StripGrid: n2 must be even and >= 8");
        if (dim == 2 && n2 != 1)
            throw std::invalid_argument("StripGrid: n2 must be 1 in 2-D");
        if (nv < 4) throw std::invalid_argument("StripGrid: nv must be >= 4");
        if (!(depth > 0)) throw std::invalid_argument("StripGrid: depth must be > 0");
    }

    int    nnodes() const { return n1 * n2 * nv; }
    int    nbdy() const { return n1 * n2; }                     // top-boundary nodes
    double dx1() const { return 2.0 * M_PI / n1; }
    double dx2() const { return 2.0 * M_PI / n2; }
    double dz() const { return depth / (nv - 1); }
    double min_spacing() const {
        double m = std::min(dx1(), dz());
        if (dim == 3) m = std::min(m, dx2());
        return m;
    }

    int node(int i1, int i2, int j) const { return i1 + n1 * (i2 + n2 * j); }
    int i1_of(int n) const { return n % n1; }
    int i2_of(int n) const { return (n / n1) % n2; }
    int j_of(int n) const { return n / (n1 * n2); }
    int top_node(int b) const { return b + n1 * n2 * (nv - 1); }
    int bottom_node(int b) const { return b; }

    // Lagrangian coordinates of a node; vertical coordinate is slot dim-1.
    std::array<double, 3> y(int n) const {
        std::array<double, 3> c{0, 0, 0};
        c[0] = i1_of(n) * dx1();
        if (dim == 3) c[1] = i2_of(n) * dx2();
        c[dim - 1] = -depth + j_of(n) * dz();
        return c;
    }

    bool same(const StripGrid& o) const {
        return n1 == o.n1 && n2 == o.n2 && nv == o.nv && dim == o.dim &&
               depth == o.depth;
    }
};

// Dense tensor field: dim^rank components per node, components outer,
// nodes inner, component index row-major over tensor slots (slot 0 most
// significant).
struct Field {
    const StripGrid* grid = nullptr;
    int rank = 0;
    std::vector<double> data;

    Field() = default;
    Field(const StripGrid& g, int rank_, double fill = 0.0)
        : grid(&g), rank(rank_),
          data(static_cast<size_t>(ncomp_of(g.dim, rank_)) * g.nnodes(), fill) {}

    static int ncomp_of(int dim, int rank) {
        int c = 1;
        for (int k = 0; k < rank; ++k) c *= dim;
        return c;
    }
    int dim() const { return grid->dim; }
    int ncomp() const { return ncomp_of(dim(), rank); }
    int nnodes() const { return grid->nnodes(); }

    double&       at(int comp, int node) { return data[static_cast<size_t>(comp) * nnodes() + node]; }
    const double& at(int comp, int node) const { return data[static_cast<size_t>(comp) * nnodes() + node]; }
    double*       comp(int c) { return data.data() + static_cast<size_t>(c) * nnodes(); }
    const double* comp(int c) const { return data.data() + static_cast<size_t>(c) * nnodes(); }

    // comp index from slot indices (slot 0 most significant)
    int cidx(const int* idx) const {
        int c = 0;
        for (int k = 0; k < rank; ++k) c = c * dim() + idx[k];
        return c;
    }

    bool finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
    int first_nonfinite_node() const {
        for (size_t i = 0; i < data.size(); ++i)
            if (!std::isfinite(data[i])) return static_cast<int>(i % nnodes());
        return -1;
    }

    Field& operator+=(const Field& o) {
        for (size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
        return *this;
    }
    Field& operator-=(const Field& o) {
        for (size_t i = 0; i < data.size(); ++i) data[i] -= o.data[i];
        return *this;
    }
    Field& operator*=(double s) {
        for (double& v : data) v *= s;
        return *this;
    }
};

inline Field operator+(Field a, const Field& b) { a += b; return a; }
inline Field operator-(Field a, const Field& b) { a -= b; return a; }
inline Field operator*(double s, Field a) { a *= s; return a; }

// Values on the top boundary only (n1*n2 nodes per component).
struct BoundaryField {
    const StripGrid* grid = nullptr;
    int rank = 0;
    std::vector<double> data;

    BoundaryField() = default;
    BoundaryField(const StripGrid& g, int rank_, double fill = 0.0)
        : grid(&g), rank(rank_),
          data(static_cast<size_t>(Field::ncomp_of(g.dim, rank_)) * g.nbdy(), fill) {}

    int ncomp() const { return Field::ncomp_of(grid->dim, rank); }
    double&       at(int c, int b) { return data[static_cast<size_t>(c) * grid->nbdy() + b]; }
    const double& at(int c, int b) const { return data[static_cast<size_t>(c) * grid->nbdy() + b]; }
};

// Polynomial weight w(x) = (1+|x|^2)^mu evaluated at Eulerian positions.
struct WeightSpec {
    double mu = 2.0;
    double operator()(const double* x, int dim) const {
        double r2 = 0;
        for (int k = 0; k < dim; ++k) r2 += x[k] * x[k];
        return std::pow(1.0 + r2, mu);
    }
};

} // namespace ww
