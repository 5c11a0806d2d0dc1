#pragma once

#include <complex>
#include <vector>

#include "wwlab/grid.hpp"

namespace ww {

// Real <-> half-complex FFT of a single line, any even n (FFTW backed).
// Plans are cached per length behind a mutex; execution is thread-safe.
namespace dft {
void forward(int n, const double* in, std::complex<double>* out);  // out: n/2+1, unnormalized
void inverse(int n, const std::complex<double>* in, double* out);  // normalizes by 1/n
} // namespace dft

// Spectral derivative along a periodic horizontal direction (dir=0 or 1).
// order: number of d/dy applications. Works on scalar component arrays.
void horizontal_derivative(const StripGrid& g, const double* in, double* out,
                           int dir, int order);

// Damp the top `fraction` of wavenumbers in every horizontal direction by
// (1-strength). Used as the anti-aliasing filter in the evolution loop.
void horizontal_filter(const StripGrid& g, double* vals, double fraction,
                       double strength);

// Fornberg finite-difference weights: derivative m at x0 on given nodes.
std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int m);

// Vertical derivative (order 4 accuracy, centered interior, one-sided near
// boundaries) of a scalar component array. der = 1 or 2.
struct VerticalStencils {
    int nv = 0;
    int width = 0;
    std::vector<int> start;       // per-row stencil start node
    std::vector<double> w1, w2;   // per-row weights, der 1 and 2 (row-major)
    VerticalStencils() = default;
    VerticalStencils(int nv_, double dz);
};

const VerticalStencils& vertical_stencils(const StripGrid& g);
void vertical_derivative(const StripGrid& g, const double* in, double* out, int der);

// One derivative d/dy_a (Lagrangian coordinate a in [0,dim)) of each component.
Field grid_derivative(const Field& f, int a);

} // namespace ww
