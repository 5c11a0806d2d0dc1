#pragma once

#include <memory>

#include "wwlab/map.hpp"

namespace ww {

enum class BottomBc { Dirichlet, Neumann };

// Dirichlet-top boundary value problem for the Eulerian Laplacian through the
// map. The bottom condition is Dirichlet (value) or Neumann (vertical
// derivative d_z u at the bottom; the outward normal derivative is -d_z u).
struct EllipticProblem {
    const LagrangianMap* map = nullptr;
    Field rhs;                 // rank 0
    std::vector<double> top;   // nbdy values
    std::vector<double> bottom;
    BottomBc bottom_bc = BottomBc::Dirichlet;
};

// The canonical discrete Laplacian: composition of Eulerian first-derivative
// operators (so that solve, divergence and gradient are mutually consistent).
Field apply_laplacian(const Field& f, const LagrangianMap& map);

// Vertical discretization of the solver: Composed squares the first-derivative
// matrix (consistent with divergence/gradient compositions, used everywhere in
// the solve pipeline); Stencil uses the direct 4th-order second-derivative
// rows (better behaved for rough right-hand sides such as point sources).
enum class VerticalOp { Composed, Stencil };

// Flat-strip solver: horizontal Fourier diagonalization + dense vertical LU
// per wavenumber. Factorizations are cached per (grid, bottom_bc).
class FlatPoissonSolver {
public:
    FlatPoissonSolver(const StripGrid& g, BottomBc bc, VerticalOp op = VerticalOp::Composed);
    ~FlatPoissonSolver();
    // solve (D1^2 - k^2) u_k = f_k with the configured boundary rows
    Field solve(const Field& rhs, const std::vector<double>& top,
                const std::vector<double>& bottom) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct SolveStats {
    int iterations = 0;
    double residual = 0;
    std::vector<double> history;
};

// Curved-metric solve: flexible PCG on the composed operator with the flat
// solver as preconditioner; direct solve when the map is the identity.
Field solve_dirichlet(const EllipticProblem& p, double rel_tol = 1e-10,
                      int max_iter = 400, SolveStats* stats = nullptr);

} // namespace ww
