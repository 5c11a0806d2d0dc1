#pragma once

#include <memory>
#include <optional>

#include "wwlab/boundary.hpp"
#include "wwlab/history.hpp"

namespace ww {

// Full Lagrangian flow state: map, Eulerian velocity components and the full
// enthalpy (hydrostatic part included) on the reference grid. Derived
// geometry and material-derivative caches are built lazily and dropped by
// invalidate() after a time step.
struct FlowState {
    double t = 0;
    LagrangianMap map;
    Field v;
    Field h;
    EosPtr eos; // null for incompressible reference states

    FlowState() = default;
    FlowState(LagrangianMap m, Field v_, Field h_, EosPtr e)
        : map(std::move(m)), v(std::move(v_)), h(std::move(h_)), eos(std::move(e)) {}
    // copies are value snapshots; caches are not carried over
    FlowState(const FlowState& o) : t(o.t), map(o.map), v(o.v), h(o.h), eos(o.eos) {}
    FlowState& operator=(const FlowState& o) {
        t = o.t;
        map = o.map;
        v = o.v;
        h = o.h;
        eos = o.eos;
        invalidate();
        return *this;
    }
    FlowState(FlowState&&) = default;
    FlowState& operator=(FlowState&&) = default;

    const StripGrid& grid() const { return *map.grid; }

    const Metric& metric() const;
    const BoundaryGeometry& bdy() const;
    const NormalExtension& qform() const; // d0 = l0/4
    EvalContext& ctx() const;             // closure-mode evaluation context

    Field rho() const; // rho(h), identically 1 without an EOS

    void invalidate();

private:
    mutable std::optional<Metric> metric_;
    mutable std::optional<BoundaryGeometry> bdy_;
    mutable std::optional<NormalExtension> qform_;
    mutable std::unique_ptr<EvalContext> ctx_;
};

// hydrostatic rest state h = -x_n on the identity map
FlowState hydrostatic_state(const StripGrid& g, EosPtr eos);

} // namespace ww
