#pragma once

#include <map>

#include "wwlab/eos.hpp"
#include "wwlab/map.hpp"
#include "wwlab/symbolic.hpp"

namespace ww {

// Numeric evaluation context for symbolic term lists: supplies the atom
// fields d^s Dt^k (v|h|f) on a given state. Closure contexts reconstruct all
// material-derivative histories from (v, h) through the evolution equations;
// data contexts take the time-derivative fields h_k = Dt^k h|_{t=0} as given
// (the initial-data systems), with v-histories reconstructed from v0.
class EvalContext {
public:
    // closure: histories from (v,h); optional target f (defaults to h) for
    // display-mode expressions
    EvalContext(const LagrangianMap& map, const Field& v, const Field& h, EosPtr eos);
    // data: h_k supplied for k = 0..h_k.size()-1
    EvalContext(const LagrangianMap& map, const Field& v0, std::vector<Field> h_k,
                EosPtr eos);

    const Field& atom_field(sym::Base b, int sp, int mt);
    const LagrangianMap& map() const { return *map_; }
    const StripGrid& grid() const { return *grid_; }
    const Eos& eos() const { return *eos_; }
    const Field& h0() const { return h_; }
    const Field& v0() const { return v_; }
    bool data_mode() const { return data_mode_; }
    sym::Mode mode() const { return data_mode_ ? sym::Mode::Data : sym::Mode::Closure; }

    // pointwise value of an EOS prefactor at a node
    double eos_value(const sym::EosFactor& f, int node) const;

private:
    const LagrangianMap* map_;
    const StripGrid* grid_;
    Field v_, h_;
    std::vector<Field> data_h_;
    EosPtr eos_;
    bool data_mode_ = false;
    std::map<std::tuple<int, int, int>, Field> cache_;
};

// Evaluate a term list on the context; the result rank equals the common
// free-slot count of the terms (free derivative slots are symmetrized).
Field evaluate(const sym::TermList& terms, EvalContext& ctx);

// Convenience: Dt^k h and Dt^k v on a closure state.
Field material_history_h(EvalContext& ctx, int k);
Field material_history_v(EvalContext& ctx, int k);

// Wave-equation sources: f_r and g_r fields with their norms.
struct SourceAssembly {
    int r = 0;
    Field f;
    Field g;
    double f_l2 = 0, g_l2 = 0;
    double f_l2w = 0, g_l2w = 0;
};
SourceAssembly assemble_sources(int r, EvalContext& ctx, const WeightSpec* w = nullptr);

} // namespace ww
