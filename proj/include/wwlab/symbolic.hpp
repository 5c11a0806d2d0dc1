#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ww::sym {

struct Rational {
    long long num = 0, den = 1;
    Rational() = default;
    Rational(long long n) : num(n) {}
    Rational(long long n, long long d);
    Rational operator*(const Rational& o) const;
    Rational operator+(const Rational& o) const;
    Rational operator-() const { return {-num, den}; }
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool zero() const { return num == 0; }
    double value() const { return static_cast<double>(num) / den; }
    std::string str() const;
};

// Bases of tensor atoms d^sp Dt^mt (base):
//   V  velocity (one vector slot), H enthalpy, F generic target scalar,
//   EN the constant vertical unit vector (one vector slot)
enum class Base : uint8_t { V, H, F, EN };

struct Atom {
    Base base;
    int sp;
    int mt;
    int nslots() const { return sp + (base == Base::V || base == Base::EN ? 1 : 0); }
    bool operator==(const Atom& o) const {
        return base == o.base && sp == o.sp && mt == o.mt;
    }
};

// Scalar equation-of-state factor: prod_m (e^{(m)}(h))^{ed[m]} * (1/e'(h))^{inv}
struct EosFactor {
    std::map<int, int> ed;
    int inv = 0;
    bool trivial() const { return ed.empty() && inv == 0; }
    bool operator==(const EosFactor& o) const { return ed == o.ed && inv == o.inv; }
};

// One term: coeff * eos(h) * contraction of tensor atoms. Wires: one label
// per slot, FREE_LABEL for free slots, equal non-negative labels mark a
// contracted pair. Derivative slots of an atom are mutually symmetric; free
// derivative slots of a term are symmetrized on evaluation.
constexpr int FREE_LABEL = -1;

struct Term {
    Rational coeff;
    EosFactor eos;
    std::vector<Atom> atoms;
    std::vector<std::vector<int>> wires; // wires[f][s]
    int free_count() const;
    std::string encode() const; // canonical form assumed
};

using TermList = std::vector<Term>;

// Reduction modes: Display keeps all material atoms (the paper's commutator
// displays); Data rewrites Dt^k v via the momentum equation but keeps Dt^k h
// atomic (initial-data systems); Closure also rewrites Dt h via the
// continuity equation, eliminating every material derivative.
enum class Mode { Display, Data, Closure };

// Core calculus. All results are canonicalized and merged.
TermList canonicalize(TermList terms);
TermList multiply(const TermList& a, const TermList& b);
TermList add(TermList a, const TermList& b);
TermList scale(TermList a, const Rational& c);
TermList spatial_derivative(const TermList& in);             // new free slot per term
TermList material_derivative(const TermList& in, Mode mode); // Dt via [Dt,d] = -(dv).d
TermList contract_free(const TermList& in, int s1, int s2);  // trace two free slots

// Convenience constructors / expressions
TermList atom_expr(Atom a);
TermList laplacian(const TermList& in);       // trace of two spatial derivatives
TermList dt_pow(const TermList& in, int k, Mode mode);

// Closure histories as fully reduced expressions (memoized):
// Dt^k h with Dt h = -(1/e') div v, and Dt^k v with Dt v = -dh - e_n.
const TermList& history_h(int k);              // closure mode, scalar
const TermList& history_v(int k, Mode mode);   // one free (vector) slot
// f_r = Dt^{r-1}((dv).(dv)) + [Dt^{r-1}, Lap] h in the given mode (scalar)
const TermList& source_f(int r, Mode mode);
// g_r by the exact partition formula (scalar; atoms Dt^i h kept atomic)
const TermList& source_g(int r);

// The spec-facing flattened view of a term list.
struct ExpansionTerm {
    Rational coeff;
    // factors (field, spatial order a, material order b); field: 'v' or 'h'
    std::vector<std::array<int, 3>> factors; // {field(0=v,1=h), a, b}
    std::array<int, 2> trailing{0, 0};       // target-operator (spatial, material)
    std::string pattern;                     // "symmetric-dot" | "trace-dot"
};

enum class Identity { DtPartialR, PartialDtK, LaplacianDt };

// Commutator expansions (Display mode): [Dt, d^r], [d, Dt^k], [Lap, Dt^k],
// applied to a generic scalar f. Order capped at 6.
const TermList& expand_terms(Identity id, int order);
std::vector<ExpansionTerm> expand(Identity id, int order);

std::string print_terms(const TermList& terms);           // golden-file text
std::string print_expansion(const std::vector<ExpansionTerm>& terms);

} // namespace ww::sym
