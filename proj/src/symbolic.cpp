#include "wwlab/symbolic.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ww::sym {

namespace {
long long gcd_ll(long long a, long long b) {
    while (b) {
        long long t = a % b;
        a = b;
        b = t;
    }
    return a < 0 ? -a : a;
}

std::recursive_mutex cache_mutex;

const int INTERFACE_BASE = -1000; // interface slot i of a template: label -1000-i

char base_char(Base b) {
    switch (b) {
        case Base::V: return 'v';
        case Base::H: return 'h';
        case Base::F: return 'f';
        case Base::EN: return 'e';
    }
    return '?';
}
} // namespace

Rational::Rational(long long n, long long d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    long long g = gcd_ll(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

Rational Rational::operator*(const Rational& o) const {
    return Rational(num * o.num, den * o.den);
}
Rational Rational::operator+(const Rational& o) const {
    return Rational(num * o.den + o.num * den, den * o.den);
}
std::string Rational::str() const {
    std::ostringstream os;
    os << num;
    if (den != 1) os << "/" << den;
    return os.str();
}

int Term::free_count() const {
    int c = 0;
    for (const auto& w : wires)
        for (int l : w)
            if (l <= FREE_LABEL && l > INTERFACE_BASE) ++c;
    return c;
}

namespace {

bool is_deriv_slot(const Atom& a, int s) { return s < a.sp; }

// Relabel a term under a fixed atom order: contraction labels by first
// occurrence, free labels renumbered -1,-2,... in scan order (free derivative
// slots of a term are symmetrized on evaluation, so their identity is
// immaterial; the only multi-free expressions we form are all-derivative).
// Interface labels (templates) are preserved verbatim.
std::pair<Term, std::string> relabel(const Term& t, const std::vector<int>& order) {
    Term out;
    out.coeff = t.coeff;
    out.eos = t.eos;
    const int nf = static_cast<int>(t.atoms.size());
    for (int f : order) {
        out.atoms.push_back(t.atoms[f]);
        out.wires.push_back(t.wires[f]);
    }
    // occurrences of each pair label
    std::map<int, std::vector<std::pair<int, int>>> occ;
    for (int f = 0; f < nf; ++f)
        for (int s = 0; s < static_cast<int>(out.wires[f].size()); ++s)
            if (out.wires[f][s] >= 0) occ[out.wires[f][s]].push_back({f, s});

    // deterministic ordering of the symmetric derivative slots of each atom
    std::map<int, int> first_pos; // pair label -> scan position of first end
    int pos = 0;
    for (int f = 0; f < nf; ++f) {
        const Atom& a = out.atoms[f];
        std::vector<int>& w = out.wires[f];
        // keys precomputed per label value (positions from the pre-sort wiring)
        std::map<int, std::array<long long, 3>> keys;
        for (int s = 0; s < a.sp; ++s) {
            int l = w[s];
            if (keys.count(l)) continue;
            if (l >= 0 && first_pos.count(l))
                keys[l] = {0, first_pos[l], 0};
            else if (l <= FREE_LABEL && l > INTERFACE_BASE)
                keys[l] = {1, 0, 0};
            else if (l <= INTERFACE_BASE)
                keys[l] = {2, INTERFACE_BASE - l, 0};
            else {
                auto& oc = occ[l];
                auto other = (oc[0].first == f && oc.size() > 1) ? oc[1] : oc[0];
                keys[l] = {3, other.first, other.second};
            }
        }
        std::stable_sort(w.begin(), w.begin() + a.sp,
                         [&](int l1, int l2) { return keys[l1] < keys[l2]; });
        for (int s = 0; s < static_cast<int>(w.size()); ++s) {
            if (w[s] >= 0 && !first_pos.count(w[s])) first_pos[w[s]] = pos;
            ++pos;
        }
    }

    std::map<int, int> pair_new, free_new;
    int next_pair = 0, next_free = 0;
    std::ostringstream key;
    key << "[";
    for (auto& [m, p] : t.eos.ed) key << "e" << m << "^" << p << ";";
    key << "i" << t.eos.inv << "]";
    for (int f = 0; f < nf; ++f) {
        const Atom& a = out.atoms[f];
        key << "|" << base_char(a.base) << a.sp << "." << a.mt << "(";
        for (int s = 0; s < static_cast<int>(out.wires[f].size()); ++s) {
            int l = out.wires[f][s];
            if (l >= 0) {
                if (!pair_new.count(l)) pair_new[l] = next_pair++;
                out.wires[f][s] = pair_new[l];
                key << "c" << pair_new[l];
            } else if (l <= INTERFACE_BASE) {
                key << "I" << (INTERFACE_BASE - l);
            } else {
                if (!free_new.count(l)) free_new[l] = next_free++;
                out.wires[f][s] = FREE_LABEL - free_new[l];
                key << (is_deriv_slot(a, s) ? "F" : "w") << free_new[l];
            }
            key << ",";
        }
        key << ")";
    }
    return {std::move(out), key.str()};
}

std::pair<Term, std::string> canonical_term(const Term& t) {
    const int nf = static_cast<int>(t.atoms.size());
    std::vector<int> idx(nf);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        const Atom &A = t.atoms[a], &B = t.atoms[b];
        return std::tie(A.base, A.sp, A.mt) < std::tie(B.base, B.sp, B.mt);
    });
    std::vector<std::pair<int, int>> groups;
    for (int i = 0; i < nf;) {
        int j = i + 1;
        while (j < nf && t.atoms[idx[j]] == t.atoms[idx[i]]) ++j;
        groups.emplace_back(i, j);
        i = j;
    }
    long long cand = 1;
    for (auto [a, b] : groups)
        for (int k = 2; k <= b - a; ++k) cand *= k;
    std::vector<int> order = idx;
    if (cand > 5040) return relabel(t, order);

    std::pair<Term, std::string> best;
    bool first = true;
    std::function<void(size_t)> rec = [&](size_t gi) {
        if (gi == groups.size()) {
            auto c = relabel(t, order);
            if (first || c.second < best.second) {
                best = std::move(c);
                first = false;
            }
            return;
        }
        auto [a, b] = groups[gi];
        std::sort(order.begin() + a, order.begin() + b);
        do {
            rec(gi + 1);
        } while (std::next_permutation(order.begin() + a, order.begin() + b));
    };
    rec(0);
    return best;
}

int max_label(const Term& t) {
    int m = -1;
    for (const auto& w : t.wires)
        for (int l : w) m = std::max(m, l);
    return m;
}

int min_free(const Term& t) {
    int m = 0;
    for (const auto& w : t.wires)
        for (int l : w)
            if (l <= FREE_LABEL && l > INTERFACE_BASE) m = std::min(m, l);
    return m;
}

} // namespace

std::string Term::encode() const { return canonical_term(*this).second; }

TermList canonicalize(TermList terms) {
    std::map<std::string, Term> acc;
    for (Term& t : terms) {
        if (t.coeff.zero()) continue;
        auto [ct, key] = canonical_term(t);
        auto it = acc.find(key);
        if (it == acc.end())
            acc.emplace(std::move(key), std::move(ct));
        else
            it->second.coeff = it->second.coeff + ct.coeff;
    }
    TermList out;
    out.reserve(acc.size());
    for (auto& [k, t] : acc)
        if (!t.coeff.zero()) out.push_back(std::move(t));
    return out;
}

TermList multiply(const TermList& a, const TermList& b) {
    TermList out;
    for (const Term& ta : a)
        for (const Term& tb : b) {
            Term t;
            t.coeff = ta.coeff * tb.coeff;
            t.eos = ta.eos;
            for (auto& [m, p] : tb.eos.ed) t.eos.ed[m] += p;
            t.eos.inv += tb.eos.inv;
            t.atoms = ta.atoms;
            t.wires = ta.wires;
            int off = max_label(ta) + 1;
            int foff = min_free(ta);
            for (size_t f = 0; f < tb.atoms.size(); ++f) {
                t.atoms.push_back(tb.atoms[f]);
                std::vector<int> w = tb.wires[f];
                for (int& l : w) {
                    if (l >= 0)
                        l += off;
                    else if (l <= FREE_LABEL && l > INTERFACE_BASE)
                        l += foff;
                }
                t.wires.push_back(std::move(w));
            }
            out.push_back(std::move(t));
        }
    return canonicalize(std::move(out));
}

TermList add(TermList a, const TermList& b) {
    a.insert(a.end(), b.begin(), b.end());
    return canonicalize(std::move(a));
}

TermList scale(TermList a, const Rational& c) {
    for (Term& t : a) t.coeff = t.coeff * c;
    return a;
}

TermList atom_expr(Atom a) {
    Term t;
    t.coeff = Rational(1);
    t.atoms = {a};
    std::vector<int> w(a.nslots());
    for (int s = 0; s < a.nslots(); ++s) w[s] = FREE_LABEL - s;
    t.wires = {w};
    return {t};
}

namespace {

// raw spatial derivative of one term; the new slot of every resulting term
// carries `new_label` (FREE_LABEL for public use, an interface label inside
// template construction)
TermList d_term(const Term& t, int new_label) {
    TermList out;
    Term base = t;
    if (new_label == FREE_LABEL)
        for (auto& w : base.wires)
            for (int& l : w)
                if (l <= FREE_LABEL && l > INTERFACE_BASE) --l;
    for (size_t f = 0; f < base.atoms.size(); ++f) {
        if (base.atoms[f].base == Base::EN) continue;
        Term t2 = base;
        t2.atoms[f].sp += 1;
        t2.wires[f].insert(t2.wires[f].begin(), new_label);
        out.push_back(std::move(t2));
    }
    if (!t.eos.trivial()) {
        for (auto& [m, p] : t.eos.ed) {
            Term t2 = base;
            t2.coeff = t2.coeff * Rational(p);
            if (--t2.eos.ed[m] == 0) t2.eos.ed.erase(m);
            t2.eos.ed[m + 1] += 1;
            t2.atoms.push_back({Base::H, 1, 0});
            t2.wires.push_back({new_label});
            out.push_back(std::move(t2));
        }
        if (t.eos.inv > 0) {
            Term t2 = base;
            t2.coeff = t2.coeff * Rational(-t.eos.inv);
            t2.eos.inv += 1;
            t2.eos.ed[2] += 1;
            t2.atoms.push_back({Base::H, 1, 0});
            t2.wires.push_back({new_label});
            out.push_back(std::move(t2));
        }
    }
    return out;
}

} // namespace

TermList spatial_derivative(const TermList& in) {
    TermList out;
    for (const Term& t : in) {
        TermList part = d_term(t, FREE_LABEL);
        out.insert(out.end(), part.begin(), part.end());
    }
    return canonicalize(std::move(out));
}

TermList contract_free(const TermList& in, int s1, int s2) {
    TermList out;
    for (const Term& t : in) {
        Term t2 = t;
        int l1 = FREE_LABEL - s1, l2 = FREE_LABEL - s2;
        int pair = max_label(t) + 1;
        for (auto& w : t2.wires)
            for (int& l : w)
                if (l == l1 || l == l2) l = pair;
        std::vector<int> frees;
        for (auto& w : t2.wires)
            for (int l : w)
                if (l <= FREE_LABEL && l > INTERFACE_BASE) frees.push_back(l);
        std::sort(frees.begin(), frees.end(), std::greater<int>());
        frees.erase(std::unique(frees.begin(), frees.end()), frees.end());
        for (auto& w : t2.wires)
            for (int& l : w)
                if (l <= FREE_LABEL && l > INTERFACE_BASE) {
                    int k = static_cast<int>(std::find(frees.begin(), frees.end(), l) -
                                             frees.begin());
                    l = FREE_LABEL - k;
                }
        out.push_back(std::move(t2));
    }
    return canonicalize(std::move(out));
}

TermList laplacian(const TermList& in) {
    return contract_free(spatial_derivative(spatial_derivative(in)), 0, 1);
}

namespace {

const TermList& dt_atom_template(const Atom& a, Mode mode);

// substitute Dt of host.atoms[fi] by a template
TermList splice(const Term& host, int fi, const TermList& tpl) {
    TermList out;
    const std::vector<int>& iface = host.wires[fi];
    for (const Term& tt : tpl) {
        Term t;
        t.coeff = host.coeff * tt.coeff;
        t.eos = host.eos;
        for (auto& [m, p] : tt.eos.ed) t.eos.ed[m] += p;
        t.eos.inv += tt.eos.inv;
        int off = max_label(host) + 1;
        for (size_t f = 0; f < host.atoms.size(); ++f) {
            if (static_cast<int>(f) == fi) continue;
            t.atoms.push_back(host.atoms[f]);
            t.wires.push_back(host.wires[f]);
        }
        for (size_t f = 0; f < tt.atoms.size(); ++f) {
            t.atoms.push_back(tt.atoms[f]);
            std::vector<int> w = tt.wires[f];
            for (int& l : w) {
                if (l >= 0)
                    l += off;
                else if (l <= INTERFACE_BASE)
                    l = iface[INTERFACE_BASE - l];
            }
            t.wires.push_back(std::move(w));
        }
        out.push_back(std::move(t));
    }
    return out;
}

const TermList& dt_atom_template(const Atom& a, Mode mode) {
    static std::map<std::tuple<int, int, int, int>, TermList> cache;
    std::lock_guard<std::recursive_mutex> lk(cache_mutex);
    auto key = std::make_tuple(static_cast<int>(a.base), a.sp, a.mt,
                               static_cast<int>(mode));
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    TermList result;
    if (a.sp == 0) {
        switch (a.base) {
            case Base::EN:
                break;
            case Base::F: {
                Term t;
                t.coeff = Rational(1);
                t.atoms = {{Base::F, 0, a.mt + 1}};
                t.wires = {{}};
                result = {t};
                break;
            }
            case Base::H: {
                if (mode == Mode::Closure) {
                    if (a.mt != 0)
                        throw std::logic_error("unreduced Dt^k h in closure mode");
                    Term t; // Dt h = -(1/e') d_c v^c
                    t.coeff = Rational(-1);
                    t.eos.inv = 1;
                    t.atoms = {{Base::V, 1, 0}};
                    t.wires = {{0, 0}};
                    result = {t};
                } else {
                    Term t;
                    t.coeff = Rational(1);
                    t.atoms = {{Base::H, 0, a.mt + 1}};
                    t.wires = {{}};
                    result = {t};
                }
                break;
            }
            case Base::V: {
                if (mode == Mode::Display) {
                    Term t;
                    t.coeff = Rational(1);
                    t.atoms = {{Base::V, 0, a.mt + 1}};
                    t.wires = {{INTERFACE_BASE}};
                    result = {t};
                } else {
                    if (a.mt != 0)
                        throw std::logic_error("unreduced Dt^k v outside display mode");
                    Term t1; // Dt v = -dh - e_n
                    t1.coeff = Rational(-1);
                    t1.atoms = {{Base::H, 1, 0}};
                    t1.wires = {{INTERFACE_BASE}};
                    Term t2;
                    t2.coeff = Rational(-1);
                    t2.atoms = {{Base::EN, 0, 0}};
                    t2.wires = {{INTERFACE_BASE}};
                    result = {t1, t2};
                }
                break;
            }
        }
    } else {
        // Dt d_i X = d_i(Dt X) - (d_i v^c)(d_c X)
        Atom inner{a.base, a.sp - 1, a.mt};
        TermList innerT = dt_atom_template(inner, mode);
        TermList shifted;
        for (Term t : innerT) {
            for (auto& w : t.wires)
                for (int& l : w)
                    if (l <= INTERFACE_BASE) l -= 1;
            shifted.push_back(std::move(t));
        }
        for (const Term& t : shifted) {
            TermList part = d_term(t, INTERFACE_BASE);
            result.insert(result.end(), part.begin(), part.end());
        }
        Term c;
        c.coeff = Rational(-1);
        c.atoms = {{Base::V, 1, 0}, a};
        std::vector<int> wa(a.nslots());
        wa[0] = 0;
        for (int s = 1; s < a.nslots(); ++s) wa[s] = INTERFACE_BASE - s;
        c.wires = {{INTERFACE_BASE, 0}, wa};
        result.push_back(std::move(c));
    }
    return cache.emplace(key, std::move(result)).first->second;
}

TermList dt_term(const Term& t, Mode mode) {
    TermList out;
    for (size_t fi = 0; fi < t.atoms.size(); ++fi) {
        TermList part = splice(t, static_cast<int>(fi),
                               dt_atom_template(t.atoms[fi], mode));
        out.insert(out.end(), part.begin(), part.end());
    }
    if (!t.eos.trivial()) {
        const TermList& dth = dt_atom_template({Base::H, 0, 0}, mode); // scalar
        auto emit = [&](Term t2) {
            for (const Term& s : dth) {
                Term m = t2;
                m.coeff = m.coeff * s.coeff;
                for (auto& [mm, pp] : s.eos.ed) m.eos.ed[mm] += pp;
                m.eos.inv += s.eos.inv;
                int off = max_label(t2) + 1;
                for (size_t f = 0; f < s.atoms.size(); ++f) {
                    m.atoms.push_back(s.atoms[f]);
                    std::vector<int> w = s.wires[f];
                    for (int& l : w)
                        if (l >= 0) l += off;
                    m.wires.push_back(std::move(w));
                }
                out.push_back(std::move(m));
            }
        };
        for (auto& [m, p] : t.eos.ed) {
            Term t2 = t;
            t2.coeff = t2.coeff * Rational(p);
            if (--t2.eos.ed[m] == 0) t2.eos.ed.erase(m);
            t2.eos.ed[m + 1] += 1;
            emit(std::move(t2));
        }
        if (t.eos.inv > 0) {
            Term t2 = t;
            t2.coeff = t2.coeff * Rational(-t.eos.inv);
            t2.eos.inv += 1;
            t2.eos.ed[2] += 1;
            emit(std::move(t2));
        }
    }
    return out;
}

} // namespace

TermList material_derivative(const TermList& in, Mode mode) {
    TermList out;
    for (const Term& t : in) {
        TermList part = dt_term(t, mode);
        out.insert(out.end(), part.begin(), part.end());
    }
    return canonicalize(std::move(out));
}

TermList dt_pow(const TermList& in, int k, Mode mode) {
    TermList cur = in;
    for (int i = 0; i < k; ++i) cur = material_derivative(cur, mode);
    return cur;
}

const TermList& history_h(int k) {
    static std::map<int, TermList> cache;
    std::lock_guard<std::recursive_mutex> lk(cache_mutex);
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    TermList r = (k == 0) ? atom_expr({Base::H, 0, 0})
                          : material_derivative(history_h(k - 1), Mode::Closure);
    return cache.emplace(k, std::move(r)).first->second;
}

const TermList& history_v(int k, Mode mode) {
    static std::map<std::pair<int, int>, TermList> cache;
    std::lock_guard<std::recursive_mutex> lk(cache_mutex);
    auto key = std::make_pair(k, static_cast<int>(mode));
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    TermList r = (k == 0) ? atom_expr({Base::V, 0, 0})
                          : material_derivative(history_v(k - 1, mode), mode);
    return cache.emplace(key, std::move(r)).first->second;
}

const TermList& source_f(int r, Mode mode) {
    static std::map<std::pair<int, int>, TermList> cache;
    std::lock_guard<std::recursive_mutex> lk(cache_mutex);
    auto key = std::make_pair(r, static_cast<int>(mode));
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    Term tr; // (d_i v^j)(d_j v^i)
    tr.coeff = Rational(1);
    tr.atoms = {{Base::V, 1, 0}, {Base::V, 1, 0}};
    tr.wires = {{0, 1}, {1, 0}};
    TermList a = dt_pow({tr}, r - 1, mode);
    TermList h0 = atom_expr({Base::H, 0, 0});
    TermList hk = (mode == Mode::Closure) ? history_h(r - 1)
                                          : atom_expr({Base::H, 0, r - 1});
    TermList b = dt_pow(laplacian(h0), r - 1, mode);
    TermList c = scale(laplacian(hk), Rational(-1));
    TermList res = add(add(std::move(a), b), c);
    return cache.emplace(key, std::move(res)).first->second;
}

const TermList& source_g(int r) {
    static std::map<int, TermList> cache;
    std::lock_guard<std::recursive_mutex> lk(cache_mutex);
    auto it = cache.find(r);
    if (it != cache.end()) return it->second;

    auto fact = [](int n) {
        long long f = 1;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    };
    // -(Dt^{r+1} e(h) - e' Dt^{r+1} h): set partitions of r+1 with >= 2 blocks
    TermList terms;
    std::vector<int> parts;
    std::function<void(int, int)> rec = [&](int rem, int minp) {
        if (rem == 0) {
            if (parts.size() < 2) return;
            long long denom = 1;
            std::map<int, int> mult;
            for (int p : parts) {
                denom *= fact(p);
                mult[p]++;
            }
            for (auto& [p, m] : mult) denom *= fact(m);
            Term t;
            t.coeff = Rational(-fact(r + 1), denom);
            t.eos.ed[static_cast<int>(parts.size())] = 1;
            for (int p : parts) {
                t.atoms.push_back({Base::H, 0, p});
                t.wires.push_back({});
            }
            terms.push_back(std::move(t));
            return;
        }
        for (int p = minp; p <= rem; ++p) {
            if (rem - p != 0 && rem - p < p) continue;
            parts.push_back(p);
            rec(rem - p, p);
            parts.pop_back();
        }
    };
    rec(r + 1, 1);
    return cache.emplace(r, canonicalize(std::move(terms))).first->second;
}

const TermList& expand_terms(Identity id, int order) {
    if (order < 1 || order > 6)
        throw std::invalid_argument("expand: order must be in [1,6]");
    static std::map<std::pair<int, int>, TermList> cache;
    std::lock_guard<std::recursive_mutex> lk(cache_mutex);
    auto key = std::make_pair(static_cast<int>(id), order);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    TermList f = atom_expr({Base::F, 0, 0});
    TermList result;
    switch (id) {
        case Identity::DtPartialR: {
            TermList dr = f;
            for (int i = 0; i < order; ++i) dr = spatial_derivative(dr);
            TermList lhs = material_derivative(dr, Mode::Display);
            TermList rhs = material_derivative(f, Mode::Display);
            for (int i = 0; i < order; ++i) rhs = spatial_derivative(rhs);
            result = add(std::move(lhs), scale(std::move(rhs), Rational(-1)));
            break;
        }
        case Identity::PartialDtK: {
            TermList lhs = spatial_derivative(dt_pow(f, order, Mode::Display));
            TermList rhs = dt_pow(spatial_derivative(f), order, Mode::Display);
            result = add(std::move(lhs), scale(std::move(rhs), Rational(-1)));
            break;
        }
        case Identity::LaplacianDt: {
            TermList lhs = laplacian(dt_pow(f, order, Mode::Display));
            TermList rhs = dt_pow(laplacian(f), order, Mode::Display);
            result = add(std::move(lhs), scale(std::move(rhs), Rational(-1)));
            break;
        }
    }
    return cache.emplace(key, std::move(result)).first->second;
}

std::vector<ExpansionTerm> expand(Identity id, int order) {
    const TermList& terms = expand_terms(id, order);
    std::vector<ExpansionTerm> out;
    for (const Term& t : terms) {
        ExpansionTerm e;
        e.coeff = t.coeff;
        bool scalar = true;
        for (size_t f = 0; f < t.atoms.size(); ++f) {
            const Atom& a = t.atoms[f];
            for (int l : t.wires[f])
                if (l <= FREE_LABEL && l > INTERFACE_BASE) scalar = false;
            if (a.base == Base::F)
                e.trailing = {a.sp, a.mt};
            else if (a.base == Base::V || a.base == Base::H)
                e.factors.push_back({a.base == Base::V ? 0 : 1, a.sp, a.mt});
        }
        e.pattern = scalar ? "trace-dot" : "symmetric-dot";
        std::sort(e.factors.begin(), e.factors.end());
        out.push_back(std::move(e));
    }
    return out;
}

std::string print_terms(const TermList& terms) {
    std::vector<std::string> lines;
    for (const Term& t : terms) {
        std::ostringstream os;
        os << t.coeff.str() << " * ";
        if (!t.eos.trivial()) {
            for (auto& [m, p] : t.eos.ed) {
                os << "e^(" << m << ")";
                if (p > 1) os << "^" << p;
                os << " ";
            }
            if (t.eos.inv > 0) os << "(1/e')^" << t.eos.inv << " ";
        }
        for (size_t f = 0; f < t.atoms.size(); ++f) {
            const Atom& a = t.atoms[f];
            os << base_char(a.base) << "[s" << a.sp << ",t" << a.mt << "](";
            for (size_t s = 0; s < t.wires[f].size(); ++s) {
                int l = t.wires[f][s];
                if (l >= 0)
                    os << "c" << l;
                else
                    os << "i" << (FREE_LABEL - l);
                if (s + 1 < t.wires[f].size()) os << ",";
            }
            os << ") ";
        }
        lines.push_back(os.str());
    }
    std::sort(lines.begin(), lines.end());
    std::ostringstream os;
    for (auto& l : lines) os << l << "\n";
    return os.str();
}

std::string print_expansion(const std::vector<ExpansionTerm>& terms) {
    std::ostringstream os;
    for (const auto& e : terms) {
        os << e.coeff.str() << " *";
        for (auto& f : e.factors)
            os << " (d^" << f[1] << " Dt^" << f[2] << " " << (f[0] == 0 ? "v" : "h") << ")";
        os << " . (d^" << e.trailing[0] << " Dt^" << e.trailing[1] << " f) [" << e.pattern
           << "]\n";
    }
    return os.str();
}

} // namespace ww::sym
