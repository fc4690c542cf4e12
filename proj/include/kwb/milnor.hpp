// Milnor K-theory symbols over the function fields of this library: the
// tame-symbol residue map, the Weil reciprocity product, and an independent
// Steinberg-presentation oracle for K_2 of a finite field.
//
// Symbols are formal: no K-class normal form is attempted beyond residues.
// The residue convention is the classical one,
//   tame{u_1,...,u_n, pi} = {ubar_1,...,ubar_n},
// equivalently for length two
//   tame{f, g} = class of (-1)^{ord f ord g} f^{ord g} g^{-ord f}.
#pragma once

#include "abelian.hpp"
#include "function_field.hpp"

namespace kwb {

// A formal symbol {f_1,...,f_n} over the function field of C, with an
// integer coefficient.
struct MilnorSymbol {
    CurvePtr C;
    std::vector<FuncElement> entries;
    i64 coeff = 1;

    MilnorSymbol(CurvePtr c, std::vector<FuncElement> e, i64 co = 1)
        : C(std::move(c)), entries(std::move(e)), coeff(co) {
        for (const auto& f : entries)
            if (f.is_zero()) throw ZeroEntry("symbol entry is zero");
    }
    size_t length() const { return entries.size(); }
};

// A symbol over a residue field (entries are nonzero field elements).
struct UnitSymbol {
    FieldPtr F;
    std::vector<FFElement> entries;
    i64 coeff = 1;
};

// Residue of a length-2 symbol at v, computed from unit parts in the
// residue field: with a = ord f, b = ord g and u = uniformizer,
//   tame = (-1)^{ab} * red(f u^-a)^b * red(g u^-b)^-a.
inline FFElement tame2(const Place& v, const FuncElement& f, const FuncElement& g) {
    if (f.is_zero() || g.is_zero()) throw ZeroEntry("tame symbol of zero");
    i64 a = ord(v, f), b = ord(v, g);
    if (a == 0 && b == 0) return ff_one(residue_data(v).Kv);
    FuncElement u = uniformizer(v);
    FFElement uf = reduce_at(v, f * fe_pow(u, -a));
    FFElement ug = reduce_at(v, g * fe_pow(u, -b));
    check(!uf.is_zero() && !ug.is_zero(), "unit part reduced to zero");
    FFElement r = ff_pow(uf, b) * ff_pow(ug, -a);
    if ((a * b) % 2 != 0) r = -r;
    return r;
}

// General tame symbol: length n+1 over K to length n over k(v). Entries are
// normalized to unit parts u_i = f_i pi^{-ord f_i}; the symbol must have at
// most one entry of nonzero valuation (longer symbols are first split by
// multilinearity by the caller). Rules:
//   tame{u_1,...,u_n, pi}   = {ubar_1,...,ubar_n}
//   tame{u_1,...,u_{n+1}}   = 0
// A single entry f_j = u_j pi^a contributes a * (-1)^{n+1-j} times the
// symbol with entry j removed (moving pi to the last slot skew-symmetrically).
inline UnitSymbol tame(const Place& v, const MilnorSymbol& s) {
    check(v.C->same_as(*s.C), "place and symbol on different curves");
    ResidueData rd = residue_data(v);
    if (s.length() == 2) {
        FFElement r = tame2(v, s.entries[0], s.entries[1]);
        return {rd.Kv, {r}, s.coeff};
    }
    std::vector<i64> ords;
    int nonunit = -1;
    for (size_t i = 0; i < s.length(); ++i) {
        ords.push_back(ord(v, s.entries[i]));
        if (ords.back() != 0) {
            if (nonunit >= 0)
                throw ConfigError("tame: more than one non-unit entry; split by multilinearity first");
            nonunit = static_cast<int>(i);
        }
    }
    std::vector<FFElement> reds;
    FuncElement u = uniformizer(v);
    for (size_t i = 0; i < s.length(); ++i) {
        if (static_cast<int>(i) == nonunit) continue;
        reds.push_back(reduce_at(v, s.entries[i] * fe_pow(u, -ords[i])));
    }
    if (nonunit < 0) return {rd.Kv, std::move(reds), 0};  // all units: residue vanishes
    i64 a = ords[static_cast<size_t>(nonunit)];
    i64 sign = ((s.length() - 1 - static_cast<size_t>(nonunit)) % 2 == 0) ? 1 : -1;
    return {rd.Kv, std::move(reds), s.coeff * a * sign};
}

// Union of the supports of the entries' divisors, in canonical place order.
inline std::vector<Place> symbol_support(const MilnorSymbol& s,
                                         int degree_bound = kDefaultPlaceDegreeBound) {
    std::map<Place, int> seen;
    for (const auto& f : s.entries)
        for (auto& [v, m] : divisor(f, degree_bound).coeffs) seen[v] = 1;
    std::vector<Place> out;
    for (auto& [v, one] : seen) out.push_back(v);
    return out;
}

// Weil reciprocity product prod_v Norm_{k(v)/k} tame_v{f, g}; the theorem
// says this is 1. Places run over the union of the supports (residues at
// places where both entries are units vanish).
inline FFElement weil_check(const MilnorSymbol& s,
                            int degree_bound = kDefaultPlaceDegreeBound) {
    check(s.length() == 2, "weil_check expects a length-2 symbol");
    const FieldPtr& k = s.C->k;
    FFElement prod = ff_one(k);
    for (const Place& v : symbol_support(s, degree_bound)) {
        ResidueData rd = residue_data(v);
        prod = prod * norm_along(rd.iota, tame2(v, s.entries[0], s.entries[1]));
    }
    return ff_pow(prod, s.coeff);
}

// Independent brute-force model of K_2 of F_q: the tensor square of the
// unit group modulo one Steinberg row a (x) (1-a) per a in F_q - {0,1}.
inline FinAbGroup steinberg_k2_oracle(i64 q) {
    check(q <= (1 << 8), "steinberg oracle is capped at q <= 2^8");
    FieldPtr F = canonical_field(q);
    const bigint n = q - 1;
    // one tensor coordinate: Z/(q-1) (x) Z/(q-1) = Z/(q-1) via dlog products
    std::vector<std::vector<bigint>> rows;
    rows.push_back({n});
    for (i64 idx = 2; idx < q; ++idx) {  // a != 0, 1
        FFElement a = ff_from_index(F, idx);
        FFElement one_minus = ff_one(F) - a;
        if (one_minus.is_zero()) continue;
        bigint da = F->dlog_of(a), db = F->dlog_of(one_minus);
        rows.push_back({da * db});
    }
    return quotient(1, rows);
}

}  // namespace kwb
