// Split semi-abelian varieties G = G_m^n x E over a finite field k, with
// points over finite extensions and over function fields, norm/trace maps
// along field extensions, reductions at places, and the extended tame symbol
//
//   d_v(g, h) = reduction of eps(g,h) * g^{ord_v h} * prod_i h_i^{-r_i}
//
// where r = (ord_v of the torus coordinates), eps(g,h)_i = (-1)^{ord_v(h) r_i},
// and h_i places h in the i-th torus slot. The elliptic component of the
// result is the reduction of ord_v(h) * g_A, which is always integral (the
// abelian part is proper and the curve is constant).
#pragma once

#include "function_field.hpp"

namespace kwb {

struct SemiAbelian {
    int torus_rank = 0;
    CurvePtr elliptic;  // null when there is no abelian part
    FieldPtr k;

    bool has_elliptic() const { return static_cast<bool>(elliptic); }
    std::string str() const {
        std::string s;
        if (torus_rank > 0) s = torus_rank == 1 ? "Gm" : "Gm^" + std::to_string(torus_rank);
        if (has_elliptic()) {
            if (!s.empty()) s += " x ";
            s += elliptic->str();
        }
        if (s.empty()) s = "1";
        return s;
    }
    bool same_as(const SemiAbelian& o) const {
        if (torus_rank != o.torus_rank || !k->same_as(*o.k)) return false;
        if (has_elliptic() != o.has_elliptic()) return false;
        return !has_elliptic() || elliptic->same_as(*o.elliptic);
    }
};

using SemiAbelianPtr = std::shared_ptr<const SemiAbelian>;

inline SemiAbelianPtr make_torus(const FieldPtr& k, int rank) {
    auto g = std::make_shared<SemiAbelian>();
    g->torus_rank = rank;
    g->k = k;
    return g;
}
inline SemiAbelianPtr make_semiabelian(const FieldPtr& k, int rank, CurvePtr e) {
    if (e) check(e->is_elliptic() && e->k->same_as(*k), "abelian part over the wrong field");
    auto g = std::make_shared<SemiAbelian>();
    g->torus_rank = rank;
    g->elliptic = std::move(e);
    g->k = k;
    return g;
}

// A point of G over a finite extension E of k (coordinates in E) or over a
// function field K (coordinates in K). The elliptic coordinate of a
// function-field point lives on the constant curve base-changed to K.
template <class Elt>
struct GPointT {
    SemiAbelianPtr G;
    std::vector<Elt> torus;  // length torus_rank, all nonzero
    EllPoint<Elt> ab;        // ignored when !G->has_elliptic()
};

using GPoint = GPointT<FFElement>;   // over a finite field
using GPointK = GPointT<FuncElement>;  // over a function field

// --- finite-field points -------------------------------------------------

inline void gp_validate(const GPoint& P, const FieldPtr& E, const Embedding& k_to_E) {
    check(static_cast<int>(P.torus.size()) == P.G->torus_rank, "torus arity");
    for (const auto& u : P.torus) {
        check(u.F->same_as(*E), "torus coordinate in the wrong field");
        check(!u.is_zero(), "torus coordinate is zero");
    }
    if (P.G->has_elliptic()) {
        EllContextF ctx{k_to_E.map(P.G->elliptic->a), k_to_E.map(P.G->elliptic->b)};
        check(ell_on_curve(ctx, P.ab), "elliptic coordinate not on the curve");
    }
}

inline GPoint gp_identity(const SemiAbelianPtr& G, const FieldPtr& E) {
    GPoint P{G, std::vector<FFElement>(static_cast<size_t>(G->torus_rank), ff_one(E)),
             EllPointF::at_o()};
    return P;
}

inline GPoint gp_add(const GPoint& P, const GPoint& Q, const EllContextF& ctx) {
    check(P.G->same_as(*Q.G), "points of different groups");
    GPoint R{P.G, {}, EllPointF::at_o()};
    for (size_t i = 0; i < P.torus.size(); ++i) R.torus.push_back(P.torus[i] * Q.torus[i]);
    if (P.G->has_elliptic()) R.ab = ell_add(ctx, P.ab, Q.ab);
    return R;
}

inline GPoint gp_neg(const GPoint& P) {
    GPoint R{P.G, {}, EllPointF::at_o()};
    for (const auto& u : P.torus) R.torus.push_back(ff_inv(u));
    if (P.G->has_elliptic()) R.ab = ell_neg(P.ab);
    return R;
}

inline GPoint gp_scalar(const GPoint& P, i64 n, const EllContextF& ctx) {
    GPoint R{P.G, {}, EllPointF::at_o()};
    for (const auto& u : P.torus) R.torus.push_back(ff_pow(u, n));
    if (P.G->has_elliptic()) R.ab = ell_scalar(ctx, n, P.ab);
    return R;
}

inline bool gp_eq(const GPoint& P, const GPoint& Q) {
    if (!P.G->same_as(*Q.G)) throw GroupMismatch("points of different groups");
    for (size_t i = 0; i < P.torus.size(); ++i)
        if (P.torus[i] != Q.torus[i]) return false;
    return !P.G->has_elliptic() || P.ab == Q.ab;
}

// Norm along an embedding: field norm on torus coordinates, Galois trace
// (chord-tangent sum of Frobenius conjugates) on the elliptic coordinate.
// The embedding must be k-compatible so the curve is defined over both ends.
inline GPoint g_norm(const Embedding& e, const GPoint& P, const EllContextF& ctx_dst) {
    GPoint R{P.G, {}, EllPointF::at_o()};
    for (const auto& u : P.torus) R.torus.push_back(norm_along(e, u));
    if (P.G->has_elliptic()) R.ab = ell_trace(e, ctx_dst, P.ab);
    return R;
}

// --- function-field points ----------------------------------------------

inline EllContext<FuncElement> ell_ctx_over_K(const SemiAbelianPtr& G, const CurvePtr& K) {
    check(G->has_elliptic(), "no abelian part");
    return {fe_const(K, G->elliptic->a), fe_const(K, G->elliptic->b)};
}

// The generic point (x, y) of E viewed in E(k(E)); only meaningful when the
// function field is the curve's own.
inline GPointK generic_point(const SemiAbelianPtr& G, const CurvePtr& K) {
    check(G->has_elliptic() && G->elliptic->same_as(*K), "generic point needs K = k(E)");
    GPointK P{G, std::vector<FuncElement>(static_cast<size_t>(G->torus_rank), fe_one(K)),
              EllPoint<FuncElement>::affine(fe_var(K), fe_y(K))};
    return P;
}

inline GPointK gp_constant(const SemiAbelianPtr& G, const CurvePtr& K, const GPoint& P) {
    check(P.G->same_as(*G), "constant point of a different group");
    check(K->k->same_as(*G->k), "function field over a different base");
    GPointK R{G, {}, EllPoint<FuncElement>::at_o()};
    for (const auto& u : P.torus) R.torus.push_back(fe_const(K, u));
    if (G->has_elliptic() && !P.ab.infinity)
        R.ab = EllPoint<FuncElement>::affine(fe_const(K, P.ab.x), fe_const(K, P.ab.y));
    return R;
}

inline GPointK gpk_add(const GPointK& P, const GPointK& Q, const CurvePtr& K) {
    check(P.G->same_as(*Q.G), "points of different groups");
    GPointK R{P.G, {}, EllPoint<FuncElement>::at_o()};
    for (size_t i = 0; i < P.torus.size(); ++i) R.torus.push_back(P.torus[i] * Q.torus[i]);
    if (P.G->has_elliptic()) R.ab = ell_add(ell_ctx_over_K(P.G, K), P.ab, Q.ab);
    return R;
}

inline GPointK gpk_scalar(const GPointK& P, i64 n, const CurvePtr& K) {
    GPointK R{P.G, {}, EllPoint<FuncElement>::at_o()};
    for (const auto& u : P.torus) R.torus.push_back(fe_pow(u, n));
    if (P.G->has_elliptic()) R.ab = ell_scalar(ell_ctx_over_K(P.G, K), n, P.ab);
    return R;
}

// Valuation vector of the torus coordinates; the abelian part contributes
// nothing (A(O_v) = A(K_v) for the proper constant curve).
inline std::vector<i64> r_map(const Place& v, const GPointK& g) {
    std::vector<i64> r;
    for (const auto& u : g.torus) r.push_back(ord(v, u));
    return r;
}

inline bool gpk_integral(const Place& v, const GPointK& g) {
    for (const auto& u : g.torus)
        if (ord(v, u) != 0) return false;
    return true;  // the elliptic coordinate is always integral
}

// Reduce an elliptic function-field point at a place. If the affine
// coordinates have poles the point reduces to O; the pole pattern is then
// necessarily ord(x) = -2s, ord(y) = -3s.
inline EllPointF reduce_ell_point(const Place& v, const EllPoint<FuncElement>& P,
                                  const ResidueData& rd) {
    if (P.infinity) return EllPointF::at_o();
    i64 ox = P.x.is_zero() ? 0 : ord(v, P.x);
    i64 oy = P.y.is_zero() ? 0 : ord(v, P.y);
    if (ox < 0 || oy < 0) {
        check(ox < 0 && oy < 0, "partial pole pattern on an elliptic point");
        check(2 * oy == 3 * ox, "pole pattern is not (-2s, -3s)");
        return EllPointF::at_o();
    }
    return EllPointF::affine(reduce_at(v, P.x), reduce_at(v, P.y));
}

// Componentwise reduction of an integral point.
inline GPoint reduce_point(const Place& v, const GPointK& g) {
    ResidueData rd = residue_data(v);
    GPoint R{g.G, {}, EllPointF::at_o()};
    for (const auto& u : g.torus) {
        if (ord(v, u) != 0) throw NotIntegral("torus coordinate is not a unit at " + v.str());
        R.torus.push_back(reduce_at(v, u));
    }
    if (g.G->has_elliptic()) R.ab = reduce_ell_point(v, g.ab, rd);
    return R;
}

// The extended tame symbol d_v(g, h) in G(k(v)). Torus coordinate i becomes
// (-1)^{m r_i} red(g_i u^{-r_i})^m red(h u^{-m})^{-r_i} (a unit by
// construction); the elliptic coordinate becomes the reduction of m * g_A.
inline GPoint extended_tame(const Place& v, const GPointK& g, const FuncElement& h) {
    if (h.is_zero()) throw ZeroElement("extended tame symbol with h = 0");
    check(v.C->same_as(*h.C), "place and h on different curves");
    ResidueData rd = residue_data(v);
    i64 m = ord(v, h);
    std::vector<i64> r = r_map(v, g);
    FuncElement u = uniformizer(v);
    FFElement red_h_unit = reduce_at(v, h * fe_pow(u, -m));
    GPoint R{g.G, {}, EllPointF::at_o()};
    for (size_t i = 0; i < g.torus.size(); ++i) {
        FFElement red_g_unit = reduce_at(v, g.torus[i] * fe_pow(u, -r[i]));
        FFElement val = ff_pow(red_g_unit, m) * ff_pow(red_h_unit, -r[i]);
        if ((m * r[i]) % 2 != 0) val = -val;
        check(!val.is_zero(), "extended tame symbol produced zero");
        R.torus.push_back(val);
    }
    if (g.G->has_elliptic()) {
        const CurvePtr& K = h.C;
        EllPoint<FuncElement> scaled = ell_scalar(ell_ctx_over_K(g.G, K), m, g.ab);
        R.ab = reduce_ell_point(v, scaled, rd);  // always integral: A proper
    }
    return R;
}

// Reciprocity sum behind well-definedness: sum over places of the trace/norm
// down to k of d_v(g, h); must be the identity of G(k). Places run over the
// union of the supports of h and of the torus coordinates of g.
inline bool reciprocity_identity(const GPointK& g, const FuncElement& h,
                                 int degree_bound = kDefaultPlaceDegreeBound,
                                 GPoint* out = nullptr) {
    const CurvePtr& K = h.C;
    const FieldPtr& k = K->k;
    std::map<Place, int> support;
    for (auto& [v, m] : divisor(h, degree_bound).coeffs) support[v] = 1;
    for (const auto& u : g.torus)
        if (!u.is_constant())
            for (auto& [v, m] : divisor(u, degree_bound).coeffs) support[v] = 1;
    EllContextF ctx_k{};
    if (g.G->has_elliptic()) ctx_k = g.G->elliptic->ctx();
    GPoint total = gp_identity(g.G, k);
    for (auto& [v, one] : support) {
        ResidueData rd = residue_data(v);
        GPoint local = extended_tame(v, g, h);
        EllContextF ctx_v{};
        if (g.G->has_elliptic())
            ctx_v = EllContextF{rd.iota.map(g.G->elliptic->a), rd.iota.map(g.G->elliptic->b)};
        GPoint down = g_norm(rd.iota, local, ctx_v);
        total = gp_add(total, down, ctx_k);
    }
    if (out) *out = total;
    return gp_eq(total, gp_identity(g.G, k));
}

}  // namespace kwb
