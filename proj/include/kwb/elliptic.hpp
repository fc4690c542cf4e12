// Short-Weierstrass elliptic curve arithmetic y^2 = x^3 + a x + b, templated
// over the coefficient field elements so the same chord-tangent formulas run
// over finite fields and over function fields. Characteristic 2 is rejected
// at curve construction (the discriminant -16(4a^3+27b^2) vanishes there).
//
// EllPointGroup computes the full group of points over a finite field by
// x-sweep enumeration and extracts its structure (rank <= 2) together with a
// discrete-log table, which is what the tensor coordinatization consumes.
#pragma once

#include <unordered_map>

#include "abelian.hpp"
#include "embed.hpp"

namespace kwb {

template <class T>
struct EllPoint {
    bool infinity = true;
    T x{}, y{};

    static EllPoint at_o() { return EllPoint{}; }
    static EllPoint affine(T xx, T yy) { return EllPoint{false, std::move(xx), std::move(yy)}; }

    friend bool operator==(const EllPoint& p, const EllPoint& q) {
        if (p.infinity || q.infinity) return p.infinity == q.infinity;
        return p.x == q.x && p.y == q.y;
    }
    friend bool operator!=(const EllPoint& p, const EllPoint& q) { return !(p == q); }
};

template <class T>
struct EllContext {
    T a, b;  // y^2 = x^3 + a x + b, coefficients in the working field
};

template <class T>
bool ell_on_curve(const EllContext<T>& ctx, const EllPoint<T>& p) {
    if (p.infinity) return true;
    return p.y * p.y == p.x * p.x * p.x + ctx.a * p.x + ctx.b;
}

template <class T>
EllPoint<T> ell_neg(const EllPoint<T>& p) {
    if (p.infinity) return p;
    return EllPoint<T>::affine(p.x, -p.y);
}

template <class T>
EllPoint<T> ell_add(const EllContext<T>& ctx, const EllPoint<T>& p, const EllPoint<T>& q) {
    if (p.infinity) return q;
    if (q.infinity) return p;
    if (p.x == q.x) {
        if (p.y == -q.y) return EllPoint<T>::at_o();  // includes 2-torsion y = 0
        // tangent
        T three = p.x + p.x + p.x;  // 3x as repeated addition: no int ctor needed
        T lam = (three * p.x + ctx.a) / (p.y + p.y);
        T x3 = lam * lam - p.x - q.x;
        T y3 = lam * (p.x - x3) - p.y;
        return EllPoint<T>::affine(x3, y3);
    }
    T lam = (q.y - p.y) / (q.x - p.x);
    T x3 = lam * lam - p.x - q.x;
    T y3 = lam * (p.x - x3) - p.y;
    return EllPoint<T>::affine(x3, y3);
}

template <class T>
EllPoint<T> ell_sub(const EllContext<T>& ctx, const EllPoint<T>& p, const EllPoint<T>& q) {
    return ell_add(ctx, p, ell_neg(q));
}

template <class T>
EllPoint<T> ell_scalar(const EllContext<T>& ctx, i64 n, EllPoint<T> p) {
    if (n < 0) {
        p = ell_neg(p);
        n = -n;
    }
    EllPoint<T> r = EllPoint<T>::at_o();
    while (n > 0) {
        if (n & 1) r = ell_add(ctx, r, p);
        p = ell_add(ctx, p, p);
        n >>= 1;
    }
    return r;
}

using EllPointF = EllPoint<FFElement>;
using EllContextF = EllContext<FFElement>;

inline i64 ell_point_key(const EllPointF& p, i64 q) {
    if (p.infinity) return q * q;
    return p.x.index() * q + p.y.index();
}

// The group E(F) for a finite field F: enumeration, invariant factors
// (d1 | d2, rank <= 2), generators, and a full discrete-log table.
class EllPointGroup {
public:
    FieldPtr F;
    EllContextF ctx;
    std::vector<EllPointF> points;  // O first, then by (x,y) index order
    FinAbGroup shape;               // trivial, Z/d2, or Z/d1 x Z/d2 with d1 | d2
    std::vector<EllPointF> gens;    // matching shape.torsion
    std::unordered_map<i64, std::vector<bigint>> dlog_map;

    EllPointGroup() = default;

    EllPointGroup(FieldPtr field, EllContextF context) : F(std::move(field)), ctx(std::move(context)) {
        enumerate();
        structure();
    }

    i64 order() const { return static_cast<i64>(points.size()); }

    std::vector<bigint> coords(const EllPointF& p) const {
        auto it = dlog_map.find(ell_point_key(p, F->q));
        check(it != dlog_map.end(), "point not in the enumerated group");
        return it->second;
    }

    EllPointF from_coords(const std::vector<bigint>& c) const {
        check(c.size() == shape.torsion.size(), "coordinate arity mismatch");
        EllPointF r = EllPointF::at_o();
        for (size_t i = 0; i < c.size(); ++i) {
            bigint m = c[i] % shape.torsion[i];
            if (m < 0) m += shape.torsion[i];
            r = ell_add(ctx, r, ell_scalar(ctx, m.convert_to<i64>(), gens[i]));
        }
        return r;
    }

private:
    void enumerate() {
        points.push_back(EllPointF::at_o());
        for (i64 xi = 0; xi < F->q; ++xi) {
            FFElement x = ff_from_index(F, xi);
            FFElement rhs = x * x * x + ctx.a * x + ctx.b;
            FFElement s;
            if (!ff_sqrt(rhs, s)) continue;
            if (s.is_zero()) {
                points.push_back(EllPointF::affine(x, s));
            } else {
                FFElement t = -s;
                if (s.index() > t.index()) std::swap(s, t);
                points.push_back(EllPointF::affine(x, s));
                points.push_back(EllPointF::affine(x, t));
            }
        }
    }

    i64 point_order(const EllPointF& p, i64 n) const {
        // order divides the group order n
        i64 ord = n;
        for (i64 d = 1; d * d <= n; ++d) {
            if (n % d) continue;
            for (i64 e : {d, n / d})
                if (e < ord && ell_scalar(ctx, e, p).infinity) ord = e;
        }
        return ord;
    }

    void structure() {
        const i64 n = order();
        if (n == 1) {
            shape = FinAbGroup({}, 0);
            return;
        }
        // exponent = max point order (rank <= 2 makes this exact)
        i64 d2 = 1;
        EllPointF p2 = EllPointF::at_o();
        for (const auto& p : points) {
            if (p.infinity) continue;
            i64 o = point_order(p, n);
            if (o > d2) {
                d2 = o;
                p2 = p;
            }
        }
        check(n % d2 == 0, "exponent does not divide the order");
        i64 d1 = n / d2;
        if (d1 == 1) {
            shape = FinAbGroup({bigint(d2)}, 0);
            gens = {p2};
            fill_dlog_cyclic(d2);
            return;
        }
        // find an independent generator of order d1: try points p with
        // d1 * p = O whose powers meet <p2> only at O
        std::unordered_map<i64, i64> in_p2;  // key -> exponent
        {
            EllPointF acc = EllPointF::at_o();
            for (i64 k = 0; k < d2; ++k) {
                in_p2[ell_point_key(acc, F->q)] = k;
                acc = ell_add(ctx, acc, p2);
            }
        }
        for (const auto& cand : points) {
            if (cand.infinity) continue;
            if (!ell_scalar(ctx, d1, cand).infinity) continue;
            if (point_order(cand, n) != d1) continue;
            bool independent = true;
            EllPointF acc = cand;
            for (i64 k = 1; k < d1; ++k) {  // nonzero multiples stay off <p2>
                if (in_p2.count(ell_point_key(acc, F->q))) {
                    independent = false;
                    break;
                }
                acc = ell_add(ctx, acc, cand);
            }
            if (!independent) continue;
            shape = FinAbGroup({bigint(d1), bigint(d2)}, 0);
            gens = {cand, p2};
            fill_dlog_rank2(d1, d2);
            return;
        }
        throw InternalError("no independent generator found (structure not rank <= 2?)");
    }

    void fill_dlog_cyclic(i64 d2) {
        EllPointF acc = EllPointF::at_o();
        for (i64 k = 0; k < d2; ++k) {
            dlog_map[ell_point_key(acc, F->q)] = {bigint(k)};
            acc = ell_add(ctx, acc, gens[0]);
        }
        check(static_cast<i64>(dlog_map.size()) == order(), "cyclic dlog incomplete");
    }

    void fill_dlog_rank2(i64 d1, i64 d2) {
        EllPointF acc1 = EllPointF::at_o();
        for (i64 i = 0; i < d1; ++i) {
            EllPointF acc = acc1;
            for (i64 j = 0; j < d2; ++j) {
                i64 key = ell_point_key(acc, F->q);
                check(!dlog_map.count(key), "generators not independent");
                dlog_map[key] = {bigint(i), bigint(j)};
                acc = ell_add(ctx, acc, gens[1]);
            }
            acc1 = ell_add(ctx, acc1, gens[0]);
        }
        check(static_cast<i64>(dlog_map.size()) == order(), "rank-2 dlog incomplete");
    }
};

// Frobenius x -> x^qs on coordinates; stays on the curve when the curve
// coefficients are fixed by that Frobenius power.
inline EllPointF ell_frobenius(const EllPointF& p, i64 qs) {
    if (p.infinity) return p;
    return EllPointF::affine(ff_pow(p.x, qs), ff_pow(p.y, qs));
}

// Galois trace sum_{i < [dst:src]} Frob_{q_src}^i (P), pulled back to src
// along the embedding (coordinates of the sum are Frobenius-fixed).
inline EllPointF ell_trace(const Embedding& e, const EllContextF& ctx_dst, const EllPointF& p) {
    int rel = e.dst->m / e.src->m;
    EllPointF sum = EllPointF::at_o();
    EllPointF conj = p;
    for (int i = 0; i < rel; ++i) {
        sum = ell_add(ctx_dst, sum, conj);
        conj = ell_frobenius(conj, e.src->q);
    }
    check(conj == p, "Frobenius orbit did not close on the point");
    if (sum.infinity) return sum;
    return EllPointF::affine(e.preimage(sum.x), e.preimage(sum.y));
}

// Map a point along a field embedding.
inline EllPointF ell_map(const Embedding& e, const EllPointF& p) {
    if (p.infinity) return p;
    return EllPointF::affine(e.map(p.x), e.map(p.y));
}

}  // namespace kwb
