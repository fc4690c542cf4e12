// Embeddings between finite fields presented over their prime field, norms
// along them, and the construction of residue fields as flat presentations.
//
// The distinguished embedding src -> dst maps the generator of src to the
// root of src's defining polynomial whose coefficient vector is least in
// lexicographic order. That binary rule is deterministic but not transitive
// in general, so Tower derives all intermediate embeddings from the
// embeddings into its top field, which makes every triangle commute.
#pragma once

#include <optional>
#include <unordered_map>

#include "poly.hpp"

namespace kwb {

// Maps a polynomial with src coefficients into dst along a coefficient map.
class Embedding {
public:
    FieldPtr src, dst;
    FFElement gen_image;  // image of the class of x of src
    // preimage table: dst element index -> src element index (image points only)
    std::unordered_map<i64, i64> preimages;

    Embedding() = default;
    Embedding(FieldPtr s, FieldPtr d, FFElement gi)
        : src(std::move(s)), dst(std::move(d)), gen_image(std::move(gi)) {
        check(src->p == dst->p, "embedding requires equal characteristic");
        check(dst->m % src->m == 0, "embedding requires compatible degrees");
        build_tables();
    }

    FFElement map(const FFElement& x) const {
        check(x.F->same_as(*src), "embedding: element not in source field");
        FFElement r = ff_zero(dst);
        for (size_t i = x.c.size(); i-- > 0;) r = r * gen_image + ff_from_int(dst, x.c[i]);
        return r;
    }

    bool in_image(const FFElement& y) const {
        check(y.F->same_as(*dst), "embedding: element not in target field");
        return preimages.count(y.index()) > 0;
    }

    FFElement preimage(const FFElement& y) const {
        check(y.F->same_as(*dst), "embedding: element not in target field");
        auto it = preimages.find(y.index());
        check(it != preimages.end(), "element not in embedded subfield");
        return ff_from_index(src, it->second);
    }

    bool is_identity() const { return src->same_as(*dst) && map(ff_gen(src)) == ff_gen(src); }

private:
    void build_tables() {
        // verify the generator image is a root of the defining polynomial
        FFElement acc = ff_zero(dst);
        for (size_t i = src->modulus.size(); i-- > 0;)
            acc = acc * gen_image + ff_from_int(dst, src->modulus[i]);
        check(acc.is_zero(), "generator image is not a root of the source modulus");
        preimages.reserve(static_cast<size_t>(src->q));
        for (i64 i = 0; i < src->q; ++i) {
            FFElement x = ff_from_index(src, i);
            preimages[map(x).index()] = i;
        }
        check(preimages.size() == static_cast<size_t>(src->q), "embedding not injective");
    }
};

inline Embedding identity_embedding(const FieldPtr& F) { return {F, F, ff_gen(F)}; }

// Lift a polynomial's coefficients along an embedding.
inline Poly poly_map(const Embedding& e, const Poly& f) {
    std::vector<FFElement> c;
    c.reserve(f.c.size());
    for (const auto& a : f.c) c.push_back(e.map(a));
    return Poly(e.dst, std::move(c));
}

// All roots of src's defining polynomial in dst, sorted by element index
// (= lexicographic coefficient order, low digit first).
inline std::vector<FFElement> embedding_roots(const FieldPtr& src, const FieldPtr& dst) {
    if (src->p != dst->p || dst->m % src->m != 0)
        throw NoEmbedding(src->name() + " into " + dst->name());
    std::vector<FFElement> mc;
    mc.reserve(src->modulus.size());
    for (i64 a : src->modulus) mc.push_back(ff_from_int(dst, a));
    return poly_roots(Poly(dst, std::move(mc)));
}

// Distinguished embedding: lexicographically least root.
inline Embedding distinguished_embedding(const FieldPtr& src, const FieldPtr& dst) {
    auto roots = embedding_roots(src, dst);
    check(!roots.empty(), "no root of an irreducible with compatible degree");
    return {src, dst, roots.front()};
}

// The spec-level operation: embed x along the distinguished embedding.
inline FFElement embed(const FieldPtr& src, const FieldPtr& dst, const FFElement& x) {
    if (src->same_as(*dst)) return x;
    return distinguished_embedding(src, dst).map(x);
}

// Norm along an embedding: product of the [dst:src] Frobenius conjugates,
// pulled back to src. The result is Frobenius-fixed by construction.
inline FFElement norm_along(const Embedding& e, const FFElement& x) {
    check(x.F->same_as(*e.dst), "norm: element not in the top field");
    const i64 qs = e.src->q;
    int rel = e.dst->m / e.src->m;
    FFElement prod = ff_one(e.dst), conj = x;
    for (int i = 0; i < rel; ++i) {
        prod = prod * conj;
        conj = ff_pow(conj, qs);
    }
    check(conj == x, "Frobenius orbit did not close");
    return e.preimage(prod);
}

inline FFElement norm(const FieldPtr& sub, const FieldPtr& sup, const FFElement& x) {
    if (sub->same_as(*sup)) return x;
    return norm_along(distinguished_embedding(sub, sup), x);
}

// Trace along an embedding (additive analogue), pulled back to src.
inline FFElement trace_along(const Embedding& e, const FFElement& x) {
    check(x.F->same_as(*e.dst), "trace: element not in the top field");
    const i64 qs = e.src->q;
    int rel = e.dst->m / e.src->m;
    FFElement sum = ff_zero(e.dst), conj = x;
    for (int i = 0; i < rel; ++i) {
        sum = sum + conj;
        conj = ff_pow(conj, qs);
    }
    return e.preimage(sum);
}

// A chain F_1 < F_2 < ... < F_k with mutually compatible embeddings: the
// embeddings into the top field follow the lexicographic rule, and every
// intermediate embedding is re-derived from the outer two, which forces
// e_{j,k} o e_{i,j} = e_{i,k} on the nose.
class Tower {
public:
    std::vector<FieldPtr> fields;  // bottom to top; degrees divide upward

    explicit Tower(std::vector<FieldPtr> chain) : fields(std::move(chain)) {
        check(!fields.empty(), "empty tower");
        for (size_t i = 0; i + 1 < fields.size(); ++i)
            if (fields[i]->p != fields[i + 1]->p ||
                fields[i + 1]->m % fields[i]->m != 0)
                throw NoEmbedding("tower degrees are not a divisor chain");
        const FieldPtr& top = fields.back();
        into_top_.reserve(fields.size());
        for (const auto& F : fields)
            into_top_.push_back(F->same_as(*top) ? identity_embedding(F)
                                                 : distinguished_embedding(F, top));
    }

    // Embedding fields[i] -> fields[j], i <= j, compatible across the tower.
    Embedding embedding(size_t i, size_t j) const {
        check(i <= j && j < fields.size(), "tower index");
        if (j + 1 == fields.size()) return into_top_[i];
        // image of gen_i inside fields[j]: pull the top image back through j
        FFElement gi_top = into_top_[i].gen_image;
        FFElement gi_j = into_top_[j].preimage(gi_top);
        return {fields[i], fields[j], gi_j};
    }

private:
    std::vector<Embedding> into_top_;
};

// Result of flattening a simple extension F[u]/(h) into a plain presentation
// over the prime field: the new field, the induced embedding of F, and the
// image of u.
struct Flattened {
    FieldPtr field;
    Embedding from_base;  // F -> field
    FFElement root;       // image of u; a root of h mapped along from_base
};

namespace detail {

// Arithmetic in the quotient ring A = F[u]/(h) with elements as coefficient
// vectors over F, plus the F_p-linear view used to extract minimal
// polynomials. Ctor-local helper for flatten().
struct QuotientRing {
    FieldPtr F;
    Poly h;
    int e;  // deg h

    std::vector<FFElement> mul(const std::vector<FFElement>& a,
                               const std::vector<FFElement>& b) const {
        Poly pa(F, a), pb(F, b);
        Poly pr = (pa * pb) % h;
        std::vector<FFElement> r(static_cast<size_t>(e), ff_zero(F));
        for (int i = 0; i <= pr.deg(); ++i) r[static_cast<size_t>(i)] = pr.coeff(i);
        return r;
    }

    // flatten an A-element to an F_p coordinate vector of length m_F * e
    std::vector<i64> pvec(const std::vector<FFElement>& a) const {
        std::vector<i64> v;
        v.reserve(static_cast<size_t>(F->m) * a.size());
        for (const auto& x : a) v.insert(v.end(), x.c.begin(), x.c.end());
        return v;
    }
};

// Gaussian elimination mod p; returns rank. Matrix is row-major, mutated.
inline int rank_mod_p(std::vector<std::vector<i64>>& rows, i64 p) {
    int rank = 0;
    size_t ncols = rows.empty() ? 0 : rows[0].size();
    for (size_t col = 0; col < ncols && rank < static_cast<int>(rows.size()); ++col) {
        size_t piv = static_cast<size_t>(rank);
        while (piv < rows.size() && rows[piv][col] == 0) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[static_cast<size_t>(rank)], rows[piv]);
        i64 inv = mod_pow_i64(rows[static_cast<size_t>(rank)][col], p - 2, p);
        for (auto& x : rows[static_cast<size_t>(rank)]) x = x * inv % p;
        for (size_t r = 0; r < rows.size(); ++r) {
            if (r == static_cast<size_t>(rank) || rows[r][col] == 0) continue;
            i64 f = rows[r][col];
            for (size_t cidx = 0; cidx < ncols; ++cidx) {
                rows[r][cidx] = (rows[r][cidx] - f * rows[static_cast<size_t>(rank)][cidx]) % p;
                if (rows[r][cidx] < 0) rows[r][cidx] += p;
            }
        }
        ++rank;
    }
    return rank;
}

// Solve M x = b mod p for square invertible M (column-vector convention).
inline std::vector<i64> solve_mod_p(const std::vector<std::vector<i64>>& M,
                                    const std::vector<i64>& b, i64 p) {
    size_t n = M.size();
    std::vector<std::vector<i64>> aug(n, std::vector<i64>(n + 1, 0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) aug[i][j] = M[i][j];
        aug[i][n] = b[i];
    }
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && aug[piv][col] == 0) ++piv;
        check(piv < n, "singular matrix in solve_mod_p");
        std::swap(aug[col], aug[piv]);
        i64 inv = mod_pow_i64(aug[col][col], p - 2, p);
        for (auto& x : aug[col]) x = x * inv % p;
        for (size_t r = 0; r < n; ++r) {
            if (r == col || aug[r][col] == 0) continue;
            i64 f = aug[r][col];
            for (size_t cidx = 0; cidx <= n; ++cidx) {
                aug[r][cidx] = (aug[r][cidx] - f * aug[col][cidx]) % p;
                if (aug[r][cidx] < 0) aug[r][cidx] += p;
            }
        }
    }
    std::vector<i64> x(n);
    for (size_t i = 0; i < n; ++i) x[i] = aug[i][n];
    return x;
}

}  // namespace detail

// Present F[u]/(h) as a plain extension of the prime field: find a primitive
// element gamma of the quotient ring over F_p (first one in coefficient
// enumeration order), take its minimal polynomial as the new modulus, and
// express the embedding of F and the class of u in the new presentation.
// Deterministic; results are memoized process-wide.
inline Flattened flatten(const FieldPtr& F, const Poly& h) {
    check(h.F->same_as(*F), "flatten: modulus over wrong field");
    check(h.is_monic() && h.deg() >= 1, "flatten: modulus must be monic nonconstant");

    struct Key {
        i64 p;
        std::vector<i64> fmod;
        std::vector<i64> hkey;
        bool operator<(const Key& o) const {
            return std::tie(p, fmod, hkey) < std::tie(o.p, o.fmod, o.hkey);
        }
    };
    static std::mutex mu;
    static std::map<Key, Flattened> cache;
    Key key{F->p, F->modulus, h.index_key()};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }

    const int e = h.deg();
    if (e == 1 && F->m >= 1) {
        // F[u]/(u - r) = F itself
        Flattened out{F, identity_embedding(F), -h.coeff(0)};
        std::lock_guard<std::mutex> lock(mu);
        cache.emplace(key, out);
        return out;
    }
    check(poly_irreducible(h), "flatten: modulus must be irreducible");

    detail::QuotientRing A{F, h, e};
    const i64 p = F->p;
    const int n = F->m * e;

    // search gamma with [F_p(gamma) : F_p] = n, in A-element index order
    i64 total = 1;
    for (int i = 0; i < n; ++i) {
        total *= p;
        if (total > kFieldOrderCap)
            throw BoundExceeded("flattened field of order p^" + std::to_string(n) +
                                " exceeds the order cap");
    }
    std::vector<FFElement> gamma;
    std::vector<i64> minpoly;
    for (i64 gidx = 1; gidx < total; ++gidx) {
        gamma.clear();
        i64 t = gidx;
        for (int i = 0; i < e; ++i) {
            gamma.push_back(ff_from_index(F, t % F->q));
            t /= F->q;
        }
        // powers of gamma as F_p vectors; find first linear dependence
        std::vector<std::vector<FFElement>> pows;
        std::vector<std::vector<i64>> vecs;
        std::vector<FFElement> cur(static_cast<size_t>(e), ff_zero(F));
        cur[0] = ff_one(F);
        int degree = 0;
        for (int d = 0; d <= n; ++d) {
            vecs.push_back(A.pvec(cur));
            pows.push_back(cur);
            auto probe = vecs;
            if (detail::rank_mod_p(probe, p) < static_cast<int>(vecs.size())) {
                degree = d;  // gamma^d depends on lower powers
                break;
            }
            cur = A.mul(cur, gamma);
        }
        if (degree < n) continue;
        // minimal polynomial: solve sum_{i<n} c_i gamma^i = gamma^n
        std::vector<std::vector<i64>> M(static_cast<size_t>(n), std::vector<i64>(static_cast<size_t>(n), 0));
        for (int col = 0; col < n; ++col)
            for (int row = 0; row < n; ++row) M[static_cast<size_t>(row)][static_cast<size_t>(col)] = vecs[static_cast<size_t>(col)][static_cast<size_t>(row)];
        std::vector<i64> rhs = vecs[static_cast<size_t>(n)];
        std::vector<i64> sol = detail::solve_mod_p(M, rhs, p);
        minpoly.assign(static_cast<size_t>(n) + 1, 0);
        for (int i = 0; i < n; ++i) minpoly[static_cast<size_t>(i)] = (p - sol[static_cast<size_t>(i)]) % p;
        minpoly[static_cast<size_t>(n)] = 1;

        FieldPtr G = make_extension(p, minpoly);

        // change of basis: A-element -> coordinates in gamma powers -> G
        std::vector<std::vector<i64>> Mb(static_cast<size_t>(n), std::vector<i64>(static_cast<size_t>(n), 0));
        for (int col = 0; col < n; ++col)
            for (int row = 0; row < n; ++row) Mb[static_cast<size_t>(row)][static_cast<size_t>(col)] = vecs[static_cast<size_t>(col)][static_cast<size_t>(row)];
        auto to_G = [&](const std::vector<FFElement>& a) {
            std::vector<i64> coords = detail::solve_mod_p(Mb, A.pvec(a), p);
            return ff_from_coeffs(G, std::move(coords));
        };
        std::vector<FFElement> gen_F_in_A(static_cast<size_t>(e), ff_zero(F));
        gen_F_in_A[0] = ff_gen(F);
        std::vector<FFElement> u_in_A(static_cast<size_t>(e), ff_zero(F));
        if (e >= 2)
            u_in_A[1] = ff_one(F);
        else
            u_in_A[0] = -h.coeff(0);

        Flattened out{G, Embedding(F, G, to_G(gen_F_in_A)), to_G(u_in_A)};
        // sanity: the flattened root must satisfy h
        FFElement acc = ff_zero(G);
        for (int i = h.deg(); i >= 0; --i) acc = acc * out.root + out.from_base.map(h.coeff(i));
        check(acc.is_zero(), "flatten: root does not satisfy the modulus");
        std::lock_guard<std::mutex> lock(mu);
        cache.emplace(key, out);
        return out;
    }
    throw InternalError("flatten: no primitive element found");
}

// The canonical degree-m extension of k: flatten k[u]/(sigma_m) for the
// lexicographically first monic irreducible sigma_m of degree m over k.
// Returns the new field and the embedding of k.
inline Flattened canonical_extension(const FieldPtr& k, int m) {
    check(m >= 1, "extension degree must be positive");
    if (m == 1) return {k, identity_embedding(k), ff_gen(k)};
    i64 count = 1;
    for (int i = 0; i < m; ++i) count *= k->q;
    for (i64 idx = 0; idx < count; ++idx) {
        std::vector<FFElement> c;
        i64 t = idx;
        for (int i = 0; i < m; ++i) {
            c.push_back(ff_from_index(k, t % k->q));
            t /= k->q;
        }
        c.push_back(ff_one(k));
        Poly f(k, std::move(c));
        if (poly_irreducible(f)) return flatten(k, f);
    }
    throw InternalError("no irreducible polynomial of requested degree");
}

// k-compatible embedding between two presented extensions of k: iota_src and
// iota_dst give the k-structures, and the returned map commutes with them.
// Chooses the lexicographically least root of src's modulus in dst among the
// compatible ones. Equal orders give a k-isomorphism.
inline Embedding k_compatible_iso(const FieldPtr& src, const Embedding& iota_src,
                                  const FieldPtr& dst, const Embedding& iota_dst) {
    if (src->p != dst->p || dst->m % src->m != 0)
        throw NoEmbedding(src->name() + " into " + dst->name());
    check(iota_src.dst->same_as(*src) && iota_dst.dst->same_as(*dst), "iso: bad k-structures");
    FFElement gk = ff_gen(iota_src.src);
    for (const auto& r : embedding_roots(src, dst)) {
        Embedding cand(src, dst, r);
        if (cand.map(iota_src.map(gk)) == iota_dst.map(gk)) return cand;
    }
    throw NoEmbedding("no k-compatible embedding");
}

}  // namespace kwb
