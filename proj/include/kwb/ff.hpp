// Exact arithmetic in finite fields F_{p^m}, presented as F_p[x]/(f) with f
// monic irreducible over the prime field. Every field is presented over its
// prime field directly; towers are relations between such presentations
// (see embed.hpp). All orders are capped at 2^16 so exhaustive algorithms
// (primitive element search, discrete logs) stay affordable.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace kwb {

using i64 = long long;

inline constexpr i64 kFieldOrderCap = 1 << 17;

inline bool is_prime_i64(i64 n) {
    if (n < 2) return false;
    for (i64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline i64 mod_pow_i64(i64 base, i64 exp, i64 mod) {
    i64 r = 1 % mod;
    base %= mod;
    if (base < 0) base += mod;
    while (exp > 0) {
        if (exp & 1) r = r * base % mod;
        base = base * base % mod;
        exp >>= 1;
    }
    return r;
}

// --- dense polynomials over the prime field F_p, coefficients in [0,p) ---
// Used for defining polynomials and field construction; polynomial
// arithmetic over extension fields lives in poly.hpp.
namespace primepoly {

using PP = std::vector<i64>;  // low-to-high, no trailing zeros

inline void trim(PP& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline int deg(const PP& a) { return static_cast<int>(a.size()) - 1; }

inline PP mul(const PP& a, const PP& b, i64 p) {
    if (a.empty() || b.empty()) return {};
    PP c(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            c[i + j] = (c[i + j] + a[i] * b[j]) % p;
    trim(c);
    return c;
}

// Remainder of a by monic b.
inline PP mod(PP a, const PP& b, i64 p) {
    check(!b.empty() && b.back() == 1, "primepoly::mod needs monic divisor");
    while (deg(a) >= deg(b)) {
        i64 c = a.back();
        size_t shift = a.size() - b.size();
        for (size_t i = 0; i < b.size(); ++i) {
            a[shift + i] = (a[shift + i] - c * b[i]) % p;
            if (a[shift + i] < 0) a[shift + i] += p;
        }
        trim(a);
    }
    return a;
}

// Trial division by all monic polynomials of degree <= deg(f)/2, in degree
// then lexicographic (low-to-high coefficient) order. Returns a factor as
// witness, or an empty vector when f is irreducible.
inline PP find_factor(const PP& f, i64 p) {
    int n = deg(f);
    if (n <= 1) return {};
    for (int d = 1; 2 * d <= n; ++d) {
        i64 count = 1;
        for (int i = 0; i < d; ++i) count *= p;
        for (i64 idx = 0; idx < count; ++idx) {
            PP g(d + 1, 0);
            i64 t = idx;
            for (int i = 0; i < d; ++i) {
                g[i] = t % p;
                t /= p;
            }
            g[d] = 1;
            if (mod(f, g, p).empty()) return g;
        }
    }
    return {};
}

inline std::string to_string(const PP& a) {
    std::string s = "[";
    for (size_t i = 0; i < a.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(a[i]);
    }
    return s + "]";
}

}  // namespace primepoly

class FieldExtension;
using FieldPtr = std::shared_ptr<const FieldExtension>;
class FFElement;

// A finite field F_{p^m} = F_p[x]/(modulus). Immutable after construction;
// the primitive element and the discrete-log/exponential tables are computed
// in the constructor, before any sharing.
class FieldExtension {
public:
    i64 p;
    int m;
    i64 q;                      // p^m
    std::vector<i64> modulus;   // monic, degree m, length m+1
    i64 generator_index = 0;    // element index of a primitive element
    std::vector<int32_t> dlog;  // dlog[idx(x)] = k with g^k = x; dlog[0] = -1
    std::vector<int32_t> expt;  // expt[k] = idx(g^k), k in [0, q-1)

    FieldExtension(i64 p_, std::vector<i64> f);

    bool same_as(const FieldExtension& o) const {
        return p == o.p && modulus == o.modulus;
    }

    std::string key() const {
        std::string s;
        for (size_t i = 0; i < modulus.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(modulus[i]);
        }
        return s;
    }
    std::string name() const {
        return "GF(" + std::to_string(p) + "^" + std::to_string(m) + ";" + key() + ")";
    }

    i64 dlog_of(const FFElement& x) const;
};

class FFElement {
public:
    FieldPtr F;
    std::vector<i64> c;  // length m, entries in [0, p)

    FFElement() = default;
    FFElement(FieldPtr f, std::vector<i64> cc) : F(std::move(f)), c(std::move(cc)) {}

    bool is_zero() const {
        for (i64 x : c)
            if (x) return false;
        return true;
    }
    bool is_one() const {
        if (c.empty() || c[0] != 1) return false;
        for (size_t i = 1; i < c.size(); ++i)
            if (c[i]) return false;
        return true;
    }

    i64 index() const {  // base-p digit encoding, in [0, q)
        i64 idx = 0;
        for (size_t i = c.size(); i-- > 0;) idx = idx * F->p + c[i];
        return idx;
    }

    friend bool operator==(const FFElement& a, const FFElement& b) {
        return a.F->same_as(*b.F) && a.c == b.c;
    }
    friend bool operator!=(const FFElement& a, const FFElement& b) { return !(a == b); }

    std::string str() const {
        if (F->m == 1) return std::to_string(c[0]);
        std::string s = "[";
        for (size_t i = 0; i < c.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(c[i]);
        }
        return s + "]";
    }
};

inline void require_same_field(const FFElement& a, const FFElement& b) {
    if (!a.F || !b.F || (a.F != b.F && !a.F->same_as(*b.F)))
        throw FieldMismatch("operands belong to different fields");
}

inline FFElement operator+(const FFElement& a, const FFElement& b) {
    require_same_field(a, b);
    std::vector<i64> c(a.c.size());
    for (size_t i = 0; i < c.size(); ++i) {
        c[i] = a.c[i] + b.c[i];
        if (c[i] >= a.F->p) c[i] -= a.F->p;
    }
    return {a.F, std::move(c)};
}

inline FFElement operator-(const FFElement& a, const FFElement& b) {
    require_same_field(a, b);
    std::vector<i64> c(a.c.size());
    for (size_t i = 0; i < c.size(); ++i) {
        c[i] = a.c[i] - b.c[i];
        if (c[i] < 0) c[i] += a.F->p;
    }
    return {a.F, std::move(c)};
}

inline FFElement operator-(const FFElement& a) {
    std::vector<i64> c(a.c.size());
    for (size_t i = 0; i < c.size(); ++i) c[i] = a.c[i] ? a.F->p - a.c[i] : 0;
    return {a.F, std::move(c)};
}

inline FFElement operator*(const FFElement& a, const FFElement& b) {
    require_same_field(a, b);
    const i64 p = a.F->p;
    const auto& f = a.F->modulus;
    const int m = a.F->m;
    std::vector<i64> prod(2 * m - 1, 0);
    for (int i = 0; i < m; ++i) {
        if (!a.c[i]) continue;
        for (int j = 0; j < m; ++j) prod[i + j] = (prod[i + j] + a.c[i] * b.c[j]) % p;
    }
    for (int k = 2 * m - 2; k >= m; --k) {
        i64 coef = prod[k];
        if (!coef) continue;
        prod[k] = 0;
        for (int i = 0; i < m; ++i) {
            prod[k - m + i] = (prod[k - m + i] - coef * f[i]) % p;
            if (prod[k - m + i] < 0) prod[k - m + i] += p;
        }
    }
    prod.resize(m);
    return {a.F, std::move(prod)};
}

inline FFElement ff_one(const FieldPtr& F);
inline FFElement ff_pow(const FFElement& a, i64 e);

inline FFElement ff_inv(const FFElement& a) {
    if (a.is_zero()) throw DivisionByZero("inv(0)");
    return ff_pow(a, a.F->q - 2);
}

inline FFElement ff_pow(const FFElement& a, i64 e) {
    if (e < 0) return ff_pow(ff_inv(a), -e);
    FFElement r = ff_one(a.F), base = a;
    while (e > 0) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

inline FFElement operator/(const FFElement& a, const FFElement& b) { return a * ff_inv(b); }

inline FFElement frobenius(const FFElement& a) { return ff_pow(a, a.F->p); }

inline FFElement ff_zero(const FieldPtr& F) { return {F, std::vector<i64>(F->m, 0)}; }
inline FFElement ff_one(const FieldPtr& F) {
    std::vector<i64> c(F->m, 0);
    c[0] = 1 % F->p;
    return {F, std::move(c)};
}
inline FFElement ff_from_int(const FieldPtr& F, i64 n) {
    std::vector<i64> c(F->m, 0);
    c[0] = n % F->p;
    if (c[0] < 0) c[0] += F->p;
    return {F, std::move(c)};
}
inline FFElement ff_from_index(const FieldPtr& F, i64 idx) {
    check(idx >= 0 && idx < F->q, "element index out of range");
    std::vector<i64> c(F->m, 0);
    for (int i = 0; i < F->m; ++i) {
        c[i] = idx % F->p;
        idx /= F->p;
    }
    return {F, std::move(c)};
}
inline FFElement ff_from_coeffs(const FieldPtr& F, std::vector<i64> c) {
    c.resize(F->m, 0);
    for (auto& x : c) {
        x %= F->p;
        if (x < 0) x += F->p;
    }
    return {F, std::move(c)};
}
// Class of x in F_p[x]/(f). For m = 1 this is the constant -f[0].
inline FFElement ff_gen(const FieldPtr& F) {
    if (F->m == 1) return ff_from_int(F, (F->p - F->modulus[0]) % F->p);
    std::vector<i64> c(F->m, 0);
    c[1] = 1;
    return {F, std::move(c)};
}
inline FFElement ff_primitive(const FieldPtr& F) { return ff_from_index(F, F->generator_index); }

inline i64 FieldExtension::dlog_of(const FFElement& x) const {
    if (x.is_zero()) throw ZeroElement("dlog of 0");
    check(x.F->same_as(*this), "dlog: foreign element");
    return dlog[x.index()];
}

// Multiplicative order, by exhausting divisors of q-1.
inline i64 ff_order(const FFElement& a) {
    if (a.is_zero()) throw ZeroElement("order of 0");
    i64 n = a.F->q - 1;
    i64 ord = n;
    for (i64 d = 1; d * d <= n; ++d) {
        if (n % d) continue;
        for (i64 e : {d, n / d})
            if (e < ord && ff_pow(a, e).is_one()) ord = e;
    }
    return ord;
}

inline FieldExtension::FieldExtension(i64 p_, std::vector<i64> f) : p(p_), modulus(std::move(f)) {
    if (!is_prime_i64(p)) throw NotPrime(std::to_string(p));
    primepoly::trim(modulus);
    if (modulus.empty() || modulus.back() % p != 1)
        throw ConfigError("defining polynomial must be monic");
    m = primepoly::deg(modulus);
    if (m < 1) throw ConfigError("defining polynomial must have degree >= 1");
    for (auto& c : modulus) {
        c %= p;
        if (c < 0) c += p;
    }
    q = 1;
    for (int i = 0; i < m; ++i) {
        q *= p;
        if (q > kFieldOrderCap) throw BoundExceeded("field order exceeds 2^16");
    }
    if (m > 1) {
        auto factor = primepoly::find_factor(modulus, p);
        if (!factor.empty())
            throw Reducible("defining polynomial factors; witness " +
                            primepoly::to_string(factor));
    }

    // Primitive element by order testing against the prime factorization of
    // q-1, then dlog/exp tables in one multiplicative sweep.
    FieldPtr self(this, [](const FieldExtension*) {});  // ctor-local, non-owning
    i64 n = q - 1;
    std::vector<i64> prime_divs;
    {
        i64 t = n;
        for (i64 d = 2; d * d <= t; ++d)
            if (t % d == 0) {
                prime_divs.push_back(d);
                while (t % d == 0) t /= d;
            }
        if (t > 1) prime_divs.push_back(t);
    }
    generator_index = 1;  // q = 2: the unit group is trivial
    for (i64 idx = 1; idx < q; ++idx) {
        FFElement cand = ff_from_index(self, idx);
        bool ok = true;
        for (i64 ell : prime_divs)
            if (ff_pow(cand, n / ell).is_one()) {
                ok = false;
                break;
            }
        if (ok) {
            generator_index = idx;
            break;
        }
    }
    dlog.assign(q, -1);
    expt.assign(n > 0 ? n : 1, 0);
    FFElement g = ff_from_index(self, generator_index);
    FFElement acc = ff_one(self);
    for (i64 k = 0; k < n; ++k) {
        i64 idx = acc.index();
        check(dlog[idx] == -1, "primitive element has short order");
        dlog[idx] = static_cast<int32_t>(k);
        expt[k] = static_cast<int32_t>(idx);
        acc = acc * g;
    }
    check(acc.is_one(), "generator order mismatch");
    if (n == 0) dlog[ff_one(self).index()] = 0;  // F_2: dlog(1) = 0
}

// Process-wide registry: fields are deduplicated by (p, modulus) so equal
// constructions share tables and pointer identity. Thread-safe; entries are
// immutable once published.
inline FieldPtr make_extension(i64 p, std::vector<i64> f) {
    static std::mutex mu;
    static std::map<std::pair<i64, std::vector<i64>>, FieldPtr> registry;
    if (p >= 2)
        for (auto& c : f) {
            c %= p;
            if (c < 0) c += p;
        }
    primepoly::trim(f);
    std::lock_guard<std::mutex> lock(mu);
    auto it = registry.find({p, f});
    if (it != registry.end()) return it->second;
    auto F = std::make_shared<const FieldExtension>(p, f);
    registry[{p, F->modulus}] = F;
    return F;
}

// The prime field F_p, presented as F_p[x]/(x).
inline FieldPtr prime_field(i64 p) { return make_extension(p, {0, 1}); }

// Canonical F_{p^m}: the lexicographically first monic irreducible of
// degree m over F_p (coefficient vectors compared low-to-high).
inline FieldPtr canonical_field(i64 q) {
    i64 p = 0;
    for (i64 d = 2; d * d <= q; ++d)
        if (q % d == 0) {
            p = d;
            break;
        }
    if (p == 0) p = q;
    i64 m = 0, t = q;
    while (t > 1) {
        if (t % p) throw ConfigError("not a prime power: " + std::to_string(q));
        t /= p;
        ++m;
    }
    if (m == 1) return prime_field(p);
    i64 count = 1;
    for (i64 i = 0; i < m; ++i) count *= p;
    for (i64 idx = 0; idx < count; ++idx) {
        std::vector<i64> f(m + 1, 0);
        i64 u = idx;
        for (i64 i = 0; i < m; ++i) {
            f[i] = u % p;
            u /= p;
        }
        f[m] = 1;
        if (primepoly::find_factor(f, p).empty()) return make_extension(p, f);
    }
    throw InternalError("no irreducible polynomial found");
}

// (generator, order) of the unit group; discrete logs against the generator
// are served by the dlog table built at construction.
inline std::pair<FFElement, i64> group_structure(const FieldPtr& F) {
    return {ff_primitive(F), F->q - 1};
}

// Square root; false when the element is a non-residue (odd characteristic
// only -- in char 2 squaring is bijective and this always succeeds).
inline bool ff_sqrt(const FFElement& a, FFElement& out) {
    if (a.is_zero()) {
        out = ff_zero(a.F);
        return true;
    }
    if (a.F->p == 2) {
        out = ff_pow(a, a.F->q / 2);
        return true;
    }
    i64 k = a.F->dlog_of(a);
    if (k % 2 != 0) return false;
    out = ff_from_index(a.F, a.F->expt[k / 2]);
    return true;
}

}  // namespace kwb
