// Dense univariate polynomials over a finite field, with the algorithms the
// function-field layer needs: division, gcd, evaluation, irreducibility,
// enumeration of monic irreducibles, full factorization and root finding.
// Factorization is distinct-degree + equal-degree splitting with a
// deterministic sequence of splitting elements, so repeated runs are
// bit-identical.
#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "detrng.hpp"
#include "ff.hpp"

namespace kwb {

class Poly {
public:
    FieldPtr F;
    std::vector<FFElement> c;  // low-to-high, no trailing zeros

    Poly() = default;
    explicit Poly(FieldPtr f) : F(std::move(f)) {}
    Poly(FieldPtr f, std::vector<FFElement> cc) : F(std::move(f)), c(std::move(cc)) { trim(); }

    void trim() {
        while (!c.empty() && c.back().is_zero()) c.pop_back();
    }
    int deg() const { return static_cast<int>(c.size()) - 1; }  // deg 0 poly = -1
    bool is_zero() const { return c.empty(); }
    bool is_one() const { return c.size() == 1 && c[0].is_one(); }
    bool is_monic() const { return !c.empty() && c.back().is_one(); }
    const FFElement& lead() const {
        check(!c.empty(), "lead of zero polynomial");
        return c.back();
    }
    FFElement coeff(int i) const {
        if (i < 0 || i >= static_cast<int>(c.size())) return ff_zero(F);
        return c[static_cast<size_t>(i)];
    }

    friend bool operator==(const Poly& a, const Poly& b) {
        return a.F->same_as(*b.F) && a.c == b.c;
    }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    // Coefficient-index key, for canonical (degree, lex) ordering.
    std::vector<i64> index_key() const {
        std::vector<i64> k;
        k.reserve(c.size());
        for (const auto& x : c) k.push_back(x.index());
        return k;
    }

    std::string str(const std::string& var = "t") const;
};

inline Poly poly_zero(const FieldPtr& F) { return Poly(F); }
inline Poly poly_const(const FFElement& a) {
    Poly r(a.F);
    if (!a.is_zero()) r.c = {a};
    return r;
}
inline Poly poly_one(const FieldPtr& F) { return poly_const(ff_one(F)); }
inline Poly poly_x(const FieldPtr& F) { return Poly(F, {ff_zero(F), ff_one(F)}); }
inline Poly poly_from(const FieldPtr& F, std::vector<FFElement> cc) { return Poly(F, std::move(cc)); }
// x - a
inline Poly poly_linear(const FFElement& a) { return Poly(a.F, {-a, ff_one(a.F)}); }

inline Poly operator+(const Poly& a, const Poly& b) {
    std::vector<FFElement> c(std::max(a.c.size(), b.c.size()), ff_zero(a.F));
    for (size_t i = 0; i < c.size(); ++i) {
        if (i < a.c.size()) c[i] = c[i] + a.c[i];
        if (i < b.c.size()) c[i] = c[i] + b.c[i];
    }
    return Poly(a.F, std::move(c));
}

inline Poly operator-(const Poly& a, const Poly& b) {
    std::vector<FFElement> c(std::max(a.c.size(), b.c.size()), ff_zero(a.F));
    for (size_t i = 0; i < c.size(); ++i) {
        if (i < a.c.size()) c[i] = c[i] + a.c[i];
        if (i < b.c.size()) c[i] = c[i] - b.c[i];
    }
    return Poly(a.F, std::move(c));
}

inline Poly operator-(const Poly& a) {
    std::vector<FFElement> c(a.c.size(), ff_zero(a.F));
    for (size_t i = 0; i < c.size(); ++i) c[i] = -a.c[i];
    return Poly(a.F, std::move(c));
}

inline Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly(a.F);
    std::vector<FFElement> c(a.c.size() + b.c.size() - 1, ff_zero(a.F));
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i].is_zero()) continue;
        for (size_t j = 0; j < b.c.size(); ++j) c[i + j] = c[i + j] + a.c[i] * b.c[j];
    }
    return Poly(a.F, std::move(c));
}

inline Poly operator*(const FFElement& s, const Poly& a) {
    std::vector<FFElement> c(a.c.size(), ff_zero(a.F));
    for (size_t i = 0; i < c.size(); ++i) c[i] = s * a.c[i];
    return Poly(a.F, std::move(c));
}

inline std::pair<Poly, Poly> poly_divrem(const Poly& a, const Poly& b) {
    if (b.is_zero()) throw DivisionByZero("polynomial division by zero");
    Poly r = a, quo(a.F);
    if (a.deg() < b.deg()) return {quo, r};
    quo.c.assign(static_cast<size_t>(a.deg() - b.deg() + 1), ff_zero(a.F));
    FFElement invlead = ff_inv(b.lead());
    while (!r.is_zero() && r.deg() >= b.deg()) {
        int k = r.deg() - b.deg();
        FFElement f = r.lead() * invlead;
        quo.c[static_cast<size_t>(k)] = f;
        for (int i = 0; i <= b.deg(); ++i)
            r.c[static_cast<size_t>(i + k)] = r.c[static_cast<size_t>(i + k)] - f * b.c[static_cast<size_t>(i)];
        r.trim();
    }
    quo.trim();
    return {quo, r};
}

inline Poly operator/(const Poly& a, const Poly& b) { return poly_divrem(a, b).first; }
inline Poly operator%(const Poly& a, const Poly& b) { return poly_divrem(a, b).second; }

inline Poly poly_monic(const Poly& a) {
    if (a.is_zero() || a.is_monic()) return a;
    return ff_inv(a.lead()) * a;
}

inline Poly poly_gcd(Poly a, Poly b) {
    while (!b.is_zero()) {
        Poly r = a % b;
        a = std::move(b);
        b = std::move(r);
    }
    return poly_monic(a);
}

inline FFElement poly_eval(const Poly& a, const FFElement& x) {
    FFElement r = ff_zero(a.F);
    for (size_t i = a.c.size(); i-- > 0;) r = r * x + a.c[i];
    return r;
}

inline Poly poly_derivative(const Poly& a) {
    if (a.deg() <= 0) return Poly(a.F);
    std::vector<FFElement> c(static_cast<size_t>(a.deg()), ff_zero(a.F));
    for (int i = 1; i <= a.deg(); ++i)
        c[static_cast<size_t>(i - 1)] = ff_from_int(a.F, i) * a.c[static_cast<size_t>(i)];
    return Poly(a.F, std::move(c));
}

inline Poly poly_pow_mod(Poly base, i64 e, const Poly& mod) {
    Poly r = poly_one(base.F);
    base = base % mod;
    while (e > 0) {
        if (e & 1) r = (r * base) % mod;
        base = (base * base) % mod;
        e >>= 1;
    }
    return r;
}

// Multiplicity of the monic irreducible pi in a (exact valuation).
inline int poly_valuation(Poly a, const Poly& pi) {
    check(!a.is_zero(), "valuation of zero polynomial");
    int v = 0;
    for (;;) {
        auto [quo, rem] = poly_divrem(a, pi);
        if (!rem.is_zero()) return v;
        ++v;
        a = std::move(quo);
    }
}

// All monic polynomials of degree d, in lexicographic coefficient order.
inline std::vector<Poly> enumerate_monic(const FieldPtr& F, int d) {
    std::vector<Poly> out;
    i64 count = 1;
    for (int i = 0; i < d; ++i) {
        count *= F->q;
        check(count <= (1 << 24), "monic enumeration too large");
    }
    for (i64 idx = 0; idx < count; ++idx) {
        std::vector<FFElement> c;
        c.reserve(static_cast<size_t>(d) + 1);
        i64 t = idx;
        for (int i = 0; i < d; ++i) {
            c.push_back(ff_from_index(F, t % F->q));
            t /= F->q;
        }
        c.push_back(ff_one(F));
        out.emplace_back(F, std::move(c));
    }
    return out;
}

inline bool poly_irreducible(const Poly& f);

// Monic irreducibles of degree exactly d, by sieving the enumeration.
inline std::vector<Poly> monic_irreducibles(const FieldPtr& F, int d) {
    std::vector<Poly> out;
    for (auto& g : enumerate_monic(F, d))
        if (poly_irreducible(g)) out.push_back(g);
    return out;
}

// Irreducibility by the standard power test: f (monic, deg n) is irreducible
// over F_q iff x^{q^n} = x mod f and gcd(x^{q^{n/l}} - x, f) = 1 for every
// prime l | n.
inline bool poly_irreducible(const Poly& f) {
    int n = f.deg();
    check(f.is_monic(), "irreducibility test expects monic input");
    if (n <= 0) return false;
    if (n == 1) return true;
    const i64 q = f.F->q;
    Poly x = poly_x(f.F);
    Poly xq = poly_pow_mod(x, q, f);  // x^q mod f
    // x^{q^d} mod f by iterating composition via repeated powering
    auto power_step = [&](const Poly& g) { return poly_pow_mod(g, q, f); };
    std::vector<int> prime_div;
    {
        int t = n;
        for (int d = 2; d * d <= t; ++d)
            if (t % d == 0) {
                prime_div.push_back(d);
                while (t % d == 0) t /= d;
            }
        if (t > 1) prime_div.push_back(t);
    }
    Poly acc = xq;
    for (int d = 1; d < n; ++d) {
        // acc = x^{q^d} mod f here
        if (n % d == 0) {
            bool is_proper_level = false;
            for (int ell : prime_div)
                if (d == n / ell) is_proper_level = true;
            if (is_proper_level && !poly_gcd(acc - x, f).is_one()) return false;
        }
        acc = power_step(acc);
    }
    return acc == x;  // acc = x^{q^n} mod f
}

namespace detail {

// Equal-degree splitting (Cantor-Zassenhaus / Ben-Or), derandomized: the
// candidate stream comes from a deterministic generator seeded by the input
// polynomial, so repeated runs split identically. h is monic, squarefree,
// and a product of distinct irreducibles of degree d.
inline void edf_split(const Poly& h, int d, std::vector<Poly>& out) {
    if (h.deg() == d) {
        out.push_back(h);
        return;
    }
    const FieldPtr& F = h.F;
    const i64 q = F->q;
    i64 qd = 1;
    for (int i = 0; i < d; ++i) {
        check(qd <= (i64(1) << 61) / q, "equal-degree splitting modulus too large");
        qd *= q;
    }
    uint64_t seed = 0x6b77621ULL;
    for (const auto& x : h.c) seed = seed * 1099511628211ULL + static_cast<uint64_t>(x.index());
    DetRng rng(seed);
    for (int attempt = 0; attempt < 512; ++attempt) {
        std::vector<FFElement> cc;
        for (int i = 0; i < 2 * d; ++i)
            cc.push_back(ff_from_index(F, static_cast<i64>(rng.below(static_cast<uint64_t>(q)))));
        Poly r(F, std::move(cc));
        if (r.deg() < 1) continue;
        Poly g(F);
        if (F->p != 2) {
            Poly s = poly_pow_mod(r, (qd - 1) / 2, h);
            g = poly_gcd(s - poly_one(F), h);
        } else {
            // trace polynomial r + r^2 + r^4 + ... over F_{2^(m*d)}
            int e = F->m * d;
            Poly s(F), acc = r % h;
            for (int i = 0; i < e; ++i) {
                s = (s + acc) % h;
                acc = (acc * acc) % h;
            }
            g = poly_gcd(s, h);
        }
        if (!g.is_one() && g.deg() < h.deg()) {
            edf_split(g, d, out);
            edf_split(h / g, d, out);
            return;
        }
    }
    check(false, "equal-degree splitting did not converge");
}

}  // namespace detail

// Full factorization into monic irreducibles with multiplicities, plus the
// leading unit. Handles inseparable-looking inputs (derivative zero) by
// p-th-root descent; the output is sorted by (degree, coefficient order).
inline std::vector<std::pair<Poly, int>> poly_factor(const Poly& f_in) {
    check(!f_in.is_zero(), "factor of zero polynomial");
    const FieldPtr& F = f_in.F;
    std::vector<std::pair<Poly, int>> out;
    Poly f = poly_monic(f_in);
    if (f.deg() == 0) return out;

    // squarefree decomposition by repeated gcd with the derivative
    struct Task {
        Poly g;
        int mult;
    };
    std::vector<Task> square_free;
    std::vector<Task> stack{{f, 1}};
    while (!stack.empty()) {
        Task t = stack.back();
        stack.pop_back();
        if (t.g.deg() <= 0) continue;
        Poly d = poly_derivative(t.g);
        if (d.is_zero()) {
            // t.g = sum a_i x^{p i}: take p-th roots of coefficients
            const i64 p = F->p;
            std::vector<FFElement> cc;
            for (int i = 0; i <= t.g.deg(); i += static_cast<int>(p)) {
                FFElement a = t.g.coeff(i);
                // p-th root = a^{q/p} since x -> x^p is bijective
                cc.push_back(ff_pow(a, F->q / p));
            }
            stack.push_back({Poly(F, std::move(cc)), t.mult * static_cast<int>(p)});
            continue;
        }
        Poly g1 = poly_gcd(t.g, d);
        if (g1.is_one()) {
            square_free.push_back(t);
        } else {
            stack.push_back({t.g / g1, t.mult});
            stack.push_back({g1, t.mult});
        }
    }

    // merge multiplicities of identical squarefree parts via irreducible split
    for (auto& task : square_free) {
        Poly g = task.g;
        // distinct-degree
        Poly x = poly_x(F);
        Poly acc = x;
        int d = 0;
        while (g.deg() > 0) {
            ++d;
            if (2 * d > g.deg()) {
                out.emplace_back(g, task.mult);
                break;
            }
            acc = poly_pow_mod(acc, F->q, g);
            Poly gd = poly_gcd(acc - x, g);
            if (gd.deg() > 0) {
                std::vector<Poly> irr;
                detail::edf_split(gd, d, irr);
                for (auto& pi : irr) out.emplace_back(pi, task.mult);
                g = g / gd;
                acc = acc % g;
            }
        }
    }

    // combine duplicates (a factor can appear from different squarefree parts)
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.first.deg() != b.first.deg()) return a.first.deg() < b.first.deg();
        return a.first.index_key() < b.first.index_key();
    });
    std::vector<std::pair<Poly, int>> merged;
    for (auto& pr : out) {
        if (!merged.empty() && merged.back().first == pr.first)
            merged.back().second += pr.second;
        else
            merged.push_back(pr);
    }
    return merged;
}

// Roots in the coefficient field, sorted by element index.
inline std::vector<FFElement> poly_roots(const Poly& f) {
    check(!f.is_zero(), "roots of zero polynomial");
    const FieldPtr& F = f.F;
    std::vector<FFElement> out;
    if (f.deg() <= 0) return out;
    if (static_cast<i64>(f.deg()) >= F->q) {
        // cheaper to test every element
        for (i64 i = 0; i < F->q; ++i) {
            FFElement a = ff_from_index(F, i);
            if (poly_eval(f, a).is_zero()) out.push_back(a);
        }
        return out;
    }
    Poly x = poly_x(F);
    Poly lin = poly_gcd(poly_pow_mod(x, F->q, f) - x, f);
    if (lin.deg() <= 0) return out;
    std::vector<Poly> irr;
    detail::edf_split(lin, 1, irr);
    for (auto& g : irr) out.push_back(-g.coeff(0));
    std::sort(out.begin(), out.end(),
              [](const FFElement& a, const FFElement& b) { return a.index() < b.index(); });
    return out;
}

inline std::string Poly::str(const std::string& var) const {
    if (is_zero()) return "0";
    std::string s;
    for (int i = deg(); i >= 0; --i) {
        const FFElement& a = c[static_cast<size_t>(i)];
        if (a.is_zero()) continue;
        if (!s.empty()) s += "+";
        if (i == 0 || !a.is_one()) s += a.str();
        if (i > 0) {
            if (i == 0 || !a.is_one()) s += "*";
            s += var;
            if (i > 1) s += "^" + std::to_string(i);
        }
    }
    return s;
}

}  // namespace kwb
