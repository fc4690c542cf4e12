#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "kwb/detrng.hpp"
#include "kwb/function_field.hpp"

using namespace kwb;

namespace {

FuncElement rat(const CurvePtr& C, std::vector<i64> num, std::vector<i64> den) {
    auto mk = [&](const std::vector<i64>& v) {
        std::vector<FFElement> c;
        for (i64 x : v) c.push_back(ff_from_int(C->k, x));
        return Poly(C->k, c);
    };
    return {C, RatFunc::of(mk(num), mk(den))};
}

Poly kpoly(const FieldPtr& k, std::vector<i64> v) {
    std::vector<FFElement> c;
    for (i64 x : v) c.push_back(ff_from_int(k, x));
    return Poly(k, c);
}

FuncElement random_p1_element(const CurvePtr& C, DetRng& rng, int maxdeg = 3) {
    for (;;) {
        std::vector<FFElement> n, d;
        int dn = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(maxdeg)));
        int dd = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(maxdeg)));
        for (int i = 0; i <= dn; ++i) n.push_back(ff_from_index(C->k, static_cast<i64>(rng.below(static_cast<uint64_t>(C->k->q)))));
        for (int i = 0; i <= dd; ++i) d.push_back(ff_from_index(C->k, static_cast<i64>(rng.below(static_cast<uint64_t>(C->k->q)))));
        Poly pn(C->k, n), pd(C->k, d);
        if (pn.is_zero() || pd.is_zero()) continue;
        return {C, RatFunc::of(pn, pd)};
    }
}

FuncElement random_ell_element(const CurvePtr& C, DetRng& rng, int maxdeg = 2) {
    for (;;) {
        auto rnd_poly = [&](int dmax) {
            std::vector<FFElement> c;
            int dd = static_cast<int>(rng.below(static_cast<uint64_t>(dmax + 1)));
            for (int i = 0; i <= dd; ++i)
                c.push_back(ff_from_index(C->k, static_cast<i64>(rng.below(static_cast<uint64_t>(C->k->q)))));
            return Poly(C->k, c);
        };
        Poly a = rnd_poly(maxdeg), b = rnd_poly(maxdeg);
        if (a.is_zero() && b.is_zero()) continue;
        return {C, RatFunc::of_poly(a), RatFunc::of_poly(b)};
    }
}

// products of verticals (x - c), lines (y - lambda x - mu) and constants:
// divisor support stays within small residue degrees
FuncElement random_line_product(const CurvePtr& C, DetRng& rng, int factors = 3) {
    const FieldPtr& k = C->k;
    FuncElement f = fe_const(C, ff_primitive(k));
    int count = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(factors)));
    for (int i = 0; i < count; ++i) {
        FuncElement g = fe_zero(C);
        switch (rng.below(3)) {
            case 0:
                g = fe_var(C) - fe_const(C, ff_from_index(k, static_cast<i64>(rng.below(static_cast<uint64_t>(k->q)))));
                break;
            case 1:
                g = fe_y(C) -
                    (fe_const(C, ff_from_index(k, static_cast<i64>(rng.below(static_cast<uint64_t>(k->q))))) * fe_var(C) +
                     fe_const(C, ff_from_index(k, static_cast<i64>(rng.below(static_cast<uint64_t>(k->q))))));
                break;
            default:
                g = fe_const(C, ff_from_index(k, 1 + static_cast<i64>(rng.below(static_cast<uint64_t>(k->q - 1)))));
        }
        if (g.is_zero()) continue;
        f = rng.coin() ? f * g : f / g;
    }
    return f;
}

}  // namespace

TEST_CASE("curve construction") {
    auto F5 = prime_field(5);
    auto P1 = p1_curve(F5);
    CHECK(!P1->is_elliptic());
    auto E = elliptic_curve(F5, ff_zero(F5), ff_one(F5));  // y^2 = x^3 + 1
    CHECK(E->is_elliptic());
    // singular: y^2 = x^3 (a = b = 0)
    CHECK_THROWS_AS(elliptic_curve(F5, ff_zero(F5), ff_zero(F5)), ConfigError);
    // char 2 rejected
    CHECK_THROWS_AS(elliptic_curve(prime_field(2), ff_zero(prime_field(2)), ff_one(prime_field(2))),
                    ConfigError);
}

TEST_CASE("function field arithmetic normal forms") {
    auto F5 = prime_field(5);
    auto E = elliptic_curve(F5, ff_zero(F5), ff_one(F5));
    FuncElement x = fe_var(E), y = fe_y(E);
    // y * y reduces to x^3 + 1
    FuncElement yy = y * y;
    CHECK(yy.b.is_zero());
    CHECK(yy.a == RatFunc::of_poly(E->rhs_poly()));
    // division round trip
    FuncElement f = (x + fe_const(E, ff_from_int(F5, 2))) * y + fe_one(E);
    FuncElement g = x * x + y;
    FuncElement h = f / g;
    CHECK(h * g == f);
    // conjugate norm is y-free
    FuncElement nrm = g * g.conj();
    CHECK(nrm.b.is_zero());
}

TEST_CASE("ord on the rational line") {
    auto F5 = prime_field(5);
    auto P1 = p1_curve(F5);
    FuncElement t = fe_var(P1);
    CHECK(ord(Place::p1_inf(P1), t) == -1);
    // t^2/(t-1): ord 2 at (t), -1 at (t-1), -1 at inf
    FuncElement f = rat(P1, {0, 0, 1}, {-1, 1});
    CHECK(ord(Place::p1_finite(P1, kpoly(F5, {0, 1})), f) == 2);
    CHECK(ord(Place::p1_finite(P1, kpoly(F5, {-1, 1})), f) == -1);
    CHECK(ord(Place::p1_inf(P1), f) == -1);
    CHECK_THROWS_AS(ord(Place::p1_inf(P1), fe_zero(P1)), ZeroElement);
}

TEST_CASE("ord at O on an elliptic curve, with degree-sum oracle") {
    auto F5 = prime_field(5);
    auto E = elliptic_curve(F5, ff_zero(F5), ff_one(F5));
    FuncElement y = fe_y(E), x = fe_var(E);
    CHECK(ord(Place::ell_o(E), x) == -2);
    CHECK(ord(Place::ell_o(E), y) == -3);
    // derived check: the full divisor of y has degree zero, so the affine
    // zeros of y (the 2-torsion fiber) must sum to degree 3
    Divisor dy = divisor(y);
    CHECK(dy.degree() == 0);
    i64 affine = 0;
    for (auto& [v, m] : dy.coeffs)
        if (v.kind == Place::Kind::EllAffine) affine += m * v.degree;
    CHECK(affine == 3);
}

TEST_CASE("reduce examples") {
    auto F5 = prime_field(5);
    auto P1 = p1_curve(F5);
    // 1/(1-t) at (t) -> 1
    FuncElement f = rat(P1, {1}, {1, -1});
    CHECK(reduce_at(Place::p1_finite(P1, kpoly(F5, {0, 1})), f).is_one());

    auto F7 = prime_field(7);
    auto P1_7 = p1_curve(F7);
    CHECK(reduce_at(Place::p1_finite(P1_7, kpoly(F7, {-1, 1})), fe_var(P1_7)).is_one());

    // t at (t^2+1) over F_3: class of t in F_9, an element of order 4
    auto F3 = prime_field(3);
    auto P1_3 = p1_curve(F3);
    Place v = Place::p1_finite(P1_3, kpoly(F3, {1, 0, 1}));
    FFElement r = reduce_at(v, fe_var(P1_3));
    CHECK(r.F->q == 9);
    CHECK(ff_order(r) == 4);

    CHECK_THROWS_AS(reduce_at(Place::p1_finite(P1, kpoly(F5, {0, 1})), rat(P1, {1}, {0, 1})),
                    PoleAtPlace);
}

TEST_CASE("divisors on the rational line") {
    auto F5 = prime_field(5);
    auto P1 = p1_curve(F5);
    FuncElement f = rat(P1, {0, 0, 1}, {-1, 1});
    Divisor D = divisor(f);
    CHECK(D.coeffs.size() == 3);
    CHECK(D.coeffs.at(Place::p1_finite(P1, kpoly(F5, {0, 1}))) == 2);
    CHECK(D.coeffs.at(Place::p1_finite(P1, kpoly(F5, {-1, 1}))) == -1);
    CHECK(D.coeffs.at(Place::p1_inf(P1)) == -1);
    CHECK(D.degree() == 0);

    // constants have empty divisor
    CHECK(divisor(fe_const(P1, ff_from_int(F5, 3))).empty());
}

TEST_CASE("divisor of x on y^2 = x^3 + 1 over F_5") {
    auto F5 = prime_field(5);
    auto E = elliptic_curve(F5, ff_zero(F5), ff_one(F5));
    Divisor D = divisor(fe_var(E));
    // zeros over x = 0 with total multiplicity 2 (the points (0, 1), (0, -1)),
    // pole of order 2 at O
    i64 zero_mult = 0;
    for (auto& [v, m] : D.coeffs) {
        if (v.kind == Place::Kind::EllAffine) {
            CHECK(v.pi == kpoly(F5, {0, 1}));
            zero_mult += m * v.degree;
        } else {
            CHECK(v.kind == Place::Kind::EllO);
            CHECK(m == -2);
        }
    }
    CHECK(zero_mult == 2);
    CHECK(D.degree() == 0);
}

TEST_CASE("ord is additive and principal divisors have degree zero (P1)") {
    for (i64 q : {5, 7, 9}) {
        auto k = canonical_field(q);
        auto P1 = p1_curve(k);
        DetRng rng(42 + q);
        std::vector<Place> probe = {Place::p1_inf(P1)};
        for (auto& pi : monic_irreducibles(k, 1)) probe.push_back(Place::p1_finite(P1, pi));
        for (auto& pi : monic_irreducibles(k, 2)) {
            probe.push_back(Place::p1_finite(P1, pi));
            if (probe.size() > 12) break;
        }
        int cases = 0;
        while (cases < 400) {
            FuncElement f = random_p1_element(P1, rng), g = random_p1_element(P1, rng);
            if (f.is_zero() || g.is_zero()) continue;
            ++cases;
            for (auto& v : probe) CHECK(ord(v, f * g) == ord(v, f) + ord(v, g));
            CHECK(divisor(f).degree() == 0);
        }
    }
}

TEST_CASE("ord is additive on elliptic function fields") {
    auto F5 = prime_field(5);
    for (auto [a, b] : std::vector<std::pair<i64, i64>>{{0, 1}, {1, 0}}) {
        auto E = elliptic_curve(F5, ff_from_int(F5, a), ff_from_int(F5, b));
        DetRng rng(1000 + a * 10 + b);
        // probe places: everything above x, x-1, x-2, x-4, plus O
        std::vector<Place> probe = {Place::ell_o(E)};
        for (i64 c : {0, 1, 2, 4})
            for (auto& v : ell_places_above(E, kpoly(F5, {-c, 1}))) probe.push_back(v);
        int cases = 0;
        while (cases < 250) {
            FuncElement f = random_ell_element(E, rng), g = random_ell_element(E, rng);
            if (f.is_zero() || g.is_zero()) continue;
            ++cases;
            for (auto& v : probe) CHECK(ord(v, f * g) == ord(v, f) + ord(v, g));
        }
        // principal divisors have degree zero (asserted internally too)
        int dcases = 0;
        while (dcases < 60) {
            FuncElement f = random_line_product(E, rng);
            if (f.is_zero()) continue;
            ++dcases;
            CHECK(divisor(f).degree() == 0);
        }
    }
}

TEST_CASE("reduce is a ring homomorphism on the valuation ring") {
    auto F5 = prime_field(5);
    auto P1 = p1_curve(F5);
    auto E = elliptic_curve(F5, ff_zero(F5), ff_one(F5));
    DetRng rng(777);
    std::vector<Place> probes_p1 = {Place::p1_inf(P1),
                                    Place::p1_finite(P1, kpoly(F5, {0, 1})),
                                    Place::p1_finite(P1, kpoly(F5, {1, 1, 1}))};
    std::vector<Place> probes_e = {Place::ell_o(E)};
    for (i64 c : {0, 1, 4})
        for (auto& v : ell_places_above(E, kpoly(F5, {-c, 1}))) probes_e.push_back(v);

    int done = 0;
    while (done < 300) {
        FuncElement f = random_p1_element(P1, rng), g = random_p1_element(P1, rng);
        if (f.is_zero() || g.is_zero()) continue;
        ++done;
        for (auto& v : probes_p1) {
            if (ord(v, f) < 0 || ord(v, g) < 0) continue;
            CHECK(reduce_at(v, f + g) == reduce_at(v, f) + reduce_at(v, g));
            CHECK(reduce_at(v, f * g) == reduce_at(v, f) * reduce_at(v, g));
        }
    }
    done = 0;
    while (done < 120) {
        FuncElement f = random_ell_element(E, rng), g = random_ell_element(E, rng);
        if (f.is_zero() || g.is_zero()) continue;
        bool fg_zero = (f + g).is_zero();
        ++done;
        for (auto& v : probes_e) {
            if (ord(v, f) < 0 || ord(v, g) < 0) continue;
            if (!fg_zero) CHECK(reduce_at(v, f + g) == reduce_at(v, f) + reduce_at(v, g));
            CHECK(reduce_at(v, f * g) == reduce_at(v, f) * reduce_at(v, g));
        }
    }
}

TEST_CASE("pic0: P1 trivial; elliptic matches independent point count") {
    auto F5 = prime_field(5);
    CHECK(pic0_structure(p1_curve(F5)).is_trivial());

    for (auto [a, b] : std::vector<std::pair<i64, i64>>{{1, 0}, {0, 1}}) {
        auto E = elliptic_curve(F5, ff_from_int(F5, a), ff_from_int(F5, b));
        // independent oracle: #E(k) = q + 1 + sum_x chi(x^3 + a x + b)
        i64 count = 5 + 1;
        for (i64 xi = 0; xi < 5; ++xi) {
            FFElement r = poly_eval(E->rhs_poly(), ff_from_int(F5, xi));
            if (r.is_zero()) continue;
            FFElement s;
            count += ff_sqrt(r, s) ? 1 : -1;
        }
        FinAbGroup g = pic0_structure(E);
        CHECK(g.order() == count);
    }
    // y^2 = x^3 + x over F_5 has full 2-torsion: Z/2 x Z/2
    auto E2 = elliptic_curve(F5, ff_one(F5), ff_zero(F5));
    CHECK(pic0_structure(E2).str() == "Z/2 x Z/2");
}

TEST_CASE("Abel: principal divisors are trivial in pic0") {
    auto F5 = prime_field(5);
    for (auto [a, b] : std::vector<std::pair<i64, i64>>{{0, 1}, {1, 0}}) {
        auto E = elliptic_curve(F5, ff_from_int(F5, a), ff_from_int(F5, b));
        DetRng rng(4242 + a);
        int done = 0;
        while (done < 100) {
            FuncElement f = random_line_product(E, rng);
            if (f.is_zero()) continue;
            ++done;
            Divisor D = divisor(f);
            CHECK(divisor_class_sum(D).infinity);
        }
    }
}

TEST_CASE("uniformizers have ord one") {
    auto F5 = prime_field(5);
    auto P1 = p1_curve(F5);
    auto E = elliptic_curve(F5, ff_zero(F5), ff_one(F5));
    std::vector<Place> all = {Place::p1_inf(P1), Place::p1_finite(P1, kpoly(F5, {0, 1})),
                              Place::p1_finite(P1, kpoly(F5, {2, 0, 1}))};
    for (auto& v : all) CHECK(ord(v, uniformizer(v)) == 1);

    std::vector<Place> ev = {Place::ell_o(E)};
    for (i64 c : {0, 1, 4})
        for (auto& v : ell_places_above(E, kpoly(F5, {-c, 1}))) ev.push_back(v);
    // include a degree-2 place
    for (auto& pi : monic_irreducibles(F5, 2)) {
        for (auto& v : ell_places_above(E, pi)) ev.push_back(v);
        break;
    }
    for (auto& v : ev) CHECK(ord(v, uniformizer(v)) == 1);
}

TEST_CASE("inert, split and ramified places on y^2 = x^3 + 1 / F_5") {
    auto F5 = prime_field(5);
    auto E = elliptic_curve(F5, ff_zero(F5), ff_one(F5));
    // x = 0: R = 1 is a square -> two split places
    auto v0 = ell_places_above(E, kpoly(F5, {0, 1}));
    CHECK(v0.size() == 2);
    CHECK(v0[0].degree == 1);
    // x = 4: R = 64 + 1 = 65 = 0 -> ramified
    auto v4 = ell_places_above(E, kpoly(F5, {-4, 1}));
    CHECK(v4.size() == 1);
    CHECK(v4[0].ycase == Place::YCase::Zero);
    // x = 1: R = 2, a non-residue -> inert, degree 2
    auto v1 = ell_places_above(E, kpoly(F5, {-1, 1}));
    CHECK(v1.size() == 1);
    CHECK(v1[0].ycase == Place::YCase::Inert);
    CHECK(v1[0].degree == 2);
    ResidueData rd = residue_data(v1[0]);
    CHECK(rd.Kv->q == 25);
    CHECK(ell_on_curve(EllContextF{rd.iota.map(E->a), rd.iota.map(E->b)}, place_point(v1[0], rd)));
}
