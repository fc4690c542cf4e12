#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "kwb/detrng.hpp"
#include "kwb/embed.hpp"
#include "kwb/ff.hpp"
#include "kwb/poly.hpp"

using namespace kwb;

TEST_CASE("make_extension basic shapes") {
    auto F2 = make_extension(2, {1, 1});  // F_2[x]/(x+1) = F_2 with m = 1
    CHECK(F2->q == 2);
    CHECK(F2->m == 1);

    // x^2+1 is irreducible mod 3 since -1 is a non-residue
    auto F9 = make_extension(3, {1, 0, 1});
    CHECK(F9->q == 9);

    CHECK_THROWS_AS(make_extension(4, {0, 1}), NotPrime);
    // x^2 - 1 factors; the witness names a factor
    CHECK_THROWS_AS(make_extension(3, {2, 0, 1}), Reducible);
    try {
        make_extension(3, {2, 0, 1});
    } catch (const Reducible& e) {
        CHECK(std::string(e.what()).find("[") != std::string::npos);
    }
}

TEST_CASE("arith in small fields") {
    auto F5 = prime_field(5);
    CHECK(ff_inv(ff_from_int(F5, 2)) == ff_from_int(F5, 3));

    auto F9 = make_extension(3, {1, 0, 1});
    FFElement x = ff_gen(F9);
    CHECK(x * x == ff_from_int(F9, 2));  // x^2 = -1

    // pow(3, -1) in F_7: exhaustive oracle first
    auto F7 = prime_field(7);
    i64 expected = -1;
    for (i64 c = 1; c < 7; ++c)
        if (3 * c % 7 == 1) expected = c;
    CHECK(expected == 5);
    CHECK(ff_pow(ff_from_int(F7, 3), -1) == ff_from_int(F7, expected));

    CHECK_THROWS_AS(ff_inv(ff_zero(F5)), DivisionByZero);
    CHECK_THROWS_AS(ff_from_int(F5, 1) + ff_from_int(F7, 1), FieldMismatch);
}

TEST_CASE("frobenius is a field automorphism with order m") {
    for (i64 q : {4, 8, 9, 16, 25, 27, 49, 64, 81, 121, 125, 128, 243, 256}) {
        auto F = canonical_field(q);
        // bijectivity via orbit closure and additivity/multiplicativity spot set
        for (i64 i = 0; i < F->q; ++i) {
            FFElement a = ff_from_index(F, i);
            FFElement fa = a;
            for (int k = 0; k < F->m; ++k) fa = frobenius(fa);
            CHECK(fa == a);  // m-th iterate is the identity
        }
        for (i64 i = 0; i < std::min<i64>(F->q, 20); ++i)
            for (i64 j = 0; j < std::min<i64>(F->q, 20); ++j) {
                FFElement a = ff_from_index(F, i), b = ff_from_index(F, j);
                CHECK(frobenius(a + b) == frobenius(a) + frobenius(b));
                CHECK(frobenius(a * b) == frobenius(a) * frobenius(b));
            }
    }
}

TEST_CASE("group structure and discrete logs") {
    auto F2 = prime_field(2);
    auto [g2, n2] = group_structure(F2);
    CHECK(n2 == 1);
    CHECK(g2.is_one());

    auto F5 = prime_field(5);
    auto [g5, n5] = group_structure(F5);
    CHECK(n5 == 4);
    CHECK(ff_order(g5) == 4);  // exhaustive order oracle inside ff_order

    auto F9 = make_extension(3, {1, 0, 1});
    auto [g9, n9] = group_structure(F9);
    CHECK(n9 == 8);
    CHECK(ff_order(g9) == 8);
    CHECK(ff_pow(g9, 4) == ff_from_int(F9, 2));  // g^4 = -1

    // dlog round trip
    for (i64 i = 1; i < F9->q; ++i) {
        FFElement a = ff_from_index(F9, i);
        CHECK(ff_pow(g9, F9->dlog_of(a)) == a);
    }
}

TEST_CASE("embed: prime subfield fixed, identity, distinguished root") {
    auto F3 = prime_field(3);
    auto F9 = make_extension(3, {1, 0, 1});
    CHECK(embed(F3, F9, ff_from_int(F3, 2)) == ff_from_int(F9, 2));
    CHECK(embed(F9, F9, ff_gen(F9)) == ff_gen(F9));

    // F_4 -> F_16: image of a generator of F_4^x has order 3
    auto F4 = canonical_field(4);
    auto F16 = canonical_field(16);
    FFElement g = ff_primitive(F4);
    CHECK(ff_order(g) == 3);
    FFElement img = embed(F4, F16, g);
    CHECK(ff_order(img) == 3);

    // oracle: the image must be a root of F_4's modulus in F_16 (by search)
    bool is_root = false;
    Poly mod16(F16);
    {
        std::vector<FFElement> mc;
        for (i64 a : F4->modulus) mc.push_back(ff_from_int(F16, a));
        mod16 = Poly(F16, mc);
    }
    FFElement gen_img = distinguished_embedding(F4, F16).gen_image;
    is_root = poly_eval(mod16, gen_img).is_zero();
    CHECK(is_root);

    CHECK_THROWS_AS(embed(F9, F16, ff_gen(F9)), NoEmbedding);

    // embedding is a ring homomorphism
    Embedding e = distinguished_embedding(F4, F16);
    for (i64 i = 0; i < 4; ++i)
        for (i64 j = 0; j < 4; ++j) {
            FFElement a = ff_from_index(F4, i), b = ff_from_index(F4, j);
            CHECK(e.map(a + b) == e.map(a) + e.map(b));
            CHECK(e.map(a * b) == e.map(a) * e.map(b));
        }
}

TEST_CASE("norm: examples and exhaustive properties") {
    auto F3 = prime_field(3);
    auto F9 = make_extension(3, {1, 0, 1});
    // norm of a generator of F_9^x generates F_3^x, i.e. equals 2; brute
    // force surjectivity over all 8 units
    FFElement g = ff_primitive(F9);
    CHECK(norm(F3, F9, g) == ff_from_int(F3, 2));
    int hit_two = 0, hit_one = 0;
    for (i64 i = 1; i < 9; ++i) {
        FFElement n = norm(F3, F9, ff_from_index(F9, i));
        if (n == ff_from_int(F3, 2)) ++hit_two;
        if (n.is_one()) ++hit_one;
    }
    CHECK(hit_two == 4);
    CHECK(hit_one == 4);

    // relative degree 1
    for (i64 i = 0; i < 9; ++i)
        CHECK(norm(F9, F9, ff_from_index(F9, i)) == ff_from_index(F9, i));

    // transitivity on F_2 < F_4 < F_16, all 16 elements, via tower embeddings
    auto F2 = prime_field(2);
    auto F4 = canonical_field(4);
    auto F16 = canonical_field(16);
    Tower tw({F2, F4, F16});
    Embedding e24 = tw.embedding(1, 2), e12 = tw.embedding(0, 1), e14 = tw.embedding(0, 2);
    for (i64 i = 1; i < 16; ++i) {
        FFElement x = ff_from_index(F16, i);
        CHECK(norm_along(e14, x) == norm_along(e12, norm_along(e24, x)));
    }

    // multiplicativity, exhaustive on fields of order <= 64
    for (i64 q : {4, 9, 16, 25, 64}) {
        auto big = canonical_field(q);
        auto sub = prime_field(big->p);
        Embedding e = distinguished_embedding(sub, big);
        for (i64 i = 1; i < q; ++i)
            for (i64 j = 1; j < std::min<i64>(q, 20); ++j) {
                FFElement a = ff_from_index(big, i), b = ff_from_index(big, j);
                CHECK(norm_along(e, a * b) == norm_along(e, a) * norm_along(e, b));
            }
    }

    // norm surjectivity onto the subfield unit group for every tested pair
    for (auto [qs, qb] : std::vector<std::pair<i64, i64>>{{2, 4}, {2, 16}, {3, 9}, {4, 16}, {5, 25}, {8, 64}}) {
        auto sub = canonical_field(qs);
        auto big = canonical_field(qb);
        Embedding e = distinguished_embedding(sub, big);
        std::vector<int> hits(static_cast<size_t>(qs), 0);
        for (i64 i = 1; i < qb; ++i) hits[static_cast<size_t>(norm_along(e, ff_from_index(big, i)).index())]++;
        for (i64 u = 1; u < qs; ++u) CHECK(hits[static_cast<size_t>(ff_from_index(sub, u).index())] > 0);
    }
}

TEST_CASE("tower embeddings compose on the nose") {
    // towers inside F_{2^12} and F_{3^6}
    {
        auto F2 = prime_field(2);
        auto F4 = canonical_field(4);
        auto F16 = canonical_field(16);
        auto F4096 = canonical_field(4096);
        Tower tw({F2, F4, F16, F4096});
        for (size_t i = 0; i < 4; ++i)
            for (size_t j = i; j < 4; ++j)
                for (size_t k = j; k < 4; ++k) {
                    Embedding eij = tw.embedding(i, j), ejk = tw.embedding(j, k), eik = tw.embedding(i, k);
                    for (i64 idx = 0; idx < tw.fields[i]->q; ++idx) {
                        FFElement x = ff_from_index(tw.fields[i], idx);
                        CHECK(ejk.map(eij.map(x)) == eik.map(x));
                    }
                }
    }
    {
        auto F3 = prime_field(3);
        auto F9 = canonical_field(9);
        auto F729 = canonical_field(729);
        Tower tw({F3, F9, F729});
        for (i64 idx = 0; idx < 9; ++idx) {
            FFElement x = ff_from_index(F9, idx);
            CHECK(tw.embedding(1, 2).map(x) ==
                  tw.embedding(1, 2).map(x));  // determinism
            CHECK(tw.embedding(0, 2).map(ff_from_index(F3, idx % 3)) ==
                  tw.embedding(1, 2).map(tw.embedding(0, 1).map(ff_from_index(F3, idx % 3))));
        }
    }
}

TEST_CASE("flatten builds residue-field presentations") {
    auto F5 = prime_field(5);
    // F_5[u]/(u^2+2) ~ F_25
    Poly h(F5, {ff_from_int(F5, 2), ff_zero(F5), ff_one(F5)});
    REQUIRE(poly_irreducible(h));
    Flattened fl = flatten(F5, h);
    CHECK(fl.field->q == 25);
    // root satisfies u^2 = -2
    CHECK(fl.root * fl.root == fl.from_base.map(ff_from_int(F5, -2)));
    // embedding is a homomorphism
    for (i64 i = 0; i < 5; ++i)
        for (i64 j = 0; j < 5; ++j)
            CHECK(fl.from_base.map(ff_from_int(F5, i) * ff_from_int(F5, j)) ==
                  fl.from_base.map(ff_from_int(F5, i)) * fl.from_base.map(ff_from_int(F5, j)));

    // two-step flatten: F_25[v]/(v^2 - nonresidue) ~ F_625
    FFElement nr = ff_zero(fl.field);
    for (i64 i = 1; i < 25; ++i) {
        FFElement cand = ff_from_index(fl.field, i);
        FFElement s;
        if (!ff_sqrt(cand, s)) {
            nr = cand;
            break;
        }
    }
    REQUIRE(!nr.is_zero());
    Poly h2(fl.field, {-nr, ff_zero(fl.field), ff_one(fl.field)});
    Flattened fl2 = flatten(fl.field, h2);
    CHECK(fl2.field->q == 625);
    CHECK(fl2.root * fl2.root == fl2.from_base.map(nr));
}

TEST_CASE("canonical extensions and k-compatible isomorphisms") {
    auto F4 = canonical_field(4);
    Flattened e2 = canonical_extension(F4, 2);
    CHECK(e2.field->q == 16);
    // the canonical F_16 and the ladder F_16 are isomorphic over F_4
    auto F16 = canonical_field(16);
    Embedding iota_canon = distinguished_embedding(F4, F16);
    Embedding iso = k_compatible_iso(e2.field, e2.from_base, F16, iota_canon);
    FFElement g = ff_primitive(F4);
    CHECK(iso.map(e2.from_base.map(g)) == iota_canon.map(g));
}

TEST_CASE("sqrt via dlog tables") {
    for (i64 q : {9, 25, 27, 49, 16, 64}) {
        auto F = canonical_field(q);
        int squares = 0;
        for (i64 i = 0; i < q; ++i) {
            FFElement a = ff_from_index(F, i);
            FFElement s;
            if (ff_sqrt(a, s)) {
                ++squares;
                CHECK(s * s == a);
            }
        }
        if (F->p == 2)
            CHECK(squares == q);  // squaring bijective in char 2
        else
            CHECK(squares == (q - 1) / 2 + 1);
    }
}

TEST_CASE("polynomial factorization and roots agree with brute force") {
    for (i64 q : {2, 3, 5, 9}) {
        auto F = canonical_field(q);
        DetRng rng_free(0);  // deterministic coefficients below instead
        for (int trial = 0; trial < 40; ++trial) {
            // pseudo-random poly of degree <= 6 from a fixed pattern
            std::vector<FFElement> c;
            for (int i = 0; i <= 2 + (trial % 5); ++i)
                c.push_back(ff_from_index(F, (trial * 31 + i * 17 + 7) % q));
            Poly f(F, c);
            if (f.is_zero() || f.deg() < 1) continue;
            auto roots = poly_roots(f);
            // brute-force roots
            std::vector<FFElement> brute;
            for (i64 i = 0; i < q; ++i) {
                FFElement a = ff_from_index(F, i);
                if (poly_eval(f, a).is_zero()) brute.push_back(a);
            }
            REQUIRE(roots.size() == brute.size());
            for (size_t i = 0; i < roots.size(); ++i) CHECK(roots[i] == brute[i]);

            // factorization reassembles
            auto fac = poly_factor(f);
            Poly prod = poly_const(f.lead());
            for (auto& [pi, mult] : fac) {
                CHECK(poly_irreducible(pi));
                for (int e = 0; e < mult; ++e) prod = prod * pi;
            }
            CHECK(prod == f);
        }
    }
}
