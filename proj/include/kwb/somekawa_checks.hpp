// Verification layers on top of a built truncation: the r = 1 norm-collapse
// isomorphism check, the zero-cycle symbol map, the two-fiber homotopy
// equality, and the Bloch-group comparison with its stabilization report.
#pragma once

#include "somekawa.hpp"

namespace kwb {

// ------------------------------------------------------- r = 1 collapse ---

struct CollapseReport {
    bool rows_die = true;
    bool surjective = false;
    bool order_match = false;
    std::string witness;  // provenance of the first failing row, if any
    FinAbGroup target;    // structure of G(k)
    bool ok() const { return rows_die && surjective && order_match; }
};

// For r = 1: the map sending {g}_{E_m} to Tr/N_{E_m/k}(g) must kill every
// relation row and induce an isomorphism of the quotient with G(k).
inline CollapseReport check_r1_collapse(const SomekawaApprox& A) {
    check(A.cfg.groups.size() == 1, "collapse check needs r = 1");
    CollapseReport rep;
    SlotGroup target(A.cfg.groups[0], A.cfg.k, identity_embedding(A.cfg.k));
    rep.target = normalize_cyclic_sum(target.cyc);
    const size_t tc = target.cyc.size();

    // image coordinates of every lattice generator
    std::vector<std::vector<bigint>> img(A.n_coords, std::vector<bigint>(tc, 0));
    for (const Block& blk : A.blocks) {
        std::vector<GPoint> gens = blk.slots[0].gens();
        EllContextF ctx{};
        if (A.cfg.groups[0]->has_elliptic()) ctx = blk.slots[0].curveE->ctx();
        for (size_t s = 0; s < blk.tg.coord_count(); ++s) {
            // r = 1: tensor tuple s corresponds to cyclic index tuples[s][0]
            const GPoint& g = gens[blk.tg.tuples[s][0]];
            GPoint down = g_norm(blk.iota, g, ctx);
            down.G = target.G;
            img[blk.offset + s] = target.coords(down);
        }
    }
    auto apply = [&](const std::vector<bigint>& row) {
        std::vector<bigint> acc(tc, 0);
        for (size_t s = 0; s < row.size(); ++s) {
            if (row[s] == 0) continue;
            for (size_t j = 0; j < tc; ++j) acc[j] += row[s] * img[s][j];
        }
        for (size_t j = 0; j < tc; ++j) {
            acc[j] %= target.cyc[j];
            if (acc[j] < 0) acc[j] += target.cyc[j];
        }
        return acc;
    };
    for (size_t i = 0; i < A.rows.size(); ++i) {
        std::vector<bigint> v = apply(A.rows[i]);
        bool zero = true;
        for (const auto& x : v)
            if (x != 0) zero = false;
        if (!zero) {
            rep.rows_die = false;
            rep.witness = A.row_log[i];
            return rep;
        }
    }

    // surjectivity: the quotient of G(k) by the image subgroup is trivial
    std::vector<std::vector<bigint>> rel;
    for (size_t j = 0; j < tc; ++j) {
        std::vector<bigint> row(tc, 0);
        row[j] = target.cyc[j];
        rel.push_back(std::move(row));
    }
    for (size_t s = 0; s < A.n_coords; ++s) rel.push_back(img[s]);
    rep.surjective = quotient(tc, rel).is_trivial();

    bigint gk_order = 1;
    for (const auto& d : target.cyc) gk_order *= d;
    rep.order_match = A.quotient.is_finite() && A.quotient.order() == gk_order;
    return rep;
}

// ------------------------------------------------------- zero-cycle map ---

// The class of a closed point of C_1 x ... x C_r with residue field L,
// presented by its coordinate sequence of Jacobian points over L. Points
// with any coordinate at the base point map to zero through multilinearity.
inline GroupElement cycle_symbol(const SomekawaApprox& A, const SymbolTerm& t) {
    return symbol_eval(A, t);
}

// ---------------------------------------------------- phi_0 = phi_1 -------

// An integral curve Z with a finite surjective map p to the affine line,
// presented either as the line itself (Z = A^1, p a nonconstant polynomial)
// or as the affine part of an elliptic curve (p a nonconstant function).
// Slot values f_i are G_i-points of the function field of Z.
struct PhiInstance {
    CurvePtr Z;              // P1 over k, or an elliptic part over k
    FuncElement p;
    std::vector<GPointK> f;  // one per slot
    std::string name;
};

struct PhiResult {
    bool equal = false;
    GroupElement phi0, phi1;
    std::string fibers0, fibers1;
};

namespace sk_detail {

inline std::pair<GroupElement, std::string> phi_side(const SomekawaApprox& A,
                                                     const PhiInstance& inst, int j) {
    const FieldPtr& k = A.cfg.k;
    FuncElement hj = inst.p - fe_const(inst.Z, ff_from_int(k, j));
    if (hj.is_zero()) throw UnsupportedShape("p is the constant " + std::to_string(j));
    GroupElement acc = A.quotient.zero();
    std::string log;
    for (auto& [v, mult] : divisor(hj, max_place_degree(k)).coeffs) {
        if (mult <= 0) continue;  // fiber = zeros of p - j
        int D = v.degree;
        if (D > A.cfg.d)
            throw DegreeOverflow("fiber point of degree " + std::to_string(D));
        ResidueData rd = residue_data(v);
        SymbolTerm term;
        term.E = rd.Kv;
        term.k_to_E = rd.iota;
        term.coeff = mult;
        for (size_t i = 0; i < inst.f.size(); ++i) {
            GPoint red;
            try {
                red = reduce_point(v, inst.f[i]);
            } catch (const NotIntegral&) {
                throw UnsupportedShape("slot " + std::to_string(i) + " not integral on the fiber");
            }
            term.points.push_back(std::move(red));
        }
        acc = A.quotient.add(acc, symbol_eval(A, term));
        log += (log.empty() ? "" : " + ") + std::to_string(mult) + "*" + v.str();
    }
    return {acc, log.empty() ? "(empty fiber)" : log};
}

}  // namespace sk_detail

inline PhiResult phi_homotopy_check(const SomekawaApprox& A, const PhiInstance& inst) {
    check(inst.f.size() == A.cfg.groups.size(), "slot arity mismatch");
    if (inst.p.is_constant()) throw UnsupportedShape("p must be nonconstant");
    PhiResult r;
    auto [p0, log0] = sk_detail::phi_side(A, inst, 0);
    auto [p1, log1] = sk_detail::phi_side(A, inst, 1);
    r.phi0 = p0;
    r.phi1 = p1;
    r.fibers0 = log0;
    r.fibers1 = log1;
    r.equal = (p0 == p1);
    return r;
}

// ------------------------------------------------ Bloch group comparison ---

struct BlochReport {
    FinAbGroup V;
    size_t places = 0;
    size_t pairs_admitted = 0;
    size_t pairs_rejected = 0;
    bool norm_kernel_ok = true;   // every residue vector lies in ker(sum Norm)
    bool map_well_defined = false;
    bool map_surjective = false;
    std::string witness;
};

namespace sk_detail {

struct BlochAmbient {
    CurvePtr E;
    FieldPtr k;
    std::vector<Place> places;             // degree <= d, O included, sorted
    std::vector<ResidueData> rds;          // parallel
    std::vector<bigint> unit_orders;       // q^deg - 1 per place
    std::vector<bigint> norm_dlogs;        // dlog_k of Norm(primitive)
    IntMatrix kernel_basis;                // X x X, columns span ker(sum Norm)
    SnfResult kernel_snf;                  // of kernel_basis, for solving

    size_t index_of(const Place& v) const {
        for (size_t i = 0; i < places.size(); ++i)
            if (places[i] == v) return i;
        throw DegreeOverflow("place outside the truncation: " + v.str());
    }
};

inline BlochAmbient bloch_ambient(const CurvePtr& E, int d) {
    BlochAmbient amb;
    amb.E = E;
    amb.k = E->k;
    d = std::min(d, max_place_degree(E->k));
    std::vector<Place> all;
    all.push_back(Place::ell_o(E));
    for (int e = 1; e <= d; ++e)
        for (auto& pi : monic_irreducibles(E->k, e))
            for (auto& v : ell_places_above(E, pi))
                if (v.degree <= d) all.push_back(v);
    std::sort(all.begin(), all.end());
    amb.places = std::move(all);
    const bigint M = amb.k->q - 1;
    std::vector<bigint> n_row;
    for (const auto& v : amb.places) {
        ResidueData rd = residue_data(v);
        amb.unit_orders.push_back(bigint(rd.Kv->q - 1));
        FFElement nrm = norm_along(rd.iota, ff_primitive(rd.Kv));
        amb.norm_dlogs.push_back(amb.k->q == 2 ? bigint(0) : bigint(amb.k->dlog_of(nrm)));
        amb.rds.push_back(std::move(rd));
    }
    // kernel of Z^X -> Z/M, v maps to sum n_x v_x
    const size_t X = amb.places.size();
    IntMatrix nmat(1, X);
    for (size_t i = 0; i < X; ++i) nmat.at(0, i) = amb.norm_dlogs[i];
    SnfResult s = snf(nmat);
    bigint g = s.D.at(0, 0);
    bigint scale = (g == 0) ? bigint(1) : bigint(M / boost::multiprecision::gcd(g, M));
    amb.kernel_basis = IntMatrix(X, X);
    for (size_t i = 0; i < X; ++i)
        for (size_t j = 0; j < X; ++j)
            amb.kernel_basis.at(i, j) = s.V.at(i, j) * (j == 0 ? scale : 1);
    amb.kernel_snf = snf(amb.kernel_basis);
    return amb;
}

inline bool in_kernel(const BlochAmbient& amb, const std::vector<bigint>& w) {
    bigint acc = 0;
    for (size_t i = 0; i < w.size(); ++i) acc += amb.norm_dlogs[i] * w[i];
    return acc % (amb.k->q - 1) == 0;
}

inline std::vector<bigint> kernel_coords(const BlochAmbient& amb, const std::vector<bigint>& w) {
    return solve_in_basis(amb.kernel_snf, w);
}

}  // namespace sk_detail

// Truncated Bloch group of an elliptic curve: residue-field units at places
// of degree <= d, restricted to the kernel of the summed norm, modulo the
// tame residues of a bounded family of function pairs. When a build of the
// (E, G_m) truncation is supplied, the natural comparison map is evaluated:
// well-definedness (all relation rows die) and surjectivity are reported.
inline BlochReport bloch_v_approx(const CurvePtr& E, int d, int constant_cap,
                                  const SomekawaApprox* A = nullptr) {
    check(E->is_elliptic(), "bloch comparison needs an elliptic curve");
    const FieldPtr& k = E->k;
    sk_detail::BlochAmbient amb = sk_detail::bloch_ambient(E, d);
    const size_t X = amb.places.size();
    BlochReport rep;
    rep.places = X;

    // relations: unit orders, then residue vectors of the pair family
    std::vector<std::vector<bigint>> rows;
    for (size_t i = 0; i < X; ++i) {
        std::vector<bigint> w(X, 0);
        w[i] = amb.unit_orders[i];
        rows.push_back(sk_detail::kernel_coords(amb, w));
    }
    std::vector<FuncElement> family;
    {
        for (const auto& c : sk_detail::sampled_elements(k, constant_cap, true))
            family.push_back(fe_var(E) - fe_const(E, c));
        auto lam = sk_detail::sampled_elements(k, std::max(1, constant_cap / 2), true);
        auto mu = sk_detail::sampled_elements(k, std::max(1, constant_cap / 2), true);
        for (const auto& l : lam)
            for (const auto& m : mu)
                family.push_back(fe_y(E) - (fe_const(E, l) * fe_var(E) + fe_const(E, m)));
        family.push_back(fe_const(E, ff_primitive(k)));
    }
    for (size_t a = 0; a < family.size(); ++a)
        for (size_t b = 0; b < family.size(); ++b) {
            try {
                MilnorSymbol sym(E, {family[a], family[b]});
                std::vector<bigint> w(X, 0);
                for (const Place& v : symbol_support(sym, d)) {
                    size_t i = amb.index_of(v);
                    FFElement r = tame2(v, family[a], family[b]);
                    w[i] = r.is_one() ? bigint(0) : bigint(amb.rds[i].Kv->dlog_of(r));
                }
                if (!sk_detail::in_kernel(amb, w)) {
                    rep.norm_kernel_ok = false;
                    rep.witness = "residue vector outside the norm kernel";
                    continue;
                }
                rows.push_back(sk_detail::kernel_coords(amb, w));
                ++rep.pairs_admitted;
            } catch (const DegreeOverflow&) {
                ++rep.pairs_rejected;
            }
        }
    rep.V = quotient(X, rows);

    if (!A) return rep;

    // comparison map from the (E, G_m) truncation
    check(A->cfg.groups.size() == 2, "comparison expects an (E, G_m) build");
    check(A->cfg.groups[0]->has_elliptic() && A->cfg.groups[0]->torus_rank == 0 &&
              A->cfg.groups[0]->elliptic->same_as(*E) && A->cfg.groups[1]->torus_rank == 1 &&
              !A->cfg.groups[1]->has_elliptic(),
          "comparison expects slots (E, G_m)");

    size_t o_index = amb.index_of(Place::ell_o(E));
    std::vector<GroupElement> images;
    images.reserve(A->n_coords);
    bool well_defined = true;
    std::string witness;
    std::vector<std::vector<bigint>> image_vectors;
    for (const Block& blk : A->blocks) {
        std::vector<GPoint> egens = blk.slots[0].gens();
        for (size_t s = 0; s < blk.tg.coord_count(); ++s) {
            const GPoint& Pg = egens[blk.tg.tuples[s][0]];
            FFElement u = ff_primitive(blk.E);  // the torus generator of the tuple
            std::vector<bigint> w(X, 0);
            // locate the closed point under Pg and push the normed unit there
            check(!Pg.ab.infinity, "slot generator at the base point");
            // minimal polynomial of x(P) over k via the Frobenius orbit
            std::vector<FFElement> orbit;
            FFElement cur = Pg.ab.x;
            do {
                orbit.push_back(cur);
                cur = ff_pow(cur, k->q);
            } while (cur != Pg.ab.x);
            Poly pi = poly_one(blk.E);
            for (const auto& root : orbit) pi = pi * poly_linear(root);
            std::vector<FFElement> down;
            for (int i = 0; i <= pi.deg(); ++i) down.push_back(blk.iota.preimage(pi.coeff(i)));
            Poly pik(k, down);
            // find the place above pi_k carrying (x(P), y(P))
            bool placed = false;
            for (const Place& v : ell_places_above(E, pik)) {
                if (v.degree > d) continue;
                ResidueData rd = residue_data(v);
                for (const FFElement& root : embedding_roots(rd.Kv, blk.E)) {
                    Embedding j(rd.Kv, blk.E, root);
                    if (!(j.map(rd.iota.map(ff_gen(k))) == blk.iota.map(ff_gen(k)))) continue;
                    if (!(j.map(rd.xbar) == Pg.ab.x) || !(j.map(rd.ybar) == Pg.ab.y)) continue;
                    size_t xi = amb.index_of(v);
                    FFElement val = norm_along(j, u);
                    if (!val.is_one()) w[xi] += bigint(rd.Kv->dlog_of(val));
                    placed = true;
                    break;
                }
                if (placed) break;
            }
            if (!placed) throw DegreeOverflow("image place beyond the truncation");
            FFElement tot = norm_along(blk.iota, u);
            if (!tot.is_one() && k->q > 2) w[o_index] -= bigint(k->dlog_of(tot));
            check(sk_detail::in_kernel(amb, w), "comparison image outside the norm kernel");
            image_vectors.push_back(sk_detail::kernel_coords(amb, w));
            images.push_back(rep.V.project(image_vectors.back()));
        }
    }
    // every relation row of the build must map to zero in V
    for (size_t i = 0; i < A->rows.size(); ++i) {
        GroupElement acc = rep.V.zero();
        for (size_t s = 0; s < A->n_coords; ++s) {
            if (A->rows[i][s] == 0) continue;
            acc = rep.V.add(acc, rep.V.scale(A->rows[i][s], images[s]));
        }
        if (!acc.is_zero()) {
            well_defined = false;
            witness = A->row_log[i];
            break;
        }
    }
    rep.map_well_defined = well_defined;
    rep.witness = witness;

    // surjectivity: V modulo the image subgroup is trivial
    std::vector<std::vector<bigint>> rel = rows;
    for (auto& iv : image_vectors) rel.push_back(iv);
    rep.map_surjective = quotient(X, rel).is_trivial();
    return rep;
}

struct StabilizationReport {
    FinAbGroup build_lo, build_hi;
    FinAbGroup v_lo, v_hi;
    bool build_stable = false;
    bool v_stable = false;
};

inline StabilizationReport stabilization_report(const TruncationConfig& base_cfg,
                                                const CurvePtr& E, int d_lo, int d_hi,
                                                int constant_cap) {
    StabilizationReport rep;
    TruncationConfig lo = base_cfg, hi = base_cfg;
    lo.d = d_lo;
    lo.p1_levels.clear();
    hi.d = d_hi;
    hi.p1_levels.clear();
    SomekawaApprox Alo = somekawa_build(lo);
    SomekawaApprox Ahi = somekawa_build(hi);
    rep.build_lo = FinAbGroup(Alo.quotient.torsion, Alo.quotient.free_rank);
    rep.build_hi = FinAbGroup(Ahi.quotient.torsion, Ahi.quotient.free_rank);
    rep.build_stable = rep.build_lo.same_shape(rep.build_hi);
    rep.v_lo = bloch_v_approx(E, d_lo, constant_cap).V;
    rep.v_hi = bloch_v_approx(E, d_hi, constant_cap).V;
    rep.v_stable = rep.v_lo.same_shape(rep.v_hi);
    return rep;
}

}  // namespace kwb
