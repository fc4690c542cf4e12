// Finitely generated abelian groups, exactly: arbitrary-precision integer
// matrices, Smith normal form with transform audit, Hermite form, quotient
// presentations with projection maps, and tensor products of finite groups
// with a multilinear evaluator. Pivoting always picks the smallest nonzero
// absolute value to limit entry growth.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"

namespace kwb {

using bigint = boost::multiprecision::cpp_int;

class IntMatrix {
public:
    size_t rows = 0, cols = 0;
    std::vector<bigint> a;  // row-major

    IntMatrix() = default;
    IntMatrix(size_t r, size_t c) : rows(r), cols(c), a(r * c) {}

    static IntMatrix identity(size_t n) {
        IntMatrix m(n, n);
        for (size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }
    static IntMatrix from_rows(const std::vector<std::vector<bigint>>& rows_in) {
        size_t r = rows_in.size();
        size_t c = r ? rows_in[0].size() : 0;
        IntMatrix m(r, c);
        for (size_t i = 0; i < r; ++i) {
            check(rows_in[i].size() == c, "ragged rows");
            for (size_t j = 0; j < c; ++j) m.at(i, j) = rows_in[i][j];
        }
        return m;
    }

    bigint& at(size_t i, size_t j) { return a[i * cols + j]; }
    const bigint& at(size_t i, size_t j) const { return a[i * cols + j]; }

    IntMatrix transposed() const {
        IntMatrix m(cols, rows);
        for (size_t i = 0; i < rows; ++i)
            for (size_t j = 0; j < cols; ++j) m.at(j, i) = at(i, j);
        return m;
    }

    friend bool operator==(const IntMatrix& x, const IntMatrix& y) {
        return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
    }

    friend IntMatrix operator*(const IntMatrix& x, const IntMatrix& y) {
        check(x.cols == y.rows, "matrix product shape mismatch");
        IntMatrix z(x.rows, y.cols);
        for (size_t i = 0; i < x.rows; ++i)
            for (size_t k = 0; k < x.cols; ++k) {
                const bigint& v = x.at(i, k);
                if (v == 0) continue;
                for (size_t j = 0; j < y.cols; ++j) z.at(i, j) += v * y.at(k, j);
            }
        return z;
    }
};

// Fraction-free determinant (Bareiss). Exact; O(n^3) big-int operations.
inline bigint det_bareiss(IntMatrix m) {
    check(m.rows == m.cols, "determinant of non-square matrix");
    size_t n = m.rows;
    if (n == 0) return 1;
    bigint prev = 1;
    int sign = 1;
    for (size_t k = 0; k + 1 < n; ++k) {
        if (m.at(k, k) == 0) {
            size_t piv = k + 1;
            while (piv < n && m.at(piv, k) == 0) ++piv;
            if (piv == n) return 0;
            for (size_t j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(piv, j));
            sign = -sign;
        }
        for (size_t i = k + 1; i < n; ++i)
            for (size_t j = k + 1; j < n; ++j) {
                bigint num = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
                m.at(i, j) = num / prev;  // exact by Bareiss
            }
        prev = m.at(k, k);
    }
    return sign > 0 ? m.at(n - 1, n - 1) : -m.at(n - 1, n - 1);
}

struct SnfResult {
    IntMatrix U, D, V;  // U*M*V = D, U and V unimodular
};

struct SnfLeftResult {
    IntMatrix U, D;  // U*A*(column ops) = D; U unimodular
};

namespace detail {

// Core diagonalization of A with row transforms recorded in U (when
// track_u) and column transforms recorded in V (when track_v). Pivot:
// smallest nonzero absolute value in the remaining submatrix.
inline void snf_core(IntMatrix& A, IntMatrix* U, IntMatrix* V) {
    const size_t n = A.rows, mcols = A.cols;
    auto row_swap = [&](size_t i, size_t j) {
        if (i == j) return;
        for (size_t c = 0; c < mcols; ++c) std::swap(A.at(i, c), A.at(j, c));
        if (U)
            for (size_t c = 0; c < U->cols; ++c) std::swap(U->at(i, c), U->at(j, c));
    };
    auto col_swap = [&](size_t i, size_t j) {
        if (i == j) return;
        for (size_t r = 0; r < n; ++r) std::swap(A.at(r, i), A.at(r, j));
        if (V)
            for (size_t r = 0; r < V->rows; ++r) std::swap(V->at(r, i), V->at(r, j));
    };
    auto row_addmul = [&](size_t dst, size_t src, const bigint& f) {  // row dst += f * row src
        if (f == 0) return;
        for (size_t c = 0; c < mcols; ++c) A.at(dst, c) += f * A.at(src, c);
        if (U)
            for (size_t c = 0; c < U->cols; ++c) U->at(dst, c) += f * U->at(src, c);
    };
    auto col_addmul = [&](size_t dst, size_t src, const bigint& f) {
        if (f == 0) return;
        for (size_t r = 0; r < n; ++r) A.at(r, dst) += f * A.at(r, src);
        if (V)
            for (size_t r = 0; r < V->rows; ++r) V->at(r, dst) += f * V->at(r, src);
    };
    auto row_negate = [&](size_t i) {
        for (size_t c = 0; c < mcols; ++c) A.at(i, c) = -A.at(i, c);
        if (U)
            for (size_t c = 0; c < U->cols; ++c) U->at(i, c) = -U->at(i, c);
    };

    size_t t = 0;
    const size_t tmax = std::min(n, mcols);
    while (t < tmax) {
        // locate smallest nonzero |entry| in A[t.., t..]
        size_t pi = t, pj = t;
        bool found = false;
        for (size_t i = t; i < n; ++i)
            for (size_t j = t; j < mcols; ++j) {
                const bigint& v = A.at(i, j);
                if (v == 0) continue;
                if (!found || abs(v) < abs(A.at(pi, pj))) {
                    pi = i;
                    pj = j;
                    found = true;
                }
            }
        if (!found) break;
        row_swap(t, pi);
        col_swap(t, pj);
        if (A.at(t, t) < 0) row_negate(t);

        bool clean = true;
        for (size_t i = t + 1; i < n; ++i) {
            if (A.at(i, t) == 0) continue;
            bigint f = -(A.at(i, t) / A.at(t, t));
            row_addmul(i, t, f);
            if (A.at(i, t) != 0) clean = false;
        }
        for (size_t j = t + 1; j < mcols; ++j) {
            if (A.at(t, j) == 0) continue;
            bigint f = -(A.at(t, j) / A.at(t, t));
            col_addmul(j, t, f);
            if (A.at(t, j) != 0) clean = false;
        }
        if (!clean) continue;  // remainder became the new smaller pivot candidate
        ++t;
    }

    // enforce the divisibility chain on the diagonal
    for (size_t i = 0; i + 1 < tmax; ++i) {
        if (A.at(i, i) == 0) continue;
        for (size_t j = i + 1; j < tmax; ++j) {
            if (A.at(j, j) % A.at(i, i) == 0) continue;
            // bring column j into column i and rediagonalize the 2x2 block
            col_addmul(i, j, 1);
            // now A[i,i] = d_i, A[j,i] = d_j; clear with gcd steps
            while (A.at(j, i) != 0) {
                bigint di = A.at(i, i), dj = A.at(j, i);
                if (abs(dj) < abs(di)) {
                    row_swap(i, j);
                    continue;
                }
                row_addmul(j, i, -(dj / di));
            }
            // column i now has the gcd at (i,i); clear the stray (i,j) entry
            check(A.at(i, j) % A.at(i, i) == 0, "divisibility fix: non-divisible remainder");
            col_addmul(j, i, -(A.at(i, j) / A.at(i, i)));
        }
        if (A.at(i, i) < 0) row_negate(i);
    }
    for (size_t i = 0; i < tmax; ++i)
        if (A.at(i, i) < 0) row_negate(i);
}

}  // namespace detail

// Column-style Hermite normal form (lattice generated by the columns).
// Returns an n x n lower-triangular-ish canonical basis matrix with zero
// columns dropped; used for lattice equality tests.
inline IntMatrix hnf_cols(IntMatrix A) {
    const size_t n = A.rows;
    size_t col = 0;
    for (size_t row = 0; row < n && col < A.cols; ++row) {
        // find pivot column with minimal |entry| in this row at or after col
        for (;;) {
            size_t best = A.cols;
            for (size_t j = col; j < A.cols; ++j) {
                if (A.at(row, j) == 0) continue;
                if (best == A.cols || abs(A.at(row, j)) < abs(A.at(row, best))) best = j;
            }
            if (best == A.cols) break;  // row is zero from col onward
            for (size_t r = 0; r < n; ++r) std::swap(A.at(r, col), A.at(r, best));
            bool reduced = true;
            for (size_t j = col + 1; j < A.cols; ++j) {
                if (A.at(row, j) == 0) continue;
                bigint f = -(A.at(row, j) / A.at(row, col));
                for (size_t r = 0; r < n; ++r) A.at(r, j) += f * A.at(r, col);
                if (A.at(row, j) != 0) reduced = false;
            }
            if (reduced) break;
        }
        if (A.at(row, col) == 0) continue;
        if (A.at(row, col) < 0)
            for (size_t r = 0; r < n; ++r) A.at(r, col) = -A.at(r, col);
        // reduce earlier columns against this pivot
        for (size_t j = 0; j < col; ++j) {
            bigint f = A.at(row, j) / A.at(row, col);
            if (A.at(row, j) < 0 && A.at(row, j) % A.at(row, col) != 0) f -= 1;
            if (f == 0) continue;
            for (size_t r = 0; r < n; ++r) A.at(r, j) -= f * A.at(r, col);
        }
        ++col;
    }
    IntMatrix H(n, col);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < col; ++j) H.at(i, j) = A.at(i, j);
    return H;
}

// Smith normal form with both transforms; asserts U*M*V = D and |det| = 1 on
// every call (matrices at this scale keep the audit cheap).
inline SnfResult snf(const IntMatrix& M) {
    SnfResult r{IntMatrix::identity(M.rows), M, IntMatrix::identity(M.cols)};
    detail::snf_core(r.D, &r.U, &r.V);
    check(r.U * M * r.V == r.D, "snf round-trip failed");
    check(abs(det_bareiss(r.U)) == 1, "snf: U not unimodular");
    check(abs(det_bareiss(r.V)) == 1, "snf: V not unimodular");
    for (size_t i = 0; i + 1 < std::min(r.D.rows, r.D.cols); ++i) {
        const bigint& di = r.D.at(i, i);
        const bigint& dj = r.D.at(i + 1, i + 1);
        check(dj == 0 || (di != 0 && dj % di == 0), "snf: divisibility chain broken");
    }
    return r;
}

// Left-transform-only Smith form for wide relation matrices (n generators x
// m relation columns with m >> n). V is not formed; instead the result is
// audited rigorously by lattice equality: colspan(U*A) == colspan(D) via
// Hermite forms, plus a Bareiss determinant check on U.
inline SnfLeftResult snf_left(const IntMatrix& A) {
    SnfLeftResult r{IntMatrix::identity(A.rows), A};
    detail::snf_core(r.D, &r.U, nullptr);
    check(abs(det_bareiss(r.U)) == 1, "snf_left: U not unimodular");
    check(hnf_cols(r.U * A) == hnf_cols(r.D), "snf_left: column lattice mismatch");
    for (size_t i = 0; i + 1 < std::min(r.D.rows, r.D.cols); ++i) {
        const bigint& di = r.D.at(i, i);
        const bigint& dj = r.D.at(i + 1, i + 1);
        check(dj == 0 || (di != 0 && dj % di == 0), "snf_left: divisibility chain broken");
    }
    return r;
}

class FinAbGroup;

// Element of a presented group: torsion coordinates reduced mod d_i, then
// free coordinates.
class GroupElement {
public:
    const FinAbGroup* G = nullptr;
    std::vector<bigint> coords;

    bool is_zero() const {
        for (const auto& c : coords)
            if (c != 0) return false;
        return true;
    }
    friend bool operator==(const GroupElement& x, const GroupElement& y);
};

// Invariant-factor presentation d_1 | d_2 | ... | d_s (each >= 2) plus free
// rank. Optionally carries the projection from an ambient generator lattice.
class FinAbGroup {
public:
    std::vector<bigint> torsion;  // divisibility chain, entries >= 2
    size_t free_rank = 0;

    // projection data (optional): y = U x, keep rows listed in kept_rows,
    // reduce row i mod torsion[i] for the torsion block.
    IntMatrix U;
    std::vector<size_t> kept_rows;

    FinAbGroup() = default;
    FinAbGroup(std::vector<bigint> t, size_t fr) : torsion(std::move(t)), free_rank(fr) {
        for (size_t i = 0; i < torsion.size(); ++i) {
            check(torsion[i] >= 2, "invariant factor < 2");
            if (i) check(torsion[i] % torsion[i - 1] == 0, "divisibility chain broken");
        }
    }

    size_t coord_count() const { return torsion.size() + free_rank; }
    bool is_trivial() const { return torsion.empty() && free_rank == 0; }
    bool is_finite() const { return free_rank == 0; }
    bigint order() const {
        check(is_finite(), "order of infinite group");
        bigint n = 1;
        for (const auto& d : torsion) n *= d;
        return n;
    }

    GroupElement element(std::vector<bigint> raw) const {
        check(raw.size() == coord_count(), "coordinate length mismatch");
        for (size_t i = 0; i < torsion.size(); ++i) {
            raw[i] %= torsion[i];
            if (raw[i] < 0) raw[i] += torsion[i];
        }
        return {this, std::move(raw)};
    }
    GroupElement zero() const { return element(std::vector<bigint>(coord_count(), 0)); }

    GroupElement add(const GroupElement& x, const GroupElement& y) const {
        require_mine(x);
        require_mine(y);
        std::vector<bigint> c(coord_count());
        for (size_t i = 0; i < c.size(); ++i) c[i] = x.coords[i] + y.coords[i];
        return element(std::move(c));
    }
    GroupElement neg(const GroupElement& x) const {
        require_mine(x);
        std::vector<bigint> c(coord_count());
        for (size_t i = 0; i < c.size(); ++i) c[i] = -x.coords[i];
        return element(std::move(c));
    }
    GroupElement scale(const bigint& n, const GroupElement& x) const {
        require_mine(x);
        std::vector<bigint> c(coord_count());
        for (size_t i = 0; i < c.size(); ++i) c[i] = n * x.coords[i];
        return element(std::move(c));
    }

    // Project an ambient lattice vector through the stored transform.
    GroupElement project(const std::vector<bigint>& x) const {
        check(U.rows > 0 || coord_count() == 0, "no projection data");
        check(x.size() == U.cols, "ambient vector length mismatch");
        std::vector<bigint> c;
        c.reserve(coord_count());
        for (size_t r : kept_rows) {
            bigint acc = 0;
            for (size_t j = 0; j < U.cols; ++j)
                if (x[j] != 0) acc += U.at(r, j) * x[j];
            c.push_back(std::move(acc));
        }
        return element(std::move(c));
    }

    bool same_shape(const FinAbGroup& o) const {
        return torsion == o.torsion && free_rank == o.free_rank;
    }

    std::string str() const {
        if (is_trivial()) return "0";
        std::string s;
        for (const auto& d : torsion) {
            if (!s.empty()) s += " x ";
            s += "Z/" + d.str();
        }
        if (free_rank) {
            if (!s.empty()) s += " x ";
            s += free_rank == 1 ? "Z" : "Z^" + std::to_string(free_rank);
        }
        return s;
    }

private:
    void require_mine(const GroupElement& x) const {
        if (x.G != this) throw GroupMismatch("element of a different group");
    }
};

inline bool operator==(const GroupElement& x, const GroupElement& y) {
    if (x.G != y.G) throw GroupMismatch("comparing elements of different groups");
    return x.coords == y.coords;
}
inline bool operator!=(const GroupElement& x, const GroupElement& y) { return !(x == y); }

// Z^n modulo the row space of `relations` (each row has n entries), with the
// projection taking ambient vectors to normalized coordinates. Every
// relation row is checked to project to zero.
inline FinAbGroup quotient(size_t n, const std::vector<std::vector<bigint>>& relations) {
    IntMatrix A(n, relations.size());  // relations as columns
    for (size_t j = 0; j < relations.size(); ++j) {
        check(relations[j].size() == n, "relation length mismatch");
        for (size_t i = 0; i < n; ++i) A.at(i, j) = relations[j][i];
    }
    SnfLeftResult s = snf_left(A);
    FinAbGroup G;
    std::vector<bigint> diag(n, 0);
    for (size_t i = 0; i < std::min(A.rows, A.cols); ++i) diag[i] = s.D.at(i, i);
    for (size_t i = 0; i < n; ++i) {
        if (diag[i] == 1) continue;  // dead coordinate
        if (diag[i] == 0) {
            ++G.free_rank;
            G.kept_rows.push_back(i);
        } else {
            G.torsion.push_back(diag[i]);
            G.kept_rows.push_back(i);
        }
    }
    // torsion rows come first in kept_rows; reorder so torsion precedes free
    std::stable_sort(G.kept_rows.begin(), G.kept_rows.end(), [&](size_t x, size_t y) {
        bool xt = diag[x] != 0, yt = diag[y] != 0;
        if (xt != yt) return xt;
        return x < y;
    });
    G.U = s.U;
    FinAbGroup checked(std::move(G.torsion), G.free_rank);
    checked.U = std::move(G.U);
    checked.kept_rows = std::move(G.kept_rows);
    for (const auto& row : relations)
        check(checked.project(row).is_zero(), "relation row does not project to zero");
    return checked;
}

// Pure-tensor evaluator for a tensor product of finite groups: factor i has
// cyclic decomposition torsion_i; the tensor group is the direct sum over
// index tuples J of Z/gcd(d_{1,J_1},...,d_{r,J_r}), and a pure tensor with
// cyclic coordinates (c_1,...,c_r) lands at prod_i c_{i,J_i} in slot J.
class TensorGroup {
public:
    FinAbGroup shape;                        // trivial factors dropped
    std::vector<std::vector<bigint>> factor_torsion;
    std::vector<std::vector<size_t>> tuples;  // index tuples, lexicographic

    static TensorGroup make(const std::vector<FinAbGroup>& factors) {
        std::vector<std::vector<bigint>> raw;
        for (const auto& f : factors) {
            if (!f.is_finite()) throw InfiniteFactor("tensor factor has positive free rank");
            raw.push_back(f.torsion);
        }
        return make_raw(std::move(raw));
    }

    // Factors given as arbitrary cyclic decompositions (no divisor-chain
    // requirement), e.g. the concatenated torus/elliptic pieces of a group
    // of points.
    static TensorGroup make_raw(std::vector<std::vector<bigint>> factors) {
        TensorGroup t;
        t.factor_torsion = std::move(factors);
        std::vector<size_t> idx(t.factor_torsion.size(), 0);
        std::vector<bigint> mods;
        bool any_empty = t.factor_torsion.empty();
        for (const auto& f : t.factor_torsion)
            if (f.empty()) any_empty = true;
        if (!any_empty) {
            for (bool done = false; !done;) {
                bigint g = 0;
                for (size_t i = 0; i < t.factor_torsion.size(); ++i)
                    g = boost::multiprecision::gcd(g, t.factor_torsion[i][idx[i]]);
                if (g > 1) {
                    t.tuples.push_back(idx);
                    mods.push_back(g);
                }
                size_t pos = t.factor_torsion.size();
                for (;;) {
                    if (pos == 0) {
                        done = true;
                        break;
                    }
                    --pos;
                    if (++idx[pos] < t.factor_torsion[pos].size()) break;
                    idx[pos] = 0;
                }
            }
        }
        // shape as a plain direct sum (not renormalized to a divisor chain:
        // one coordinate per surviving index tuple, in lexicographic order)
        t.shape = FinAbGroup();
        t.shape.torsion = mods;
        t.shape.free_rank = 0;
        return t;
    }

    size_t coord_count() const { return tuples.size(); }

    // coordinates of the pure tensor of elements given by their cyclic
    // coordinate vectors (one vector per factor)
    std::vector<bigint> pure(const std::vector<std::vector<bigint>>& cyc) const {
        check(cyc.size() == factor_torsion.size(), "tensor arity mismatch");
        for (size_t i = 0; i < cyc.size(); ++i)
            check(cyc[i].size() == factor_torsion[i].size(), "cyclic coordinate mismatch");
        std::vector<bigint> out(tuples.size(), 0);
        for (size_t s = 0; s < tuples.size(); ++s) {
            bigint prod = 1;
            for (size_t i = 0; i < cyc.size(); ++i) prod *= cyc[i][tuples[s][i]];
            bigint mod = tensor_mod(s);
            prod %= mod;
            if (prod < 0) prod += mod;
            out[s] = prod;
        }
        return out;
    }

    bigint tensor_mod(size_t slot) const { return shape.torsion[slot]; }
};

// Solve B y = w exactly over the integers (B square nonsingular, columns as
// basis vectors), through a precomputed Smith form of B. Throws when the
// system has no integral solution.
inline std::vector<bigint> solve_in_basis(const SnfResult& s, const std::vector<bigint>& w) {
    const size_t n = s.D.rows;
    check(s.D.cols == n && w.size() == n, "solve_in_basis: shape mismatch");
    std::vector<bigint> uw(n, 0);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) uw[i] += s.U.at(i, j) * w[j];
    std::vector<bigint> z(n, 0);
    for (size_t i = 0; i < n; ++i) {
        const bigint& d = s.D.at(i, i);
        check(d != 0, "solve_in_basis: singular basis");
        check(uw[i] % d == 0, "solve_in_basis: no integral solution");
        z[i] = uw[i] / d;
    }
    std::vector<bigint> y(n, 0);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) y[i] += s.V.at(i, j) * z[j];
    return y;
}

// Invariant factors of a direct sum given as arbitrary cyclic orders.
inline FinAbGroup normalize_cyclic_sum(const std::vector<bigint>& orders) {
    std::vector<std::vector<bigint>> rels;
    size_t n = orders.size();
    for (size_t i = 0; i < n; ++i) {
        std::vector<bigint> row(n, 0);
        row[i] = orders[i];
        rels.push_back(std::move(row));
    }
    FinAbGroup g = quotient(n, rels);
    return {g.torsion, g.free_rank};
}

}  // namespace kwb
