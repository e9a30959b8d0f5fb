#include "jlcalc/exactla.hpp"

#include <algorithm>
#include <cstdlib>
#include <utility>

namespace jlcalc::exactla {

using std::swap;

IntMatrix IntMatrix::identity(long n) {
    IntMatrix m(n, n);
    for (long i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::transpose() const {
    IntMatrix t(cols_, rows_);
    for (long r = 0; r < rows_; ++r)
        for (long c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

bool IntMatrix::is_zero() const {
    for (const auto& x : a_)
        if (x != 0) return false;
    return true;
}

std::vector<Int> IntMatrix::col(long c) const {
    std::vector<Int> v(rows_);
    for (long r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
}

void IntMatrix::set_col(long c, const std::vector<Int>& v) {
    for (long r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
}

IntMatrix IntMatrix::from_cols(long rows, const std::vector<std::vector<Int>>& cols) {
    IntMatrix m(rows, static_cast<long>(cols.size()));
    for (long c = 0; c < m.cols(); ++c) m.set_col(c, cols[c]);
    return m;
}

IntMatrix IntMatrix::cols_slice(long c0, long c1) const {
    IntMatrix m(rows_, c1 - c0);
    for (long r = 0; r < rows_; ++r)
        for (long c = c0; c < c1; ++c) m(r, c - c0) = (*this)(r, c);
    return m;
}

IntMatrix IntMatrix::hconcat(const IntMatrix& a, const IntMatrix& b) {
    if (a.rows() != b.rows()) throw SizeMismatch("hconcat: row counts differ");
    IntMatrix m(a.rows(), a.cols() + b.cols());
    for (long r = 0; r < a.rows(); ++r) {
        for (long c = 0; c < a.cols(); ++c) m(r, c) = a(r, c);
        for (long c = 0; c < b.cols(); ++c) m(r, a.cols() + c) = b(r, c);
    }
    return m;
}

IntMatrix multiply_serial(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols() != b.rows()) throw SizeMismatch("multiply: inner dimensions differ");
    IntMatrix r(a.rows(), b.cols());
    Int t;
    for (long j = 0; j < b.cols(); ++j)
        for (long k = 0; k < b.rows(); ++k) {
            const Int& bkj = b(k, j);
            if (bkj == 0) continue;
            for (long i = 0; i < a.rows(); ++i) {
                if (a(i, k) == 0) continue;
                t = a(i, k) * bkj;
                r(i, j) += t;
            }
        }
    return r;
}

IntMatrix multiply(const IntMatrix& a, const IntMatrix& b, Exec policy) {
    if (policy == Exec::Serial) return multiply_serial(a, b);
    if (a.cols() != b.rows()) throw SizeMismatch("multiply: inner dimensions differ");
    IntMatrix r(a.rows(), b.cols());
    par_for(b.cols(), policy, [&](long j) {
        Int t;
        for (long k = 0; k < b.rows(); ++k) {
            const Int& bkj = b(k, j);
            if (bkj == 0) continue;
            for (long i = 0; i < a.rows(); ++i) {
                if (a(i, k) == 0) continue;
                t = a(i, k) * bkj;
                r(i, j) += t;
            }
        }
    });
    return r;
}

std::vector<Int> mat_apply(const IntMatrix& a, const std::vector<Int>& x) {
    if (a.cols() != static_cast<long>(x.size())) throw SizeMismatch("apply: dimension mismatch");
    std::vector<Int> y(a.rows());
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j)
            if (a(i, j) != 0 && x[j] != 0) y[i] += a(i, j) * x[j];
    return y;
}

IntMatrix add(const IntMatrix& a, const IntMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw SizeMismatch("add: shapes differ");
    IntMatrix r(a.rows(), a.cols());
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) + b(i, j);
    return r;
}

IntMatrix negate(const IntMatrix& a) {
    IntMatrix r(a.rows(), a.cols());
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j) r(i, j) = -a(i, j);
    return r;
}

std::vector<Int> SmithDecomposition::invariant_factors() const {
    std::vector<Int> d;
    for (long i = 0; i < rank; ++i) d.push_back(S(i, i));
    return d;
}

namespace {

// Smith normal form working state. Row/column updates within one pivot step
// are independent, which is where the OpenMP path earns its keep; pivot
// selection itself stays sequential and deterministic (smallest absolute
// value, ties by lowest index) so both policies produce identical output.
struct SnfWork {
    IntMatrix S, U, V, Uinv, Vinv;
    Exec policy;

    void row_axpy_batch(long t, const std::vector<std::pair<long, Int>>& ops, long c_start = 0) {
        // R_r += q * R_t  on S and U;  Uinv col t -= sum q * col r.
        // Columns of S left of c_start are already eliminated for all rows involved.
        long n = S.cols(), m = U.cols();
        par_for(static_cast<long>(ops.size()), policy, [&](long idx) {
            auto& [r, q] = ops[idx];
            Int t2;
            for (long c = c_start; c < n; ++c)
                if (S(t, c) != 0) { t2 = q * S(t, c); S(r, c) += t2; }
            for (long c = 0; c < m; ++c)
                if (U(t, c) != 0) { t2 = q * U(t, c); U(r, c) += t2; }
        });
        if (Uinv.rows() > 0)
            par_for(Uinv.rows(), policy, [&](long i) {
                Int acc = 0, t2;
                for (auto& [r, q] : ops)
                    if (Uinv(i, r) != 0) { t2 = q * Uinv(i, r); acc += t2; }
                Uinv(i, t) -= acc;
            });
    }

    void col_axpy_batch(long t, const std::vector<std::pair<long, Int>>& ops, long r_start = 0) {
        // C_c += q * C_t  on S and V;  Vinv row t -= sum q * row c.
        // Rows of S above r_start are already eliminated for the columns involved.
        long m = S.rows(), nv = V.rows();
        par_for(static_cast<long>(ops.size()), policy, [&](long idx) {
            auto& [c, q] = ops[idx];
            Int t2;
            for (long r = r_start; r < m; ++r)
                if (S(r, t) != 0) { t2 = q * S(r, t); S(r, c) += t2; }
            for (long r = 0; r < nv; ++r)
                if (V(r, t) != 0) { t2 = q * V(r, t); V(r, c) += t2; }
        });
        if (Vinv.rows() > 0)
            par_for(Vinv.cols(), policy, [&](long j) {
                Int acc = 0, t2;
                for (auto& [c, q] : ops)
                    if (Vinv(c, j) != 0) { t2 = q * Vinv(c, j); acc += t2; }
                Vinv(t, j) -= acc;
            });
    }

    void swap_rows(long i, long j) {
        if (i == j) return;
        for (long c = 0; c < S.cols(); ++c) swap(S(i, c), S(j, c));
        for (long c = 0; c < U.cols(); ++c) swap(U(i, c), U(j, c));
        for (long r = 0; r < Uinv.rows(); ++r) swap(Uinv(r, i), Uinv(r, j));
    }
    void swap_cols(long i, long j) {
        if (i == j) return;
        for (long r = 0; r < S.rows(); ++r) swap(S(r, i), S(r, j));
        for (long r = 0; r < V.rows(); ++r) swap(V(r, i), V(r, j));
        for (long c = 0; c < Vinv.cols(); ++c) swap(Vinv(i, c), Vinv(j, c));
    }
    void negate_row(long i) {
        for (long c = 0; c < S.cols(); ++c) S(i, c) = -S(i, c);
        for (long c = 0; c < U.cols(); ++c) U(i, c) = -U(i, c);
        for (long r = 0; r < Uinv.rows(); ++r) Uinv(r, i) = -Uinv(r, i);
    }
    void add_row_into(long dst, long src) {  // R_dst += R_src
        row_axpy_batch(src, {{dst, Int(1)}});
    }
};

} // namespace

SmithDecomposition smith_normal_form(const IntMatrix& A, Exec policy, SnfOptions opts) {
    const long m = A.rows(), n = A.cols();
    SnfWork w{A, IntMatrix::identity(m),
              opts.track_V ? IntMatrix::identity(n) : IntMatrix(0, 0),
              opts.track_Uinv ? IntMatrix::identity(m) : IntMatrix(0, 0),
              opts.track_Vinv ? IntMatrix::identity(n) : IntMatrix(0, 0), policy};

    long t = 0;
    while (t < m && t < n) {
        // deterministic pivot: smallest |entry| in trailing submatrix, lowest
        // index wins. A unit entry can never be beaten, so the row-major scan
        // stops at the first one.
        long pr = -1, pc = -1;
        for (long r = t; r < m && !(pr >= 0 && mpz_cmpabs_ui(w.S(pr, pc).get_mpz_t(), 1) == 0); ++r)
            for (long c = t; c < n; ++c) {
                const Int& x = w.S(r, c);
                if (x == 0) continue;
                if (pr < 0 || mpz_cmpabs(x.get_mpz_t(), w.S(pr, pc).get_mpz_t()) < 0) {
                    pr = r;
                    pc = c;
                    if (mpz_cmpabs_ui(x.get_mpz_t(), 1) == 0) break;
                }
            }
        if (pr < 0) break;
        w.swap_rows(t, pr);
        w.swap_cols(t, pc);
        if (w.S(t, t) < 0) w.negate_row(t);

        bool dirty_col = false, dirty_row = false;
        {
            std::vector<std::pair<long, Int>> ops;
            for (long r = t + 1; r < m; ++r) {
                if (w.S(r, t) == 0) continue;
                Int q;
                mpz_tdiv_q(q.get_mpz_t(), w.S(r, t).get_mpz_t(), w.S(t, t).get_mpz_t());
                if (q != 0) ops.emplace_back(r, -q);
            }
            if (!ops.empty()) w.row_axpy_batch(t, ops, t);
            for (long r = t + 1; r < m; ++r)
                if (w.S(r, t) != 0) { dirty_col = true; break; }
        }
        {
            std::vector<std::pair<long, Int>> ops;
            for (long c = t + 1; c < n; ++c) {
                if (w.S(t, c) == 0) continue;
                Int q;
                mpz_tdiv_q(q.get_mpz_t(), w.S(t, c).get_mpz_t(), w.S(t, t).get_mpz_t());
                if (q != 0) ops.emplace_back(c, -q);
            }
            if (!ops.empty()) w.col_axpy_batch(t, ops, t);
            for (long c = t + 1; c < n; ++c)
                if (w.S(t, c) != 0) { dirty_row = true; break; }
        }
        if (dirty_col || dirty_row) continue;  // smaller remainder became the next pivot

        // pivot must divide the whole trailing block before we move on
        bool clean = true;
        for (long r = t + 1; r < m && clean; ++r)
            for (long c = t + 1; c < n; ++c)
                if (w.S(r, c) % w.S(t, t) != 0) {
                    w.add_row_into(t, r);
                    clean = false;
                    break;
                }
        if (clean) ++t;
    }

    // divisibility chain on the diagonal
    long rank = t;
    for (bool again = true; again;) {
        again = false;
        for (long i = 0; i + 1 < rank; ++i) {
            if (w.S(i + 1, i + 1) % w.S(i, i) == 0) continue;
            // fold [ a 0 ; 0 b ] into [ gcd 0 ; 0 lcm ] by local row/col euclid
            w.add_row_into(i, i + 1);  // row i becomes (a, b)
            while (w.S(i, i + 1) != 0) {
                Int q;
                mpz_tdiv_q(q.get_mpz_t(), w.S(i, i + 1).get_mpz_t(), w.S(i, i).get_mpz_t());
                if (q != 0) w.col_axpy_batch(i, {{i + 1, -q}});
                if (w.S(i, i + 1) == 0) break;
                w.swap_cols(i, i + 1);
            }
            // now (i,i) = gcd-ish; clear column below
            while (w.S(i + 1, i) != 0) {
                Int q;
                mpz_tdiv_q(q.get_mpz_t(), w.S(i + 1, i).get_mpz_t(), w.S(i, i).get_mpz_t());
                if (q != 0) w.row_axpy_batch(i, {{i + 1, -q}});
                if (w.S(i + 1, i) == 0) break;
                w.swap_rows(i, i + 1);
            }
            if (w.S(i, i) < 0) w.negate_row(i);
            if (w.S(i + 1, i + 1) < 0) w.negate_row(i + 1);
            again = true;
        }
    }
    for (long i = 0; i < rank; ++i)
        if (w.S(i, i) < 0) w.negate_row(i);

    SmithDecomposition out;
    out.S = std::move(w.S);
    out.U = std::move(w.U);
    out.V = std::move(w.V);
    out.Uinv = std::move(w.Uinv);
    out.Vinv = std::move(w.Vinv);
    out.rank = rank;
    return out;
}

IntMatrix integer_kernel(const IntMatrix& A, Exec policy) {
    if (A.cols() == 0) return IntMatrix(0, 0);
    SmithDecomposition d = smith_normal_form(A, policy, SnfOptions{true, false, false});
    return d.V.cols_slice(d.rank, A.cols());
}

long rational_rank(const IntMatrix& A, Exec policy) {
    RatMatrix m = RatMatrix::from_int(A);
    return rank(m, policy);
}

bool solvable(const SmithDecomposition& snf, const std::vector<Int>& b) {
    const long m = snf.U.rows();
    if (static_cast<long>(b.size()) != m) throw SizeMismatch("solvable: rhs dimension");
    std::vector<Int> ub = mat_apply(snf.U, b);
    for (long i = 0; i < m; ++i) {
        if (i < snf.rank) {
            if (ub[i] % snf.S(i, i) != 0) return false;
        } else if (ub[i] != 0) {
            return false;
        }
    }
    return true;
}

std::optional<std::vector<Int>> solve(const SmithDecomposition& snf, const std::vector<Int>& b) {
    const long m = snf.U.rows(), n = snf.V.rows();
    if (static_cast<long>(b.size()) != m) throw SizeMismatch("solve: rhs dimension");
    std::vector<Int> ub = mat_apply(snf.U, b);
    std::vector<Int> y(n);
    for (long i = 0; i < m; ++i) {
        if (i < snf.rank) {
            if (i < n) {
                Int q, r;
                mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), ub[i].get_mpz_t(), snf.S(i, i).get_mpz_t());
                if (r != 0) return std::nullopt;
                y[i] = q;
            }
        } else if (ub[i] != 0) {
            return std::nullopt;
        }
    }
    return mat_apply(snf.V, y);
}

std::optional<std::vector<Int>> solve(const IntMatrix& A, const std::vector<Int>& b, Exec policy) {
    return solve(smith_normal_form(A, policy, SnfOptions{true, false, false}), b);
}

IntMatrix column_lattice_basis(const IntMatrix& G, Exec policy) {
    if (G.cols() == 0) return IntMatrix(G.rows(), 0);
    SmithDecomposition d = smith_normal_form(G, policy, SnfOptions{false, true, false});
    IntMatrix basis(G.rows(), d.rank);
    for (long j = 0; j < d.rank; ++j)
        for (long i = 0; i < G.rows(); ++i) basis(i, j) = d.S(j, j) * d.Uinv(i, j);
    return basis;
}

IntMatrix preimage_lattice(const IntMatrix& A, const IntMatrix& B, Exec policy) {
    if (B.cols() == 0) return integer_kernel(A, policy);
    IntMatrix combined = IntMatrix::hconcat(A, negate(B));
    IntMatrix K = integer_kernel(combined, policy);
    IntMatrix G(A.cols(), K.cols());
    for (long r = 0; r < A.cols(); ++r)
        for (long c = 0; c < K.cols(); ++c) G(r, c) = K(r, c);
    return column_lattice_basis(G, policy);
}

void RowEchelon::add_row(std::vector<Int> row) {
    if (static_cast<long>(row.size()) != width_) throw SizeMismatch("RowEchelon: row width");
    while (true) {
        long p = -1;
        for (long j = 0; j < width_; ++j)
            if (row[j] != 0) { p = j; break; }
        if (p < 0) return;
        long slot = -1;
        for (size_t i = 0; i < rows_.size(); ++i)
            if (pivot_col_[i] == p) { slot = static_cast<long>(i); break; }
        if (slot < 0) {
            if (row[p] < 0)
                for (auto& x : row) x = -x;
            // keep rows ordered by pivot column
            size_t at = 0;
            while (at < rows_.size() && pivot_col_[at] < p) ++at;
            rows_.insert(rows_.begin() + at, std::move(row));
            pivot_col_.insert(pivot_col_.begin() + at, p);
            return;
        }
        auto& er = rows_[slot];
        Int g, u, v;
        mpz_gcdext(g.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t(), er[p].get_mpz_t(), row[p].get_mpz_t());
        Int a = er[p] / g, b = row[p] / g;
        for (long j = p; j < width_; ++j) {
            Int ne = u * er[j] + v * row[j];
            Int nr = a * row[j] - b * er[j];
            er[j] = ne;
            row[j] = nr;
        }
        // er now has pivot g at p; row has 0 at p; continue reducing row
    }
}

IntMatrix RowEchelon::as_columns() const {
    IntMatrix m(width_, static_cast<long>(rows_.size()));
    for (size_t i = 0; i < rows_.size(); ++i)
        for (long j = 0; j < width_; ++j) m(j, static_cast<long>(i)) = rows_[i][j];
    return m;
}

void PresentedModule::minimize(Exec policy) const {
    if (minimized_) return;
    snf_ = smith_normal_form(rels_, policy, SnfOptions::u_only());
    minimized_ = true;
}

const SmithDecomposition& PresentedModule::snf() const {
    minimize();
    return snf_;
}

long PresentedModule::free_rank() const {
    minimize();
    return gens_ - snf_.rank;
}

std::vector<Int> PresentedModule::torsion() const {
    minimize();
    std::vector<Int> t;
    for (long i = 0; i < snf_.rank; ++i)
        if (snf_.S(i, i) != 1) t.push_back(snf_.S(i, i));
    return t;
}

std::vector<Int> PresentedModule::normal_form(const std::vector<Int>& x) const {
    if (static_cast<long>(x.size()) != gens_) throw SizeMismatch("normal_form: element dimension");
    minimize();
    std::vector<Int> y = mat_apply(snf_.U, x);
    for (long i = 0; i < snf_.rank; ++i) {
        Int r;
        mpz_fdiv_r(r.get_mpz_t(), y[i].get_mpz_t(), snf_.S(i, i).get_mpz_t());
        y[i] = r;
    }
    return y;
}

bool PresentedModule::is_zero(const std::vector<Int>& x) const {
    auto y = normal_form(x);
    return std::all_of(y.begin(), y.end(), [](const Int& v) { return v == 0; });
}

bool PresentedModule::equal(const std::vector<Int>& x, const std::vector<Int>& y) const {
    std::vector<Int> d(x.size());
    for (size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
    return is_zero(d);
}

void check_well_defined(const IntMatrix& f, const PresentedModule& source,
                        const PresentedModule& target, Exec policy) {
    if (f.cols() != source.generators() || f.rows() != target.generators())
        throw SizeMismatch("map shape does not match presentations");
    if (source.relations().cols() == 0) return;
    IntMatrix frel = multiply(f, source.relations(), policy);
    if (target.relations().cols() == 0) {
        if (!frel.is_zero())
            throw IllDefinedMap("image of a source relation is nonzero in a free target");
        return;
    }
    const SmithDecomposition& tsnf = target.snf();
    IntMatrix ufrel = multiply(tsnf.U, frel, policy);
    for (long c = 0; c < ufrel.cols(); ++c)
        for (long i = 0; i < ufrel.rows(); ++i) {
            bool ok = (i < tsnf.rank) ? (ufrel(i, c) % tsnf.S(i, i) == 0) : (ufrel(i, c) == 0);
            if (!ok) throw IllDefinedMap("image of a source relation leaves the target relation lattice");
        }
}

PresentedKernel presented_map_kernel(const IntMatrix& f, const PresentedModule& source,
                                     const PresentedModule& target, Exec policy) {
    check_well_defined(f, source, target, policy);
    const long m = source.generators();
    const SmithDecomposition& tsnf = target.snf();
    IntMatrix G = multiply(tsnf.U, f, policy);

    // constraints: rows >= rank must vanish; torsion rows vanish mod d_i.
    std::vector<long> free_rows, tor_rows;
    for (long i = 0; i < G.rows(); ++i) {
        if (i < tsnf.rank) {
            if (tsnf.S(i, i) != 1) tor_rows.push_back(i);
        } else {
            free_rows.push_back(i);
        }
    }
    IntMatrix C(static_cast<long>(free_rows.size() + tor_rows.size()),
                m + static_cast<long>(tor_rows.size()));
    long row = 0;
    for (long i : free_rows) {
        for (long j = 0; j < m; ++j) C(row, j) = G(i, j);
        ++row;
    }
    for (size_t k = 0; k < tor_rows.size(); ++k) {
        for (long j = 0; j < m; ++j) C(row, j) = G(tor_rows[k], j);
        C(row, m + static_cast<long>(k)) = tsnf.S(tor_rows[k], tor_rows[k]);
        ++row;
    }

    // The x-projection of ker(C) is injective (a kernel vector with zero
    // x-part forces the auxiliary part to vanish since the d_i are nonzero),
    // so the projected kernel basis is already a basis of the preimage lattice.
    IntMatrix B;
    if (C.rows() == 0) {
        B = IntMatrix::identity(m);
    } else {
        IntMatrix K = integer_kernel(C, policy);
        B = IntMatrix(m, K.cols());
        for (long r = 0; r < m; ++r)
            for (long c = 0; c < K.cols(); ++c) B(r, c) = K(r, c);
    }

    PresentedKernel out;
    out.incl_snf = smith_normal_form(B, policy, SnfOptions{true, false, false});

    // Every source relation lies in the preimage lattice, so the kernel's
    // relations are exactly the B-coordinates of the source relations.
    const IntMatrix& rels = source.relations();
    IntMatrix Rk(B.cols(), rels.cols());
    if (rels.cols() > 0) {
        IntMatrix Y = multiply(out.incl_snf.U, rels, policy);
        for (long c = 0; c < rels.cols(); ++c) {
            for (long i = 0; i < Y.rows(); ++i) {
                if (i < out.incl_snf.rank) {
                    Int q, r;
                    mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), Y(i, c).get_mpz_t(),
                                out.incl_snf.S(i, i).get_mpz_t());
                    if (r != 0) throw IllDefinedMap("source relation escapes the kernel lattice");
                    Y(i, c) = q;
                } else if (Y(i, c) != 0) {
                    throw IllDefinedMap("source relation escapes the kernel lattice");
                }
            }
        }
        IntMatrix Ytop(out.incl_snf.V.rows(), rels.cols());
        for (long i = 0; i < Ytop.rows(); ++i)
            for (long c = 0; c < rels.cols(); ++c) Ytop(i, c) = Y(i, c);
        Rk = multiply(out.incl_snf.V, Ytop, policy);
    }
    out.inclusion = std::move(B);
    out.module = PresentedModule(out.inclusion.cols(), std::move(Rk));
    return out;
}

PresentedModule presented_cokernel(const IntMatrix& f, const PresentedModule& source,
                                   const PresentedModule& target, Exec policy) {
    check_well_defined(f, source, target, policy);
    return PresentedModule(target.generators(), IntMatrix::hconcat(target.relations(), f));
}

bool in_image(const IntMatrix& f, const PresentedModule& target, const std::vector<Int>& x,
              Exec policy) {
    IntMatrix aug = IntMatrix::hconcat(f, target.relations());
    return solve(aug, x, policy).has_value();
}

RatMatrix RatMatrix::from_int(const IntMatrix& m) {
    RatMatrix r(m.rows(), m.cols());
    for (long i = 0; i < m.rows(); ++i)
        for (long j = 0; j < m.cols(); ++j) r(i, j) = Rat(m(i, j));
    return r;
}

namespace {

std::vector<long> rref_impl(RatMatrix& m, Exec policy, bool parallel) {
    std::vector<long> pivots;
    long pr = 0;
    for (long pc = 0; pc < m.cols() && pr < m.rows(); ++pc) {
        long pivot = -1;
        for (long r = pr; r < m.rows(); ++r)
            if (m(r, pc) != 0) { pivot = r; break; }
        if (pivot < 0) continue;
        if (pivot != pr)
            for (long c = pc; c < m.cols(); ++c) swap(m(pr, c), m(pivot, c));
        Rat inv = 1 / m(pr, pc);
        for (long c = pc; c < m.cols(); ++c) m(pr, c) *= inv;
        auto eliminate = [&](long r) {
            if (r == pr || m(r, pc) == 0) return;
            Rat f = m(r, pc);
            for (long c = pc; c < m.cols(); ++c)
                if (m(pr, c) != 0) m(r, c) -= f * m(pr, c);
        };
        if (parallel)
            par_for(m.rows(), policy, eliminate);
        else
            for (long r = 0; r < m.rows(); ++r) eliminate(r);
        pivots.push_back(pc);
        ++pr;
    }
    return pivots;
}

} // namespace

std::vector<long> rref(RatMatrix& m, Exec policy) {
    return rref_impl(m, policy, policy == Exec::Parallel);
}

std::vector<long> rref_serial(RatMatrix& m) { return rref_impl(m, Exec::Serial, false); }

long rank(const RatMatrix& m, Exec policy) {
    RatMatrix c = m;
    return static_cast<long>(rref(c, policy).size());
}

std::optional<std::vector<Rat>> solve_q(const RatMatrix& m, const std::vector<Rat>& b,
                                        Exec policy) {
    if (m.rows() != static_cast<long>(b.size())) throw SizeMismatch("solve_q: rhs dimension");
    RatMatrix aug(m.rows(), m.cols() + 1);
    for (long i = 0; i < m.rows(); ++i) {
        for (long j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
        aug(i, m.cols()) = b[i];
    }
    std::vector<long> piv = rref(aug, policy);
    for (long p : piv)
        if (p == m.cols()) return std::nullopt;
    std::vector<Rat> x(m.cols());
    for (size_t i = 0; i < piv.size(); ++i) x[piv[i]] = aug(static_cast<long>(i), m.cols());
    return x;
}

bool column_span_contains_q(const IntMatrix& A, const IntMatrix& B, Exec policy) {
    // span(B) subset of span(A)?
    long ra = rational_rank(A, policy);
    IntMatrix ab = IntMatrix::hconcat(A, B);
    return rational_rank(ab, policy) == ra;
}

bool same_column_span_q(const IntMatrix& A, const IntMatrix& B, Exec policy) {
    long ra = rational_rank(A, policy);
    long rb = rational_rank(B, policy);
    if (ra != rb) return false;
    IntMatrix ab = IntMatrix::hconcat(A, B);
    return rational_rank(ab, policy) == ra;
}

} // namespace jlcalc::exactla
