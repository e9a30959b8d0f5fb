#ifndef JLCALC_EXACTLA_HPP
#define JLCALC_EXACTLA_HPP

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "jlcalc/parallel.hpp"

namespace jlcalc::exactla {

using Int = mpz_class;
using Rat = mpq_class;

struct SizeMismatch : std::runtime_error {
    explicit SizeMismatch(const std::string& what) : std::runtime_error(what) {}
};
struct IllDefinedMap : std::runtime_error {
    explicit IllDefinedMap(const std::string& what) : std::runtime_error(what) {}
};

// Dense matrix over Z, row-major. All arithmetic exact.
class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(long r, long c) : rows_(r), cols_(c), a_(static_cast<size_t>(r) * c) {}

    static IntMatrix identity(long n);
    static IntMatrix zero(long r, long c) { return IntMatrix(r, c); }

    long rows() const { return rows_; }
    long cols() const { return cols_; }
    Int& operator()(long r, long c) { return a_[static_cast<size_t>(r) * cols_ + c]; }
    const Int& operator()(long r, long c) const { return a_[static_cast<size_t>(r) * cols_ + c]; }

    bool operator==(const IntMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }

    IntMatrix transpose() const;
    bool is_zero() const;

    std::vector<Int> col(long c) const;
    void set_col(long c, const std::vector<Int>& v);
    static IntMatrix from_cols(long rows, const std::vector<std::vector<Int>>& cols);
    IntMatrix cols_slice(long c0, long c1) const;  // columns [c0, c1)
    static IntMatrix hconcat(const IntMatrix& a, const IntMatrix& b);

private:
    long rows_ = 0, cols_ = 0;
    std::vector<Int> a_;
};

IntMatrix multiply(const IntMatrix& a, const IntMatrix& b, Exec policy = default_exec());
IntMatrix multiply_serial(const IntMatrix& a, const IntMatrix& b);
std::vector<Int> mat_apply(const IntMatrix& a, const std::vector<Int>& x);
IntMatrix add(const IntMatrix& a, const IntMatrix& b);
IntMatrix negate(const IntMatrix& a);

// U*A*V = S with U, V unimodular, S diagonal with d_1 | d_2 | ... | d_r, d_i > 0.
// Tracking V and the inverses can be switched off for big matrices whose
// decomposition is only used for membership tests.
struct SmithDecomposition {
    IntMatrix U, S, V;
    IntMatrix Uinv, Vinv;
    long rank = 0;
    std::vector<Int> invariant_factors() const;  // the nonzero d_i
};

struct SnfOptions {
    bool track_V = true;
    bool track_Uinv = true;
    bool track_Vinv = true;
    static SnfOptions u_only() { return SnfOptions{false, false, false}; }
};

SmithDecomposition smith_normal_form(const IntMatrix& A, Exec policy = default_exec(),
                                     SnfOptions opts = SnfOptions{});

// Existence of an integer solution of A x = b; needs only U and S.
bool solvable(const SmithDecomposition& snf, const std::vector<Int>& b);

// Basis of { x : A x = 0 } as matrix columns. The kernel lattice of an
// integer matrix is saturated, so this is a genuine Z-basis.
IntMatrix integer_kernel(const IntMatrix& A, Exec policy = default_exec());

long rational_rank(const IntMatrix& A, Exec policy = default_exec());

// One solution of A x = b over Z, if any.
std::optional<std::vector<Int>> solve(const IntMatrix& A, const std::vector<Int>& b,
                                      Exec policy = default_exec());
std::optional<std::vector<Int>> solve(const SmithDecomposition& snf, const std::vector<Int>& b);

// Z-basis of the lattice spanned by the columns of G.
IntMatrix column_lattice_basis(const IntMatrix& G, Exec policy = default_exec());

// Basis of { x : A x  is in the column lattice of B }.
IntMatrix preimage_lattice(const IntMatrix& A, const IntMatrix& B, Exec policy = default_exec());

// Incremental integer row-echelon reduction of a stream of relation rows;
// returns a row basis of the lattice they span. Used to shrink huge
// presentations before any SNF is attempted.
class RowEchelon {
public:
    explicit RowEchelon(long width) : width_(width) {}
    void add_row(std::vector<Int> row);
    const std::vector<std::vector<Int>>& rows() const { return rows_; }
    long width() const { return width_; }
    IntMatrix as_columns() const;  // each echelon row becomes a relation column

private:
    long width_;
    std::vector<std::vector<Int>> rows_;     // echelon rows
    std::vector<long> pivot_col_;            // pivot column per row
};

// Finitely presented abelian group: coker(relations : Z^r -> Z^gens).
// minimize() computes the Smith form of the relation matrix so that
// elements get a canonical normal form and zero-tests are O(gens).
class PresentedModule {
public:
    PresentedModule() = default;
    PresentedModule(long gens, IntMatrix relations)
        : gens_(gens), rels_(std::move(relations)) {
        if (rels_.rows() != gens_) throw SizeMismatch("relations rows != generator count");
    }
    static PresentedModule free_module(long gens) { return PresentedModule(gens, IntMatrix(gens, 0)); }

    long generators() const { return gens_; }
    const IntMatrix& relations() const { return rels_; }

    void minimize(Exec policy = default_exec()) const;
    const SmithDecomposition& snf() const;  // U-only decomposition of the relations
    long free_rank() const;
    std::vector<Int> torsion() const;  // invariant factors > 1

    // canonical normal form of an element given in generator coordinates
    std::vector<Int> normal_form(const std::vector<Int>& x) const;
    bool is_zero(const std::vector<Int>& x) const;
    bool equal(const std::vector<Int>& x, const std::vector<Int>& y) const;

private:
    long gens_ = 0;
    IntMatrix rels_;
    // minimization cache
    mutable bool minimized_ = false;
    mutable SmithDecomposition snf_;
    friend struct PresentedHom;
};

// Kernel of a map between presented modules, kept with its inclusion.
struct PresentedKernel {
    IntMatrix inclusion;           // columns = kernel generators, in source generator coords
    PresentedModule module;        // presentation of the kernel
    SmithDecomposition incl_snf;   // solve-ready decomposition of the inclusion
};

// f maps source generators to target generator coordinates (columns of f are
// images of source generators). Throws IllDefinedMap unless
// f * (source relations) lies in the target relation lattice.
void check_well_defined(const IntMatrix& f, const PresentedModule& source,
                        const PresentedModule& target, Exec policy = default_exec());

PresentedKernel presented_map_kernel(const IntMatrix& f, const PresentedModule& source,
                                     const PresentedModule& target,
                                     Exec policy = default_exec());

PresentedModule presented_cokernel(const IntMatrix& f, const PresentedModule& source,
                                   const PresentedModule& target,
                                   Exec policy = default_exec());

// Does the element x (target generator coords) lie in f(source)?
bool in_image(const IntMatrix& f, const PresentedModule& target, const std::vector<Int>& x,
              Exec policy = default_exec());

// --- rational kernels/solving (exact, mpq) ---

class RatMatrix {
public:
    RatMatrix() = default;
    RatMatrix(long r, long c) : rows_(r), cols_(c), a_(static_cast<size_t>(r) * c) {}
    static RatMatrix from_int(const IntMatrix& m);

    long rows() const { return rows_; }
    long cols() const { return cols_; }
    Rat& operator()(long r, long c) { return a_[static_cast<size_t>(r) * cols_ + c]; }
    const Rat& operator()(long r, long c) const { return a_[static_cast<size_t>(r) * cols_ + c]; }

private:
    long rows_ = 0, cols_ = 0;
    std::vector<Rat> a_;
};

// In-place reduced row echelon form; returns pivot columns.
std::vector<long> rref(RatMatrix& m, Exec policy = default_exec());
std::vector<long> rref_serial(RatMatrix& m);

long rank(const RatMatrix& m, Exec policy = default_exec());

// Solve M x = b over Q; empty optional if inconsistent.
std::optional<std::vector<Rat>> solve_q(const RatMatrix& m, const std::vector<Rat>& b,
                                        Exec policy = default_exec());

// Column span comparison over Q: span(A) == span(B)?
bool same_column_span_q(const IntMatrix& A, const IntMatrix& B, Exec policy = default_exec());
bool column_span_contains_q(const IntMatrix& A, const IntMatrix& B, Exec policy = default_exec());

} // namespace jlcalc::exactla

#endif
