#ifndef JLCALC_FREELIE_HPP
#define JLCALC_FREELIE_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "jlcalc/exactla.hpp"

namespace jlcalc::freelie {

using exactla::Int;
using exactla::IntMatrix;
using exactla::PresentedKernel;
using exactla::PresentedModule;
using exactla::Rat;

struct NotALieElement : std::runtime_error {
    explicit NotALieElement(const std::string& w) : std::runtime_error(w) {}
};

// ---- binary bracket trees -------------------------------------------------

struct LieTree;
using TreeP = std::shared_ptr<const LieTree>;

struct LieTree {
    int leaf = -1;  // >= 0: leaf color; internal node otherwise
    TreeP l, r;
    bool is_leaf() const { return leaf >= 0; }
};

TreeP leaf(int color);
TreeP node(const TreeP& l, const TreeP& r);
int tree_degree(const TreeP& t);
std::string tree_str(const TreeP& t);  // e.g. [[x1,x2],x3]

// ---- Lyndon basis of the free Lie ring ------------------------------------

// Witt dimension of degree k of the free Lie ring on n generators.
long witt_number(int n, int k);

struct LyndonBasis {
    int n = 0, k = 0;
    std::vector<std::vector<int>> words;               // lexicographically sorted
    std::vector<TreeP> brackets;                       // standard bracketing per word
    std::map<std::vector<int>, long> index;
    long size() const { return static_cast<long>(words.size()); }
};

std::shared_ptr<const LyndonBasis> lyndon_basis(int n, int k);

// Coefficient vector over lyndon_basis(n, degree).
struct LieElement {
    int n = 0, degree = 0;
    std::vector<Int> c;
    bool is_zero() const;
    bool operator==(const LieElement& o) const { return n == o.n && degree == o.degree && c == o.c; }
};

LieElement lie_zero(int n, int degree);
LieElement lie_add(const LieElement& a, const LieElement& b);
LieElement lie_scale(const Int& s, const LieElement& a);

// tensor-algebra expansion of a bracket tree ([x,y] -> xy - yx)
using Tensor = std::map<std::vector<int>, Int>;
Tensor tensor_of_tree(const TreeP& t);
Tensor tensor_of_lie(const LieElement& e);

// Decompose a homogeneous tensor against bracketed-Lyndon tensor images
// (unitriangular greedy solve). Throws NotALieElement if it is not a Lie
// element of that degree.
LieElement lyndon_tensor_decompose(const Tensor& t, int n, int k);

// Rewrite a bracket tree into Lyndon coordinates by antisymmetry + Jacobi.
LieElement normalize_bracket(const TreeP& t, int n);

// bracket of basis elements / elements
LieElement lie_bracket(const LieElement& a, const LieElement& b);

// Matrix of [ , ] : H (x) L_{k+1} -> L_{k+2} on n = rank H generators.
// Columns indexed by (generator i, Lyndon word w) as i * |L_{k+1}| + idx(w).
std::shared_ptr<const IntMatrix> bracket_map(int n, int k);

struct DkModule {
    int n = 0, k = 0;
    IntMatrix basis;  // columns: Z-basis of ker inside H (x) L_{k+1}
    long rank() const { return basis.cols(); }
};

std::shared_ptr<const DkModule> dk_basis(int n, int k);

// An element of H (x) L_{k+1}(H) in the (generator, Lyndon) coordinates.
std::vector<Int> tensor_coords(int n, int k1, int gen, const LieElement& lie);
std::vector<Int> bracket_of_element(int n, int k, const std::vector<Int>& v);  // value in L_{k+2}

// eta-style sum for a joined pair of rooted trees: the tree obtained by
// joining the roots of tr(u) and tr(v) by an edge, summed over all legs:
// sum_leg color(leg) (x) (tree rooted at that leg). Value in H (x) L_{deg}.
std::vector<Int> joined_tree_eta(const TreeP& u, const TreeP& v, int n);

// ---- free quasi-Lie ring --------------------------------------------------

// Degree-k piece of the free quasi-Lie ring on n generators, presented by
// flip-canonical colored binary trees with antisymmetry torsion rows and the
// full Jacobi relation set (lattice-reduced).
struct QuasiLie {
    int n = 0, k = 0;
    std::vector<TreeP> gens;                       // canonical representatives
    std::map<std::string, long> index;             // canonical key -> index
    PresentedModule mod;
    // canonical decomposition of an arbitrary tree: (+-1, index)
    std::pair<int, long> canon_index(const TreeP& t) const;
    std::vector<Int> vec(const TreeP& t) const;    // +- e_idx
};

std::shared_ptr<const QuasiLie> quasi_lie(int n, int k);

// D^q_k = ker( [ , ] : H (x) L^q_{k+1} -> L^q_{k+2} ), as a presented kernel.
struct DqkModule {
    int n = 0, k = 0;
    std::shared_ptr<const QuasiLie> q1;  // L^q_{k+1}
    std::shared_ptr<const QuasiLie> q2;  // L^q_{k+2}
    PresentedModule source;              // H (x) L^q_{k+1}
    PresentedKernel kernel;              // inclusion + presentation

    long source_gens() const { return source.generators(); }
    // (i, tree) -> coordinate vector in the source presentation
    std::vector<Int> source_vec(int gen, const TreeP& t) const;
    // express an element of the kernel lattice in kernel generators
    std::optional<std::vector<Int>> kernel_coords(const std::vector<Int>& source_elt) const;
};

std::shared_ptr<const DqkModule> dqk_module(int n, int k);

// ---- the two exact sequences and the s / p maps ---------------------------

struct SMapData {
    IntMatrix matrix;          // (Z/2)^{n W(n,j)} -> D^q_{2j-1} kernel coords
    PresentedModule source;    // H (x) L_j (x) Z/2
};
SMapData s_map(int n, int j);

struct PMapData {
    IntMatrix matrix;            // D_{2j} basis coords -> (Z/2)^{W(n,j+1)}
    PresentedModule target;      // L_{j+1} (x) Z/2
    IntMatrix half_tr_images;    // columns: eta(1/2 tr(u) odot tr(u)) in D-basis coords
    bool well_defined = false;   // mod-2 ambiguity check passed
};
PMapData p_map(int n, int j);

struct SequenceReport {
    bool s_injective = false;
    bool q_surjective = false;       // D^q_{2j-1} ->> D_{2j-1}
    bool ker_q_equals_im_s = false;
    bool exact() const { return s_injective && q_surjective && ker_q_equals_im_s; }
};
SequenceReport check_sequence_odd(int n, int j);   // 0 -> H(x)L_j(x)Z/2 -> D^q_{2j-1} -> D_{2j-1} -> 0

struct SequenceReportEven {
    bool q_injective = false;        // D^q_{2j} -> D_{2j}
    bool p_well_defined = false;
    bool p_surjective = false;
    bool ker_p_equals_im_q = false;
    bool p_sends_half_tr_to_u = false;  // p(eta(1/2 tr(u) odot tr(u))) = u (x) 1
    bool exact() const {
        return q_injective && p_well_defined && p_surjective && ker_p_equals_im_q &&
               p_sends_half_tr_to_u;
    }
};
SequenceReportEven check_sequence_even(int n, int j);  // 0 -> D^q_{2j} -> D_{2j} -> L_{j+1}(x)Z/2 -> 0

// canonical map D^q_k -> D_k(H) in basis coordinates (columns per kernel gen)
IntMatrix dq_to_d_matrix(const DqkModule& dq);

} // namespace jlcalc::freelie

#endif
