#include "jlcalc/freelie.hpp"

#include <algorithm>
#include <cassert>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>

namespace jlcalc::freelie {

using exactla::mat_apply;
using exactla::RowEchelon;
using exactla::SmithDecomposition;

// ---- trees -----------------------------------------------------------------

TreeP leaf(int color) {
    auto t = std::make_shared<LieTree>();
    t->leaf = color;
    return t;
}

TreeP node(const TreeP& l, const TreeP& r) {
    auto t = std::make_shared<LieTree>();
    t->l = l;
    t->r = r;
    return t;
}

int tree_degree(const TreeP& t) { return t->is_leaf() ? 1 : tree_degree(t->l) + tree_degree(t->r); }

std::string tree_str(const TreeP& t) {
    if (t->is_leaf()) return "x" + std::to_string(t->leaf + 1);
    return "[" + tree_str(t->l) + "," + tree_str(t->r) + "]";
}

// ---- Lyndon words ----------------------------------------------------------

long witt_number(int n, int k) {
    // (1/k) sum_{d | k} mu(d) n^{k/d}
    auto mobius = [](int m) {
        int mu = 1;
        for (int p = 2; p * p <= m; ++p) {
            if (m % p == 0) {
                m /= p;
                if (m % p == 0) return 0;
                mu = -mu;
            }
        }
        if (m > 1) mu = -mu;
        return mu;
    };
    Int total = 0;
    for (int d = 1; d <= k; ++d) {
        if (k % d != 0) continue;
        Int pw;
        mpz_ui_pow_ui(pw.get_mpz_t(), static_cast<unsigned long>(n),
                      static_cast<unsigned long>(k / d));
        total += mobius(d) * pw;
    }
    Int w = total / k;
    return w.get_si();
}

namespace {

bool is_lyndon(const std::vector<int>& w) {
    const size_t k = w.size();
    if (k == 0) return false;
    for (size_t i = 1; i < k; ++i) {
        // w must be strictly smaller than its proper suffix w[i..] extended
        // comparison: w < rotation w[i..] + w[..i]
        std::vector<int> rot;
        rot.insert(rot.end(), w.begin() + static_cast<long>(i), w.end());
        rot.insert(rot.end(), w.begin(), w.begin() + static_cast<long>(i));
        if (!(w < rot)) return false;
    }
    return true;
}

// lexicographically least proper suffix = right factor of the standard
// factorization of a Lyndon word
size_t standard_split(const std::vector<int>& w) {
    size_t best = 1;
    for (size_t i = 2; i < w.size(); ++i) {
        std::vector<int> a(w.begin() + static_cast<long>(best), w.end());
        std::vector<int> b(w.begin() + static_cast<long>(i), w.end());
        if (b < a) best = i;
    }
    return best;
}

template <typename K, typename V>
class Registry {
public:
    template <typename F>
    std::shared_ptr<const V> get(const K& key, F&& build) {
        {
            std::lock_guard<std::mutex> lk(mu_);
            auto it = map_.find(key);
            if (it != map_.end()) return it->second;
        }
        auto value = build();
        std::lock_guard<std::mutex> lk(mu_);
        auto [it, inserted] = map_.emplace(key, std::move(value));
        return it->second;
    }

private:
    std::mutex mu_;
    std::map<K, std::shared_ptr<const V>> map_;
};

Registry<std::pair<int, int>, LyndonBasis> g_lyndon;
Registry<std::pair<int, int>, IntMatrix> g_bracket_map;
Registry<std::pair<int, int>, DkModule> g_dk;
Registry<std::pair<int, int>, QuasiLie> g_quasi;
Registry<std::pair<int, int>, DqkModule> g_dqk;

// optional on-disk cache of memoized bases
std::string cache_path(const std::string& stem) {
    const char* dir = std::getenv("JLCALC_CACHE_DIR");
    if (!dir || !*dir) return {};
    return std::string(dir) + "/" + stem + ".txt";
}

bool load_matrix(const std::string& path, IntMatrix& out) {
    if (path.empty()) return false;
    std::ifstream in(path);
    if (!in) return false;
    long r = -1, c = -1;
    if (!(in >> r >> c) || r < 0 || c < 0) return false;
    IntMatrix m(r, c);
    std::string tok;
    for (long i = 0; i < r; ++i)
        for (long j = 0; j < c; ++j) {
            if (!(in >> tok)) return false;
            m(i, j) = Int(tok);
        }
    out = std::move(m);
    return true;
}

void store_matrix(const std::string& path, const IntMatrix& m) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) return;
    out << m.rows() << " " << m.cols() << "\n";
    for (long i = 0; i < m.rows(); ++i) {
        for (long j = 0; j < m.cols(); ++j) out << m(i, j).get_str() << (j + 1 < m.cols() ? " " : "");
        out << "\n";
    }
}

} // namespace

std::shared_ptr<const LyndonBasis> lyndon_basis(int n, int k) {
    return g_lyndon.get({n, k}, [n, k]() {
        auto basis = std::make_shared<LyndonBasis>();
        basis->n = n;
        basis->k = k;
        std::vector<int> w(k, 0);
        // enumerate all words of length k lexicographically, keep Lyndon ones
        while (true) {
            if (is_lyndon(w)) basis->words.push_back(w);
            int p = k - 1;
            while (p >= 0 && w[p] == n - 1) --p;
            if (p < 0) break;
            ++w[p];
            std::fill(w.begin() + p + 1, w.end(), 0);
        }
        std::map<std::vector<int>, TreeP> brackets;
        std::function<TreeP(const std::vector<int>&)> br = [&](const std::vector<int>& u) -> TreeP {
            if (u.size() == 1) return leaf(u[0]);
            auto it = brackets.find(u);
            if (it != brackets.end()) return it->second;
            size_t s = standard_split(u);
            std::vector<int> a(u.begin(), u.begin() + static_cast<long>(s));
            std::vector<int> b(u.begin() + static_cast<long>(s), u.end());
            TreeP t = node(br(a), br(b));
            brackets[u] = t;
            return t;
        };
        for (size_t i = 0; i < basis->words.size(); ++i) {
            basis->brackets.push_back(br(basis->words[i]));
            basis->index[basis->words[i]] = static_cast<long>(i);
        }
        assert(static_cast<long>(basis->words.size()) == witt_number(n, k));
        return basis;
    });
}

bool LieElement::is_zero() const {
    return std::all_of(c.begin(), c.end(), [](const Int& v) { return v == 0; });
}

LieElement lie_zero(int n, int degree) {
    LieElement e;
    e.n = n;
    e.degree = degree;
    e.c.assign(static_cast<size_t>(witt_number(n, degree)), Int(0));
    return e;
}

LieElement lie_add(const LieElement& a, const LieElement& b) {
    assert(a.n == b.n && a.degree == b.degree);
    LieElement r = a;
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] += b.c[i];
    return r;
}

LieElement lie_scale(const Int& s, const LieElement& a) {
    LieElement r = a;
    for (auto& x : r.c) x *= s;
    return r;
}

Tensor tensor_of_tree(const TreeP& t) {
    if (t->is_leaf()) return {{{t->leaf}, Int(1)}};
    Tensor a = tensor_of_tree(t->l), b = tensor_of_tree(t->r), r;
    for (const auto& [ma, ca] : a)
        for (const auto& [mb, cb] : b) {
            std::vector<int> ab = ma;
            ab.insert(ab.end(), mb.begin(), mb.end());
            r[ab] += ca * cb;
            std::vector<int> ba = mb;
            ba.insert(ba.end(), ma.begin(), ma.end());
            r[ba] -= ca * cb;
        }
    for (auto it = r.begin(); it != r.end();)
        it = (it->second == 0) ? r.erase(it) : std::next(it);
    return r;
}

Tensor tensor_of_lie(const LieElement& e) {
    auto basis = lyndon_basis(e.n, e.degree);
    Tensor r;
    for (long i = 0; i < basis->size(); ++i) {
        if (e.c[i] == 0) continue;
        for (const auto& [m, c] : tensor_of_tree(basis->brackets[i])) r[m] += e.c[i] * c;
    }
    for (auto it = r.begin(); it != r.end();)
        it = (it->second == 0) ? r.erase(it) : std::next(it);
    return r;
}

LieElement lyndon_tensor_decompose(const Tensor& t, int n, int k) {
    auto basis = lyndon_basis(n, k);
    LieElement out = lie_zero(n, k);
    Tensor rest = t;
    for (auto& [m, c] : rest)
        if (static_cast<int>(m.size()) != k) throw NotALieElement("tensor not homogeneous of the requested degree");
    while (!rest.empty()) {
        auto [m, c] = *rest.begin();
        auto it = basis->index.find(m);
        if (it == basis->index.end())
            throw NotALieElement("leading word is not Lyndon; tensor is not a Lie element");
        long idx = it->second;
        out.c[idx] += c;
        for (const auto& [bm, bc] : tensor_of_tree(basis->brackets[idx])) {
            auto jt = rest.find(bm);
            Int nv = (jt == rest.end() ? Int(0) : jt->second) - c * bc;
            if (nv == 0) {
                if (jt != rest.end()) rest.erase(jt);
            } else {
                rest[bm] = nv;
            }
        }
    }
    return out;
}

// ---- bracket rewriting into the Lyndon basis -------------------------------

namespace {

// sparse normalized element of fixed degree: basis index -> coefficient
using Sparse = std::map<long, Int>;

void sparse_add(Sparse& a, const Sparse& b, const Int& s) {
    for (auto& [i, c] : b) {
        Int nv = (a.count(i) ? a[i] : Int(0)) + s * c;
        if (nv == 0)
            a.erase(i);
        else
            a[i] = nv;
    }
}

// memoized rewriting of [Lyndon_u, Lyndon_v] (u of degree du, v of dv)
struct PairKey {
    int n, du, dv;
    long u, v;
    bool operator<(const PairKey& o) const {
        return std::tie(n, du, dv, u, v) < std::tie(o.n, o.du, o.dv, o.u, o.v);
    }
};

Sparse rewrite_pair(int n, int du, long u, int dv, long v);

thread_local std::map<PairKey, Sparse> t_rewrite_memo;

Sparse rewrite_pair(int n, int du, long u, int dv, long v) {
    auto bu = lyndon_basis(n, du);
    auto bv = lyndon_basis(n, dv);
    const auto& wu = bu->words[u];
    const auto& wv = bv->words[v];
    if (wu == wv) return {};
    if (!(wu < wv)) {
        Sparse s = rewrite_pair(n, dv, v, du, u);
        Sparse r;
        sparse_add(r, s, Int(-1));
        return r;
    }
    PairKey key{n, du, dv, u, v};
    auto it = t_rewrite_memo.find(key);
    if (it != t_rewrite_memo.end()) return it->second;

    Sparse out;
    // standard iff u is a letter or the right factor of u dominates v
    bool standard = true;
    if (du > 1) {
        size_t s = standard_split(wu);
        std::vector<int> u2(wu.begin() + static_cast<long>(s), wu.end());
        if (u2 < wv) standard = false;
    }
    if (standard) {
        std::vector<int> uv = wu;
        uv.insert(uv.end(), wv.begin(), wv.end());
        auto basis = lyndon_basis(n, du + dv);
        auto jt = basis->index.find(uv);
        assert(jt != basis->index.end());
        out[jt->second] = 1;
    } else {
        // u = [u1, u2] with u2 < v: [u, v] = [[u1, v], u2] + [u1, [u2, v]]
        size_t s = standard_split(wu);
        std::vector<int> w1(wu.begin(), wu.begin() + static_cast<long>(s));
        std::vector<int> w2(wu.begin() + static_cast<long>(s), wu.end());
        int d1 = static_cast<int>(w1.size()), d2 = static_cast<int>(w2.size());
        long i1 = lyndon_basis(n, d1)->index.at(w1);
        long i2 = lyndon_basis(n, d2)->index.at(w2);
        Sparse u1v = rewrite_pair(n, d1, i1, dv, v);   // degree d1 + dv
        for (auto& [w, c] : u1v) {
            Sparse t = rewrite_pair(n, d1 + dv, w, d2, i2);
            sparse_add(out, t, c);
        }
        Sparse u2v = rewrite_pair(n, d2, i2, dv, v);   // degree d2 + dv
        for (auto& [w, c] : u2v) {
            Sparse t = rewrite_pair(n, d1, i1, d2 + dv, w);
            sparse_add(out, t, c);
        }
    }
    t_rewrite_memo[key] = out;
    return out;
}

Sparse normalize_tree_sparse(int n, const TreeP& t) {
    if (t->is_leaf()) return {{static_cast<long>(t->leaf), Int(1)}};
    Sparse a = normalize_tree_sparse(n, t->l);
    Sparse b = normalize_tree_sparse(n, t->r);
    int da = tree_degree(t->l), db = tree_degree(t->r);
    Sparse out;
    for (auto& [u, cu] : a)
        for (auto& [v, cv] : b) {
            Sparse s = rewrite_pair(n, da, u, db, v);
            sparse_add(out, s, cu * cv);
        }
    return out;
}

} // namespace

LieElement normalize_bracket(const TreeP& t, int n) {
    int k = tree_degree(t);
    LieElement out = lie_zero(n, k);
    for (auto& [i, c] : normalize_tree_sparse(n, t)) out.c[i] = c;
    return out;
}

LieElement lie_bracket(const LieElement& a, const LieElement& b) {
    assert(a.n == b.n);
    LieElement out = lie_zero(a.n, a.degree + b.degree);
    for (size_t u = 0; u < a.c.size(); ++u) {
        if (a.c[u] == 0) continue;
        for (size_t v = 0; v < b.c.size(); ++v) {
            if (b.c[v] == 0) continue;
            Sparse s = rewrite_pair(a.n, a.degree, static_cast<long>(u), b.degree,
                                    static_cast<long>(v));
            for (auto& [i, c] : s) out.c[i] += a.c[u] * b.c[v] * c;
        }
    }
    return out;
}

std::shared_ptr<const IntMatrix> bracket_map(int n, int k) {
    return g_bracket_map.get({n, k}, [n, k]() {
        std::string path = cache_path("bracketmap_" + std::to_string(n) + "_" + std::to_string(k));
        {
            IntMatrix cached;
            if (load_matrix(path, cached)) return std::make_shared<IntMatrix>(std::move(cached));
        }
        long w1 = witt_number(n, k + 1), w2 = witt_number(n, k + 2);
        auto m = std::make_shared<IntMatrix>(w2, n * w1);
        par_for(n * w1, default_exec(), [&](long col) {
            int i = static_cast<int>(col / w1);
            long w = col % w1;
            Sparse s = rewrite_pair(n, 1, i, k + 1, w);
            for (auto& [row, c] : s) (*m)(row, col) = c;
        });
        store_matrix(path, *m);
        return m;
    });
}

std::shared_ptr<const DkModule> dk_basis(int n, int k) {
    return g_dk.get({n, k}, [n, k]() {
        auto mod = std::make_shared<DkModule>();
        mod->n = n;
        mod->k = k;
        std::string path = cache_path("dk_" + std::to_string(n) + "_" + std::to_string(k));
        if (load_matrix(path, mod->basis)) return mod;
        mod->basis = exactla::integer_kernel(*bracket_map(n, k));
        store_matrix(path, mod->basis);
        return mod;
    });
}

std::vector<Int> tensor_coords(int n, int k1, int gen, const LieElement& lie) {
    assert(lie.n == n && lie.degree == k1);
    long w = witt_number(n, k1);
    std::vector<Int> v(static_cast<size_t>(n) * w);
    for (long i = 0; i < w; ++i) v[static_cast<size_t>(gen) * w + i] = lie.c[i];
    return v;
}

std::vector<Int> bracket_of_element(int n, int k, const std::vector<Int>& v) {
    return mat_apply(*bracket_map(n, k), v);
}

namespace {

long count_leaves(const TreeP& t) { return t->is_leaf() ? 1 : count_leaves(t->l) + count_leaves(t->r); }

int leaf_color_at(const TreeP& t, long idx) {
    if (t->is_leaf()) return t->leaf;
    long nl = count_leaves(t->l);
    return idx < nl ? leaf_color_at(t->l, idx) : leaf_color_at(t->r, idx - nl);
}

// re-root the joined tree (t, carry) at leaf #idx of t, preserving the
// counterclockwise cyclic orders (parent, left, right) at every vertex
TreeP reroot(const TreeP& t, long idx, const TreeP& carry) {
    if (t->is_leaf()) return carry;
    long nl = count_leaves(t->l);
    if (idx < nl) return reroot(t->l, idx, node(t->r, carry));
    return reroot(t->r, idx - nl, node(carry, t->l));
}

} // namespace

std::vector<Int> joined_tree_eta(const TreeP& u, const TreeP& v, int n) {
    int deg = tree_degree(u) + tree_degree(v) - 1;
    long w = witt_number(n, deg);
    std::vector<Int> out(static_cast<size_t>(n) * w);
    auto add_side = [&](const TreeP& side, const TreeP& other) {
        long leaves = count_leaves(side);
        for (long idx = 0; idx < leaves; ++idx) {
            int color = leaf_color_at(side, idx);
            LieElement lie = normalize_bracket(reroot(side, idx, other), n);
            for (long i = 0; i < w; ++i) out[static_cast<size_t>(color) * w + i] += lie.c[i];
        }
    };
    add_side(u, v);
    add_side(v, u);
    return out;
}

// ---- quasi-Lie -------------------------------------------------------------

namespace {

std::string qkey(const TreeP& t) {
    if (t->is_leaf()) return "x" + std::to_string(t->leaf);
    return "(" + qkey(t->l) + qkey(t->r) + ")";
}

// flip-canonical form: children sorted by key; sign flips per swap
std::pair<int, TreeP> qcanon(const TreeP& t) {
    if (t->is_leaf()) return {1, t};
    auto [sl, cl] = qcanon(t->l);
    auto [sr, cr] = qcanon(t->r);
    std::string kl = qkey(cl), kr = qkey(cr);
    if (kl <= kr) return {sl * sr, node(cl, cr)};
    return {-sl * sr, node(cr, cl)};
}

bool has_equal_children(const TreeP& t) {
    if (t->is_leaf()) return false;
    if (qkey(t->l) == qkey(t->r)) return true;
    return has_equal_children(t->l) || has_equal_children(t->r);
}

// all canonical trees of degree k (children key-sorted)
std::vector<TreeP> canonical_trees(int n, int k) {
    if (k == 1) {
        std::vector<TreeP> out;
        for (int c = 0; c < n; ++c) out.push_back(leaf(c));
        return out;
    }
    std::vector<TreeP> out;
    for (int d = 1; 2 * d <= k; ++d) {
        auto left = canonical_trees(n, d);
        auto right = canonical_trees(n, k - d);
        for (auto& a : left)
            for (auto& b : right) {
                std::string ka = qkey(a), kb = qkey(b);
                if (d == k - d && kb < ka) continue;  // unordered pair
                out.push_back(ka <= kb ? node(a, b) : node(b, a));
            }
    }
    // distinct by construction except cross-degree key ordering; dedupe anyway
    std::map<std::string, TreeP> uniq;
    for (auto& t : out) uniq.emplace(qkey(t), t);
    std::vector<TreeP> res;
    for (auto& [k2, t] : uniq) res.push_back(t);
    return res;
}

// all planar trees of degree k (for the complete Jacobi relation set)
std::vector<TreeP> planar_trees(int n, int k) {
    if (k == 1) {
        std::vector<TreeP> out;
        for (int c = 0; c < n; ++c) out.push_back(leaf(c));
        return out;
    }
    std::vector<TreeP> out;
    for (int d = 1; d < k; ++d) {
        auto left = planar_trees(n, d);
        auto right = planar_trees(n, k - d);
        for (auto& a : left)
            for (auto& b : right) out.push_back(node(a, b));
    }
    return out;
}

TreeP replace_at(const TreeP& t, const std::vector<int>& path, size_t pos, const TreeP& sub) {
    if (pos == path.size()) return sub;
    if (path[pos] == 0) return node(replace_at(t->l, path, pos + 1, sub), t->r);
    return node(t->l, replace_at(t->r, path, pos + 1, sub));
}

} // namespace

std::pair<int, long> QuasiLie::canon_index(const TreeP& t) const {
    auto [s, c] = qcanon(t);
    auto it = index.find(qkey(c));
    assert(it != index.end());
    return {s, it->second};
}

std::vector<Int> QuasiLie::vec(const TreeP& t) const {
    std::vector<Int> v(gens.size());
    auto [s, i] = canon_index(t);
    v[static_cast<size_t>(i)] = s;
    return v;
}

std::shared_ptr<const QuasiLie> quasi_lie(int n, int k) {
    return g_quasi.get({n, k}, [n, k]() {
        auto q = std::make_shared<QuasiLie>();
        q->n = n;
        q->k = k;
        q->gens = canonical_trees(n, k);
        for (size_t i = 0; i < q->gens.size(); ++i) q->index[qkey(q->gens[i])] = static_cast<long>(i);
        const long G = static_cast<long>(q->gens.size());

        std::vector<std::vector<Int>> torsion_cols;
        for (long i = 0; i < G; ++i)
            if (has_equal_children(q->gens[i])) {
                std::vector<Int> col(G);
                col[i] = 2;
                torsion_cols.push_back(std::move(col));
            }

        // complete Jacobi set over all planar trees, canonicalized and
        // lattice-reduced incrementally
        RowEchelon ech(G);
        std::set<std::string> seen;
        auto planar = planar_trees(n, k);
        std::function<void(const TreeP&, const TreeP&, std::vector<int>&)> visit =
            [&](const TreeP& root, const TreeP& t, std::vector<int>& path) {
                if (t->is_leaf()) return;
                if (!t->l->is_leaf()) {
                    // [[x,y],z] = [[x,z],y] + [x,[y,z]] in context
                    const TreeP &x = t->l->l, &y = t->l->r, &z = t->r;
                    TreeP r1 = replace_at(root, path, 0, node(node(x, z), y));
                    TreeP r2 = replace_at(root, path, 0, node(x, node(y, z)));
                    std::map<long, Int> row;
                    auto acc = [&](const TreeP& w, int sgn) {
                        auto [s, i] = [&] {
                            auto [sg, c] = qcanon(w);
                            return std::pair<int, long>{sg, q->index.at(qkey(c))};
                        }();
                        Int nv = (row.count(i) ? row[i] : Int(0)) + sgn * s;
                        if (nv == 0)
                            row.erase(i);
                        else
                            row[i] = nv;
                    };
                    acc(root, 1);
                    acc(r1, -1);
                    acc(r2, -1);
                    if (!row.empty()) {
                        std::ostringstream key;
                        // sign-normalize for dedup
                        int flip = row.begin()->second < 0 ? -1 : 1;
                        for (auto& [i, c] : row) key << i << ":" << Int(flip * c).get_str() << ";";
                        if (seen.insert(key.str()).second) {
                            std::vector<Int> full(G);
                            for (auto& [i, c] : row) full[i] = c;
                            ech.add_row(std::move(full));
                        }
                    }
                }
                path.push_back(0);
                visit(root, t->l, path);
                path.back() = 1;
                visit(root, t->r, path);
                path.pop_back();
            };
        for (auto& t : planar) {
            std::vector<int> path;
            visit(t, t, path);
        }

        IntMatrix rel_jacobi = ech.as_columns();
        IntMatrix rels(G, static_cast<long>(torsion_cols.size()) + rel_jacobi.cols());
        for (size_t c = 0; c < torsion_cols.size(); ++c)
            for (long r = 0; r < G; ++r) rels(r, static_cast<long>(c)) = torsion_cols[c][r];
        for (long c = 0; c < rel_jacobi.cols(); ++c)
            for (long r = 0; r < G; ++r) rels(r, static_cast<long>(torsion_cols.size()) + c) = rel_jacobi(r, c);
        q->mod = PresentedModule(G, std::move(rels));
        return q;
    });
}

std::vector<Int> DqkModule::source_vec(int gen, const TreeP& t) const {
    const long G = static_cast<long>(q1->gens.size());
    std::vector<Int> v(static_cast<size_t>(n) * G);
    auto [s, i] = q1->canon_index(t);
    v[static_cast<size_t>(gen) * G + i] = s;
    return v;
}

std::optional<std::vector<Int>> DqkModule::kernel_coords(const std::vector<Int>& source_elt) const {
    return exactla::solve(kernel.incl_snf, source_elt);
}

std::shared_ptr<const DqkModule> dqk_module(int n, int k) {
    return g_dqk.get({n, k}, [n, k]() {
        auto dq = std::make_shared<DqkModule>();
        dq->n = n;
        dq->k = k;
        dq->q1 = quasi_lie(n, k + 1);
        dq->q2 = quasi_lie(n, k + 2);
        const long G1 = static_cast<long>(dq->q1->gens.size());
        const long G2 = static_cast<long>(dq->q2->gens.size());

        // source presentation: H (x) L^q_{k+1}
        const IntMatrix& r1 = dq->q1->mod.relations();
        IntMatrix src_rels(n * G1, n * r1.cols());
        for (int i = 0; i < n; ++i)
            for (long c = 0; c < r1.cols(); ++c)
                for (long r = 0; r < G1; ++r)
                    src_rels(static_cast<long>(i) * G1 + r, static_cast<long>(i) * r1.cols() + c) =
                        r1(r, c);
        dq->source = PresentedModule(n * G1, std::move(src_rels));

        // bracket map into L^q_{k+2}
        IntMatrix F(G2, n * G1);
        par_for(n * G1, default_exec(), [&](long col) {
            int i = static_cast<int>(col / G1);
            long t = col % G1;
            auto [s, j] = dq->q2->canon_index(node(leaf(i), dq->q1->gens[t]));
            F(j, col) = s;
        });
        dq->kernel = exactla::presented_map_kernel(F, dq->source, dq->q2->mod);
        return dq;
    });
}

// ---- s, p and the two exact sequences --------------------------------------

SMapData s_map(int n, int j) {
    auto dq = dqk_module(n, 2 * j - 1);
    auto bj = lyndon_basis(n, j);
    const long W = bj->size();

    IntMatrix rels(n * W, n * W);
    for (long i = 0; i < n * W; ++i) rels(i, i) = 2;
    SMapData out;
    out.source = PresentedModule(n * W, std::move(rels));

    IntMatrix m(dq->kernel.module.generators(), n * W);
    for (int i = 0; i < n; ++i)
        for (long w = 0; w < W; ++w) {
            TreeP u = bj->brackets[w];
            std::vector<Int> v = dq->source_vec(i, node(u, u));
            auto coords = dq->kernel_coords(v);
            if (!coords) throw std::runtime_error("s: h (x) [u,u] escaped the quasi-Lie bracket kernel");
            for (long r = 0; r < m.rows(); ++r) m(r, static_cast<long>(i) * W + w) = (*coords)[r];
        }
    out.matrix = std::move(m);
    exactla::check_well_defined(out.matrix, out.source, dq->kernel.module);
    return out;
}

IntMatrix dq_to_d_matrix(const DqkModule& dq) {
    auto dk = dk_basis(dq.n, dq.k);
    auto dk_snf = exactla::smith_normal_form(dk->basis, jlcalc::default_exec(), exactla::SnfOptions{true, false, false});
    const long G1 = static_cast<long>(dq.q1->gens.size());
    long w1 = witt_number(dq.n, dq.k + 1);
    IntMatrix out(dk->rank(), dq.kernel.inclusion.cols());
    for (long c = 0; c < dq.kernel.inclusion.cols(); ++c) {
        std::vector<Int> acc(static_cast<size_t>(dq.n) * w1);
        for (int i = 0; i < dq.n; ++i)
            for (long t = 0; t < G1; ++t) {
                const Int& coeff = dq.kernel.inclusion(static_cast<long>(i) * G1 + t, c);
                if (coeff == 0) continue;
                LieElement lie = normalize_bracket(dq.q1->gens[t], dq.n);
                for (long x = 0; x < w1; ++x)
                    acc[static_cast<size_t>(i) * w1 + x] += coeff * lie.c[x];
            }
        auto sol = exactla::solve(dk_snf, acc);
        if (!sol) throw std::runtime_error("dq element does not map into D_k");
        for (long r = 0; r < out.rows(); ++r) out(r, c) = (*sol)[r];
    }
    return out;
}

SequenceReport check_sequence_odd(int n, int j) {
    SequenceReport rep;
    auto dq = dqk_module(n, 2 * j - 1);
    SMapData s = s_map(n, j);

    auto ker_s = exactla::presented_map_kernel(s.matrix, s.source, dq->kernel.module);
    rep.s_injective = ker_s.module.free_rank() == 0 && ker_s.module.torsion().empty();

    IntMatrix q = dq_to_d_matrix(*dq);
    auto dk = dk_basis(n, 2 * j - 1);
    auto q_snf = exactla::smith_normal_form(q, jlcalc::default_exec(), exactla::SnfOptions{true, false, false});
    rep.q_surjective = true;
    for (long m = 0; m < dk->rank(); ++m) {
        std::vector<Int> e(dk->rank());
        e[m] = 1;
        if (!exactla::solve(q_snf, e)) {
            rep.q_surjective = false;
            break;
        }
    }

    // q o s = 0 and ker q = im s
    bool ok = true;
    IntMatrix qs = exactla::multiply(q, s.matrix);
    ok = qs.is_zero();
    if (ok) {
        PresentedModule free_target = PresentedModule::free_module(dk->rank());
        auto ker_q = exactla::presented_map_kernel(q, dq->kernel.module, free_target);
        for (long c = 0; c < ker_q.inclusion.cols() && ok; ++c)
            ok = exactla::in_image(s.matrix, dq->kernel.module, ker_q.inclusion.col(c));
    }
    rep.ker_q_equals_im_s = ok;
    return rep;
}

PMapData p_map(int n, int j) {
    auto dq = dqk_module(n, 2 * j);
    auto dk = dk_basis(n, 2 * j);
    auto bj1 = lyndon_basis(n, j + 1);
    const long W = bj1->size();
    const long R = dk->rank();
    auto dk_snf = exactla::smith_normal_form(dk->basis, jlcalc::default_exec(), exactla::SnfOptions{true, false, false});

    PMapData out;
    {
        IntMatrix rels(W, W);
        for (long i = 0; i < W; ++i) rels(i, i) = 2;
        out.target = PresentedModule(W, std::move(rels));
    }

    IntMatrix Q = dq_to_d_matrix(*dq);
    IntMatrix Wm(R, W);
    for (long u = 0; u < W; ++u) {
        std::vector<Int> e = joined_tree_eta(bj1->brackets[u], bj1->brackets[u], n);
        for (auto& x : e) {
            assert(x % 2 == 0);
            x /= 2;
        }
        auto sol = exactla::solve(dk_snf, e);
        if (!sol) throw std::runtime_error("eta(1/2 tr(u) odot tr(u)) escaped D_2j");
        for (long r = 0; r < R; ++r) Wm(r, u) = (*sol)[r];
    }
    out.half_tr_images = Wm;

    IntMatrix QW = IntMatrix::hconcat(Q, Wm);
    auto qw_snf = exactla::smith_normal_form(QW, jlcalc::default_exec(), exactla::SnfOptions{true, false, false});

    // mod-2 ambiguity: kernel lattice of [Q|W] must have even z-part
    out.well_defined = true;
    IntMatrix K = exactla::integer_kernel(QW);
    for (long c = 0; c < K.cols() && out.well_defined; ++c)
        for (long r = Q.cols(); r < QW.cols(); ++r)
            if (K(r, c) % 2 != 0) {
                out.well_defined = false;
                break;
            }

    IntMatrix P(W, R);
    for (long m = 0; m < R; ++m) {
        std::vector<Int> e(R);
        e[m] = 1;
        auto sol = exactla::solve(qw_snf, e);
        if (!sol) throw std::runtime_error("D_2j element not generated by im(D^q) and tr-squares");
        for (long u = 0; u < W; ++u) {
            Int r;
            mpz_fdiv_r_ui(r.get_mpz_t(), (*sol)[Q.cols() + u].get_mpz_t(), 2);
            P(u, m) = r;
        }
    }
    out.matrix = std::move(P);
    return out;
}

SequenceReportEven check_sequence_even(int n, int j) {
    SequenceReportEven rep;
    auto dq = dqk_module(n, 2 * j);
    auto dk = dk_basis(n, 2 * j);
    const long R = dk->rank();

    IntMatrix Q = dq_to_d_matrix(*dq);
    {
        PresentedModule free_target = PresentedModule::free_module(R);
        auto ker_q = exactla::presented_map_kernel(Q, dq->kernel.module, free_target);
        rep.q_injective = ker_q.module.free_rank() == 0 && ker_q.module.torsion().empty();
    }

    PMapData p = p_map(n, j);
    rep.p_well_defined = p.well_defined;

    // p(eta(1/2 tr u odot tr u)) = u (x) 1
    IntMatrix pw = exactla::multiply(p.matrix, p.half_tr_images);
    rep.p_sends_half_tr_to_u = true;
    for (long i = 0; i < pw.rows() && rep.p_sends_half_tr_to_u; ++i)
        for (long j2 = 0; j2 < pw.cols(); ++j2) {
            Int want = (i == j2) ? 1 : 0;
            if ((pw(i, j2) - want) % 2 != 0) {
                rep.p_sends_half_tr_to_u = false;
                break;
            }
        }

    PresentedModule src_free = PresentedModule::free_module(R);
    auto coker = exactla::presented_cokernel(p.matrix, src_free, p.target);
    rep.p_surjective = coker.free_rank() == 0 && coker.torsion().empty();

    bool ok = true;
    IntMatrix pq = exactla::multiply(p.matrix, Q);
    for (long i = 0; i < pq.rows() && ok; ++i)
        for (long j2 = 0; j2 < pq.cols(); ++j2)
            if (pq(i, j2) % 2 != 0) {
                ok = false;
                break;
            }
    if (ok) {
        auto ker_p = exactla::presented_map_kernel(p.matrix, src_free, p.target);
        auto q_snf = exactla::smith_normal_form(Q, jlcalc::default_exec(), exactla::SnfOptions{true, false, false});
        for (long c = 0; c < ker_p.inclusion.cols() && ok; ++c)
            ok = exactla::solve(q_snf, ker_p.inclusion.col(c)).has_value();
    }
    rep.ker_p_equals_im_q = ok;
    return rep;
}

} // namespace jlcalc::freelie
