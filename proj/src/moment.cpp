#include "bowforge/moment.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "bowforge/brane.hpp"
#include "bowforge/susy.hpp"

namespace bowforge {

namespace {

using RMat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

int pmod(int p, int L) { return ((p % L) + L) % L; }

struct Block {
    int off = 0, rows = 0, cols = 0;
    int size() const { return rows * cols; }
};

// Per position: x-points use A, Bm, Bp, a, b; arrows use C, D.
struct NodeBlocks {
    Block A, Bm, Bp, a, b, C, D;
};

struct Layout {
    std::vector<NodeBlocks> nodes;
    std::vector<int> seg_row;
    std::vector<int> cond_row;
    int params = 0;
    int rows = 0;
};

Layout make_layout(const BowDiagram& d) {
    if (d.min_dim() < 0) throw std::invalid_argument("negative dimension");
    const int L = d.size();
    Layout lay;
    lay.nodes.resize(L);
    int off = 0;
    auto take = [&](Block& b, Int r, Int c) {
        b = {off, static_cast<int>(r), static_cast<int>(c)};
        off += b.size();
    };
    for (int p = 0; p < L; ++p) {
        Int vl = d.dims[pmod(p - 1, L)], vr = d.dims[p];
        auto& nb = lay.nodes[p];
        if (d.nodes[p].kind == NodeKind::XPoint) {
            take(nb.A, vr, vl);
            take(nb.Bm, vl, vl);
            take(nb.Bp, vr, vr);
            take(nb.a, vr, 1);
            take(nb.b, 1, vl);
        } else {
            take(nb.C, vr, vl);
            take(nb.D, vl, vr);
        }
    }
    lay.params = off;
    int row = 0;
    for (int i = 0; i < L; ++i) {
        lay.seg_row.push_back(row);
        row += static_cast<int>(d.dims[i] * d.dims[i]);
    }
    for (int p = 0; p < L; ++p) {
        if (d.nodes[p].kind != NodeKind::XPoint) {
            lay.cond_row.push_back(-1);
            continue;
        }
        lay.cond_row.push_back(row);
        row += lay.nodes[p].A.size();
    }
    lay.rows = row;
    return lay;
}

struct Assembler {
    const Eigen::VectorXcd& z;
    Eigen::VectorXcd& r;
    Mat* J;

    RMat get(const Block& b) const { return Eigen::Map<const RMat>(z.data() + b.off, b.rows, b.cols); }

    // r[ro..] += s * X * Y  (X: m x k, Y: k x n)
    void prod(int ro, cd s, const Block& X, const Block& Y) {
        const int m = X.rows, k = X.cols, n = Y.cols;
        if (m == 0 || n == 0 || k == 0) return;
        RMat Xm = get(X), Ym = get(Y);
        RMat P = s * (Xm * Ym);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) r(ro + i * n + j) += P(i, j);
        if (!J) return;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < k; ++l) {
                    (*J)(ro + i * n + j, X.off + i * k + l) += s * Ym(l, j);
                    (*J)(ro + i * n + j, Y.off + l * n + j) += s * Xm(i, l);
                }
    }

    void lin(int ro, cd s, const Block& X) {
        for (int t = 0; t < X.size(); ++t) {
            r(ro + t) += s * z(X.off + t);
            if (J) (*J)(ro + t, X.off + t) += s;
        }
    }
};

std::vector<cd> lambda_per_position(const BowDiagram& d, const std::vector<cd>& lambda) {
    std::vector<cd> out(d.size(), cd(0));
    if (lambda.empty()) return out;
    if (static_cast<int>(lambda.size()) != d.n_arrows())
        throw std::invalid_argument("need one lambda per arrow");
    int k = 0;
    for (int p = 0; p < d.size(); ++p)
        if (d.nodes[p].kind == NodeKind::Arrow) out[p] = lambda[k++];
    return out;
}

Eigen::VectorXcd assemble(const BowDiagram& d, const Layout& lay, const Eigen::VectorXcd& z,
                          const std::vector<cd>& lambda, Mat* J) {
    const int L = d.size();
    Eigen::VectorXcd r = Eigen::VectorXcd::Zero(lay.rows);
    if (J) *J = Mat::Zero(lay.rows, lay.params);
    Assembler as{z, r, J};
    auto lam = lambda_per_position(d, lambda);
    for (int i = 0; i < L; ++i) {
        const int ro = lay.seg_row[i];
        const int v = static_cast<int>(d.dims[i]);
        if (v == 0) continue;
        const int p = i, q = pmod(i + 1, L);
        const auto& P = lay.nodes[p];
        const auto& Q = lay.nodes[q];
        if (d.nodes[p].kind == NodeKind::Arrow)
            as.prod(ro, 1.0, P.C, P.D);
        else
            as.lin(ro, -1.0, P.Bp);
        if (d.nodes[q].kind == NodeKind::Arrow)
            as.prod(ro, -1.0, Q.D, Q.C);
        else
            as.lin(ro, 1.0, Q.Bm);
        if (d.nodes[p].kind == NodeKind::Arrow && lam[p] != cd(0))
            for (int t = 0; t < v; ++t) r(ro + t * v + t) -= lam[p];
    }
    for (int p = 0; p < L; ++p) {
        if (lay.cond_row[p] < 0) continue;
        const auto& X = lay.nodes[p];
        const int ro = lay.cond_row[p];
        as.prod(ro, 1.0, X.Bp, X.A);
        as.prod(ro, -1.0, X.A, X.Bm);
        as.prod(ro, 1.0, X.a, X.b);
    }
    return r;
}

Mat block_of(const Eigen::VectorXcd& z, const Block& b) {
    return Eigen::Map<const RMat>(z.data() + b.off, b.rows, b.cols);
}

void put_block(Eigen::VectorXcd& z, const Block& b, const Mat& M) {
    if (M.rows() != b.rows || M.cols() != b.cols) throw std::invalid_argument("matrix shape mismatch");
    Eigen::Map<RMat>(z.data() + b.off, b.rows, b.cols) = M;
}

double fro(const Mat& M) { return M.size() == 0 ? 0.0 : M.norm(); }

// Orthonormal basis of the column space.
Mat orth(const Mat& M, double tol) {
    if (M.cols() == 0 || M.rows() == 0) return Mat(M.rows(), 0);
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double thr = tol * std::max(1.0, sv(0));
    int rank = 0;
    while (rank < sv.size() && sv(rank) > thr) ++rank;
    return svd.matrixU().leftCols(rank);
}

// Orthonormal basis of the null space.
Mat null_basis(const Mat& M, double tol) {
    const Eigen::Index c = M.cols();
    if (c == 0) return Mat(0, 0);
    if (M.rows() == 0) return Mat::Identity(c, c);
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double thr = tol * std::max(1.0, sv(0));
    int rank = 0;
    while (rank < sv.size() && sv(rank) > thr) ++rank;
    return svd.matrixV().rightCols(c - rank);
}

Mat diag_ext(const Mat& M, cd val) {
    Mat out = Mat::Zero(M.rows() + 1, M.cols() + 1);
    if (M.size() > 0) out.topLeftCorner(M.rows(), M.cols()) = M;
    out(M.rows(), M.cols()) = val;
    return out;
}

Mat add_row(const Mat& M, const Mat& row) {
    Mat out = Mat::Zero(M.rows() + 1, M.cols());
    if (M.size() > 0) out.topRows(M.rows()) = M;
    if (row.size() > 0) out.row(M.rows()) = row;
    return out;
}

Mat add_col(const Mat& M, const Mat& col) {
    Mat out = Mat::Zero(M.rows(), M.cols() + 1);
    if (M.size() > 0) out.leftCols(M.cols()) = M;
    if (col.size() > 0) out.col(M.cols()) = col;
    return out;
}

// (B - c)^{-1}, refusing near-singular shifts.
Mat shifted_inverse(const Mat& B, cd c) {
    const Eigen::Index k = B.rows();
    if (k == 0) return Mat(0, 0);
    Mat S = B - c * Mat::Identity(k, k);
    Eigen::JacobiSVD<Mat> svd(S);
    const auto& sv = svd.singularValues();
    if (sv(k - 1) <= 1e-9 * std::max(1.0, sv(0))) throw std::runtime_error("shift hits a spectrum");
    return S.inverse();
}

Eigen::VectorXcd random_start(int n, std::uint64_t seed, double scale) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, scale / std::sqrt(2.0));
    Eigen::VectorXcd z(n);
    for (int i = 0; i < n; ++i) z(i) = cd(g(rng), g(rng));
    return z;
}

struct Attempt {
    Eigen::VectorXcd z;
    int iterations = 0;
};

// Parameters listed in `frozen` keep their starting value.
Attempt levenberg_marquardt(const BowDiagram& d, const Layout& lay, Eigen::VectorXcd z, const std::vector<cd>& lambda,
                            int max_iters, const std::vector<int>& frozen = {}) {
    Mat J, Jt;
    auto freeze = [&](Mat& M) {
        for (int i : frozen) M.col(i).setZero();
    };
    Eigen::VectorXcd r = assemble(d, lay, z, lambda, &J);
    freeze(J);
    double cost = r.squaredNorm();
    double mu = 1e-3;
    int it = 0;
    for (; it < max_iters; ++it) {
        if (std::sqrt(cost) <= 1e-13 * (1.0 + z.norm())) break;
        Mat JJ = J * J.adjoint();
        JJ.diagonal().array() += mu;
        Eigen::VectorXcd y = JJ.ldlt().solve(r);
        Eigen::VectorXcd step = -(J.adjoint() * y);
        Eigen::VectorXcd zt = z + step;
        Eigen::VectorXcd rt = assemble(d, lay, zt, lambda, &Jt);
        freeze(Jt);
        double ct = rt.squaredNorm();
        if (std::isfinite(ct) && ct < cost) {
            z = std::move(zt);
            r = std::move(rt);
            std::swap(J, Jt);
            // stalled at machine precision
            if (cost - ct <= 1e-30) {
                cost = ct;
                break;
            }
            cost = ct;
            mu = std::max(mu * 0.3, 1e-15);
        } else {
            mu *= 10.0;
            if (mu > 1e10) break;
        }
    }
    return {z, it};
}

void finalize(const BowDiagram& d, Solution& s, const std::vector<cd>& lambda, double rank_tol) {
    auto rep = moment_residual(d, s, lambda);
    s.residual = rep.total + rep.cond_a_total;
    s.stable = stability_check(d, s, rank_tol).ok();
}

bool accepted(const Solution& s, double tol) { return s.stable && s.residual <= acceptance_threshold(s, tol); }

// Splits the arc covered by an unfixed brane into increments between
// consecutive nodes of the endpoint kind.
std::vector<Move> increments_for(const BowDiagram& host, const Brane& b) {
    const int L = host.size();
    const int from = b.span > 0 ? b.start : b.end;
    const Int len = std::abs(b.span);
    const NodeKind kind = host.nodes[host.position(from)].kind;
    const MoveOp op = kind == NodeKind::Arrow ? MoveOp::IncrementArrows : MoveOp::IncrementX;
    std::vector<Move> out;
    int p0 = host.position(from);
    int piece_start = from;
    for (Int k = 1; k <= len; ++k) {
        int p = pmod(p0 + static_cast<int>(k), L);
        if (host.nodes[p].kind != kind) continue;
        Move m{op, piece_start, host.nodes[p].id, 1, -1};
        for (Int t = 0; t < b.mult; ++t) out.push_back(m);
        piece_start = host.nodes[p].id;
    }
    return out;
}

Solution extend_all(BowDiagram& at, Solution sol, const std::vector<Move>& incs) {
    for (const auto& m : incs) {
        cd c = choose_shift(at, sol);
        sol = extend_increment(at, sol, m, c);
        at = apply_increment(at, m);
    }
    return sol;
}

// Only arrows or only x-points: zero solution plus explicit increments.
Solution single_kind_solution(const BowDiagram& d) {
    BowDiagram at = d;
    std::fill(at.dims.begin(), at.dims.end(), 0);
    Solution sol = zero_solution(at);
    if (d.n_xpoints() == 0) return zero_solution(d);
    const int L = d.size();
    std::vector<Move> incs;
    for (int i = 0; i < L; ++i) {
        Move m{MoveOp::IncrementX, d.nodes[i].id, d.nodes[pmod(i + 1, L)].id, 1, -1};
        for (Int t = 0; t < d.dims[i]; ++t) incs.push_back(m);
    }
    return extend_all(at, sol, incs);
}

}  // namespace

Solution zero_solution(const BowDiagram& d) {
    auto lay = make_layout(d);
    return unpack(d, Eigen::VectorXcd::Zero(lay.params));
}

Eigen::VectorXcd pack(const BowDiagram& d, const Solution& m) {
    auto lay = make_layout(d);
    Eigen::VectorXcd z(lay.params);
    for (int p = 0; p < d.size(); ++p) {
        const int id = d.nodes[p].id;
        const auto& nb = lay.nodes[p];
        if (d.nodes[p].kind == NodeKind::XPoint) {
            auto it = m.triangles.find(id);
            if (it == m.triangles.end()) throw std::invalid_argument("missing triangle");
            put_block(z, nb.A, it->second.A);
            put_block(z, nb.Bm, it->second.Bm);
            put_block(z, nb.Bp, it->second.Bp);
            put_block(z, nb.a, it->second.a);
            put_block(z, nb.b, it->second.b);
        } else {
            auto it = m.arrows.find(id);
            if (it == m.arrows.end()) throw std::invalid_argument("missing arrow data");
            put_block(z, nb.C, it->second.C);
            put_block(z, nb.D, it->second.D);
        }
    }
    return z;
}

Solution unpack(const BowDiagram& d, const Eigen::VectorXcd& z) {
    auto lay = make_layout(d);
    if (z.size() != lay.params) throw std::invalid_argument("parameter vector has the wrong length");
    Solution m;
    for (int p = 0; p < d.size(); ++p) {
        const int id = d.nodes[p].id;
        const auto& nb = lay.nodes[p];
        if (d.nodes[p].kind == NodeKind::XPoint)
            m.triangles[id] = {block_of(z, nb.A), block_of(z, nb.Bm), block_of(z, nb.Bp), block_of(z, nb.a),
                               block_of(z, nb.b)};
        else
            m.arrows[id] = {block_of(z, nb.C), block_of(z, nb.D)};
    }
    return m;
}

void check_shapes(const BowDiagram& d, const Solution& m) {
    (void)pack(d, m);
    if (m.triangles.size() != static_cast<std::size_t>(d.n_xpoints()) ||
        m.arrows.size() != static_cast<std::size_t>(d.n_arrows()))
        throw std::invalid_argument("solution has data for unknown nodes");
}

double solution_norm(const Solution& m) {
    double s = 0;
    for (const auto& [id, t] : m.triangles)
        for (const Mat* M : {&t.A, &t.Bm, &t.Bp, &t.a, &t.b}) s += M->size() ? M->squaredNorm() : 0.0;
    for (const auto& [id, a] : m.arrows)
        for (const Mat* M : {&a.C, &a.D}) s += M->size() ? M->squaredNorm() : 0.0;
    return std::sqrt(s);
}

ResidualReport moment_residual(const BowDiagram& d, const Solution& m, const std::vector<cd>& lambda) {
    auto lay = make_layout(d);
    Eigen::VectorXcd z = pack(d, m);
    Eigen::VectorXcd r = assemble(d, lay, z, lambda.empty() ? m.lambda : lambda, nullptr);
    ResidualReport rep;
    for (int i = 0; i < d.size(); ++i) {
        int v = static_cast<int>(d.dims[i]);
        Mat B = Eigen::Map<const RMat>(r.data() + lay.seg_row[i], v, v);
        rep.total += fro(B);
        rep.segments.push_back(std::move(B));
    }
    for (int p = 0; p < d.size(); ++p) {
        if (lay.cond_row[p] < 0) continue;
        const auto& A = lay.nodes[p].A;
        Mat B = Eigen::Map<const RMat>(r.data() + lay.cond_row[p], A.rows, A.cols);
        rep.cond_a_total += fro(B);
        rep.cond_a.push_back(std::move(B));
    }
    return rep;
}

bool StabilityReport::ok() const {
    return std::all_of(points.begin(), points.end(), [](const PointStability& p) { return p.s1 && p.s2; });
}

StabilityReport stability_check(const BowDiagram& d, const Solution& m, double tol) {
    check_shapes(d, m);
    StabilityReport rep;
    rep.tol = tol;
    for (int p = 0; p < d.size(); ++p) {
        if (d.nodes[p].kind != NodeKind::XPoint) continue;
        const auto& t = m.triangles.at(d.nodes[p].id);
        PointStability ps;
        ps.node = d.nodes[p].id;
        const Eigen::Index vm = t.Bm.rows(), vp = t.Bp.rows();
        if (t.A.size() > 0) ps.cond_a = fro(t.Bp * t.A - t.A * t.Bm + t.a * t.b);

        // largest B- invariant subspace inside Ker A ∩ Ker b
        Mat stacked(vp + 1, vm);
        if (vm > 0) {
            if (vp > 0) stacked.topRows(vp) = t.A;
            stacked.bottomRows(1) = t.b;
        }
        Mat K = null_basis(stacked, tol);
        while (K.cols() > 0) {
            Mat P = Mat::Identity(vm, vm) - K * K.adjoint();
            Mat N = null_basis(P * t.Bm * K, tol);
            if (N.cols() == K.cols()) break;
            K = orth(K * N, tol);
        }
        ps.s1_kernel = static_cast<int>(K.cols());
        ps.s1 = K.cols() == 0;

        // smallest B+ invariant subspace containing Im A + Im a
        if (vp > 0) {
            Mat gen(vp, vm + 1);
            if (vm > 0) gen.leftCols(vm) = t.A;
            gen.rightCols(1) = t.a;
            Mat T = orth(gen, tol);
            for (;;) {
                Mat both(vp, 2 * T.cols());
                if (T.cols() == 0) break;
                both << T, t.Bp * T;
                Mat T2 = orth(both, tol);
                if (T2.cols() == T.cols()) break;
                T = T2;
            }
            ps.s2_span = static_cast<int>(T.cols());
            ps.s2 = T.cols() == vp;
        }
        rep.points.push_back(ps);
    }
    return rep;
}

Eigen::VectorXcd residual_vector(const BowDiagram& d, const Eigen::VectorXcd& z, const std::vector<cd>& lambda,
                                 Mat* jac) {
    auto lay = make_layout(d);
    if (z.size() != lay.params) throw std::invalid_argument("parameter vector has the wrong length");
    return assemble(d, lay, z, lambda, jac);
}

Eigen::VectorXd objective_gradient(const BowDiagram& d, const Eigen::VectorXcd& z, const std::vector<cd>& lambda) {
    Mat J;
    Eigen::VectorXcd r = residual_vector(d, z, lambda, &J);
    Eigen::VectorXcd g = J.adjoint() * r;
    Eigen::VectorXd out(2 * z.size());
    out.head(z.size()) = g.real();
    out.tail(z.size()) = g.imag();
    return out;
}

cd choose_shift(const BowDiagram& d, const Solution& m, double gap) {
    std::vector<cd> eig;
    auto add = [&](const Mat& M) {
        if (M.rows() == 0) return;
        Eigen::ComplexEigenSolver<Mat> es(M, false);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) eig.push_back(es.eigenvalues()(i));
    };
    for (const auto& [id, t] : m.triangles) {
        add(t.Bm);
        add(t.Bp);
    }
    for (const auto& [id, a] : m.arrows) {
        if (a.C.size() == 0) continue;
        add(a.C * a.D);
        add(a.D * a.C);
    }
    (void)d;
    for (int c = 1;; ++c) {
        bool clear = true;
        for (const cd& s : eig) {
            const double lim = gap;
            if (std::abs(s - cd(c)) <= lim || std::abs(s + cd(c)) <= lim) clear = false;
        }
        if (clear) return cd(c);
    }
}

Solution extend_increment(const BowDiagram& d, const Solution& m, const Move& entry, cd c) {
    if (entry.op != MoveOp::IncrementArrows && entry.op != MoveOp::IncrementX)
        throw std::invalid_argument("not an increment entry");
    if (entry.amount != 1) throw std::invalid_argument("extensions take one unit at a time");
    check_shapes(d, m);
    const NodeKind want = entry.op == MoveOp::IncrementArrows ? NodeKind::Arrow : NodeKind::XPoint;
    if (d.nodes[d.position(entry.left)].kind != want || d.nodes[d.position(entry.right)].kind != want)
        throw std::invalid_argument("increment endpoints have the wrong kind");
    const bool arrows = entry.op == MoveOp::IncrementArrows;
    if (arrows)
        for (const cd& l : m.lambda)
            if (l != cd(0)) throw std::invalid_argument("arrow increments need lambda = 0");

    const int L = d.size();
    auto segs = arc_segments(d, entry.left, entry.right);
    std::set<int> inc(segs.begin(), segs.end());
    if (d.finite() && inc.count(d.cut())) throw std::invalid_argument("increment crosses the cut");

    const cd beta = arrows ? cd(0) : c;   // new eigenvalue of B on the added line
    const cd gamma = arrows ? cd(0) : -c; // D on the added line of interior arrows
    Solution out = m;
    for (int p = 0; p < L; ++p) {
        const int id = d.nodes[p].id;
        const bool left = inc.count(pmod(p - 1, L)) > 0;
        const bool right = inc.count(p) > 0;
        if (!left && !right) continue;
        if (d.nodes[p].kind == NodeKind::XPoint) {
            const auto& t = m.triangles.at(id);
            TriangleData n = t;
            // the new line carries eigenvalue c next to the old B's
            if (!arrows) {
                if (right) shifted_inverse(t.Bp, c);
                if (left) shifted_inverse(t.Bm, c);
            }
            if (left && right) {
                n.A = diag_ext(t.A, 1.0);
                n.Bm = diag_ext(t.Bm, beta);
                n.Bp = diag_ext(t.Bp, beta);
                n.a = add_row(t.a, Mat::Zero(1, 1));
                n.b = add_col(t.b, Mat::Zero(1, 1));
            } else if (right) {
                // arc starts here
                n.Bp = diag_ext(t.Bp, c);
                n.a = add_row(t.a, Mat::Ones(1, 1));
                n.A = add_row(t.A, t.b * shifted_inverse(t.Bm, c));
            } else {
                // arc ends here
                n.Bm = diag_ext(t.Bm, c);
                n.b = add_col(t.b, Mat::Ones(1, 1));
                n.A = add_col(t.A, -(shifted_inverse(t.Bp, c) * t.a));
            }
            out.triangles[id] = n;
        } else {
            const auto& a = m.arrows.at(id);
            ArrowData n = a;
            if (left && right) {
                n.C = diag_ext(a.C, 1.0);
                n.D = diag_ext(a.D, gamma);
            } else if (right) {
                n.C = add_row(a.C, Mat());
                n.D = add_col(a.D, Mat());
            } else {
                n.C = add_col(a.C, Mat());
                n.D = add_row(a.D, Mat());
            }
            out.arrows[id] = n;
        }
    }
    return out;
}

double acceptance_threshold(const Solution& m, double tol) {
    double nm = solution_norm(m);
    return tol * (1.0 + nm * nm);
}

SolveResult solve_numeric(const BowDiagram& d, const std::vector<cd>& lambda, const SolveOptions& opt) {
    return solve_numeric(d, lambda, opt, Solution{});
}

SolveResult solve_numeric(const BowDiagram& d, const std::vector<cd>& lambda, const SolveOptions& opt,
                          const Solution& warm) {
    auto lay = make_layout(d);
    SolveResult res;
    res.best_residual = std::numeric_limits<double>::infinity();
    const bool have_warm = !warm.triangles.empty() || !warm.arrows.empty();
    const int total = opt.retries + (have_warm ? 1 : 0);
    for (int attempt = 0; attempt < total; ++attempt) {
        const bool use_warm = have_warm && attempt == 0;
        const std::uint64_t seed = opt.seed + static_cast<std::uint64_t>(attempt - (have_warm ? 1 : 0));
        Eigen::VectorXcd z0 = random_start(lay.params, use_warm ? opt.seed ^ 0x9e3779b97f4a7c15ULL : seed,
                                           opt.init_scale);
        // odd attempts start with some blocks switched off, which reaches
        // components the dense starts miss
        if (!use_warm && attempt % 2 == 1) {
            std::mt19937_64 rng(seed * 0x2545f4914f6cdd1dULL + 1);
            std::bernoulli_distribution off(0.35);
            auto drop = [&](const Block& b) {
                if (b.size() > 0 && off(rng)) z0.segment(b.off, b.size()).setZero();
            };
            for (const auto& nb : lay.nodes)
                for (const Block* b : {&nb.A, &nb.Bm, &nb.Bp, &nb.a, &nb.b, &nb.C, &nb.D}) drop(*b);
        }
        if (use_warm) {
            Solution start = unpack(d, z0);
            auto copy = [](Mat& dst, const Mat& src) {
                const Eigen::Index r = std::min(dst.rows(), src.rows()), c = std::min(dst.cols(), src.cols());
                if (r > 0 && c > 0) dst.topLeftCorner(r, c) = src.topLeftCorner(r, c);
            };
            for (auto& [id, t] : start.triangles) {
                auto it = warm.triangles.find(id);
                if (it == warm.triangles.end()) continue;
                copy(t.A, it->second.A);
                copy(t.Bm, it->second.Bm);
                copy(t.Bp, it->second.Bp);
                copy(t.a, it->second.a);
                copy(t.b, it->second.b);
            }
            for (auto& [id, a] : start.arrows) {
                auto it = warm.arrows.find(id);
                if (it == warm.arrows.end()) continue;
                copy(a.C, it->second.C);
                copy(a.D, it->second.D);
            }
            z0 = pack(d, start);
        }
        auto at = levenberg_marquardt(d, lay, z0, lambda, opt.max_iters);
        Solution s = unpack(d, at.z);
        s.lambda = lambda;
        s.seed = use_warm ? 0 : seed;
        s.iterations = at.iterations;
        finalize(d, s, lambda, opt.rank_tol);
        // A zero on an unstable component.  Even rounds pin a = 0 where S1
        // fails and b = 0 where S2 fails; odd rounds pin a fresh random A at
        // the failing points.  The rest is shaken and polished again.
        const Eigen::VectorXcd landed = at.z;
        const auto failing = stability_check(d, s, opt.rank_tol).points;
        std::mt19937_64 fix_rng(seed ^ 0x5851f42d4c957f2dULL);
        const bool repairable = !s.stable && s.residual <= acceptance_threshold(s, opt.tol);
        for (int round = 0; repairable && round < opt.repairs && !accepted(s, opt.tol); ++round) {
            Eigen::VectorXcd z = landed;
            if (round > 0) {
                std::normal_distribution<double> g(0.0, 0.1 * round);
                for (Eigen::Index i = 0; i < z.size(); ++i) z(i) += cd(g(fix_rng), g(fix_rng));
            }
            std::vector<int> frozen;
            std::normal_distribution<double> g1(0.0, 1.0);
            auto hold = [&](const Block& b, bool random) {
                for (int i = 0; i < b.size(); ++i) {
                    z(b.off + i) = random ? cd(g1(fix_rng), g1(fix_rng)) : cd(0);
                    frozen.push_back(b.off + i);
                }
            };
            for (const auto& pt : failing) {
                if (pt.s1 && pt.s2) continue;
                const auto& nb = lay.nodes[d.position(pt.node)];
                if (round % 2 == 1) {
                    hold(nb.A, true);
                    continue;
                }
                if (!pt.s1) hold(nb.a, false);
                if (!pt.s2) hold(nb.b, false);
            }
            at = levenberg_marquardt(d, lay, z, lambda, opt.max_iters, frozen);
            Solution t = unpack(d, at.z);
            t.lambda = lambda;
            t.seed = s.seed;
            t.iterations = s.iterations + at.iterations;
            finalize(d, t, lambda, opt.rank_tol);
            s = std::move(t);
        }
        ++res.attempts;
        if (s.residual < res.best_residual) res.best_residual = s.residual;
        if (accepted(s, opt.tol)) {
            res.converged = true;
            res.solution = std::move(s);
            return res;
        }
        if (!res.converged && (res.solution.triangles.empty() && res.solution.arrows.empty()))
            res.solution = std::move(s);
    }
    return res;
}

SolveResult construct_solution(const BowDiagram& d, const SolveOptions& opt) {
    auto cert = decide_supersymmetry(d);
    if (!cert.susy) throw std::invalid_argument("diagram is not supersymmetric");
    SolveResult out;
    auto done = [&](Solution s) {
        finalize(d, s, {}, opt.rank_tol);
        out.best_residual = s.residual;
        out.converged = accepted(s, opt.tol) && s.residual <= opt.tol;
        out.solution = std::move(s);
        return out;
    };
    if (d.n_arrows() == 0 || d.n_xpoints() == 0) return done(single_kind_solution(d));

    std::vector<BowDiagram> states{d};
    for (const auto& m : cert.pipeline) states.push_back(apply_move(states.back(), m));
    const BowDiagram& fin = states.back();
    auto ledger = synthesize_finite(require_separated(fin));

    // fixed-only subdiagram and the increments that restore the unfixed branes
    BraneLedger unfixed;
    unfixed.host = fin;
    std::vector<Move> incs;
    for (const auto& b : ledger.branes) {
        if (is_fixed(fin, b)) continue;
        unfixed.branes.push_back(b);
        auto pieces = increments_for(fin, b);
        incs.insert(incs.end(), pieces.begin(), pieces.end());
    }
    BowDiagram base = fin;
    auto cov = coverage(unfixed);
    for (int i = 0; i < base.size(); ++i) base.dims[i] -= cov[i];

    auto stage = solve_numeric(base, {}, opt);
    out.attempts += stage.attempts;
    if (!stage.converged) {
        out.best_residual = stage.best_residual;
        return out;
    }
    BowDiagram at = base;
    Solution sol = extend_all(at, stage.solution, incs);
    if (at.dims != fin.dims) throw std::logic_error("increments did not rebuild the finite diagram");

    std::size_t k = cert.pipeline.size();
    while (k > 0) {
        const Move& m = cert.pipeline[k - 1];
        if (m.op == MoveOp::HW) {
            std::size_t j = k;
            while (j > 0 && cert.pipeline[j - 1].op == MoveOp::HW) --j;
            auto st = solve_numeric(states[j], {}, opt, sol);
            out.attempts += st.attempts;
            if (!st.converged) {
                out.best_residual = st.best_residual;
                return out;
            }
            sol = std::move(st.solution);
            k = j;
        } else if (m.op == MoveOp::SubtractArrowArc) {
            auto s = require_separated(states[k - 1]);
            Move inc{MoveOp::IncrementX, s.x(s.w), s.x(1), 1, -1};
            BowDiagram cur = states[k];
            sol = extend_all(cur, sol, std::vector<Move>(static_cast<std::size_t>(m.amount), inc));
            if (cur.dims != states[k - 1].dims) throw std::logic_error("arc increments did not undo the subtraction");
            --k;
        } else if (m.op == MoveOp::CutAt) {
            --k;
        } else {
            throw std::logic_error("unexpected pipeline entry");
        }
    }
    return done(std::move(sol));
}

}  // namespace bowforge
