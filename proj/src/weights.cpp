#include "bowforge/weights.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "bowforge/checked.hpp"

namespace bowforge {

Int AffineWeight::charge() const {
    Int c = 0;
    for (Int x : values) c = add_checked(c, x);
    return c;
}

SeparatedTriple separated_triple(const SeparatedForm& s) {
    SeparatedTriple t;
    for (int k = 1; k <= s.n; ++k) t.tl.push_back(sub_checked(s.v(k - 1), s.v(k)));
    for (int i = 1; i <= s.w; ++i) t.mu.push_back(sub_checked(s.v(-(i - 1)), s.v(-i)));
    t.v = s.n > 0 ? s.v(s.n) : s.v(-s.w);
    return t;
}

BowDiagram separated_from_triple(const SeparatedTriple& t) {
    const int n = static_cast<int>(t.tl.size());
    const int w = static_cast<int>(t.mu.size());
    if (n + w == 0) throw std::invalid_argument("empty triple");
    Int sl = std::accumulate(t.tl.begin(), t.tl.end(), Int(0));
    Int sm = std::accumulate(t.mu.begin(), t.mu.end(), Int(0));
    if (sl != sm) throw std::invalid_argument("tl and mu have different charge");
    BowDiagram d;
    d.shape = Shape::Affine;
    // positions 0..n-1 hold e_n .. e_1, then x_1 .. x_w
    for (int i = 0; i < n + w; ++i) d.nodes.push_back({i, i < n ? NodeKind::Arrow : NodeKind::XPoint});
    d.dims.assign(n + w, 0);
    // right of e_s is v_{s-1} = v + sum_{j >= s} tl_j
    Int acc = t.v;
    for (int s = n; s >= 1; --s) {
        acc = add_checked(acc, t.tl[s - 1]);
        d.dims[n - s] = acc;
    }
    // right of x_k is v_{-k} = v + sum_{i > k} mu_i
    acc = t.v;
    for (int k = w; k >= 1; --k) {
        d.dims[n + k - 1] = acc;
        acc = add_checked(acc, t.mu[k - 1]);
    }
    return d;
}

bool gyd_membership(const std::vector<Int>& vec, Int n) {
    if (vec.empty()) return true;
    for (std::size_t i = 1; i < vec.size(); ++i)
        if (vec[i] > vec[i - 1]) return false;
    return vec.back() >= vec.front() - n;
}

std::vector<Int> transpose_gyd(const std::vector<Int>& lam, Int n) {
    const Int rows = static_cast<Int>(lam.size());
    if (rows == 0 || n <= 0) throw std::invalid_argument("transpose needs rows >= 1 and level >= 1");
    if (!gyd_membership(lam, n)) throw std::invalid_argument("not a generalized Young diagram");
    // Box (i, s) of block M is grey iff n*M + s <= lam_i.  Below block m_lo
    // everything is grey, above m_hi everything is white.
    const Int m_lo = floor_div(lam.back(), n);
    const Int m_hi = floor_div(lam.front(), n) + 1;
    std::vector<Int> out(n, 0);
    for (Int s = 1; s <= n; ++s) {
        Int grey = 0;
        for (Int m = m_lo; m <= m_hi; ++m)
            for (Int i = 1; i <= rows; ++i)
                if (add_checked(mul_checked(n, m), s) <= lam[i - 1]) ++grey;
        out[s - 1] = add_checked(mul_checked(rows, m_lo), grey);
    }
    return out;
}

bool dominance_ge(const AffineWeight& a, const AffineWeight& b) {
    if (a.values.size() != b.values.size()) throw std::invalid_argument("weights of different rank");
    if (a.level != b.level || a.charge() != b.charge()) return false;
    const Int dd = sub_checked(a.dpair, b.dpair);
    Int partial = 0;
    for (std::size_t j = 0; j < a.values.size(); ++j) {
        partial = add_checked(partial, sub_checked(a.values[j], b.values[j]));
        if (add_checked(partial, dd) < 0) return false;
    }
    return true;
}

namespace {

Int sum_negative(const std::vector<Int>& v) {
    Int s = 0;
    for (Int x : v)
        if (x < 0) s += x;
    return s;
}

// Move every arrow towards balance: N_e = right - left drops by one each time
// the arrow passes an x-point to its right.
BowDiagram balance_by_hw(BowDiagram d, MoveLog& log, std::size_t cap) {
    const int L = d.size();
    for (std::size_t it = 0; it <= cap; ++it) {
        bool unbalanced = false;
        bool moved = false;
        for (int p = 0; p < L && !moved; ++p) {
            if (d.nodes[p].kind != NodeKind::Arrow) continue;
            int prev = (p + L - 1) % L, next = (p + 1) % L;
            Int ne = d.dims[p] - d.dims[prev];
            if (ne == 0) continue;
            unbalanced = true;
            if (ne > 0 && d.nodes[next].kind == NodeKind::XPoint) {
                log.push_back(Move::hw(d.nodes[p].id, d.nodes[next].id));
                d = apply_hw(d, d.nodes[p].id, d.nodes[next].id);
                moved = true;
            } else if (ne < 0 && d.nodes[prev].kind == NodeKind::XPoint) {
                log.push_back(Move::hw(d.nodes[prev].id, d.nodes[p].id));
                d = apply_hw(d, d.nodes[prev].id, d.nodes[p].id);
                moved = true;
            }
        }
        if (!unbalanced) return d;
        if (!moved) break;
    }
    throw std::logic_error("balancing moves got stuck");
}

std::vector<Int> conjugate(const std::vector<Int>& p, int len) {
    std::vector<Int> out(len, 0);
    for (int j = 1; j <= len; ++j)
        out[j - 1] = std::count_if(p.begin(), p.end(), [j](Int x) { return x >= j; });
    return out;
}

std::optional<AffineWeight> finite_stratum(const SeparatedForm& s) {
    const int n = s.n, w = s.w;
    const Int v0 = s.v(0);
    // tk_s = number of x-points reached by fixed branes from e_s; the tail
    // sums of kappa are what those branes put on v_{-j}.
    std::vector<Int> tk;
    Int prev = w;
    for (int a = 1; a <= n; ++a) {
        Int pick = -1;
        for (Int f = prev; f >= 0 && pick < 0; --f) {
            bool ok = true;
            for (int j = 0; j < w && ok; ++j) {
                Int load = std::max<Int>(0, f - j);
                for (Int t : tk) load += std::max<Int>(0, t - j);
                ok = load <= s.v(-j);
            }
            if (ok) pick = f;
        }
        if (pick < 0) return std::nullopt;
        tk.push_back(pick);
        prev = pick;
    }
    auto kappa = conjugate(tk, w);
    auto mu = separated_triple(s).mu;
    if (std::accumulate(tk.begin(), tk.end(), Int(0)) != v0) return std::nullopt;
    Int tail = std::accumulate(kappa.begin(), kappa.end(), Int(0));
    for (int j = 0; j <= w; ++j) {
        if (j > 0) tail -= kappa[j - 1];
        if (tail > s.v(-j)) return std::nullopt;
    }
    Int head = 0;
    for (int d = 1; d <= n; ++d) {
        head += tk[d - 1];
        if (head < v0 - s.v(d)) return std::nullopt;
    }
    return AffineWeight{kappa, n, 0};
}

std::optional<AffineWeight> affine_stratum(const SeparatedForm& s) {
    const int n = s.n, w = s.w;
    auto t = separated_triple(s);
    const Int total = std::accumulate(t.mu.begin(), t.mu.end(), Int(0));
    if (total < 0 || total >= w) throw std::invalid_argument("affine stratum check needs 0 <= v_0 - v_n < w");

    std::optional<AffineWeight> found;
    std::vector<Int> kappa(w);
    auto test = [&]() {
        auto tk = transpose_gyd(kappa, n);
        // <kappa, d> >= lo keeps kappa >= mu, <= hi keeps the subdiagram inside
        Int lo = 0, partial = 0;
        for (int j = 0; j < w; ++j) {
            partial += kappa[j] - t.mu[j];
            lo = std::max(lo, -partial);
        }
        Int best = 0, suffix = 0;
        for (int j = n; j >= 1; --j) {
            suffix += t.tl[j - 1] - tk[j - 1];
            best = j == n ? suffix : std::min(best, suffix);
        }
        Int hi = t.v + sum_negative(tk) + best;
        if (lo <= hi) found = AffineWeight{kappa, n, lo};
    };
    std::function<void(int, Int)> rec = [&](int i, Int remaining) {
        if (found) return;
        if (i == w) {
            if (remaining == 0) test();
            return;
        }
        const Int c = w - i;
        Int lo = std::max(ceil_div(remaining, c), kappa[0] - n);
        Int hi = std::min(kappa[i - 1], remaining - (c - 1) * (kappa[0] - n));
        for (Int k = lo; k <= hi && !found; ++k) {
            kappa[i] = k;
            rec(i + 1, remaining - k);
        }
    };
    const Int k1_lo = ceil_div(total, w);
    for (Int k1 = k1_lo; k1 <= k1_lo + n && !found; ++k1) {
        kappa[0] = k1;
        rec(1, total - k1);
    }
    return found;
}

}  // namespace

std::optional<BalancedForm> balanced_form(const SeparatedForm& s) {
    if (s.diagram.finite()) throw std::invalid_argument("balanced_form needs an affine diagram");
    if (s.n == 0 || s.w == 0) throw std::invalid_argument("balanced_form needs n,w >= 1");
    auto t = separated_triple(s);
    if (!gyd_membership(t.tl, s.w)) return std::nullopt;

    BalancedForm out;
    std::size_t cap = 4;
    for (Int x : t.tl) cap += static_cast<std::size_t>(std::abs(x)) + 1;
    cap *= static_cast<std::size_t>(s.n + s.w);
    out.diagram = balance_by_hw(s.diagram, out.log, cap);
    const int xw = s.x(s.w);
    Int vhat = out.diagram.dims[out.diagram.position(xw)];
    if (s.w > t.tl.front() && t.tl.front() >= 0) {
        Int fast = t.v + sum_negative(t.tl);
        if (fast != vhat) throw std::logic_error("balanced dimension disagrees with the closed form");
    }
    out.lambda = AffineWeight{transpose_gyd(t.tl, s.w), s.n, vhat};
    out.mu = AffineWeight{t.mu, s.n, 0};
    return out;
}

std::optional<AffineWeight> stratum_check(const SeparatedForm& s, StratumMode mode) {
    if (s.n == 0 || s.w == 0) {
        if (s.diagram.min_dim() < 0) return std::nullopt;
        return AffineWeight{separated_triple(s).mu, s.n, 0};
    }
    if (mode == StratumMode::Finite) {
        if (!s.finite_layout()) throw std::invalid_argument("finite stratum check needs the finite separated layout");
        return finite_stratum(s);
    }
    if (s.diagram.finite()) throw std::invalid_argument("affine stratum check needs an affine diagram");
    return affine_stratum(s);
}

bool stratum_condition(const BowDiagram& d) {
    auto sep = std::get<SeparatedResult>(separate(d, false));
    if (sep.form.n == 0 || sep.form.w == 0) return d.min_dim() >= 0;
    if (d.finite()) return stratum_check(sep.form, StratumMode::Finite).has_value();
    auto norm = std::get<SeparatedResult>(normalize_gap(sep.form, false));
    return stratum_check(norm.form, StratumMode::Affine).has_value();
}

}  // namespace bowforge
