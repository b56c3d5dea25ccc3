#include "bowforge/brane.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <tuple>

#include "bowforge/checked.hpp"
#include "bowforge/susy.hpp"

namespace bowforge {

namespace {

int mod(Int p, int L) { return static_cast<int>(((p % L) + L) % L); }

void add_brane(BraneLedger& l, Brane b) {
    if (b.mult == 0) return;
    if (b.span == 0) throw std::logic_error("brane of zero length");
    l.branes.push_back(b);
}

// Remove `mult` copies of a brane equal to b (after normalization).
void remove_brane(BraneLedger& l, const Brane& b) {
    for (auto& x : l.branes)
        if (x.start == b.start && x.end == b.end && x.span == b.span) {
            if (x.mult < b.mult) break;
            x.mult -= b.mult;
            l.branes.erase(std::remove_if(l.branes.begin(), l.branes.end(), [](const Brane& y) { return y.mult == 0; }),
                           l.branes.end());
            return;
        }
    throw std::runtime_error("ledger has no matching brane to remove");
}

Brane normalized(const BowDiagram& host, Brane b) {
    if (is_fixed(host, b)) {
        if (host.nodes[host.position(b.start)].kind != NodeKind::Arrow) {
            std::swap(b.start, b.end);
            b.span = -b.span;
        }
    } else if (b.span > 0) {
        std::swap(b.start, b.end);
        b.span = -b.span;
    }
    return b;
}

// Unfixed brane over the anticlockwise arc from -> to (whole circle if equal).
Brane arc_brane(const BowDiagram& host, int from, int to, Int mult) {
    Int len = static_cast<Int>(arc_segments(host, from, to).size());
    return normalized(host, Brane{from, to, len, mult});
}

// Decompose a nonnegative profile over consecutive x-arc segments into interval branes.
// seg_vals[k] sits between x_ids[k] and x_ids[k+1].
void skyline(BraneLedger& l, const std::vector<int>& x_ids, std::vector<Int> seg_vals) {
    const int m = static_cast<int>(seg_vals.size());
    for (;;) {
        int a = 0;
        while (a < m && seg_vals[a] <= 0) {
            if (seg_vals[a] < 0) throw std::logic_error("negative profile in skyline decomposition");
            ++a;
        }
        if (a == m) return;
        int b = a;
        while (b + 1 < m && seg_vals[b + 1] > 0) ++b;
        Int h = *std::min_element(seg_vals.begin() + a, seg_vals.begin() + b + 1);
        for (int k = a; k <= b; ++k) seg_vals[k] -= h;
        // run over segments a..b, i.e. from node a to node b+1
        add_brane(l, Brane{x_ids.at(b + 1), x_ids.at(a), -(b - a + 1), h});
    }
}

void check_coverage(const BraneLedger& l, const char* where) {
    if (coverage(l) != l.host.dims)
        throw std::logic_error(std::string("ledger coverage differs from host dims after ") + where);
}

}  // namespace

Direction brane_dir(const Brane& b) { return b.span > 0 ? Direction::Acw : Direction::Cw; }

Int brane_laps(const Brane& b, int L) { return std::abs(b.span) / L; }

bool is_fixed(const BowDiagram& host, const Brane& b) {
    return host.nodes[host.position(b.start)].kind != host.nodes[host.position(b.end)].kind;
}

Brane make_brane(const BowDiagram& host, int start, int end, Direction dir, Int laps, Int mult) {
    const int L = host.size();
    if (laps < 0 || mult < 1) throw std::invalid_argument("brane laps must be >= 0 and mult >= 1");
    int ps = host.position(start), pe = host.position(end);
    Int dist = dir == Direction::Acw ? mod(pe - ps, L) : mod(ps - pe, L);
    Int len = add_checked(mul_checked(laps, L), dist);
    if (len == 0) throw std::invalid_argument("brane with equal endpoints needs laps >= 1");
    return Brane{start, end, dir == Direction::Acw ? len : -len, mult};
}

void normalize_ledger(BraneLedger& l) {
    std::map<std::tuple<int, int, Int>, Int> acc;
    std::vector<std::tuple<int, int, Int>> order;
    for (const auto& b : l.branes) {
        Brane n = normalized(l.host, b);
        auto key = std::make_tuple(n.start, n.end, n.span);
        if (!acc.count(key)) order.push_back(key);
        acc[key] += n.mult;
    }
    l.branes.clear();
    for (const auto& key : order)
        if (acc[key] != 0) l.branes.push_back(Brane{std::get<0>(key), std::get<1>(key), std::get<2>(key), acc[key]});
}

std::vector<Int> coverage(const BraneLedger& l) {
    const int L = l.host.size();
    std::vector<Int> cov(L, 0);
    for (const auto& b : l.branes) {
        int p = l.host.position(b.start);
        if (!l.host.has_node(b.end)) throw std::invalid_argument("dangling brane end id");
        Int len = std::abs(b.span);
        Int laps = len / L, rest = len % L;
        for (int i = 0; i < L; ++i) cov[i] = add_checked(cov[i], mul_checked(laps, b.mult));
        for (Int i = 0; i < rest; ++i) {
            int seg = b.span > 0 ? mod(p + i, L) : mod(p - 1 - i, L);
            cov[seg] = add_checked(cov[seg], b.mult);
        }
    }
    return cov;
}

BraneLedger synthesize_finite(const SeparatedForm& s) {
    if (!s.finite_layout()) throw std::invalid_argument("synthesize_finite needs a finite separated layout");
    if (!check_finite_separated(s).susy) throw std::invalid_argument("diagram is not supersymmetric");
    BraneLedger l;
    l.host = s.diagram;
    if (s.n == 0 || s.w == 0) return synthesize_single_kind(s.diagram);

    // prof[k]: what is still to be covered on v_{-k} (k = 0 is the segment to the right of the current arrow)
    std::vector<Int> prof(s.v_x.begin(), s.v_x.end());
    std::vector<int> xs{-1};  // xs[k] = x_k, 1-based
    for (int k = 1; k <= s.w; ++k) xs.push_back(s.x(k));
    int w_cur = s.w;
    for (int si = 1; si <= s.n; ++si) {
        int f = 0;
        for (int cand = 1; cand <= w_cur; ++cand) {
            bool ok = true;
            for (int j = 0; j <= cand && ok; ++j) ok = prof[j] >= cand - j;
            if (!ok) break;
            f = cand;
        }
        for (int j = 1; j <= f; ++j) add_brane(l, Brane{s.e(si), xs[j], si + j - 1, 1});
        Int u = s.v(si) - (prof[0] - f);
        if (u < 0 || (si == s.n && u != 0)) throw std::logic_error("negative unfixed arrow count in synthesis");
        if (u > 0) add_brane(l, Brane{s.e(si), s.e(si + 1), -1, u});
        int jt = 0;
        while (prof[jt] != f - jt) ++jt;
        // leftover beyond jt goes to interval branes
        std::vector<Int> tail;
        std::vector<int> tail_ids;
        for (int k = jt; k <= w_cur; ++k) {
            tail.push_back(prof[k] - std::max(f - k, 0));
            tail_ids.push_back(k == 0 ? -1 : xs[k]);
        }
        // tail[0] is zero by the choice of jt and tail.back() lies on the truncation point
        if (tail.front() != 0 || tail.back() != 0) throw std::logic_error("nonzero profile at an interval end");
        if (tail.size() >= 3) {
            std::vector<Int> inner(tail.begin() + 1, tail.end() - 1);
            std::vector<int> inner_ids(tail_ids.begin() + 1, tail_ids.end());
            skyline(l, inner_ids, inner);
        }
        std::vector<Int> next(jt + 1);
        for (int k = 0; k <= jt; ++k) next[k] = prof[k] - (f - k);
        prof = next;
        w_cur = jt;
    }
    if (prof[0] != 0) throw std::logic_error("arrow arc not exhausted in synthesis");
    if (w_cur >= 2) {
        std::vector<Int> inner(prof.begin() + 1, prof.end() - 1);
        std::vector<int> ids(xs.begin() + 1, xs.begin() + w_cur + 1);
        skyline(l, ids, inner);
    }
    normalize_ledger(l);
    check_coverage(l, "finite synthesis");
    return l;
}

BraneLedger synthesize_single_kind(const BowDiagram& d) {
    if (d.n_arrows() > 0 && d.n_xpoints() > 0) throw std::invalid_argument("diagram has both node kinds");
    if (d.min_dim() < 0) throw std::invalid_argument("diagram is not supersymmetric");
    BraneLedger l;
    l.host = d;
    const int L = d.size();
    std::vector<Int> v = d.dims;
    Int m = *std::min_element(v.begin(), v.end());
    if (m > 0) {
        add_brane(l, Brane{d.nodes[0].id, d.nodes[0].id, -L, m});
        for (auto& x : v) x -= m;
    }
    // linearize at a zero segment z: walk segments z+1, .., z+L-1
    int z = static_cast<int>(std::find(v.begin(), v.end(), 0) - v.begin());
    std::vector<Int> lin;
    std::vector<int> ids;
    for (int i = 1; i < L; ++i) lin.push_back(v[(z + i) % L]);
    for (int i = 1; i <= L; ++i) ids.push_back(d.nodes[(z + i) % L].id);
    if (!lin.empty()) skyline(l, ids, lin);
    normalize_ledger(l);
    check_coverage(l, "single-kind synthesis");
    return l;
}

BraneLedger ledger_apply_move(const BraneLedger& l, const Move& entry, bool inverse) {
    Move m = inverse ? inverse_move(entry, l.host) : entry;
    BraneLedger r = l;
    switch (m.op) {
        case MoveOp::HW: {
            const BowDiagram& h = l.host;
            const int lid = m.left, rid = m.right;
            BowDiagram nh = apply_hw(h, lid, rid);
            // one copy of a winding-0 brane over the between segment is annihilated
            bool removed = false;
            for (auto& b : r.branes) {
                bool between = (b.start == lid && b.end == rid && b.span == 1) ||
                               (b.start == rid && b.end == lid && b.span == -1);
                if (between) {
                    if (b.mult > 1) throw std::runtime_error("ledger is not supersymmetric at the HW pair");
                    b.mult = 0;
                    removed = true;
                    break;
                }
            }
            r.branes.erase(std::remove_if(r.branes.begin(), r.branes.end(), [](const Brane& y) { return y.mult == 0; }),
                           r.branes.end());
            // lid moves one step anticlockwise, rid one step clockwise
            for (auto& b : r.branes) {
                if (b.start == lid) b.span -= 1;
                if (b.end == lid) b.span += 1;
                if (b.start == rid) b.span += 1;
                if (b.end == rid) b.span -= 1;
                if (b.span == 0) throw std::logic_error("brane collapsed during HW transport");
            }
            r.host = nh;
            if (!removed) {
                bool left_is_arrow = h.nodes[h.position(lid)].kind == NodeKind::Arrow;
                if (left_is_arrow)
                    add_brane(r, Brane{lid, rid, -1, 1});
                else
                    add_brane(r, Brane{rid, lid, 1, 1});
            }
            break;
        }
        case MoveOp::IncrementArrows:
        case MoveOp::IncrementX: {
            Brane b = arc_brane(l.host, m.left, m.right, std::abs(m.amount));
            if (m.amount > 0)
                add_brane(r, b);
            else if (m.amount < 0)
                remove_brane(r, b);
            r.host = apply_move(l.host, m);
            break;
        }
        case MoveOp::SubtractArrowArc: {
            auto s = separated_view(l.host);
            if (!s || s->n == 0 || s->w == 0) throw std::invalid_argument("arrow-arc move needs a separated host");
            Brane b = arc_brane(l.host, s->x(s->w), s->x(1), std::abs(m.amount));
            if (m.amount < 0)
                add_brane(r, b);
            else if (m.amount > 0)
                remove_brane(r, b);
            r.host = apply_move(l.host, m);
            break;
        }
        case MoveOp::CutAt:
        case MoveOp::Uncut:
            r.host = apply_move(l.host, m);
            break;
    }
    normalize_ledger(r);
    check_coverage(r, "move transport");
    return r;
}

LedgerSusy check_ledger_susy(const BraneLedger& l) {
    const int L = l.host.size();
    std::map<std::tuple<int, int, int, Int>, Int> count;
    for (const auto& raw : l.branes) {
        if (!is_fixed(l.host, raw)) continue;
        Brane b = normalized(l.host, raw);
        auto key = std::make_tuple(b.start, b.end, static_cast<int>(brane_dir(b)), brane_laps(b, L));
        count[key] += b.mult;
        if (count[key] >= 2) return LedgerSusy{false, b.start, b.end, brane_dir(b), brane_laps(b, L)};
    }
    return {};
}

BraneLedger synthesize(const BowDiagram& d) {
    Certificate c = decide_supersymmetry(d);
    if (!c.susy) throw std::invalid_argument("diagram is not supersymmetric");
    if (d.n_arrows() == 0 || d.n_xpoints() == 0) return synthesize_single_kind(d);
    std::vector<BowDiagram> stages{d};
    for (const auto& m : c.pipeline) stages.push_back(apply_move(stages.back(), m));
    BraneLedger l = synthesize_finite(require_separated(stages.back()));
    for (std::size_t i = c.pipeline.size(); i-- > 0;) {
        l = ledger_apply_move(l, c.pipeline[i], true);
        if (l.host.dims.size() != stages[i].dims.size()) throw std::logic_error("ledger replay lost track of the host");
    }
    l.host = d;
    normalize_ledger(l);
    check_coverage(l, "reverse replay");
    return l;
}

}  // namespace bowforge
