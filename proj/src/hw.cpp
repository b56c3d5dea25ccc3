#include "bowforge/hw.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <sstream>

#include "bowforge/checked.hpp"

namespace bowforge {

namespace {

int mod(int p, int L) { return ((p % L) + L) % L; }

// apply HW and record it; returns a witness if the new middle dim is negative
std::optional<NegativeWitness> step(BowDiagram& cur, int l, int r, MoveLog& log, bool abort_on_negative) {
    int pl = cur.position(l);
    cur = apply_hw(cur, l, r);
    log.push_back(Move::hw(l, r));
    if (abort_on_negative && cur.dims[pl] < 0) return NegativeWitness{log, pl, cur.dims[pl]};
    return std::nullopt;
}

BowDiagram shift_arc(const BowDiagram& d, const Move& entry) {
    NodeKind want = entry.op == MoveOp::IncrementArrows ? NodeKind::Arrow : NodeKind::XPoint;
    const auto& a = d.nodes[d.position(entry.left)];
    const auto& b = d.nodes[d.position(entry.right)];
    if (a.kind != b.kind) throw std::invalid_argument("increment arc must be delimited by nodes of the same kind");
    if (a.kind != want) throw std::invalid_argument("increment kind does not match its delimiting nodes");
    BowDiagram r = d;
    for (int seg : arc_segments(d, entry.left, entry.right)) {
        if (d.finite() && seg == d.cut()) throw std::invalid_argument("increment arc crosses the cut");
        r.dims[seg] = add_checked(r.dims[seg], entry.amount);
    }
    return r;
}

BowDiagram subtract_arc(const BowDiagram& d, Int a) {
    auto s = separated_view(d);
    if (!s || s->n == 0 || s->w == 0) throw std::invalid_argument("arrow-arc subtraction needs a separated diagram with n,w >= 1");
    BowDiagram r = d;
    std::vector<int> segs = s->arr_seg;
    std::sort(segs.begin(), segs.end());
    segs.erase(std::unique(segs.begin(), segs.end()), segs.end());
    for (int seg : segs) r.dims[seg] = sub_checked(r.dims[seg], a);
    return r;
}

}  // namespace

BowDiagram apply_hw(const BowDiagram& d, int left_id, int right_id) {
    const int L = d.size();
    if (L < 2) throw std::invalid_argument("HW move needs at least two nodes");
    int pl = d.position(left_id);
    int pr = d.position(right_id);
    if (pr != mod(pl + 1, L)) throw std::invalid_argument("HW move on non-adjacent nodes");
    if (d.nodes[pl].kind == d.nodes[pr].kind) throw std::invalid_argument("HW move on nodes of the same kind");
    if (d.finite() && pl == d.cut()) throw std::invalid_argument("HW move across the cut");
    Int vm = d.dims[mod(pl - 1, L)];
    Int vp = d.dims[pr];
    Int v = d.dims[pl];
    BowDiagram r = d;
    r.dims[pl] = sub_checked(add_checked(add_checked(vm, vp), 1), v);
    std::swap(r.nodes[pl], r.nodes[pr]);
    return r;
}

Move inverse_move(const Move& m, const BowDiagram& before) {
    Move r = m;
    switch (m.op) {
        case MoveOp::HW:
            r.left = m.right;
            r.right = m.left;
            break;
        case MoveOp::IncrementArrows:
        case MoveOp::IncrementX:
        case MoveOp::SubtractArrowArc:
            r.amount = -m.amount;
            break;
        case MoveOp::CutAt:
            r.op = MoveOp::Uncut;
            break;
        case MoveOp::Uncut:
            r.op = MoveOp::CutAt;
            r.segment = before.size() - 1;
            break;
    }
    return r;
}

BowDiagram apply_move(const BowDiagram& d, const Move& m) {
    switch (m.op) {
        case MoveOp::HW: return apply_hw(d, m.left, m.right);
        case MoveOp::IncrementArrows:
        case MoveOp::IncrementX: return shift_arc(d, m);
        case MoveOp::SubtractArrowArc: return subtract_arc(d, m.amount);
        case MoveOp::CutAt: return cut_at(d, m.segment);
        case MoveOp::Uncut: return uncut(d);
    }
    throw std::logic_error("unknown move");
}

BowDiagram replay(BowDiagram d, const MoveLog& log) {
    for (const auto& m : log) d = apply_move(d, m);
    return d;
}

std::size_t hw_count(const MoveLog& log) {
    return static_cast<std::size_t>(std::count_if(log.begin(), log.end(), [](const Move& m) { return m.op == MoveOp::HW; }));
}

SeparateOutcome separate(const BowDiagram& d, bool abort_on_negative) {
    require_valid(d);
    auto view = separated_view(d);
    const int n = d.n_arrows(), w = d.n_xpoints();
    if (n == 0 || w == 0) return SeparatedResult{*view, {}};
    if (view && (!d.finite() || view->finite_layout())) return SeparatedResult{*view, {}};

    // Bubble arrows leftward past x-points, never across the segment before
    // node 0 (the cut for finite diagrams, an arbitrary anchor otherwise).
    BowDiagram cur = d;
    MoveLog log;
    const int L = d.size();
    for (;;) {
        bool moved = false;
        for (int i = 0; i + 1 < L; ++i) {
            if (cur.nodes[i].kind == NodeKind::XPoint && cur.nodes[i + 1].kind == NodeKind::Arrow) {
                if (auto wit = step(cur, cur.nodes[i].id, cur.nodes[i + 1].id, log, abort_on_negative)) return *wit;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    return SeparatedResult{require_separated(cur), log};
}

SeparateOutcome normalize_gap(const SeparatedForm& s, bool abort_on_negative) {
    if (s.diagram.finite()) throw std::invalid_argument("normalize_gap needs an affine diagram");
    if (s.n == 0 || s.w == 0) throw std::invalid_argument("normalize_gap needs n,w >= 1");
    BowDiagram cur = s.diagram;
    MoveLog log;
    SeparatedForm view = s;
    for (;;) {
        Int gap = sub_checked(view.v(0), view.v(-view.w));
        if (gap >= 0 && gap < view.w) break;
        if (gap >= view.w) {
            int e = view.e(1);
            for (int k = 1; k <= view.w; ++k)
                if (auto wit = step(cur, e, view.x(k), log, abort_on_negative)) return *wit;
        } else {
            int e = view.e(view.n);
            for (int k = view.w; k >= 1; --k)
                if (auto wit = step(cur, view.x(k), e, log, abort_on_negative)) return *wit;
        }
        view = require_separated(cur);
    }
    return SeparatedResult{view, log};
}

std::vector<int> arc_segments(const BowDiagram& d, int from_id, int to_id) {
    const int L = d.size();
    int pf = d.position(from_id);
    int pt = d.position(to_id);
    int len = from_id == to_id ? L : mod(pt - pf, L);
    std::vector<int> segs;
    for (int i = 0; i < len; ++i) segs.push_back(mod(pf + i, L));
    return segs;
}

BowDiagram apply_increment(const BowDiagram& d, const Move& entry) {
    if (entry.op != MoveOp::IncrementArrows && entry.op != MoveOp::IncrementX)
        throw std::invalid_argument("not an increment entry");
    if (entry.amount < 0) throw std::invalid_argument("negative increment amount");
    return shift_arc(d, entry);
}

std::string canonical_encoding(const BowDiagram& d) {
    const int L = d.size();
    auto stream_from = [&](int r) {
        std::string s;
        for (int i = 0; i < L; ++i) {
            int p = (r + i) % L;
            s += kind_char(d.nodes[p].kind);
            s += std::to_string(d.dims[p]);
            s += ',';
        }
        return s;
    };
    if (d.finite()) return "F" + stream_from(0);
    std::string best = stream_from(0);
    for (int r = 1; r < L; ++r) best = std::min(best, stream_from(r));
    return "A" + best;
}

EquivClassSample enumerate_equivalent(const BowDiagram& d, std::size_t budget) {
    require_valid(d);
    EquivClassSample out;
    out.min_dim = d.min_dim();
    std::deque<std::pair<BowDiagram, std::size_t>> queue;
    out.members.insert(canonical_encoding(d));
    queue.emplace_back(d, 0);
    const int L = d.size();
    while (!queue.empty()) {
        auto [cur, depth] = std::move(queue.front());
        queue.pop_front();
        if (depth >= budget || L < 2) continue;
        for (int i = 0; i < L; ++i) {
            int j = (i + 1) % L;
            if (cur.finite() && i == cur.cut()) continue;
            if (cur.nodes[i].kind == cur.nodes[j].kind) continue;
            BowDiagram nxt = apply_hw(cur, cur.nodes[i].id, cur.nodes[j].id);
            out.min_dim = std::min(out.min_dim, nxt.dims[i]);
            if (out.members.insert(canonical_encoding(nxt)).second) queue.emplace_back(std::move(nxt), depth + 1);
        }
    }
    return out;
}

Realization realize_inequality(const SeparatedForm& s, Direction dir, Int t, int s_idx, int k_idx) {
    if (t < 1) throw std::invalid_argument("realization needs t >= 1");
    if (s_idx < 0 || s_idx > s.n || k_idx < 0 || k_idx > s.w) throw std::out_of_range("inequality index out of range");
    if (s.n == 0 || s.w == 0) throw std::invalid_argument("realization needs n,w >= 1");
    if (s.diagram.finite() && (dir != Direction::Cw || t != 1))
        throw std::invalid_argument("finite diagrams only realize clockwise t=1 bounds");
    BowDiagram cur = s.diagram;
    Realization out;
    auto hw = [&](int l, int r) {
        cur = apply_hw(cur, l, r);
        out.moves.push_back(Move::hw(l, r));
    };
    const int L = cur.size();
    if (dir == Direction::Cw) {
        for (Int p = 1; p < t; ++p)
            for (int k = 1; k <= s.w; ++k)
                for (int j = 1; j <= s.n; ++j) hw(s.e(j), s.x(k));
        for (int k = 1; k <= k_idx; ++k)
            for (int j = 1; j <= s_idx; ++j) hw(s.e(j), s.x(k));
        if (k_idx > 0)
            out.segment = cur.position(s.x(k_idx));
        else if (s_idx > 0)
            out.segment = mod(cur.position(s.e(s_idx)) - 1, L);
        else
            out.segment = mod(cur.position(s.x(1)) - 1, L);
    } else {
        for (Int p = 1; p < t; ++p)
            for (int k = s.w; k >= 1; --k)
                for (int j = s.n; j >= 1; --j) hw(s.x(k), s.e(j));
        for (int k = s.w; k > s.w - k_idx; --k)
            for (int j = s.n; j > s.n - s_idx; --j) hw(s.x(k), s.e(j));
        if (k_idx > 0)
            out.segment = mod(cur.position(s.x(s.w - k_idx + 1)) - 1, L);
        else if (s_idx > 0)
            out.segment = cur.position(s.e(s.n - s_idx + 1));
        else
            out.segment = cur.position(s.x(s.w));
    }
    return out;
}

}  // namespace bowforge
