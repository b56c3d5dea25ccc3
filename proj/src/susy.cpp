#include "bowforge/susy.hpp"

#include <algorithm>
#include <cstdlib>

#include "bowforge/checked.hpp"

namespace bowforge {

Int susy_bound(const SeparatedForm& s, Direction dir, Int t, int s_idx, int k_idx) {
    if (s_idx < 0 || s_idx > s.n || k_idx < 0 || k_idx > s.w) throw std::out_of_range("inequality index out of range");
    if (t < 0) throw std::out_of_range("negative t");
    const Int n = s.n, w = s.w, si = s_idx, ki = k_idx;
    Int tm1 = t - 1;
    Int tri = mul_checked(tm1, t - 2) / 2;  // (t-1)(t-2)/2, exact for every integer t
    Int r = mul_checked(si, ki);
    r = add_checked(r, mul_checked(tm1, add_checked(mul_checked(si, w), mul_checked(ki, n))));
    r = add_checked(r, mul_checked(tri, mul_checked(w, n)));
    if (dir == Direction::Cw) {
        r = add_checked(r, add_checked(s.v(s_idx), s.v(-k_idx)));
        r = add_checked(r, mul_checked(tm1, s.v(-s.w)));
        r = sub_checked(r, mul_checked(t, s.v(0)));
    } else {
        r = add_checked(r, add_checked(s.v(s.n - s_idx), s.v(-(s.w - k_idx))));
        r = add_checked(r, mul_checked(tm1, s.v(0)));
        r = sub_checked(r, mul_checked(t, s.v(-s.w)));
    }
    return r;
}

Certificate check_finite_separated(const SeparatedForm& s) {
    if (!s.finite_layout()) throw std::invalid_argument("check_finite_separated needs a finite separated layout");
    Certificate c;
    for (int i = 0; i <= s.n; ++i)
        if (s.v(i) < 0) {
            c.witness = InequalityViolation{Direction::Cw, 1, i, 0, s.v(i)};
            return c;
        }
    for (int k = 1; k <= s.w; ++k)
        if (s.v(-k) < 0) {
            c.witness = InequalityViolation{Direction::Cw, 1, 0, k, s.v(-k)};
            return c;
        }
    FiniteCheckPassed passed;
    if (s.n > 0 && s.w > 0) {
        int n1 = 1, w1 = 1;
        while (s.v(n1) != 0) ++n1;
        while (s.v(-w1) != 0) ++w1;
        const Int v0 = s.v(0);
        const int s_max = static_cast<int>(std::min<Int>(n1, v0));
        const int k_max = static_cast<int>(std::min<Int>(w1, v0));
        for (int si = 1; si <= s_max; ++si)
            for (int ki = 1; ki <= k_max; ++ki) {
                Int val = susy_bound(s, Direction::Cw, 1, si, ki);
                passed.checked.push_back({si, ki, val});
                if (val < 0) {
                    c.witness = InequalityViolation{Direction::Cw, 1, si, ki, val};
                    return c;
                }
            }
    }
    c.susy = true;
    c.witness = passed;
    return c;
}

SeparatedForm subtract_arrow_arc(const SeparatedForm& s, Int a) {
    if (s.diagram.finite()) throw std::invalid_argument("arrow-arc subtraction needs an affine diagram");
    if (s.n == 0 || s.w == 0) throw std::invalid_argument("arrow-arc subtraction needs n,w >= 1");
    Int gap = sub_checked(s.v(0), s.v(s.n));
    if (gap < 0 || gap >= s.w) throw std::invalid_argument("gap condition w > v_0 - v_n >= 0 violated");
    if (a > *std::min_element(s.v_arr.begin(), s.v_arr.end()))
        throw std::invalid_argument("subtraction exceeds the arrow-arc minimum");
    return require_separated(apply_move(s.diagram, Move::subtract(a)));
}

ReduceOutcome reduce_to_finite(const SeparatedForm& s) {
    if (s.diagram.finite()) {
        if (!s.finite_layout()) throw std::invalid_argument("finite input is not in separated layout");
        return ReduceResult{s, {}};
    }
    if (s.n == 0 || s.w == 0) throw std::invalid_argument("reduce_to_finite needs n,w >= 1");
    auto norm = normalize_gap(s);
    if (auto* wit = std::get_if<NegativeWitness>(&norm)) return *wit;
    auto& nr = std::get<SeparatedResult>(norm);
    MoveLog log = nr.log;
    SeparatedForm cur = nr.form;

    Int a = *std::min_element(cur.v_arr.begin(), cur.v_arr.end());
    cur = subtract_arrow_arc(cur, a);
    log.push_back(Move::subtract(a));

    int s_cut = 0;
    while (cur.v(s_cut) != 0) ++s_cut;
    int seg = cur.arr_seg[s_cut];
    BowDiagram d = cut_at(cur.diagram, seg);
    log.push_back(Move::cut(seg));

    for (int j = cur.n; j > s_cut; --j) {
        int e = cur.e(j);
        for (int k = cur.w; k >= 1; --k) {
            int pl = d.position(cur.x(k));
            d = apply_hw(d, cur.x(k), e);
            log.push_back(Move::hw(cur.x(k), e));
            if (d.dims[pl] < 0) return NegativeWitness{log, pl, d.dims[pl]};
        }
    }
    auto out = require_separated(d);
    if (!out.finite_layout()) throw std::logic_error("reduction did not reach a finite separated layout");
    return ReduceResult{out, log};
}

Int default_scan_depth(const SeparatedForm& s) {
    Int m = 0;
    for (Int v : s.v_arr) m = std::max(m, std::abs(v));
    for (Int v : s.v_x) m = std::max(m, std::abs(v));
    return add_checked(mul_checked(4, m), 10);
}

std::optional<InequalityViolation> scan_affine_inequalities(const SeparatedForm& s, Int t_max) {
    for (Int t = 1; t <= t_max; ++t)
        for (Direction dir : {Direction::Cw, Direction::Acw})
            for (int si = 0; si <= s.n; ++si)
                for (int ki = 0; ki <= s.w; ++ki) {
                    Int val = susy_bound(s, dir, t, si, ki);
                    if (val < 0) return InequalityViolation{dir, t, si, ki, val};
                }
    return std::nullopt;
}

namespace {

MoveLog concat(MoveLog a, const MoveLog& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

Certificate decide_supersymmetry(const BowDiagram& d) {
    require_valid(d);
    Certificate c;
    const int n = d.n_arrows(), w = d.n_xpoints();
    if (n == 0 || w == 0) {
        c.susy = d.min_dim() >= 0;
        c.witness = TrivialNoNodes{d.min_dim()};
        return c;
    }
    if (d.min_dim() < 0) {
        auto it = std::min_element(d.dims.begin(), d.dims.end());
        c.witness = NegativeWitness{{}, static_cast<int>(it - d.dims.begin()), *it};
        return c;
    }

    auto sep = separate(d);
    if (auto* wit = std::get_if<NegativeWitness>(&sep)) {
        c.pipeline = wit->moves;
        c.witness = *wit;
        return c;
    }
    auto& sr = std::get<SeparatedResult>(sep);

    if (d.finite()) {
        Certificate fc = check_finite_separated(sr.form);
        fc.pipeline = sr.log;
        fc.witness_stage = sr.log.size();
        return fc;
    }

    auto red = reduce_to_finite(sr.form);
    if (auto* rr = std::get_if<ReduceResult>(&red)) {
        Certificate fc = check_finite_separated(rr->form);
        fc.pipeline = concat(sr.log, rr->pipeline);
        fc.witness_stage = fc.pipeline.size();
        if (fc.susy) return fc;
        c = fc;
    } else {
        const auto& wit = std::get<NegativeWitness>(red);
        c.pipeline = concat(sr.log, wit.moves);
        c.witness = NegativeWitness{c.pipeline, wit.segment, wit.value};
        c.witness_stage = c.pipeline.size();
        // negative dim during gap normalization is already an HW witness
        if (hw_count(wit.moves) == wit.moves.size()) return c;
    }

    // Prefer a witness reachable by HW moves alone: scan the bounds on the
    // gap-normalized separated form.
    auto norm = normalize_gap(sr.form);
    const auto& nr = std::get<SeparatedResult>(norm);
    if (auto v = scan_affine_inequalities(nr.form, default_scan_depth(nr.form))) {
        c.witness = *v;
        c.witness_stage = sr.log.size() + nr.log.size();
    }
    return c;
}

Realization realize_witness(const BowDiagram& d, const Certificate& c) {
    if (c.susy) throw std::invalid_argument("certificate has no violation to realize");
    if (const auto* nw = std::get_if<NegativeWitness>(&c.witness)) return {nw->moves, nw->segment};
    const auto* iv = std::get_if<InequalityViolation>(&c.witness);
    if (!iv) throw std::invalid_argument("certificate witness cannot be realized");
    MoveLog prefix(c.pipeline.begin(), c.pipeline.begin() + static_cast<std::ptrdiff_t>(c.witness_stage));
    SeparatedForm s = require_separated(replay(d, prefix));
    Realization r = realize_inequality(s, iv->dir, iv->t, iv->s, iv->k);
    r.moves = concat(prefix, r.moves);
    return r;
}

}  // namespace bowforge
