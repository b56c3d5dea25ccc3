#include <map>
#include <random>

#include "bowforge/hw.hpp"
#include "bowforge/susy.hpp"
#include "doctest.h"
#include "sweep.hpp"

using namespace bowforge;

namespace {

BowDiagram random_affine(std::mt19937& rng, int max_len, int lo, int hi) {
    std::uniform_int_distribution<int> len(2, max_len), dim(lo, hi), coin(0, 1);
    BowDiagram d;
    int L = len(rng);
    for (int i = 0; i < L; ++i) {
        d.nodes.push_back({i, coin(rng) ? NodeKind::Arrow : NodeKind::XPoint});
        d.dims.push_back(dim(rng));
    }
    return d;
}

BowDiagram random_separated(std::mt19937& rng, int n, int w, int lo, int hi) {
    std::uniform_int_distribution<int> dim(lo, hi);
    BowDiagram d;
    for (int i = 0; i < n + w; ++i) {
        d.nodes.push_back({i, i < n ? NodeKind::Arrow : NodeKind::XPoint});
        d.dims.push_back(dim(rng));
    }
    return d;
}

}  // namespace

TEST_CASE("hw local rule") {
    auto d = parse_diagram("[ 0 o 3 x 2 x 0 ]");
    auto r = apply_hw(d, d.nodes[0].id, d.nodes[1].id);
    CHECK(r.dims[0] == 0);
    CHECK(r.nodes[0].kind == NodeKind::XPoint);
    CHECK(r.nodes[1].kind == NodeKind::Arrow);

    auto e = parse_diagram("[ 0 o 2 x 0 ]");
    auto f = apply_hw(e, e.nodes[0].id, e.nodes[1].id);
    CHECK(f.dims[0] == -1);
    CHECK(apply_hw(f, e.nodes[1].id, e.nodes[0].id) == e);
}

TEST_CASE("hw errors") {
    auto d = parse_diagram("[ 0 o 3 x 2 x 0 ]");
    CHECK_THROWS(apply_hw(d, d.nodes[1].id, d.nodes[2].id));  // same kind
    CHECK_THROWS(apply_hw(d, d.nodes[0].id, d.nodes[2].id));  // not adjacent
    CHECK_THROWS(apply_hw(d, d.nodes[2].id, d.nodes[0].id));  // across the cut
    auto a = parse_diagram("( 1 x 2 o )");
    CHECK_NOTHROW(apply_hw(a, a.nodes[1].id, a.nodes[0].id));  // wrap-around pair
}

TEST_CASE("hw is an involution and shifts N_e, N_x by -1") {
    std::mt19937 rng(5);
    for (int it = 0; it < 300; ++it) {
        auto d = random_affine(rng, 6, -2, 5);
        const int L = d.size();
        for (int i = 0; i < L; ++i) {
            int j = (i + 1) % L;
            if (d.nodes[i].kind == d.nodes[j].kind) continue;
            int l = d.nodes[i].id, r = d.nodes[j].id;
            auto m = apply_hw(d, l, r);
            CHECK(apply_hw(m, r, l) == d);
            if (L < 3) continue;
            // N_e = v_head - v_tail (head on the right), N_x = v^- - v^+
            auto N = [&](const BowDiagram& g, int id) {
                int p = g.position(id);
                Int left = g.dims[(p + L - 1) % L], right = g.dims[p];
                return g.nodes[p].kind == NodeKind::Arrow ? right - left : left - right;
            };
            if (d.nodes[i].kind == NodeKind::Arrow) {
                // arrow moves rightward through the x-point
                CHECK(N(m, l) == N(d, l) - 1);
                CHECK(N(m, r) == N(d, r) - 1);
            } else {
                CHECK(N(m, l) == N(d, l) + 1);
                CHECK(N(m, r) == N(d, r) + 1);
            }
        }
    }
}

TEST_CASE("separate") {
    auto s0 = separated_view(parse_diagram("( 3 x 1 x 2 o 0 o )"));
    auto id = separate(s0->diagram);
    REQUIRE(std::holds_alternative<SeparatedResult>(id));
    CHECK(std::get<SeparatedResult>(id).log.empty());

    auto d = parse_diagram("( 1 x 2 o 3 x 4 o )");
    auto out = separate(d);
    REQUIRE(std::holds_alternative<SeparatedResult>(out));
    const auto& r = std::get<SeparatedResult>(out);
    CHECK(r.log.size() >= 1);
    CHECK(separated_view(replay(d, r.log)));
    CHECK(replay(d, r.log) == r.form.diagram);

    auto e = parse_diagram("[ 0 o 2 x 0 ]");
    auto eo = separate(e);
    REQUIRE(std::holds_alternative<SeparatedResult>(eo));
    CHECK(std::get<SeparatedResult>(eo).log.empty());
}

TEST_CASE("separate on random diagrams") {
    std::mt19937 rng(17);
    for (int it = 0; it < 300; ++it) {
        auto d = random_affine(rng, 7, 0, 6);
        if (it % 3 == 0) {
            d.shape = Shape::Finite;
            d.dims.back() = 0;
        }
        auto out = separate(d);
        if (auto* w = std::get_if<NegativeWitness>(&out)) {
            auto g = replay(d, w->moves);
            CHECK(g.dims[w->segment] == w->value);
            CHECK(w->value < 0);
        } else {
            const auto& r = std::get<SeparatedResult>(out);
            CHECK(replay(d, r.log) == r.form.diagram);
            if (d.finite()) CHECK(r.form.finite_layout());
        }
    }
}

TEST_CASE("normalize_gap one arrow one x-point") {
    // gap 3 with w = 1: three passes of e_1 through x_1
    auto d = parse_diagram("( 6 x 3 o )");
    auto s = require_separated(d);
    CHECK(s.v(0) == 6);
    CHECK(s.v(-1) == 3);
    auto out = normalize_gap(s);
    REQUIRE(std::holds_alternative<SeparatedResult>(out));
    const auto& r = std::get<SeparatedResult>(out);
    CHECK(r.log.size() == 3);
    CHECK(r.form.v(0) - r.form.v(-1) == 0);
    // each produced middle dim is the matching chained bound
    BowDiagram cur = d;
    std::vector<Int> produced;
    for (const auto& m : r.log) {
        int p = cur.position(m.left);
        cur = apply_hw(cur, m.left, m.right);
        produced.push_back(cur.dims[p]);
    }
    CHECK(produced == std::vector<Int>{1, 0, 0});
    CHECK(produced[0] == susy_bound(s, Direction::Cw, 1, 1, 1));

    // with gap 3 on (5 x 2 o) the second pass already goes negative
    auto bad = normalize_gap(require_separated(parse_diagram("( 5 x 2 o )")));
    REQUIRE(std::holds_alternative<NegativeWitness>(bad));
    CHECK(std::get<NegativeWitness>(bad).value == -1);
}

TEST_CASE("normalize_gap postcondition") {
    std::mt19937 rng(23);
    std::uniform_int_distribution<int> nw(1, 3);
    for (int it = 0; it < 300; ++it) {
        auto d = random_separated(rng, nw(rng), nw(rng), 0, 9);
        auto s = require_separated(d);
        auto out = normalize_gap(s, false);
        const auto& r = std::get<SeparatedResult>(out);
        Int gap = r.form.v(0) - r.form.v(-r.form.w);
        CHECK(gap >= 0);
        CHECK(gap < r.form.w);
        CHECK(replay(d, r.log) == r.form.diagram);
    }
}

TEST_CASE("increments") {
    auto d = parse_diagram("( 1 x 2 x 3 o )");
    auto s = require_separated(d);
    // arc from x_2 anticlockwise through the arrow to x_1
    Move m{MoveOp::IncrementX, s.x(2), s.x(1), 2, -1};
    auto r = apply_increment(d, m);
    auto rs = require_separated(r);
    CHECK(rs.v(0) == s.v(0) + 2);
    CHECK(rs.v(1) == s.v(1) + 2);
    CHECK(rs.v(-2) == s.v(-2) + 2);
    CHECK(rs.v(-1) == s.v(-1));
    m.amount = 0;
    CHECK(apply_increment(d, m) == d);
    m.amount = -1;
    CHECK_THROWS(apply_increment(d, m));
    Move bad{MoveOp::IncrementX, s.x(1), s.e(1), 1, -1};
    CHECK_THROWS(apply_increment(d, bad));
    Move whole{MoveOp::IncrementArrows, s.e(1), s.e(1), 1, -1};
    auto wr = apply_increment(d, whole);
    for (int i = 0; i < d.size(); ++i) CHECK(wr.dims[i] == d.dims[i] + 1);
    auto f = parse_diagram("[ 0 o 1 x 1 x 0 ]");
    Move cross{MoveOp::IncrementX, f.nodes[2].id, f.nodes[1].id, 1, -1};
    CHECK_THROWS(apply_increment(f, cross));
}

TEST_CASE("enumerate_equivalent") {
    auto e = parse_diagram("[ 0 o 2 x 0 ]");
    auto z = enumerate_equivalent(e, 0);
    CHECK(z.members.size() == 1);
    CHECK(z.min_dim == 0);
    auto one = enumerate_equivalent(e, 1);
    CHECK(one.min_dim == -1);
    // affine classes are infinite; the sample grows with the budget
    auto a = parse_diagram("( 2 x 2 o )");
    CHECK(enumerate_equivalent(a, 4).members.size() > enumerate_equivalent(a, 2).members.size());
}

TEST_CASE("canonical encoding is rotation invariant") {
    auto a = parse_diagram("( 1 x 2 o 3 o )");
    auto b = parse_diagram("( 2 o 3 o 1 x )");
    CHECK(canonical_encoding(a) == canonical_encoding(b));
    CHECK(canonical_encoding(a) != canonical_encoding(parse_diagram("( 1 x 3 o 2 o )")));
}

TEST_CASE("replayed sweeps produce the closed-form bounds") {
    std::mt19937 rng(31);
    std::uniform_int_distribution<int> nw(1, 3);
    for (int it = 0; it < 150; ++it) {
        auto d = random_separated(rng, nw(rng), nw(rng), -2, 7);
        auto s = require_separated(d);
        for (Direction dir : {Direction::Cw, Direction::Acw})
            for (Int t = 1; t <= 3; ++t)
                for (int si = 0; si <= s.n; ++si)
                    for (int ki = 0; ki <= s.w; ++ki) {
                        auto r = realize_inequality(s, dir, t, si, ki);
                        auto g = replay(d, r.moves);
                        INFO(render_diagram(d), " dir=", int(dir), " t=", t, " s=", si, " k=", ki);
                        CHECK(g.dims[r.segment] == susy_bound(s, dir, t, si, ki));
                    }
    }
}

TEST_CASE("crossing counts from a separated start") {
    std::mt19937 rng(41);
    std::uniform_int_distribution<int> nw(1, 3), steps(1, 40);
    for (int it = 0; it < 200; ++it) {
        auto d = random_separated(rng, nw(rng), nw(rng), 0, 4);
        auto s = require_separated(d);
        std::map<std::pair<int, int>, int> C;  // (x, e) -> clockwise minus anticlockwise passes
        BowDiagram cur = d;
        const int L = cur.size();
        int m = steps(rng);
        for (int k = 0; k < m; ++k) {
            std::vector<int> legal;
            for (int i = 0; i < L; ++i)
                if (cur.nodes[i].kind != cur.nodes[(i + 1) % L].kind) legal.push_back(i);
            int i = legal[std::uniform_int_distribution<int>(0, int(legal.size()) - 1)(rng)];
            const auto& a = cur.nodes[i];
            const auto& b = cur.nodes[(i + 1) % L];
            if (a.kind == NodeKind::Arrow)
                ++C[{b.id, a.id}];  // x-point moves leftward: clockwise
            else
                --C[{a.id, b.id}];
            cur = apply_hw(cur, a.id, b.id);
            int c1 = C[{s.x(1), s.e(s.n)}];
            int c2 = C[{s.x(s.w), s.e(1)}];
            CHECK((c1 >= 0 || c2 <= 0));
        }
    }
}

TEST_CASE("susy diagrams admit no negative single move") {
    sweep::affine_diagrams(4, 3, [](const BowDiagram& d) {
        if (!decide_supersymmetry(d).susy) return;
        const int L = d.size();
        for (int i = 0; i < L; ++i) {
            int j = (i + 1) % L;
            if (L < 2 || d.nodes[i].kind == d.nodes[j].kind) continue;
            auto m = apply_hw(d, d.nodes[i].id, d.nodes[j].id);
            CHECK(m.dims[i] >= 0);
        }
    });
}
