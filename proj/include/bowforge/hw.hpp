#pragma once

#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "bowforge/diagram.hpp"

namespace bowforge {

enum class MoveOp { HW, IncrementArrows, IncrementX, SubtractArrowArc, CutAt, Uncut };

// HW: left/right are the adjacent pair (left first in text order).
// IncrementArrows/IncrementX: the arc runs anticlockwise from `left` to `right`;
//   left == right means the whole circle.
// SubtractArrowArc: amount taken off v_0..v_n of the current separated layout
//   (a negative amount adds it back).
// CutAt: `segment` indexes the diagram before the cut.
struct Move {
    MoveOp op = MoveOp::HW;
    int left = -1;
    int right = -1;
    Int amount = 0;
    int segment = -1;

    static Move hw(int l, int r) { return {MoveOp::HW, l, r, 0, -1}; }
    static Move subtract(Int a) { return {MoveOp::SubtractArrowArc, -1, -1, a, -1}; }
    static Move cut(int seg) { return {MoveOp::CutAt, -1, -1, 0, seg}; }
    bool operator==(const Move&) const = default;
};

using MoveLog = std::vector<Move>;

struct NegativeWitness {
    MoveLog moves;
    int segment = -1;
    Int value = 0;
};

struct SeparatedResult {
    SeparatedForm form;
    MoveLog log;
};

using SeparateOutcome = std::variant<SeparatedResult, NegativeWitness>;

BowDiagram apply_hw(const BowDiagram& d, int left_id, int right_id);

// Inverse of an entry; CutAt needs the diagram it was applied to.
Move inverse_move(const Move& m, const BowDiagram& before);
BowDiagram apply_move(const BowDiagram& d, const Move& m);
BowDiagram replay(BowDiagram d, const MoveLog& log);
std::size_t hw_count(const MoveLog& log);

// Gathers the x-points into one run.  For finite diagrams the run ends at the cut.
SeparateOutcome separate(const BowDiagram& d, bool abort_on_negative = true);

SeparateOutcome normalize_gap(const SeparatedForm& s, bool abort_on_negative = true);

BowDiagram apply_increment(const BowDiagram& d, const Move& entry);

// Segment indices covered by the anticlockwise arc between two nodes (whole circle if equal).
std::vector<int> arc_segments(const BowDiagram& d, int from_id, int to_id);

std::string canonical_encoding(const BowDiagram& d);

struct EquivClassSample {
    std::unordered_set<std::string> members;
    Int min_dim = 0;
};

EquivClassSample enumerate_equivalent(const BowDiagram& d, std::size_t budget);

// Moves realizing a supersymmetry inequality on a separated form: the returned
// segment of replay(s.diagram, moves) carries the value of the bound.
struct Realization {
    MoveLog moves;
    int segment = -1;
};

Realization realize_inequality(const SeparatedForm& s, Direction dir, Int t, int s_idx, int k_idx);

}  // namespace bowforge
