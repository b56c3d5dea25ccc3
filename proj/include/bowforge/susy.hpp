#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "bowforge/diagram.hpp"
#include "bowforge/hw.hpp"

namespace bowforge {

// cD^t_{s,k} for Cw; for Acw the mirrored bound obtained by sweeping x_w, x_{w-1}, ..
// anticlockwise through e_n, e_{n-1}, .. (s arrows, k x-points in the last pass).
// t = 0 is accepted for identity checks.
Int susy_bound(const SeparatedForm& s, Direction dir, Int t, int s_idx, int k_idx);

struct InequalityViolation {
    Direction dir = Direction::Cw;
    Int t = 1;
    int s = 0;
    int k = 0;
    Int value = 0;
};

struct CheckedInequality {
    int s = 0;
    int k = 0;
    Int value = 0;
};

struct FiniteCheckPassed {
    std::vector<CheckedInequality> checked;
};

struct TrivialNoNodes {
    Int min_dim = 0;
};

using Witness = std::variant<InequalityViolation, NegativeWitness, FiniteCheckPassed, TrivialNoNodes>;

struct Certificate {
    bool susy = false;
    Witness witness = TrivialNoNodes{};
    // separation, gap normalization, arrow-arc subtraction, cut, relayout
    MoveLog pipeline;
    // An InequalityViolation refers to the separated form obtained by replaying
    // the first `witness_stage` entries of the pipeline.
    std::size_t witness_stage = 0;
};

Certificate check_finite_separated(const SeparatedForm& s);

SeparatedForm subtract_arrow_arc(const SeparatedForm& s, Int a);

struct ReduceResult {
    SeparatedForm form;  // finite separated layout
    MoveLog pipeline;
};

using ReduceOutcome = std::variant<ReduceResult, NegativeWitness>;

ReduceOutcome reduce_to_finite(const SeparatedForm& s);

Certificate decide_supersymmetry(const BowDiagram& d);

// First violated bound (lowest t, then cw before acw, then (s,k)) with t <= t_max.
std::optional<InequalityViolation> scan_affine_inequalities(const SeparatedForm& s, Int t_max);
Int default_scan_depth(const SeparatedForm& s);

// Moves from the source diagram producing the witness value, and the segment where it appears.
Realization realize_witness(const BowDiagram& d, const Certificate& c);

}  // namespace bowforge
