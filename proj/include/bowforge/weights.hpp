#pragma once

#include <optional>
#include <vector>

#include "bowforge/diagram.hpp"
#include "bowforge/hw.hpp"

namespace bowforge {

// Affine gl_w weight in epsilon coordinates plus level and <lambda, d>.
struct AffineWeight {
    std::vector<Int> values;
    Int level = 0;
    Int dpair = 0;

    Int charge() const;
    bool operator==(const AffineWeight&) const = default;
};

// (tlambda, mu, v) read off a separated form: tl_s = v_{s-1} - v_s,
// mu_i = v_{-(i-1)} - v_{-i}, v = v_n.
struct SeparatedTriple {
    std::vector<Int> tl;
    std::vector<Int> mu;
    Int v = 0;
};

SeparatedTriple separated_triple(const SeparatedForm& s);
// Inverse: the affine diagram  e_n .. e_1 x_1 .. x_w  with those differences.
BowDiagram separated_from_triple(const SeparatedTriple& t);

// lambda_1 >= .. >= lambda_w >= lambda_1 - n
bool gyd_membership(const std::vector<Int>& vec, Int n);

// Transpose of a w-row level-n generalized Young diagram (an n-row level-w one).
std::vector<Int> transpose_gyd(const std::vector<Int>& lam, Int n);

bool dominance_ge(const AffineWeight& a, const AffineWeight& b);

struct BalancedForm {
    BowDiagram diagram;
    MoveLog log;  // HW moves from the separated input
    AffineWeight lambda;
    AffineWeight mu;
};

std::optional<BalancedForm> balanced_form(const SeparatedForm& s);

enum class StratumMode { Finite, Affine };

// Finite: finite layout, greedy kappa.  Affine: requires 0 <= v_0 - v_n < w.
std::optional<AffineWeight> stratum_check(const SeparatedForm& s, StratumMode mode);

// Whole-diagram stratum verdict: separates (and normalizes affine inputs)
// without aborting, then runs stratum_check on the result.
bool stratum_condition(const BowDiagram& d);

}  // namespace bowforge
