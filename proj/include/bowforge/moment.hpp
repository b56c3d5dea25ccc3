#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bowforge/diagram.hpp"
#include "bowforge/hw.hpp"

namespace bowforge {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;

// Triangle at an x-point: A: v- -> v+, B- on v-, B+ on v+, a: C -> v+, b: v- -> C.
struct TriangleData {
    Mat A, Bm, Bp, a, b;
};

// Arrow between segments l (left) and r (right): C: l -> r, D: r -> l.
struct ArrowData {
    Mat C, D;
};

struct Solution {
    std::map<int, TriangleData> triangles;  // by node id
    std::map<int, ArrowData> arrows;        // by node id
    std::vector<cd> lambda;                 // per arrow in position order; empty means 0
    std::uint64_t seed = 0;
    double residual = 0;
    bool stable = false;
    int iterations = 0;
};

// Zero matrices of the right shapes.
Solution zero_solution(const BowDiagram& d);
void check_shapes(const BowDiagram& d, const Solution& m);  // throws std::invalid_argument
double solution_norm(const Solution& m);

struct ResidualReport {
    std::vector<Mat> segments;  // mu_zeta - lambda I, per segment index
    std::vector<Mat> cond_a;    // B+A - AB- + ab, per x-point in position order
    double total = 0;           // sum of Frobenius norms over segments
    double cond_a_total = 0;    // same for condition (a)
};

ResidualReport moment_residual(const BowDiagram& d, const Solution& m, const std::vector<cd>& lambda = {});

struct PointStability {
    int node = -1;
    double cond_a = 0;
    bool s1 = true;
    bool s2 = true;
    int s1_kernel = 0;  // dimension of the largest B- invariant subspace in Ker A ∩ Ker b
    int s2_span = 0;    // dimension of the B+ span of Im A + Im a
};

struct StabilityReport {
    std::vector<PointStability> points;
    double tol = 1e-6;
    bool ok() const;
};

StabilityReport stability_check(const BowDiagram& d, const Solution& m, double tol = 1e-6);

// Flat parameter vector, nodes in position order; x: A, B-, B+, a, b; arrow: C, D; row-major.
Eigen::VectorXcd pack(const BowDiagram& d, const Solution& m);
Solution unpack(const BowDiagram& d, const Eigen::VectorXcd& z);

// Residual vector (segments then condition (a)), optionally with its complex Jacobian.
Eigen::VectorXcd residual_vector(const BowDiagram& d, const Eigen::VectorXcd& z, const std::vector<cd>& lambda,
                                 Mat* jac = nullptr);

// Gradient of 1/2 |r|^2 with respect to (Re z, Im z).
Eigen::VectorXd objective_gradient(const BowDiagram& d, const Eigen::VectorXcd& z, const std::vector<cd>& lambda);

// Shift scalar for an x-increment: the least positive integer at distance > gap
// from every B spectrum (and its negative).
cd choose_shift(const BowDiagram& d, const Solution& m, double gap = 0.25);

// Extends a solution on d along an increment entry of amount 1.  Arrow arcs need
// lambda = 0.  Throws std::runtime_error if c hits a spectrum.
Solution extend_increment(const BowDiagram& d, const Solution& m, const Move& entry, cd c);

struct SolveOptions {
    std::uint64_t seed = 1;
    int retries = 16;
    int repairs = 8;  // re-polish rounds after landing on an unstable zero
    int max_iters = 400;
    double tol = 1e-8;
    double rank_tol = 1e-6;
    double init_scale = 1.0;
};

struct SolveResult {
    bool converged = false;
    Solution solution;
    double best_residual = 0;
    int attempts = 0;
};

double acceptance_threshold(const Solution& m, double tol);

// Damped Gauss-Newton from a random complex start, retried with fresh seeds.
SolveResult solve_numeric(const BowDiagram& d, const std::vector<cd>& lambda, const SolveOptions& opt);
// Same, with a first attempt started from `warm` (blocks copied where node ids match).
SolveResult solve_numeric(const BowDiagram& d, const std::vector<cd>& lambda, const SolveOptions& opt,
                          const Solution& warm);

// Solution of mu = 0 for a supersymmetric diagram, built by running the decision
// pipeline backwards.  Throws std::invalid_argument for non-supersymmetric input.
SolveResult construct_solution(const BowDiagram& d, const SolveOptions& opt = {});

}  // namespace bowforge
