#pragma once

// Empirical regularity of delta-separated point sets.
//
// Two notions are measured, both as a best (= smallest admissible) constant
// over a fixed tested family of balls:
//
//   ball-normalized:  |P n B(x,r)|_delta <= C r^s |P|_delta
//   Katz-Tao:         |P n B(x,r)|       <= C (r/delta)^s
//
// where |.|_delta counts side-delta grid cells meeting a set. The tested
// family is: dyadic radii r in {delta, 2*delta, ..., 1}, centers running over
// the points of P together with the centers of side-r grid cells meeting P.
// best_C is the maximum ratio over that family; reports state the family.

#include <cstdint>
#include <optional>
#include <vector>

#include "frostlab/geometry.hpp"

namespace frostlab {

struct RegularityReport {
    std::string kind;  // "ball" or "katz_tao"
    double s = 0.0;
    int delta_exp = 0;
    std::size_t n_points = 0;
    std::size_t covering = 0;  // |P|_delta
    double best_C = 0.0;
    Point2 witness_center;
    int witness_radius_exp = 0;  // worst ball has radius 2^-witness_radius_exp

    bool passes(double C) const { return best_C <= C; }
};

RegularityReport verify_delta_set(const PointSet& P, double s);
RegularityReport verify_katz_tao(const PointSet& P, double s);

struct DecompositionReport {
    std::vector<std::vector<int>> parts;  // indices into the input set
    std::size_t N = 0;                    // number of parts
    double H = 0.0;                       // nominal group size 4^{t+1} C |P| delta^t
    double t = 0.0;
    double C = 0.0;
    double eps = 0.0;
    int delta_exp = 0;
    double bound_rhs = 0.0;  // C |P| delta^{t-eps}
    bool bound_ok = false;   // N <= bound_rhs
    double premise_measured_C = 0.0;
    bool premise_ok = false;  // measured ball constant <= C (warning only)
    std::vector<double> part_best_C;  // Katz-Tao constant of each part
};

// Partition P into parts that are Katz-Tao (delta,t,1)-sets over the tested
// family above. Points are processed in Morton order and assigned the first
// color that keeps every tested ball within its capacity floor((r/delta)^t),
// so each part passes verify_katz_tao(t) with best_C <= 1 by construction.
// Throws if H = 4^{t+1} C |P| delta^t < 1 (the premise scaling is violated).
DecompositionReport katz_tao_decompose(const PointSet& P, double t, double C, double eps);

struct ExtractionReport {
    std::vector<int> kept;  // indices into the input set
    double content = 0.0;   // dyadic content estimate of the input
    double kappa = 0.0;
    double s = 0.0;
    // Absolute comparability constant: the subset has >= kappa delta^-s /
    // C_abs points and ball constant <= C_abs / kappa over the tested family.
    static constexpr double C_abs = 64.0;
};

// Greedy dyadic pruning: keep each point (input order) unless some dyadic
// cell would exceed its capacity floor((l(Q)/delta)^s). Requires the content
// estimate of A at exponent s to be at least kappa.
ExtractionReport extract_regular_subset(const PointSet& A, double s, double kappa);

}  // namespace frostlab
