#pragma once

// Point-tube incidence counting and its two consumers: the empirical check
// of the Fu-Ren inequality |I(P,T)| <= |P||T| delta^{kappa(s+t-1)-5eps},
// and the dyadic multiplicity buckets used to sort tubes by how many points
// of a set they pick up.

#include <cstdint>
#include <string>
#include <vector>

#include "frostlab/geometry.hpp"
#include "frostlab/io.hpp"
#include "frostlab/regularity.hpp"

namespace frostlab {

enum class CountMethod { brute, grid };

struct IncidenceReport {
    std::uint64_t count = 0;
    CountMethod method = CountMethod::brute;
    // Filled by check_fu_ren; zero / vacuously true for plain counts.
    double s = 0.0, t = 0.0, eps = 0.0;
    double kappa = 0.0;
    double bound_rhs = 0.0;
    bool satisfied = true;
    bool vacuous = false;          // bound exponent <= 0, rhs >= |P||T|
    bool premise_verified = false; // both regularity checks passed
    bool premise_P_ok = false;
    bool premise_T_ok = false;
    double measured_C_points = 0.0;
    double measured_C_tubes = 0.0;

    KeyValueBlock to_block() const;
};

// Exact number of pairs (p, T) with p inside T. The grid method rasterizes
// each tube over a uniform bucket grid of the points (cell size
// max(delta, diameter/256)) conservatively, then applies the same exact
// containment test as the brute loop, so the two counts always agree.
IncidenceReport count_incidences(const PointSet& P, const TubeSet& T,
                                 CountMethod method = CountMethod::grid);

// Verifies P as a (delta,s,delta^{-eps})-set and the tube family, through
// its axes in the slope-intercept chart, as a (delta,t,delta^{-eps})-set;
// failures only clear premise_verified, the count and bound are still
// reported. kappa = min{1/2, 1/(s+t-1)}.
IncidenceReport check_fu_ren(const PointSet& P, const TubeSet& T, double s, double t,
                             double eps);

struct BucketReport {
    int j = 0;                 // multiplicities in [2^{j-1}, 2^j)
    TubeSet tubes;
    std::vector<int> covered;  // indices into F of points in some bucket tube
    bool kept = false;         // covered mass reached 2 delta^eps |F|
    bool mass_ok = false;      // empty or covered >= delta^{2 eps} |F|
    std::size_t high_count = 0;  // tubes shared by >= delta^{-tau/2} anchors
    RegularityReport tube_regularity;  // of the dual-chart axis points
};

struct MultiplicityBuckets {
    int L = 0;
    double eps = 0.0, tau = 0.0;
    std::vector<BucketReport> buckets;  // j = 1..L
    std::vector<int> f_bad;             // indices into F not covered by kept buckets
    std::string range_note;
};

// Sort the union of the per-anchor tube families into dyadic multiplicity
// buckets against F. Tubes hitting no point of F fall in no bucket; buckets
// whose covered point mass is below 2 delta^eps |F| are dropped and their
// points land in f_bad. Requires |F| <= delta^{-3}.
MultiplicityBuckets multiplicity_buckets(const std::vector<AnchoredTubes>& per_anchor,
                                         const PointSet& F, double eps, double tau,
                                         double s_report = 1.0);

}  // namespace frostlab
